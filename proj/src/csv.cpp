#include <cstdio>
#include <fstream>
#include <sstream>

#include "qsim/errors.hpp"
#include "qsim/output.hpp"

namespace qsim {

namespace {

bool needs_quotes(const std::string& s) { return s.find_first_of(",\"\n\r") != std::string::npos; }

std::string quote(const std::string& s) {
    if (!needs_quotes(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
        if (j > 0) out += ',';
        out += quote(cells[j]);
    }
    out += '\n';
}

std::vector<std::vector<std::string>> parse_records(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        any = true;
        if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(cell));
            cell.clear();
        } else if (c == '\n') {
            row.push_back(std::move(cell));
            cell.clear();
            records.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (c != '\r') {
            cell += c;
        }
    }
    if (quoted) throw IoError("unterminated quoted CSV field");
    if (any || !cell.empty() || !row.empty()) {
        row.push_back(std::move(cell));
        records.push_back(std::move(row));
    }
    return records;
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    const std::string& s = rows.at(row).at(col);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw IoError("CSV cell '" + s + "' is not a number");
    }
    if (used != s.size()) throw IoError("CSV cell '" + s + "' is not a number");
    return v;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::string text;
    append_row(text, table.header);
    for (const auto& r : table.rows) append_row(text, r);
    write_text_file(path, text);
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    auto records = parse_records(buf.str());
    if (records.empty()) throw IoError("'" + path.string() + "' is empty");
    CsvTable t;
    t.header = std::move(records.front());
    t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    return t;
}

void write_timeseries_csv(const Trajectory& traj, std::span<const Observable> observables,
                          const std::filesystem::path& path) {
    if (traj.empty()) throw EmptyInputError("trajectory has no samples");
    CsvTable t;
    t.header.push_back("t");
    for (const auto& o : observables) t.header.push_back(o.name());
    t.rows.reserve(traj.size());
    for (std::size_t j = 0; j < traj.size(); ++j) {
        std::vector<std::string> row{format_number(traj.time(j))};
        for (const auto& o : observables) row.push_back(format_number(o(traj.state(j))));
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

void write_grid_csv(const SweepGrid& grid, const std::filesystem::path& path) {
    if (grid.values.empty()) throw EmptyInputError("sweep grid is empty");
    CsvTable t;
    if (grid.axis2) {
        t.header.push_back(grid.axis1.path + "\\" + grid.axis2->path);
        for (double v : grid.axis2->values) t.header.push_back(format_number(v));
    } else {
        t.header = {grid.axis1.path, grid.observable};
    }
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        std::vector<std::string> row{format_number(grid.axis1.values[i])};
        for (std::size_t j = 0; j < grid.cols(); ++j) row.push_back(format_number(grid.at(i, j)));
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

}  // namespace qsim
