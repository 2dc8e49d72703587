#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "qsim/errors.hpp"
#include "qsim/scenarios.hpp"

namespace qsim {

namespace {

void require_axis(const SweepAxis& axis) {
    if (axis.values.empty()) throw EmptyInputError("sweep axis '" + axis.path + "' has no values");
    for (double v : axis.values) {
        if (!std::isfinite(v)) throw ConfigError("sweep axis '" + axis.path + "' contains a non-finite value");
    }
}

}  // namespace

bool SweepGrid::ok() const {
    return std::all_of(errors.begin(), errors.end(), [](const std::string& e) { return e.empty(); });
}

std::vector<SweepGrid> sweep(const ScenarioConfig& base, const SweepAxis& axis1,
                             const std::optional<SweepAxis>& axis2, std::span<const ObservableKind> observables,
                             const SweepOptions& options) {
    require_axis(axis1);
    if (axis2) require_axis(*axis2);
    if (observables.empty()) throw EmptyInputError("sweep needs at least one observable");
    // Resolve paths up front so a typo fails the whole sweep, not every cell.
    {
        ScenarioConfig probe = base;
        set_parameter(probe, axis1.path, get_parameter(base, axis1.path));
        if (axis2) set_parameter(probe, axis2->path, get_parameter(base, axis2->path));
    }

    const std::size_t rows = axis1.values.size();
    const std::size_t cols = axis2 ? axis2->values.size() : 1;
    const std::size_t cells = rows * cols;

    std::vector<std::size_t> order = options.order;
    if (order.empty()) {
        order.resize(cells);
        std::iota(order.begin(), order.end(), std::size_t{0});
    } else {
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t j = 0; j < sorted.size(); ++j) {
            if (sorted[j] != j || sorted.size() != cells) {
                throw ConfigError("sweep evaluation order must be a permutation of the cell indices");
            }
        }
    }

    std::vector<std::vector<double>> peaks(observables.size(), std::vector<double>(cells, std::nan("")));
    std::vector<std::string> errors(cells);

    const auto run_cell = [&](std::size_t cell) {
        const std::size_t i = cell / cols;
        const std::size_t j = cell % cols;
        try {
            ScenarioConfig c = base;
            set_parameter(c, axis1.path, axis1.values[i]);
            if (axis2) set_parameter(c, axis2->path, axis2->values[j]);
            const auto found = evaluate_peaks(c, observables);
            for (std::size_t o = 0; o < found.size(); ++o) peaks[o][cell] = found[o].value;
        } catch (const std::exception& e) {
            errors[cell] = e.what();
        }
    };

    unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t k = next++; k < cells; k = next++) run_cell(order[k]);
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::vector<SweepGrid> out;
    for (std::size_t o = 0; o < observables.size(); ++o) {
        SweepGrid g;
        g.axis1 = axis1;
        g.axis2 = axis2;
        g.observable = std::string(to_string(observables[o]));
        g.values = std::move(peaks[o]);
        g.errors = errors;
        out.push_back(std::move(g));
    }
    return out;
}

SweepGrid sweep_1d(const ScenarioConfig& base, const SweepAxis& axis, ObservableKind observable,
                   const SweepOptions& options) {
    const ObservableKind kinds[] = {observable};
    return std::move(sweep(base, axis, std::nullopt, kinds, options).front());
}

SweepGrid sweep_2d(const ScenarioConfig& base, const SweepAxis& axis1, const SweepAxis& axis2,
                   ObservableKind observable, const SweepOptions& options) {
    const ObservableKind kinds[] = {observable};
    return std::move(sweep(base, axis1, axis2, kinds, options).front());
}

}  // namespace qsim
