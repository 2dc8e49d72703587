#include "qsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qsim/errors.hpp"

namespace qsim {

using nlohmann::json;

namespace {

// Strict accessor over one JSON object: every key must be consumed.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) throw ConfigError(label("") + " must be a JSON object");
    }

    std::optional<double> number(const std::string& key) {
        const json* v = take(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_number()) throw ConfigError(label(key) + " must be a number");
        const double d = v->get<double>();
        if (!std::isfinite(d)) throw ConfigError(label(key) + " must be finite");
        return d;
    }

    std::optional<std::string> string(const std::string& key) {
        const json* v = take(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_string()) throw ConfigError(label(key) + " must be a string");
        return v->get<std::string>();
    }

    std::optional<bool> boolean(const std::string& key) {
        const json* v = take(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_boolean()) throw ConfigError(label(key) + " must be true or false");
        return v->get<bool>();
    }

    const json* raw(const std::string& key) { return take(key); }

    std::string label(const std::string& key) const {
        if (key.empty()) return where_.empty() ? "configuration" : where_;
        return where_.empty() ? key : where_ + "." + key;
    }

    void finish() const {
        for (const auto& [key, _] : obj_.items()) {
            if (!seen_.contains(key)) throw ConfigError("unknown key '" + label(key) + "'");
        }
    }

private:
    const json* take(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    const json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

template <typename F>
void with_prefix(const std::string& prefix, F&& body) {
    try {
        body();
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ConfigError(prefix + e.what());
    }
}

void read_into(ObjectReader& r, const std::string& key, double& field) {
    if (auto v = r.number(key)) field = *v;
}

SeirParams parse_seir(ObjectReader& r) {
    SeirParams p;
    read_into(r, "omega", p.omega);
    read_into(r, "delta", p.delta);
    const auto beta = r.number("beta");
    const auto r0 = r.number("r0");
    if (beta && r0) throw ConfigError("params.beta and params.r0 are mutually exclusive");
    if (beta) p.beta = *beta;
    if (r0) with_prefix("params.r0: ", [&] { p.beta = r0_to_beta(*r0, p.delta); });
    return p;
}

BasicParams parse_basic(ObjectReader& r) {
    BasicParams p;
    read_into(r, "omega", p.omega);
    read_into(r, "delta", p.delta);
    read_into(r, "psi", p.psi);
    read_into(r, "chi", p.chi);
    read_into(r, "rho", p.rho);
    read_into(r, "k", p.k);
    const auto beta = r.number("beta");
    const auto r0 = r.number("r0");
    if (beta && r0) throw ConfigError("params.beta and params.r0 are mutually exclusive");
    if (beta) p.beta = *beta;
    if (r0) with_prefix("params.r0: ", [&] { p.beta = r0_to_beta(*r0, p.delta); });
    return p;
}

ExtendedParams parse_extended(ObjectReader& r) {
    ExtendedParams p;
    const double delta = r.number("delta").value_or(1.0 / 5.5);
    read_into(r, "omega_s", p.omega_s);
    read_into(r, "omega_a", p.omega_a);
    read_into(r, "lambda_s", p.lambda_s);
    read_into(r, "lambda_a", p.lambda_a);
    read_into(r, "psi_s", p.psi_s);
    read_into(r, "psi_a", p.psi_a);
    read_into(r, "rho", p.rho);
    if (auto fb = r.boolean("feedback_enabled")) p.feedback_enabled = *fb;

    const auto beta_s = r.number("beta_s");
    const auto beta_a = r.number("beta_a");
    const auto r0 = r.number("r0");
    if (r0 && (beta_s || beta_a)) throw ConfigError("params.r0 cannot be combined with params.beta_s/beta_a");
    if (beta_s) p.beta_s = *beta_s;
    if (beta_a) p.beta_a = *beta_a;
    if (r0) with_prefix("params.r0: ", [&] { p.beta_s = p.beta_a = r0_to_beta(*r0, delta); });

    if (auto g = r.number("gamma_s")) {
        p.gamma_s = *g;
    } else {
        with_prefix("params.gamma_s: ", [&] { p.gamma_s = split_infectious_period(delta, p.lambda_s); });
    }
    if (auto g = r.number("gamma_a")) {
        p.gamma_a = *g;
    } else {
        with_prefix("params.gamma_a: ", [&] { p.gamma_a = split_infectious_period(delta, p.lambda_a); });
    }
    return p;
}

std::vector<double> parse_values(const json& v, const std::string& where) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& x : v) {
            if (!x.is_number() || !std::isfinite(x.get<double>())) {
                throw ConfigError(where + " must contain finite numbers only");
            }
            out.push_back(x.get<double>());
        }
    } else if (v.is_object()) {
        ObjectReader r(v, where);
        const auto start = r.number("start");
        const auto stop = r.number("stop");
        const auto count = r.number("count");
        r.finish();
        if (!start || !stop || !count) throw ConfigError(where + " range needs start, stop and count");
        const double n = *count;
        if (n < 1 || n != std::floor(n)) throw ConfigError(where + ".count must be a positive integer");
        const auto steps = static_cast<std::size_t>(n);
        for (std::size_t j = 0; j < steps; ++j) {
            out.push_back(steps == 1 ? *start
                                     : *start + (*stop - *start) * static_cast<double>(j) /
                                                    static_cast<double>(steps - 1));
        }
    } else {
        throw ConfigError(where + " must be an array of numbers or a {start, stop, count} range");
    }
    if (out.empty()) throw ConfigError(where + " must not be empty");
    return out;
}

SweepAxis parse_axis(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    SweepAxis axis;
    auto path = r.string("path");
    if (!path) throw ConfigError(where + ".path is required");
    axis.path = *path;
    const json* values = r.raw("values");
    if (values == nullptr) throw ConfigError(where + ".values is required");
    axis.values = parse_values(*values, where + ".values");
    r.finish();
    return axis;
}

ObservableKind parse_observable(const std::string& name, const std::string& where) {
    try {
        return observable_kind_from_string(name);
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

json params_json(const ModelParams& params) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SeirParams>) {
                return {{"beta", p.beta}, {"omega", p.omega}, {"delta", p.delta}};
            } else if constexpr (std::is_same_v<T, BasicParams>) {
                return {{"beta", p.beta}, {"omega", p.omega}, {"delta", p.delta}, {"psi", p.psi},
                        {"chi", p.chi},   {"rho", p.rho},     {"k", p.k}};
            } else {
                return {{"beta_s", p.beta_s},     {"beta_a", p.beta_a},     {"omega_s", p.omega_s},
                        {"omega_a", p.omega_a},   {"lambda_s", p.lambda_s}, {"lambda_a", p.lambda_a},
                        {"gamma_s", p.gamma_s},   {"gamma_a", p.gamma_a},   {"psi_s", p.psi_s},
                        {"psi_a", p.psi_a},       {"rho", p.rho},           {"feedback_enabled", p.feedback_enabled}};
            }
        },
        params);
}

json axis_json(const SweepAxis& axis) { return {{"path", axis.path}, {"values", axis.values}}; }

}  // namespace

std::vector<ObservableKind> default_observables(ModelKind model) {
    if (model == ModelKind::seir) return {ObservableKind::reported_active};
    if (model == ModelKind::extended) {
        return {ObservableKind::reported_active, ObservableKind::total_infected, ObservableKind::infectious,
                ObservableKind::total_quarantined, ObservableKind::quarantine_pool};
    }
    return {ObservableKind::reported_active, ObservableKind::total_infected, ObservableKind::total_quarantined};
}

RunSpec parse_config(const json& doc) {
    ObjectReader top(doc, "");
    if (auto v = top.raw("schema_version")) {
        if (!v->is_number_integer() || v->get<int>() != kConfigSchemaVersion) {
            throw ConfigError("schema_version must be " + std::to_string(kConfigSchemaVersion));
        }
    }
    const ModelKind model = model_kind_from_string(top.string("model").value_or("basic"));
    const double population = top.number("population_size").value_or(kDefaultPopulation);
    if (!(population >= 1.0)) throw ConfigError("population_size must be at least 1");

    RunSpec spec;
    spec.scenario = ScenarioConfig::defaults(model, population);
    ScenarioConfig& sc = spec.scenario;

    if (const json* p = top.raw("params")) {
        ObjectReader r(*p, "params");
        switch (model) {
            case ModelKind::seir: sc.params = parse_seir(r); break;
            case ModelKind::basic: sc.params = parse_basic(r); break;
            default: sc.params = parse_extended(r); break;
        }
        r.finish();
    } else if (model == ModelKind::extended) {
        // Defaults already satisfy 1/delta = 1/lambda + 1/gamma.
        sc.params = ExtendedParams{};
    }
    with_prefix("params.", [&] { std::visit([](const auto& p) { validate(p); }, sc.params); });

    if (const json* p = top.raw("initial")) {
        ObjectReader r(*p, "initial");
        read_into(r, "exposed", sc.initial.exposed);
        read_into(r, "exposed_a", sc.initial.exposed_a);
        read_into(r, "quarantined", sc.initial.quarantined);
        read_into(r, "quarantined_a", sc.initial.quarantined_a);
        r.finish();
    }
    if (auto s = top.string("quarantine_split")) sc.quarantine_split = quarantine_split_from_string(*s);

    if (const json* p = top.raw("integrator")) {
        ObjectReader r(*p, "integrator");
        if (auto m = r.string("method")) sc.integrator.method = method_from_string(*m);
        read_into(r, "dt", sc.integrator.dt);
        read_into(r, "rtol", sc.integrator.rtol);
        read_into(r, "atol", sc.integrator.atol);
        read_into(r, "t_max", sc.integrator.t_max);
        read_into(r, "output_dt", sc.integrator.output_dt);
        r.finish();
    }

    spec.observables = default_observables(model);
    if (const json* p = top.raw("observables")) {
        if (!p->is_array() || p->empty()) throw ConfigError("observables must be a non-empty array of names");
        spec.observables.clear();
        for (const auto& name : *p) {
            if (!name.is_string()) throw ConfigError("observables must contain strings");
            spec.observables.push_back(parse_observable(name.get<std::string>(), "observables"));
        }
    }

    if (const json* p = top.raw("match")) {
        ObjectReader r(*p, "match");
        if (auto o = r.string("observable")) spec.match_observable = parse_observable(*o, "match.observable");
        r.finish();
    }

    if (const json* p = top.raw("sweep")) {
        ObjectReader r(*p, "sweep");
        SweepSpec sw;
        const json* a1 = r.raw("axis1");
        if (a1 == nullptr) throw ConfigError("sweep.axis1 is required");
        sw.axis1 = parse_axis(*a1, "sweep.axis1");
        if (const json* a2 = r.raw("axis2")) sw.axis2 = parse_axis(*a2, "sweep.axis2");
        if (auto o = r.string("observable")) sw.observable = parse_observable(*o, "sweep.observable");
        r.finish();
        // Paths must resolve for this model.
        ScenarioConfig probe = sc;
        set_parameter(probe, sw.axis1.path, sw.axis1.values.front());
        if (sw.axis2) set_parameter(probe, sw.axis2->path, sw.axis2->values.front());
        spec.sweep = std::move(sw);
    }
    top.finish();

    with_prefix("", [&] { sc.validate(); });
    return spec;
}

RunSpec parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunSpec parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

json to_json(const ScenarioConfig& c) {
    json out;
    out["schema_version"] = kConfigSchemaVersion;
    out["model"] = std::string(to_string(c.model_kind()));
    out["population_size"] = c.population_size;
    out["params"] = params_json(c.params);
    out["initial"] = {{"exposed", c.initial.exposed},
                      {"exposed_a", c.initial.exposed_a},
                      {"quarantined", c.initial.quarantined},
                      {"quarantined_a", c.initial.quarantined_a}};
    out["quarantine_split"] = std::string(to_string(c.quarantine_split));
    out["integrator"] = {{"method", std::string(to_string(c.integrator.method))},
                         {"dt", c.integrator.dt},
                         {"rtol", c.integrator.rtol},
                         {"atol", c.integrator.atol},
                         {"t_max", c.integrator.t_max},
                         {"output_dt", c.integrator.output_dt}};
    return out;
}

json to_json(const RunSpec& spec) {
    json out = to_json(spec.scenario);
    json names = json::array();
    for (auto k : spec.observables) names.push_back(std::string(to_string(k)));
    out["observables"] = names;
    out["match"] = {{"observable", std::string(to_string(spec.match_observable))}};
    if (spec.sweep) {
        json sw = {{"axis1", axis_json(spec.sweep->axis1)},
                   {"observable", std::string(to_string(spec.sweep->observable))}};
        if (spec.sweep->axis2) sw["axis2"] = axis_json(*spec.sweep->axis2);
        out["sweep"] = sw;
    }
    return out;
}

}  // namespace qsim
