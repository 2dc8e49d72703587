#pragma once

// JSON run configuration.
//
// Schema (version 1); every key is optional except where noted and unknown
// keys are rejected:
//
//   {
//     "schema_version": 1,
//     "model": "seir" | "basic" | "extended",            default "basic"
//     "population_size": 500000,
//     "params": { <model parameter fields> },
//         seir:     beta, omega, delta, r0
//         basic:    beta, omega, delta, psi, chi, rho, k, r0
//         extended: beta_s, beta_a, omega_s, omega_a, lambda_s, lambda_a,
//                   gamma_s, gamma_a, psi_s, psi_a, rho, feedback_enabled,
//                   delta, r0
//       "r0" derives beta (both betas for extended) as delta * r0 and may not
//       be combined with an explicit beta. For the extended model "delta"
//       (default 1/5.5) only serves to fill an omitted gamma from
//       1/delta = 1/lambda + 1/gamma.
//     "initial": { exposed, exposed_a, quarantined, quarantined_a },
//       exposed defaults to 2/N (seir, basic) or 1/N per group (extended)
//     "quarantine_split": "sum" | "each",
//     "integrator": { method, dt, rtol, atol, t_max, output_dt },
//     "observables": ["reported_active", ...],   columns written by simulate
//     "match": { "observable": "total_infected" },
//     "sweep": { "axis1": {"path": "beta_s", "values": [..]},
//                "axis2": {...},                  optional
//                "observable": "total_infected" }
//       axis values may also be given as {"start": a, "stop": b, "count": n}
//   }

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsim/analysis.hpp"
#include "qsim/scenarios.hpp"

namespace qsim {

inline constexpr int kConfigSchemaVersion = 1;

struct SweepSpec {
    SweepAxis axis1;
    std::optional<SweepAxis> axis2;
    ObservableKind observable = ObservableKind::total_infected;

    bool operator==(const SweepSpec&) const = default;
};

struct RunSpec {
    ScenarioConfig scenario;
    std::vector<ObservableKind> observables;
    ObservableKind match_observable = ObservableKind::total_infected;
    std::optional<SweepSpec> sweep;

    bool operator==(const RunSpec&) const = default;
};

std::vector<ObservableKind> default_observables(ModelKind model);

/// Throws ConfigError naming the offending key.
RunSpec parse_config(const nlohmann::json& doc);
RunSpec parse_config_text(const std::string& text);
RunSpec parse_config_file(const std::filesystem::path& path);

/// Fully explicit form of the configuration; parse_config(to_json(s)) == s.
nlohmann::json to_json(const RunSpec& spec);
nlohmann::json to_json(const ScenarioConfig& config);

}  // namespace qsim
