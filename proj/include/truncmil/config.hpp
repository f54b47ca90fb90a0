#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "truncmil/experiments.hpp"

namespace truncmil {

/// Fully resolved run description. Serializes to sectioned key=value text
/// and parses back losslessly; the manifest embeds exactly this text.
struct RunConfig {
    // [run]
    std::string kind = "convergence"; // convergence|moments|validate-policy|single-path
    std::string out_dir = "out";
    std::uint64_t master_seed = 20170829;
    std::size_t workers = 1;

    // [model] / [policy]
    ModelConfig model;
    PolicyConfig policy;

    // [experiment]
    double t_end = 2.0;
    int reference_exponent = 13;
    std::vector<int> coarse_exponents{10, 9, 8, 7};
    std::size_t samples = 1000;
    std::vector<std::string> schemes{"truncated-milstein"};
    double error_power = 1.0;
    std::string reference = "simulated"; // simulated | exact-gbm
    std::optional<double> theorem_q;

    // [moments]
    std::vector<double> p_list{1.0};
    std::vector<int> moment_exponents{12, 11, 10, 9, 8, 7, 6};
    std::size_t moment_samples = 10000;
    std::string moment_scheme = "truncated-milstein";

    // [single-path]
    int single_path_exponent = 6;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline bool operator==(const ModelConfig& a, const ModelConfig& b) {
    return a.name == b.name && a.a == b.a && a.sigma == b.sigma && a.x0 == b.x0;
}
inline bool operator==(const PolicyConfig& a, const PolicyConfig& b) {
    return a.family == b.family && a.a == b.a && a.epsilon == b.epsilon &&
           a.delta_star == b.delta_star;
}

/// Sectioned key=value text; '#' and ';' start comments. Unknown sections or
/// keys are usage errors, except the reserved [manifest] section, which is
/// skipped so a manifest file re-parses as the config it records.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Applies one "section.key=value" override.
void apply_override(RunConfig& config, const std::string& dotted_key,
                    const std::string& value);

/// Canonical serialization; parse_config_text round-trips it exactly.
std::string serialize_config(const RunConfig& config);

/// Executes config.kind, writes the artifacts plus manifest.ini under
/// config.out_dir, and logs a human-readable summary. Throws on any error;
/// the CLI turns that into a nonzero exit with a one-line reason.
void run(const RunConfig& config, std::ostream& log);

/// ExperimentSpec corresponding to a convergence-kind config.
ExperimentSpec experiment_spec_from(const RunConfig& config);

extern const char* const kVersion;
extern const char* const kGeneratorId;

} // namespace truncmil
