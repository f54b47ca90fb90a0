#include "truncmil/config.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "truncmil/csv.hpp"

namespace truncmil {

const char* const kVersion = "0.1.0";
const char* const kGeneratorId = "philox4x32-10/as241";

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": \"" + v + "\"");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": \"" + v + "\"");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long i = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad unsigned integer for " + key + ": \"" + v +
                                    "\"");
    }
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const std::string& item : split(v, ','))
        out.push_back(static_cast<int>(parse_int(key, item)));
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const std::string& item : split(v, ',')) out.push_back(parse_double(key, item));
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

std::string join_strings(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += v[i];
    }
    return out;
}

void set_key(RunConfig& c, const std::string& section, const std::string& key,
             const std::string& value) {
    const std::string full = section + "." + key;
    if (section == "run") {
        if (key == "kind") c.kind = value;
        else if (key == "out") c.out_dir = value;
        else if (key == "seed") c.master_seed = parse_u64(full, value);
        else if (key == "workers") c.workers = static_cast<std::size_t>(parse_int(full, value));
        else throw std::invalid_argument("config: unknown key " + full);
    } else if (section == "model") {
        if (key == "name") c.model.name = value;
        else if (key == "a") c.model.a = parse_double(full, value);
        else if (key == "sigma") c.model.sigma = parse_double(full, value);
        else if (key == "x0") c.model.x0 = parse_double(full, value);
        else throw std::invalid_argument("config: unknown key " + full);
    } else if (section == "policy") {
        if (key == "family") c.policy.family = value;
        else if (key == "a") c.policy.a = parse_double(full, value);
        else if (key == "epsilon") c.policy.epsilon = parse_double(full, value);
        else if (key == "delta_star") c.policy.delta_star = parse_double(full, value);
        else throw std::invalid_argument("config: unknown key " + full);
    } else if (section == "experiment") {
        if (key == "t_end") c.t_end = parse_double(full, value);
        else if (key == "reference_exponent")
            c.reference_exponent = static_cast<int>(parse_int(full, value));
        else if (key == "coarse_exponents") c.coarse_exponents = parse_int_list(full, value);
        else if (key == "samples") c.samples = static_cast<std::size_t>(parse_int(full, value));
        else if (key == "schemes") c.schemes = split(value, ',');
        else if (key == "error_power") c.error_power = parse_double(full, value);
        else if (key == "reference") c.reference = value;
        else if (key == "theorem_q") {
            if (value.empty()) c.theorem_q.reset();
            else c.theorem_q = parse_double(full, value);
        } else throw std::invalid_argument("config: unknown key " + full);
    } else if (section == "moments") {
        if (key == "p_list") c.p_list = parse_double_list(full, value);
        else if (key == "delta_exponents") c.moment_exponents = parse_int_list(full, value);
        else if (key == "samples")
            c.moment_samples = static_cast<std::size_t>(parse_int(full, value));
        else if (key == "scheme") c.moment_scheme = value;
        else throw std::invalid_argument("config: unknown key " + full);
    } else if (section == "single-path") {
        if (key == "exponent") c.single_path_exponent = static_cast<int>(parse_int(full, value));
        else throw std::invalid_argument("config: unknown key " + full);
    } else {
        throw std::invalid_argument("config: unknown section [" + section + "]");
    }
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    std::istringstream is(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: bad section header on line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value on line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section == "manifest") continue; // reserved; written, never read
        if (section.empty())
            throw std::invalid_argument("config: key \"" + key + "\" outside any section");
        set_key(c, section, key, value);
    }
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void apply_override(RunConfig& config, const std::string& dotted_key,
                    const std::string& value) {
    const auto dot = dotted_key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
        throw std::invalid_argument("override must look like section.key, got \"" +
                                    dotted_key + "\"");
    set_key(config, dotted_key.substr(0, dot), dotted_key.substr(dot + 1), value);
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[run]\n";
    os << "kind = " << c.kind << '\n';
    os << "out = " << c.out_dir << '\n';
    os << "seed = " << c.master_seed << '\n';
    os << "workers = " << c.workers << '\n';
    os << "\n[model]\n";
    os << "name = " << c.model.name << '\n';
    os << "a = " << format_double(c.model.a) << '\n';
    os << "sigma = " << format_double(c.model.sigma) << '\n';
    os << "x0 = " << format_double(c.model.x0) << '\n';
    os << "\n[policy]\n";
    os << "family = " << c.policy.family << '\n';
    os << "a = " << format_double(c.policy.a) << '\n';
    os << "epsilon = " << format_double(c.policy.epsilon) << '\n';
    os << "delta_star = " << format_double(c.policy.delta_star) << '\n';
    os << "\n[experiment]\n";
    os << "t_end = " << format_double(c.t_end) << '\n';
    os << "reference_exponent = " << c.reference_exponent << '\n';
    os << "coarse_exponents = " << join_ints(c.coarse_exponents) << '\n';
    os << "samples = " << c.samples << '\n';
    os << "schemes = " << join_strings(c.schemes) << '\n';
    os << "error_power = " << format_double(c.error_power) << '\n';
    os << "reference = " << c.reference << '\n';
    if (c.theorem_q) os << "theorem_q = " << format_double(*c.theorem_q) << '\n';
    os << "\n[moments]\n";
    os << "p_list = " << join_doubles(c.p_list) << '\n';
    os << "delta_exponents = " << join_ints(c.moment_exponents) << '\n';
    os << "samples = " << c.moment_samples << '\n';
    os << "scheme = " << c.moment_scheme << '\n';
    os << "\n[single-path]\n";
    os << "exponent = " << c.single_path_exponent << '\n';
    return os.str();
}

ExperimentSpec experiment_spec_from(const RunConfig& c) {
    ExperimentSpec spec;
    spec.model = c.model;
    spec.policy = c.policy;
    spec.schemes.clear();
    for (const std::string& name : c.schemes) spec.schemes.push_back(scheme_from_name(name));
    spec.t_end = c.t_end;
    spec.reference_exponent = c.reference_exponent;
    spec.coarse_exponents = c.coarse_exponents;
    spec.samples = c.samples;
    spec.master_seed = c.master_seed;
    spec.error_power = c.error_power;
    if (c.reference == "simulated") spec.reference = ReferenceKind::Simulated;
    else if (c.reference == "exact-gbm") spec.reference = ReferenceKind::ExactGbm;
    else
        throw std::invalid_argument("config: experiment.reference must be simulated or "
                                    "exact-gbm, got \"" + c.reference + "\"");
    spec.theorem_q = c.theorem_q;
    spec.workers = c.workers;
    return spec;
}

namespace {

struct Artifact {
    std::string name;
    std::string bytes;
};

void write_artifacts(const RunConfig& config, const std::vector<Artifact>& artifacts,
                     std::ostream& log) {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    for (const Artifact& a : artifacts) {
        const fs::path path = fs::path(config.out_dir) / a.name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << a.bytes;
        log << "wrote " << path.string() << " (" << a.bytes.size() << " bytes)\n";
    }

    std::ostringstream manifest;
    manifest << serialize_config(config);
    manifest << "\n[manifest]\n";
    manifest << "version = " << kVersion << '\n';
    manifest << "generator = " << kGeneratorId << '\n';
    const auto now = std::chrono::system_clock::now();
    manifest << "created = "
             << std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()
             << '\n';
    for (const Artifact& a : artifacts)
        manifest << "checksum." << a.name << " = " << fnv1a64_hex(a.bytes) << '\n';

    const fs::path mpath = fs::path(config.out_dir) / "manifest.ini";
    std::ofstream mout(mpath, std::ios::binary);
    if (!mout) throw std::runtime_error("cannot write " + mpath.string());
    mout << manifest.str();
    log << "wrote " << mpath.string() << '\n';
}

void run_convergence(const RunConfig& config, std::ostream& log) {
    const ConvergenceReport report = strong_error(experiment_spec_from(config));
    std::ostringstream errors, slopes;
    write_errors_csv(errors, report);
    write_slopes_csv(slopes, report);
    write_artifacts(config, {{"errors.csv", errors.str()}, {"slopes.csv", slopes.str()}}, log);
    for (const SlopeFit& fit : report.fits) {
        log << scheme_name(fit.scheme) << ": ";
        if (fit.degenerate) log << "slope degenerate (zero errors or too few points)\n";
        else
            log << "slope " << format_double(fit.slope) << " +/- "
                << format_double(fit.half_width) << '\n';
    }
    log << report.guard.message << '\n';
}

void run_moments(const RunConfig& config, std::ostream& log) {
    const MomentTable table = moment_sweep(
        config.model, scheme_from_name(config.moment_scheme), config.policy, config.t_end,
        config.p_list, config.moment_exponents, config.moment_samples, config.master_seed,
        config.workers);
    std::ostringstream moments, trend;
    write_moments_csv(moments, table);
    write_moment_trend_csv(trend, table);
    write_artifacts(config,
                    {{"moments.csv", moments.str()}, {"moments_trend.csv", trend.str()}}, log);
    for (const MomentTrend& t : table.trends)
        log << "p=" << format_double(t.p) << ": trend slope " << format_double(t.slope)
            << '\n';
}

void run_single_path(const RunConfig& config, std::ostream& log) {
    const SdeSystem system = make_model(config.model);
    const TruncationPolicy policy = make_policy(config.policy);
    const PathGrid grid(config.t_end,
                        steps_for_exponent(config.t_end, config.single_path_exponent));
    const BrownianPath path =
        BrownianPath::sample(grid, system.noise_dim, config.master_seed, 0);

    std::vector<Trajectory> trajectories;
    for (const std::string& name : config.schemes) {
        const Scheme scheme = scheme_from_name(name);
        std::optional<TruncationContext> ctx;
        if (scheme_uses_truncation(scheme)) {
            validate_policy(policy);
            ctx.emplace(policy, grid.step());
        }
        trajectories.push_back(simulate(system, scheme, grid, path, ctx ? &*ctx : nullptr));
        if (trajectories.back().blown_up())
            log << name << ": blew up at step " << *trajectories.back().blow_up_index << '\n';
    }
    std::ostringstream csv;
    write_trajectory_csv(csv, trajectories);
    write_artifacts(config, {{"trajectory.csv", csv.str()}}, log);
}

} // namespace

void run(const RunConfig& config, std::ostream& log) {
    if (config.kind == "validate-policy") {
        const TruncationPolicy policy = make_policy(config.policy);
        const PolicyValidation report = validate_policy(policy); // throws when rejected
        log << policy.label << '\n' << report.summary() << '\n';
        return;
    }
    if (config.kind == "convergence") return run_convergence(config, log);
    if (config.kind == "moments") return run_moments(config, log);
    if (config.kind == "single-path") return run_single_path(config, log);
    throw std::invalid_argument(
        "config: run.kind must be one of convergence, moments, validate-policy, single-path; "
        "got \"" + config.kind + "\"");
}

} // namespace truncmil
