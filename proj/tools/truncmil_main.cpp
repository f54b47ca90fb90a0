#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "truncmil/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"truncmil - truncated Milstein SDE integration toolkit"};

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    int workers = -1;
    std::string seed;

    app.add_option("--config", config_path, "run configuration file (sectioned key=value)");
    app.add_option("--set", overrides, "override, section.key=value (repeatable)");
    app.add_option("--out", out_dir, "output directory (overrides run.out)");
    app.add_option("--workers", workers, "worker threads (overrides run.workers)");
    app.add_option("--seed", seed, "master seed (overrides run.seed)");

    CLI11_PARSE(app, argc, argv);

    try {
        truncmil::RunConfig config;
        if (!config_path.empty()) config = truncmil::parse_config_file(config_path);
        for (const std::string& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--set expects section.key=value, got \"" + kv +
                                            "\"");
            truncmil::apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (workers >= 0) config.workers = static_cast<std::size_t>(workers);
        if (!seed.empty()) truncmil::apply_override(config, "run.seed", seed);

        truncmil::run(config, std::cout);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "truncmil: " << e.what() << '\n';
        return 1;
    }
}
