#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "hyperlin/experiment.hpp"
#include "hyperlin/numerics.hpp"

namespace hexp = hyperlin::experiment;

namespace {

int run_one(const std::string& name, const std::string& config_path,
            const std::string& out_dir, long seed, int threads, bool seed_set,
            bool threads_set) {
    hexp::KeyValues raw;
    if (!config_path.empty()) raw = hexp::parse_config_file(config_path);
    raw["experiment"] = name;
    if (seed_set) raw["seed"] = std::to_string(seed);
    if (threads_set) raw["threads"] = std::to_string(threads);
    const hexp::ExperimentConfig cfg = hexp::validate_config(raw);
    const hexp::ResultBundle bundle = hexp::run(cfg);
    hexp::write_bundle(bundle, out_dir);
    std::printf("%s: wrote %zu table(s) to %s (%.2fs)\n", name.c_str(),
                bundle.tables.size(), out_dir.c_str(), bundle.wall_seconds);
    for (const auto& [k, v] : bundle.scalars)
        std::printf("  %s = %s\n", k.c_str(), hexp::format_double(v).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for planar hyperbolic linearization"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    long seed = 1;
    int threads = 1;
    app.add_option("--config", config_path, "experiment config file (key = value lines)");
    app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "sampler seed");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads");

    for (const std::string& name : hexp::known_experiments())
        app.add_subcommand(name, "run the '" + name + "' experiment");

    CLI11_PARSE(app, argc, argv);

    const std::string chosen = app.get_subcommands().front()->get_name();
    try {
        return run_one(chosen, config_path, out_dir, seed, threads,
                       seed_opt->count() > 0, threads_opt->count() > 0);
    } catch (const hyperlin::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    }
}
