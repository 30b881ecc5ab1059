// Command-line front end: one subcommand per pipeline stage.

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fbns/pipeline.hpp"

namespace {

enum ExitCode { ok = 0, validation = 1, runtime = 2, missing_artifact = 3 };

int run(const std::string& command, const std::string& config_path, const fbns::Overrides& overrides) {
    try {
        auto config = fbns::load_run_config(config_path);
        fbns::apply_overrides(config, overrides);
        const fbns::RunLock lock(config.output_dir);
        fbns::Pipeline pipeline(std::move(config));
        const std::map<std::string, std::function<void()>> commands{
            {"ingest", [&] { pipeline.ingest(); }},     {"stats", [&] { pipeline.stats(); }},
            {"plotdata", [&] { pipeline.plotdata(); }}, {"jumps", [&] { pipeline.jumps(); }},
            {"label", [&] { pipeline.label(); }},       {"train", [&] { pipeline.train(); }},
            {"simulate", [&] { pipeline.simulate(); }}, {"pipeline", [&] { pipeline.run_all(); }},
        };
        commands.at(command)();
        for (const auto& w : pipeline.warnings()) {
            fmt::print(stderr, "warning: {}\n", w);
        }
        return ok;
    } catch (const fbns::ConfigError& e) {
        fmt::print(stderr, "{}\n", e.what());
        return validation;
    } catch (const fbns::ParseError& e) {
        fmt::print(stderr, "input error: {}\n", e.what());
        return validation;
    } catch (const fbns::ValidationError& e) {
        fmt::print(stderr, "input error: {}\n", e.what());
        return validation;
    } catch (const fbns::MissingArtifactError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return missing_artifact;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return runtime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuzzy-random BN-S toolkit: ingest bars, label jumps, estimate theta, simulate."};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    double eta = 0.5;
    std::vector<double> thresholds;

    const std::pair<const char*, const char*> subcommands[] = {
        {"ingest", "parse bars and persist the fuzzy price series"},
        {"stats", "descriptive statistics of fuzzy prices and changes"},
        {"plotdata", "tables behind the price, change and realized-volatility figures"},
        {"jumps", "big-jump counts per threshold K"},
        {"label", "windowed dataset with theta labels"},
        {"train", "train the classifier per split and estimate theta"},
        {"simulate", "simulate model paths and correlation tables"},
        {"pipeline", "run every stage in order"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : subcommands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "run directory (overrides the config)");
        sub->add_option("--seed", seed, "global seed (overrides the config)");
        sub->add_option("--eta", eta, "risk attitude in [0, 1] (overrides the config)");
        sub->add_option("--threshold", thresholds, "jump threshold K in percent; repeatable")->take_all();
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : validation;
    }

    for (auto* sub : subs) {
        if (sub->parsed()) {
            fbns::Overrides o;
            if (sub->count("--out")) {
                o.output_dir = out_dir;
            }
            if (sub->count("--seed")) {
                o.seed = seed;
            }
            if (sub->count("--eta")) {
                o.eta = eta;
            }
            o.thresholds = thresholds;
            return run(sub->get_name(), config_path, o);
        }
    }
    return validation;
}
