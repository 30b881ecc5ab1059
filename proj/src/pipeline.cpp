#include "fbns/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "fbns/numeric.hpp"

namespace fbns {

namespace {

std::string join_lines(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) {
        out += "\n  - " + s;
    }
    return out;
}

// Runs `f`, turning any exception into a violation prefixed with `where`.
template <typename F>
void collect(std::vector<std::string>& out, const std::string& where, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        out.push_back(where + ": " + e.what());
    }
}

const std::set<std::string> known_keys{"format_version", "seed",     "output_dir", "input",      "eta",
                                       "session",        "plots",    "thresholds", "labeling",   "splits",
                                       "network",        "theta_rule", "model",    "simulation"};

constexpr PlotKind all_plots[] = {PlotKind::monthly_box, PlotKind::price_histogram, PlotKind::pct_change_histogram,
                                  PlotKind::rv_heatmap, PlotKind::rv_line};

std::uint64_t training_seed(std::uint64_t global) { return splitmix64(global ^ splitmix64(seeds::training)); }

Json simulation_to_json(const SimulationConfig& s) {
    return Json{{"variant", to_string(s.variant)},
                {"horizon", s.horizon},
                {"dt", s.dt},
                {"n_paths", s.n_paths},
                {"use_estimated_theta", s.use_estimated_theta},
                {"s0", to_json(s.s0)},
                {"correlation",
                 {{"s", s.corr_s},
                  {"t", s.corr_t},
                  {"n_paths", s.corr_paths},
                  {"bootstrap_resamples", s.bootstrap_resamples},
                  {"functional", to_string(s.functional)}}}};
}

template <typename T>
void get_opt(const Json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw std::domain_error(fmt::format("'{}' has the wrong type", key));
        }
    }
}

SimulationConfig simulation_from_json(const Json& j) {
    SimulationConfig s;
    if (!j.is_object()) {
        throw std::domain_error("expected an object");
    }
    std::string variant;
    get_opt(j, "variant", variant);
    if (!variant.empty()) {
        s.variant = model_variant_from_string(variant);
    }
    get_opt(j, "horizon", s.horizon);
    get_opt(j, "dt", s.dt);
    get_opt(j, "n_paths", s.n_paths);
    get_opt(j, "use_estimated_theta", s.use_estimated_theta);
    if (j.contains("s0")) {
        s.s0 = tfn_from_json(j["s0"]);
    }
    if (j.contains("correlation")) {
        const Json& c = j["correlation"];
        get_opt(c, "s", s.corr_s);
        get_opt(c, "t", s.corr_t);
        get_opt(c, "n_paths", s.corr_paths);
        get_opt(c, "bootstrap_resamples", s.bootstrap_resamples);
        std::string f;
        get_opt(c, "functional", f);
        if (!f.empty()) {
            s.functional = jump_functional_from_string(f);
        }
    }
    return s;
}

std::string describe_stats_row(const std::string& name, const DescriptiveStats& s) {
    return fmt::format("{:<22}{:>14.6f}{:>14.6f}{:>14.6f}{:>14.6f}{:>12.4f}{:>12.4f}\n", name, s.mean, s.median,
                       s.minimum, s.maximum, s.skewness, s.kurtosis);
}

std::string table_to_string(const PlotTable& t) {
    std::ostringstream ss;
    write_table(ss, t);
    return ss.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_lines(violations)), violations_(std::move(violations)) {}

MissingArtifactError::MissingArtifactError(const std::string& artifact, const std::string& producer)
    : std::runtime_error(fmt::format("missing artifact '{}': run the '{}' subcommand first", artifact, producer)),
      producer_(producer) {}

std::vector<std::string> RunConfig::violations() const {
    std::vector<std::string> v;
    if (bars_path.empty()) {
        v.push_back("input.bars: path is required");
    } else if (!std::filesystem::is_regular_file(bars_path)) {
        v.push_back("input.bars: file not found: " + bars_path.string());
    }
    if (bar_minutes <= 0) {
        v.push_back("input.bar_minutes: must be positive");
    }
    if (!(eta >= 0.0 && eta <= 1.0)) {
        v.push_back("eta: must lie in [0, 1]");
    }
    if (session.cutoff_minutes < 0 || session.cutoff_minutes >= 1440) {
        v.push_back("session.cutoff_minutes: must lie in [0, 1440)");
    }
    if (plots.bins == 0) {
        v.push_back("plots.bins: must be positive");
    }
    if (!(plots.rv_threshold > 0.0)) {
        v.push_back("plots.rv_threshold: must be positive");
    }
    if (thresholds.empty()) {
        v.push_back("thresholds: at least one K is required");
    }
    for (double K : thresholds) {
        if (!(K > 0.0) || !std::isfinite(K)) {
            v.push_back(fmt::format("thresholds: K = {} must be positive", K));
        }
    }
    collect(v, "labeling", [&] { labeling.validate(); });
    if (splits.empty()) {
        v.push_back("splits: at least one train/test split is required");
    }
    std::set<std::string> names;
    for (const auto& s : splits) {
        if (s.name.empty()) {
            v.push_back("splits: every split needs a name");
        } else if (!names.insert(s.name).second) {
            v.push_back("splits: duplicate name '" + s.name + "'");
        }
        // Bounds against the series are checked once the bars are loaded.
        collect(v, "splits." + s.name, [&] { s.validate(std::numeric_limits<std::size_t>::max()); });
    }
    collect(v, "network", [&] { network.validate(); });
    collect(v, "model", [&] { model.validate(); });
    const auto& sim = simulation;
    collect(v, "simulation", [&] { (void)make_grid(sim.horizon, sim.dt); });
    if (sim.n_paths == 0) {
        v.push_back("simulation.n_paths: must be positive");
    }
    if (!sim.use_estimated_theta && !model.theta.covers(sim.horizon)) {
        v.push_back("model.theta: schedule does not cover the simulation horizon");
    }
    if (!(sim.s0.lower() > 0.0)) {
        v.push_back("simulation.s0: must be strictly positive");
    }
    if (!(sim.corr_s > 0.0)) {
        v.push_back("simulation.correlation.s: must be positive");
    }
    if (sim.corr_t.empty()) {
        v.push_back("simulation.correlation.t: at least one t is required");
    }
    for (double t : sim.corr_t) {
        if (!(t > sim.corr_s)) {
            v.push_back(fmt::format("simulation.correlation.t: t = {} must exceed s", t));
        }
        if (!sim.use_estimated_theta && !model.theta.covers(t)) {
            v.push_back(fmt::format("model.theta: schedule does not cover t = {}", t));
        }
        collect(v, "simulation.correlation", [&] { (void)make_grid(t, sim.dt); });
    }
    if (sim.corr_paths < 100) {
        v.push_back("simulation.correlation.n_paths: at least 100 paths are required");
    }
    if (sim.bootstrap_resamples < 2) {
        v.push_back("simulation.correlation.bootstrap_resamples: at least 2 are required");
    }
    return v;
}

RunConfig parse_run_config(const Json& j, const std::filesystem::path& config_dir) {
    std::vector<std::string> v;
    RunConfig c;
    c.config_dir = config_dir;
    if (!j.is_object()) {
        throw ConfigError({"configuration must be a JSON object"});
    }
    for (const auto& [key, value] : j.items()) {
        if (!known_keys.count(key)) {
            v.push_back("unknown key '" + key + "'");
        }
    }
    collect(v, "format_version", [&] {
        const int version = j.at("format_version").get<int>();
        if (version != config_format_version) {
            throw std::domain_error(fmt::format("unsupported version {} (expected {})", version,
                                                config_format_version));
        }
    });
    collect(v, "seed", [&] { get_opt(j, "seed", c.seed); });
    collect(v, "output_dir", [&] {
        std::string out = c.output_dir.string();
        get_opt(j, "output_dir", out);
        c.output_dir = config_dir / out;
    });
    collect(v, "input", [&] {
        const Json& in = j.at("input");
        c.bars_path = config_dir / in.at("bars").get<std::string>();
        get_opt(in, "bar_minutes", c.bar_minutes);
        std::string delim;
        get_opt(in, "delimiter", delim);
        if (delim.size() > 1) {
            throw std::domain_error("delimiter must be a single character");
        }
        if (!delim.empty()) {
            c.bar_format.delimiter = delim[0];
        }
    });
    collect(v, "eta", [&] { get_opt(j, "eta", c.eta); });
    collect(v, "session", [&] {
        if (j.contains("session")) {
            get_opt(j["session"], "cutoff_minutes", c.session.cutoff_minutes);
        }
    });
    collect(v, "plots", [&] {
        if (j.contains("plots")) {
            get_opt(j["plots"], "bins", c.plots.bins);
            get_opt(j["plots"], "rv_threshold", c.plots.rv_threshold);
        }
    });
    c.plots.session = c.session;
    collect(v, "thresholds", [&] { get_opt(j, "thresholds", c.thresholds); });
    collect(v, "labeling", [&] {
        if (j.contains("labeling")) {
            c.labeling = labeling_from_json(j["labeling"]);
        }
    });
    collect(v, "splits", [&] {
        if (j.contains("splits")) {
            for (const auto& s : j["splits"]) {
                c.splits.push_back(split_from_json(s));
            }
        }
    });
    collect(v, "network", [&] {
        if (j.contains("network")) {
            if (j["network"].contains("seed")) {
                throw std::domain_error("the training seed is derived from the global seed; remove 'seed'");
            }
            c.network = net_config_from_json(j["network"]);
        }
    });
    c.network.seed = training_seed(c.seed);
    collect(v, "theta_rule", [&] {
        std::string rule;
        get_opt(j, "theta_rule", rule);
        if (!rule.empty()) {
            c.theta_rule = theta_rule_from_string(rule);
        }
    });
    collect(v, "model", [&] {
        if (j.contains("model")) {
            c.model = model_params_from_json(j["model"]);
        }
    });
    collect(v, "simulation", [&] {
        if (j.contains("simulation")) {
            c.simulation = simulation_from_json(j["simulation"]);
        }
    });
    // Semantic checks for every section that parsed; a section that failed to
    // parse holds defaults, so its checks would only add noise.
    auto section = [](const std::string& msg) { return msg.substr(0, msg.find_first_of(".:")); };
    std::set<std::string> unparsed;
    for (const auto& msg : v) {
        unparsed.insert(section(msg));
    }
    for (auto& msg : c.violations()) {
        if (!unparsed.count(section(msg))) {
            v.push_back(std::move(msg));
        }
    }
    if (!v.empty()) {
        throw ConfigError(std::move(v));
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
    } catch (const std::runtime_error& e) {
        throw ConfigError({e.what()});
    }
    return parse_run_config(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

Json run_config_to_json(const RunConfig& c) {
    Json splits = Json::array();
    for (const auto& s : c.splits) {
        splits.push_back(to_json(s));
    }
    Json network = to_json(c.network);
    network.erase("seed");
    return Json{{"format_version", config_format_version},
                {"seed", c.seed},
                {"output_dir", std::filesystem::relative(c.output_dir, c.config_dir).string()},
                {"input",
                 {{"bars", std::filesystem::relative(c.bars_path, c.config_dir).string()},
                  {"bar_minutes", c.bar_minutes},
                  {"delimiter", std::string(1, c.bar_format.delimiter)}}},
                {"eta", c.eta},
                {"session", {{"cutoff_minutes", c.session.cutoff_minutes}}},
                {"plots", {{"bins", c.plots.bins}, {"rv_threshold", c.plots.rv_threshold}}},
                {"thresholds", c.thresholds},
                {"labeling", to_json(c.labeling)},
                {"splits", splits},
                {"network", network},
                {"theta_rule", to_string(c.theta_rule)},
                {"model", to_json(c.model)},
                {"simulation", simulation_to_json(c.simulation)}};
}

void apply_overrides(RunConfig& config, const Overrides& o) {
    if (o.output_dir) {
        config.output_dir = *o.output_dir;
    }
    if (o.seed) {
        config.seed = *o.seed;
        config.network.seed = training_seed(config.seed);
    }
    if (o.eta) {
        config.eta = *o.eta;
    }
    if (!o.thresholds.empty()) {
        config.thresholds = o.thresholds;
    }
    auto v = config.violations();
    if (!v.empty()) {
        throw ConfigError(std::move(v));
    }
}

RunLock::RunLock(const std::filesystem::path& dir) : path_(dir / "run.lock") {
    std::filesystem::create_directories(dir);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        const int err = errno;
        throw std::runtime_error(err == EEXIST ? fmt::format("run directory is locked by another writer ({})",
                                                             path_.string())
                                               : fmt::format("cannot create {}: {}", path_.string(),
                                                             std::strerror(err)));
    }
    ::close(fd);
}

RunLock::~RunLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
}

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {
    std::filesystem::create_directories(config_.output_dir);
    const auto mpath = config_.output_dir / "manifest.json";
    if (std::filesystem::exists(mpath)) {
        try {
            manifest_ = Json::parse(read_file(mpath));
        } catch (const nlohmann::json::exception&) {
            manifest_ = Json::object();
        }
    }
    if (!manifest_.is_object()) {
        manifest_ = Json::object();
    }
    Json cfg = run_config_to_json(config_);
    // The seed and output location are recorded separately so that seed-only
    // reruns differ only in seed-derived entries.
    cfg.erase("seed");
    cfg.erase("output_dir");
    manifest_["format_version"] = config_format_version;
    manifest_["tool_version"] = tool_version;
    manifest_["seed"] = config_.seed;
    manifest_["inputs"] = {{"config", sha256_hex(cfg.dump())}, {"bars", sha256_file(config_.bars_path)}};
    if (!manifest_.contains("artifacts")) {
        manifest_["artifacts"] = Json::object();
    }
}

std::filesystem::path Pipeline::artifact_path(const std::string& name) const { return config_.output_dir / name; }

void Pipeline::write_artifact(const std::string& name, const std::string& contents, const std::string& producer,
                              const std::vector<std::string>& depends_on) {
    write_file(artifact_path(name), contents);
    Json deps = Json::object();
    for (const auto& d : depends_on) {
        if (d == "seed") {
            deps["seed"] = config_.seed;
        } else if (d == "config" || d == "bars") {
            deps[d] = manifest_["inputs"][d];
        } else {
            deps[d] = manifest_["artifacts"].at(d).at("sha256");
        }
    }
    manifest_["artifacts"][name] = {{"producer", producer}, {"sha256", sha256_hex(contents)}, {"depends_on", deps}};
    save_manifest();
}

void Pipeline::save_manifest() { write_file(config_.output_dir / "manifest.json", manifest_.dump(2) + "\n"); }

std::string Pipeline::require(const std::string& name, const std::string& producer) const {
    const auto path = artifact_path(name);
    if (!std::filesystem::exists(path) || !manifest_["artifacts"].contains(name)) {
        throw MissingArtifactError(name, producer);
    }
    // An artifact built from a different bars file is as good as missing.
    const Json& deps = manifest_["artifacts"][name]["depends_on"];
    if (deps.contains("bars") && deps["bars"] != manifest_["inputs"]["bars"]) {
        throw MissingArtifactError(name, producer);
    }
    std::string contents = read_file(path);
    if (sha256_hex(contents) != manifest_["artifacts"][name]["sha256"].get<std::string>()) {
        throw std::runtime_error(
            fmt::format("artifact '{}' does not match its manifest digest; rerun '{}'", name, producer));
    }
    return contents;
}

FuzzyBarSeries Pipeline::load_series() const {
    std::istringstream in(require("series.csv", "ingest"));
    return to_fuzzy_series(parse_bars(in), RiskAttitude(config_.eta), config_.bar_minutes);
}

void Pipeline::ingest() {
    std::ifstream in(config_.bars_path);
    if (!in) {
        throw std::runtime_error("cannot open " + config_.bars_path.string());
    }
    auto bars = parse_bars(in, config_.bar_format);
    if (bars.size() < 2) {
        throw ValidationError(1, "at least two bars are required");
    }
    std::vector<std::string> v;
    for (const auto& s : config_.splits) {
        collect(v, "splits." + s.name, [&] { s.validate(bars.size()); });
    }
    if (!v.empty()) {
        throw ConfigError(std::move(v));
    }
    const auto series = to_fuzzy_series(std::move(bars), RiskAttitude(config_.eta), config_.bar_minutes);
    std::ostringstream out;
    out << "timestamp,open,high,low,close,volume,fuzzy_l,fuzzy_m,fuzzy_u,expectation,pct_change,gap\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const Bar& b = series.bars[k];
        const auto& f = series.fuzzy_prices[k];
        out << format_timestamp(b.timestamp) << ',' << format_double(b.open) << ',' << format_double(b.high) << ','
            << format_double(b.low) << ',' << format_double(b.close) << ','
            << (b.volume ? format_double(*b.volume) : "") << ',' << format_double(f.lower()) << ','
            << format_double(f.core()) << ',' << format_double(f.upper()) << ','
            << format_double(series.expectations[k]) << ','
            << (k == 0 ? std::string() : format_double(series.pct_changes[k])) << ','
            << (series.gap_flags[k] ? 1 : 0) << '\n';
    }
    write_artifact("series.csv", out.str(), "ingest", {"bars", "config"});
}

void Pipeline::stats() {
    const auto series = load_series();
    const auto price = descriptive_stats(series.expectations);
    const auto change = descriptive_stats(series.changes());
    const auto gaps = std::count(series.gap_flags.begin(), series.gap_flags.end(), true);
    const Json j{{"n_bars", series.size()},
                 {"eta", config_.eta},
                 {"gaps", gaps},
                 {"fuzzy_price", to_json(price)},
                 {"fuzzy_price_change_pct", to_json(change)}};
    write_artifact("stats.json", j.dump(2) + "\n", "stats", {"series.csv", "config"});
    std::string text = fmt::format("eta = {}\n{:<22}{:>14}{:>14}{:>14}{:>14}{:>12}{:>12}\n", format_double(config_.eta),
                                   "", "mean", "median", "min", "max", "skewness", "kurtosis");
    text += describe_stats_row("fuzzy price", price);
    text += describe_stats_row("fuzzy price change %", change);
    write_artifact("stats.txt", text, "stats", {"series.csv", "config"});
}

void Pipeline::plotdata() {
    const auto series = load_series();
    const auto rv = realized_volatility(series, config_.plots.session);
    for (const auto& w : rv.warnings) {
        warnings_.push_back(w);
    }
    for (PlotKind kind : all_plots) {
        const bool uses_rv = kind == PlotKind::rv_heatmap || kind == PlotKind::rv_line;
        const auto table = uses_rv ? emit_plot_data(rv, kind, config_.plots) : emit_plot_data(series, kind, config_.plots);
        write_artifact(fmt::format("plot_{}.csv", plot_kind_name(kind)), table_to_string(table), "plotdata",
                       {"series.csv", "config"});
    }
}

void Pipeline::jumps() {
    const auto series = load_series();
    const auto table = jump_count_table(series.expectations, config_.thresholds, config_.splits,
                                        config_.labeling.direction);
    std::ostringstream out;
    write_jump_count_table(out, table);
    write_artifact("jump_counts.csv", out.str(), "jumps", {"series.csv", "config"});
}

void Pipeline::label() {
    const auto series = load_series();
    for (const auto& s : config_.splits) {
        s.validate(series.size());
    }
    const auto ds = build_dataset(series, config_.labeling);
    std::ostringstream out;
    write_dataset_csv(out, ds);
    write_artifact("dataset.csv", out.str(), "label", {"series.csv", "config"});
    write_artifact("dataset.json", dataset_metadata(ds, config_.splits).dump(2) + "\n", "label",
                   {"series.csv", "config"});
}

void Pipeline::train() {
    std::istringstream in(require("dataset.csv", "label"));
    const auto ds = read_dataset_csv(in, config_.labeling);
    Json theta_doc{{"rule", to_string(config_.theta_rule)}, {"splits", Json::object()}};
    std::optional<ThetaEstimate> first;
    for (const auto& spec : config_.splits) {
        const auto [train_rows, test_rows] = split(ds, spec);
        if (train_rows.size() < 2) {
            throw std::runtime_error(fmt::format("split '{}' has fewer than two training rows", spec.name));
        }
        if (test_rows.size() == 0) {
            throw std::runtime_error(fmt::format("split '{}' has no test rows", spec.name));
        }
        const auto model = fbns::train(train_rows, config_.network);
        const auto preds = predict(model, test_rows.rows);
        const auto labels = predicted_labels(preds);
        const auto report = classification_report(labels, test_rows.labels);
        const auto estimate = estimate_theta(report, config_.theta_rule);
        if (!first) {
            first = estimate;
        }
        const std::vector<std::string> deps{"dataset.csv", "config", "seed"};
        write_artifact(fmt::format("model_{}.json", spec.name), to_json(model).dump(2) + "\n", "train", deps);
        Json rj = to_json(report);
        rj["split"] = spec.name;
        rj["K"] = config_.labeling.K;
        rj["degenerate_model"] = model.degenerate;
        rj["dropped_features"] = model.norm.dropped;
        write_artifact(fmt::format("report_{}.json", spec.name), rj.dump(2) + "\n", "train", deps);
        write_artifact(fmt::format("report_{}.txt", spec.name),
                       format_report(report, fmt::format("KS={}", format_double(config_.labeling.K))), "train",
                       deps);
        Json per_window = Json::array();
        for (std::size_t r = 0; r < test_rows.size(); ++r) {
            per_window.push_back({{"row_start", test_rows.row_start[r]},
                                  {"probability", preds[r].probability},
                                  {"theta", preds[r].label}});
        }
        Json entry = to_json(estimate);
        entry["test_windows"] = per_window;
        theta_doc["splits"][spec.name] = entry;
    }
    theta_doc["theta"] = first->theta;
    theta_doc["theta_split"] = config_.splits.front().name;
    write_artifact("theta.json", theta_doc.dump(2) + "\n", "train", {"dataset.csv", "config", "seed"});
}

void Pipeline::simulate() {
    ModelParams params = config_.model;
    std::vector<std::string> deps{"config", "seed"};
    if (config_.simulation.use_estimated_theta) {
        const Json theta = Json::parse(require("theta.json", "train"));
        params.theta = ThetaSchedule::constant(theta.at("theta").get<double>());
        deps.push_back("theta.json");
    }
    params.validate();
    const auto& sim = config_.simulation;
    const RngStream root(config_.seed, seeds::simulation);

    std::ostringstream prices;
    prices << "path,t,s_l,s_m,s_u\n";
    Json all_paths = Json::array();
    for (std::size_t i = 0; i < sim.n_paths; ++i) {
        const RngStream rng = root.derive(i);
        FuzzySimulatedPath p;
        if (sim.variant == ModelVariant::classic) {
            const auto c = simulate_classic(params, sim.horizon, sim.dt, rng);
            p.t = c.t;
            for (std::size_t k = 0; k < c.t.size(); ++k) {
                p.x.push_back(TriangularFuzzyNumber::crisp(c.x[k]));
                p.sigma_sq.push_back(TriangularFuzzyNumber::crisp(c.sigma_sq[k]));
            }
            p.return_jumps = c.jumps;
            p.variance_jumps = c.jumps;
        } else if (sim.variant == ModelVariant::fuzzy) {
            p = simulate_fuzzy(params, sim.horizon, sim.dt, rng);
        } else {
            p = simulate_generalized(params, sim.horizon, sim.dt, rng);
        }
        std::ostringstream csv;
        write_path_csv(csv, p);
        write_artifact(fmt::format("path_{}.csv", i), csv.str(), "simulate", deps);
        all_paths.push_back(to_json(p));
        const auto s = price_path(p, sim.s0);
        for (std::size_t k = 0; k < s.size(); ++k) {
            prices << i << ',' << format_double(p.t[k]) << ',' << format_double(s[k].lower()) << ','
                   << format_double(s[k].core()) << ',' << format_double(s[k].upper()) << '\n';
        }
    }
    write_artifact("paths.json", all_paths.dump() + "\n", "simulate", deps);
    write_artifact("prices.csv", prices.str(), "simulate", deps);

    const RngStream corr_root(config_.seed, seeds::correlation);
    std::ostringstream corr;
    corr << "variant,method,s,t,value,std_error,degenerate\n";
    std::vector<ModelVariant> variants{ModelVariant::classic};
    if (sim.variant != ModelVariant::classic) {
        variants.push_back(sim.variant);
    }
    for (ModelVariant v : variants) {
        CorrelationConfig cfg;
        cfg.variant = v;
        cfg.dt = sim.dt;
        cfg.n_paths = sim.corr_paths;
        cfg.bootstrap_resamples = sim.bootstrap_resamples;
        cfg.functional = sim.functional;
        const auto rng = corr_root.derive(static_cast<std::uint64_t>(v));
        auto rows = corr_formula(params, cfg, sim.corr_s, sim.corr_t, rng.derive(0));
        const auto mc = corr_monte_carlo(params, cfg, sim.corr_s, sim.corr_t, rng.derive(1));
        rows.insert(rows.end(), mc.begin(), mc.end());
        for (const auto& e : rows) {
            corr << to_string(v) << ',' << to_string(e.method) << ',' << format_double(e.s) << ','
                 << format_double(e.t) << ',' << format_double(e.value) << ',' << format_double(e.std_error) << ','
                 << (e.degenerate ? 1 : 0) << '\n';
        }
    }
    write_artifact("correlation.csv", corr.str(), "simulate", deps);
}

void Pipeline::run_all() {
    ingest();
    stats();
    plotdata();
    jumps();
    label();
    train();
    simulate();
}

}  // namespace fbns
