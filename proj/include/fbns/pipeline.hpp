#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbns/bns.hpp"
#include "fbns/classifier.hpp"
#include "fbns/io.hpp"
#include "fbns/jumplab.hpp"
#include "fbns/market_data.hpp"

namespace fbns {

inline constexpr int config_format_version = 1;
inline constexpr const char* tool_version = "1.0.0";

/// Invalid configuration; what() lists every violation, one per line.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> violations);
    [[nodiscard]] const std::vector<std::string>& violations() const noexcept { return violations_; }

  private:
    std::vector<std::string> violations_;
};

/// A downstream command ran before the command that produces its input.
class MissingArtifactError : public std::runtime_error {
  public:
    MissingArtifactError(const std::string& artifact, const std::string& producer);
    [[nodiscard]] const std::string& producer() const noexcept { return producer_; }

  private:
    std::string producer_;
};

struct SimulationConfig {
    ModelVariant variant = ModelVariant::generalized;
    double horizon = 8.0;
    double dt = 1.0 / 64.0;
    std::size_t n_paths = 4;  ///< paths written to paths.csv
    /// Replace the configured theta by the constant estimated by `train`.
    bool use_estimated_theta = false;
    TriangularFuzzyNumber s0 = TriangularFuzzyNumber::crisp(100.0);
    // correlation table
    double corr_s = 1.0;
    std::vector<double> corr_t{2.0, 4.0, 8.0};
    std::size_t corr_paths = 200;
    std::size_t bootstrap_resamples = 200;
    JumpFunctional functional = JumpFunctional::squared_sizes;
};

struct RunConfig {
    std::filesystem::path config_dir;  ///< base for relative paths; not serialized
    std::filesystem::path bars_path;
    BarFormat bar_format;
    int bar_minutes = 5;
    double eta = 0.5;
    SessionConfig session;
    PlotOptions plots;
    std::vector<double> thresholds{0.01, 0.03, 0.05, 0.1, 0.5, 1.0};
    LabelingConfig labeling;
    std::vector<SplitSpec> splits;
    NetConfig network;
    ThetaRule theta_rule = ThetaRule::f1_comparison;
    ModelParams model;
    SimulationConfig simulation;
    std::filesystem::path output_dir = "run";
    std::uint64_t seed = 1;

    /// Every violation, empty when valid. Paths are checked against the file system.
    [[nodiscard]] std::vector<std::string> violations() const;
};

/// Parses and validates; throws ConfigError listing all problems.
[[nodiscard]] RunConfig parse_run_config(const Json& j, const std::filesystem::path& config_dir);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);
/// Serialized form; parse_run_config(run_config_to_json(c), c.config_dir) reproduces c.
[[nodiscard]] Json run_config_to_json(const RunConfig& config);

struct Overrides {
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> eta;
    std::vector<double> thresholds;
};
/// Applies command-line overrides and revalidates.
void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Sub-stream seeds fanned out from the global seed.
namespace seeds {
inline constexpr std::uint64_t training = 1;
inline constexpr std::uint64_t simulation = 2;
inline constexpr std::uint64_t correlation = 3;
}  // namespace seeds

/// Exclusive lock on a run directory, released on destruction.
class RunLock {
  public:
    explicit RunLock(const std::filesystem::path& dir);
    ~RunLock();
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

  private:
    std::filesystem::path path_;
};

/// Executes commands against one run directory and keeps manifest.json current.
class Pipeline {
  public:
    explicit Pipeline(RunConfig config);

    void ingest();
    void stats();
    void plotdata();
    void jumps();
    void label();
    void train();
    void simulate();
    /// All of the above in order.
    void run_all();

    [[nodiscard]] const RunConfig& config() const noexcept { return config_; }
    [[nodiscard]] std::filesystem::path artifact_path(const std::string& name) const;
    /// Messages worth showing to the user (e.g. skipped trading days).
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  private:
    FuzzyBarSeries load_series() const;
    void write_artifact(const std::string& name, const std::string& contents, const std::string& producer,
                        const std::vector<std::string>& depends_on);
    [[nodiscard]] std::string require(const std::string& name, const std::string& producer) const;
    void save_manifest();

    RunConfig config_;
    Json manifest_;
    std::vector<std::string> warnings_;
};

}  // namespace fbns
