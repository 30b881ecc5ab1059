#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fbns/fuzzy.hpp"
#include "fbns/levy.hpp"
#include "fbns/rng.hpp"

namespace fbns {

enum class ModelVariant { classic, fuzzy, generalized };

/// Which process drives the variance in the generalized model.
enum class VarianceDriver {
    convex_combination,  ///< (1 - theta) dZ + theta dZ^(b), theta' = theta
    superposition,       ///< rho' dZ + sqrt(1 - rho'^2) dZ*, log-return jumps from Z
};

/// Whether log-return jumps and variance jumps share realizations.
enum class JumpSharing { shared, independent };

/// Functional J(s) accumulated from the jump measure in the correlation formulas.
enum class JumpFunctional { squared_sizes, count };

/// Sub-stream ids under the path's root stream.
namespace streams {
inline constexpr std::uint64_t diffusion = 0;
inline constexpr std::uint64_t base_jumps = 1;
inline constexpr std::uint64_t big_jumps = 2;
inline constexpr std::uint64_t star_jumps = 3;
inline constexpr std::uint64_t variance_base_jumps = 4;
inline constexpr std::uint64_t variance_big_jumps = 5;
}  // namespace streams

struct ModelParams {
    double mu = 0.0;
    double beta = 0.0;
    double rho = -0.5;   ///< leverage, <= 0
    double lambda = 1.0;  ///< mean reversion, > 0
    TriangularFuzzyNumber sigma0_sq = TriangularFuzzyNumber::crisp(0.04);
    double rho_prime = 0.5;
    ThetaSchedule theta = ThetaSchedule::constant(0.0);
    SubordinatorSpec spec{1.0, 25.0, 1.0};
    SubordinatorSpec spec_b{1.0, 25.0, 4.0};
    double fuzz_spread = 0.05;
    VarianceDriver driver = VarianceDriver::convex_combination;
    JumpSharing sharing = JumpSharing::shared;

    /// Throws std::domain_error naming the first violated invariant.
    void validate() const;
};

/// Uniform grid t_k = horizon * k / steps.
struct TimeGrid {
    double horizon = 1.0;
    std::size_t steps = 1;

    [[nodiscard]] double at(std::size_t k) const noexcept {
        return horizon * static_cast<double>(k) / static_cast<double>(steps);
    }
    [[nodiscard]] double dt() const noexcept { return horizon / static_cast<double>(steps); }
    /// Index of a time lying on the grid; throws std::domain_error otherwise.
    [[nodiscard]] std::size_t index_of(double t) const;
};

/// Requires horizon > dt > 0 and horizon an integer multiple of dt (to 1e-9 relative).
[[nodiscard]] TimeGrid make_grid(double horizon, double dt);

struct SimulatedPath {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> sigma_sq;
    JumpPath jumps;
};

struct FuzzySimulatedPath {
    std::vector<double> t;
    std::vector<TriangularFuzzyNumber> x;
    std::vector<TriangularFuzzyNumber> sigma_sq;
    JumpPath return_jumps;
    JumpPath variance_jumps;
};

/// A jump inside one variance step: offset = epoch - t, in (0, dt].
struct StepJump {
    double offset;
    double size;
};
struct FuzzyStepJump {
    double offset;
    TriangularFuzzyNumber size;
};

/// Exact solution of the variance equation over one step:
/// e^{-lambda dt} sigma^2 + sum_j e^{-lambda (dt - offset_j)} size_j.
[[nodiscard]] double variance_exact_step(double sigma_sq, double lambda, double dt, std::span<const StepJump> jumps);
[[nodiscard]] TriangularFuzzyNumber variance_exact_step(const TriangularFuzzyNumber& sigma_sq, double lambda,
                                                        double dt, std::span<const FuzzyStepJump> jumps);

/// Classic model: crisp core of sigma0^2, crisp jumps, theta ignored.
[[nodiscard]] SimulatedPath simulate_classic(const ModelParams& params, double horizon, double dt,
                                             const RngStream& rng);
/// Fuzzy model driven by Z~ with fuzz spread delta; theta ignored.
[[nodiscard]] FuzzySimulatedPath simulate_fuzzy(const ModelParams& params, double horizon, double dt,
                                                const RngStream& rng);
/// Generalized model; the driver is selected by params.driver and params.sharing.
[[nodiscard]] FuzzySimulatedPath simulate_generalized(const ModelParams& params, double horizon, double dt,
                                                      const RngStream& rng);

/// Engine shared by the simulators: Euler for X, exact recursion for sigma^2,
/// with explicitly supplied jump drivers. Brownian increments come from
/// rng.derive(streams::diffusion).
[[nodiscard]] SimulatedPath simulate_driven(const ModelParams& params, const TimeGrid& grid, const RngStream& rng,
                                            const JumpPath& return_jumps, const JumpPath& variance_jumps);
[[nodiscard]] FuzzySimulatedPath simulate_driven_fuzzy(const ModelParams& params, const TimeGrid& grid,
                                                       const RngStream& rng, const JumpPath& return_jumps,
                                                       const JumpPath& variance_jumps);

/// S~_t = S~_0 exp(X~_t), endpoint-wise. Requires s0.lower() > 0.
[[nodiscard]] std::vector<TriangularFuzzyNumber> price_path(std::span<const TriangularFuzzyNumber> x,
                                                            const TriangularFuzzyNumber& s0);
[[nodiscard]] std::vector<TriangularFuzzyNumber> price_path(const FuzzySimulatedPath& path,
                                                            const TriangularFuzzyNumber& s0);

enum class CorrelationMethod { formula_classic, formula_fuzzy, formula_generalized, monte_carlo };

struct CorrelationEstimate {
    double s = 0.0;
    double t = 0.0;
    double value = 0.0;
    double std_error = 0.0;
    CorrelationMethod method = CorrelationMethod::monte_carlo;
    /// Set when a sample variance vanished; std_error is then +infinity.
    bool degenerate = false;
};

struct CorrelationConfig {
    ModelVariant variant = ModelVariant::classic;
    double dt = 1.0 / 288.0;
    std::size_t n_paths = 1000;
    std::size_t bootstrap_resamples = 200;
    JumpFunctional functional = JumpFunctional::squared_sizes;
};

/// Evaluates the closed-form log-return correlation with Monte-Carlo estimates
/// of the integrated variance and jump functionals. One estimate per t.
[[nodiscard]] std::vector<CorrelationEstimate> corr_formula(const ModelParams& params, const CorrelationConfig& cfg,
                                                            double s, std::span<const double> ts,
                                                            const RngStream& rng);
[[nodiscard]] CorrelationEstimate corr_formula(const ModelParams& params, const CorrelationConfig& cfg, double s,
                                               double t, const RngStream& rng);

/// Sample Pearson correlation of (X_s, X_t) across simulated paths (cores for
/// fuzzy paths) with a bootstrap standard error. One estimate per t, all from
/// the same paths.
[[nodiscard]] std::vector<CorrelationEstimate> corr_monte_carlo(const ModelParams& params,
                                                                const CorrelationConfig& cfg, double s,
                                                                std::span<const double> ts, const RngStream& rng);
[[nodiscard]] CorrelationEstimate corr_monte_carlo(const ModelParams& params, const CorrelationConfig& cfg, double s,
                                                   double t, const RngStream& rng);

}  // namespace fbns
