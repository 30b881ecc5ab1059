#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fbns/fuzzy.hpp"
#include "fbns/rng.hpp"

namespace fbns {

/// Compound-Poisson subordinator with Exponential(b) jump sizes.
///
/// Per unit of subordinator time jumps arrive at rate a * c with mean size
/// 1 / b. The intensity factor c > 1 builds the high-intensity "big jump"
/// process from the same base parameters.
struct SubordinatorSpec {
    double jump_rate = 1.0;         ///< a
    double jump_mean_inv = 1.0;     ///< b
    double intensity_factor = 1.0;  ///< c
    /// Test hook for the a -> 0 limit: the process never jumps.
    bool no_jumps = false;

    [[nodiscard]] static SubordinatorSpec jumpless() {
        SubordinatorSpec s;
        s.no_jumps = true;
        return s;
    }

    /// Throws std::domain_error on a <= 0, b <= 0 or c < 1 (a is ignored when no_jumps).
    void validate() const;
    /// a * c, or 0 for the jumpless hook.
    [[nodiscard]] double intensity() const noexcept { return no_jumps ? 0.0 : jump_rate * intensity_factor; }
};

struct LevyMoments {
    double mean_rate;  ///< E[Z_1]
    double var_rate;   ///< Var[Z_1]
};

/// Mean and variance of the unit-time increment: (a c / b, 2 a c / b^2).
[[nodiscard]] LevyMoments levy_moments(const SubordinatorSpec& spec);

/// Right-continuous step function of time with values in [0, 1], defined on [0, end].
class ThetaSchedule {
  public:
    struct Step {
        double start;
        double value;
    };

    /// Constant schedule defined for all t >= 0.
    static ThetaSchedule constant(double theta);
    /// Steps must start at 0 with strictly increasing starts; the schedule is
    /// defined up to `end` inclusive.
    static ThetaSchedule steps(std::vector<Step> steps, double end = std::numeric_limits<double>::infinity());
    /// period-long blocks alternating first, 1 - first, first, ... on [0, end].
    static ThetaSchedule alternating(double period, double first, double end);

    /// Throws std::domain_error outside [0, end].
    [[nodiscard]] double at(double t) const;
    [[nodiscard]] bool covers(double horizon) const noexcept { return horizon <= end_; }
    [[nodiscard]] double end() const noexcept { return end_; }
    [[nodiscard]] const std::vector<Step>& step_list() const noexcept { return steps_; }
    [[nodiscard]] bool is_constant() const noexcept { return steps_.size() == 1; }

    /// Integral of g(theta(s)) over [0, t] for the piecewise-constant schedule.
    template <typename G>
    [[nodiscard]] double integrate(double t, G&& g) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < steps_.size() && steps_[i].start < t; ++i) {
            const double hi = (i + 1 < steps_.size()) ? std::min(steps_[i + 1].start, t) : t;
            acc += (hi - steps_[i].start) * g(steps_[i].value);
        }
        return acc;
    }

  private:
    ThetaSchedule(std::vector<Step> steps, double end);
    std::vector<Step> steps_;
    double end_;
};

/// Realized subordinator trajectory in calendar time: jump epochs in (0, horizon]
/// with (possibly fuzzy) non-negative marks.
struct JumpPath {
    std::vector<double> times;
    std::vector<TriangularFuzzyNumber> marks;
    double lambda = 1.0;
    double horizon = 1.0;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    /// Sum of crisp (core) jump sizes over epochs <= t.
    [[nodiscard]] double core_mass(double t = std::numeric_limits<double>::infinity()) const;

    friend bool operator==(const JumpPath&, const JumpPath&) = default;
};

/// Simulates Z_{lambda t} on [0, horizon]: Poisson epochs at rate a c lambda,
/// Exponential(b) sizes s, marks (s (1 - delta), s, s (1 + delta)).
[[nodiscard]] JumpPath simulate_subordinator(const SubordinatorSpec& spec, double lambda, double horizon,
                                             double fuzz_spread, RngStream& rng);

/// Superposition rho' dZ1 + sqrt(1 - rho'^2) dZ2 of two independent subordinators.
/// Epochs with a zero coefficient are dropped; ties keep z1 epochs first.
[[nodiscard]] JumpPath superpose(const JumpPath& z1, const JumpPath& z2, double rho_prime);

/// Convex combination (1 - theta) dZ + theta dZ^(b), theta read at each epoch.
/// Epochs with a zero weight are dropped, so theta == 0 reproduces z exactly
/// and theta == 1 reproduces zb exactly.
[[nodiscard]] JumpPath convex_combine(const JumpPath& z, const JumpPath& zb, const ThetaSchedule& theta);
[[nodiscard]] JumpPath convex_combine(const JumpPath& z, const JumpPath& zb, double theta);

}  // namespace fbns
