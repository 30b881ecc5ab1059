#include "fbns/levy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace fbns {

void SubordinatorSpec::validate() const {
    if (!no_jumps && !(jump_rate > 0.0)) {
        throw std::domain_error("subordinator jump rate a must be positive");
    }
    if (!(jump_mean_inv > 0.0)) {
        throw std::domain_error("subordinator size parameter b must be positive");
    }
    if (!(intensity_factor >= 1.0)) {
        throw std::domain_error("subordinator intensity factor c must be >= 1");
    }
}

LevyMoments levy_moments(const SubordinatorSpec& spec) {
    spec.validate();
    const double rate = spec.intensity();
    const double b = spec.jump_mean_inv;
    return {rate / b, 2.0 * rate / (b * b)};
}

ThetaSchedule::ThetaSchedule(std::vector<Step> steps, double end) : steps_(std::move(steps)), end_(end) {
    if (steps_.empty() || steps_.front().start != 0.0) {
        throw std::domain_error("theta schedule must start at time 0");
    }
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (!(steps_[i].value >= 0.0 && steps_[i].value <= 1.0)) {
            throw std::domain_error("theta values must lie in [0, 1]");
        }
        if (i > 0 && !(steps_[i].start > steps_[i - 1].start)) {
            throw std::domain_error("theta schedule breakpoints must increase strictly");
        }
    }
    if (!(end_ >= steps_.back().start)) {
        throw std::domain_error("theta schedule ends before its last breakpoint");
    }
}

ThetaSchedule ThetaSchedule::constant(double theta) {
    return ThetaSchedule({{0.0, theta}}, std::numeric_limits<double>::infinity());
}

ThetaSchedule ThetaSchedule::steps(std::vector<Step> steps, double end) {
    return ThetaSchedule(std::move(steps), end);
}

ThetaSchedule ThetaSchedule::alternating(double period, double first, double end) {
    if (!(period > 0.0) || !(end > 0.0)) {
        throw std::domain_error("alternating schedule needs positive period and end");
    }
    std::vector<Step> s;
    const auto blocks = static_cast<std::size_t>(std::ceil(end / period));
    for (std::size_t i = 0; i < std::max<std::size_t>(blocks, 1); ++i) {
        s.push_back({static_cast<double>(i) * period, (i % 2 == 0) ? first : 1.0 - first});
    }
    return ThetaSchedule(std::move(s), end);
}

double ThetaSchedule::at(double t) const {
    if (!(t >= 0.0 && t <= end_)) {
        throw std::domain_error("theta schedule undefined at t = " + std::to_string(t));
    }
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double x, const Step& s) { return x < s.start; });
    return std::prev(it)->value;
}

double JumpPath::core_mass(double t) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < times.size() && times[i] <= t; ++i) {
        acc += marks[i].core();
    }
    return acc;
}

JumpPath simulate_subordinator(const SubordinatorSpec& spec, double lambda, double horizon, double fuzz_spread,
                               RngStream& rng) {
    spec.validate();
    if (!(lambda > 0.0)) {
        throw std::domain_error("time-change rate lambda must be positive");
    }
    if (!(horizon > 0.0)) {
        throw std::domain_error("horizon must be positive");
    }
    if (!(fuzz_spread >= 0.0 && fuzz_spread < 1.0)) {
        throw std::domain_error("fuzz spread delta must lie in [0, 1)");
    }
    JumpPath path;
    path.lambda = lambda;
    path.horizon = horizon;
    const double rate = spec.intensity() * lambda;
    if (rate == 0.0) {
        return path;
    }
    double t = rng.exponential(rate);
    while (t <= horizon) {
        const double s = rng.exponential(spec.jump_mean_inv);
        path.times.push_back(t);
        path.marks.push_back(fuzz_spread == 0.0
                                 ? TriangularFuzzyNumber::crisp(s)
                                 : TriangularFuzzyNumber(s * (1.0 - fuzz_spread), s, s * (1.0 + fuzz_spread)));
        t += rng.exponential(rate);
    }
    return path;
}

namespace {

void require_compatible(const JumpPath& a, const JumpPath& b) {
    if (a.lambda != b.lambda || a.horizon != b.horizon) {
        throw std::domain_error("jump paths must share lambda and horizon");
    }
}

// Stable merge of two weighted paths; weight functions return the scalar applied to each mark.
template <typename W1, typename W2>
JumpPath merge_weighted(const JumpPath& a, const JumpPath& b, W1&& wa, W2&& wb) {
    JumpPath out;
    out.lambda = a.lambda;
    out.horizon = a.horizon;
    out.times.reserve(a.size() + b.size());
    out.marks.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    auto emit = [&out](double t, double w, const TriangularFuzzyNumber& mark) {
        if (w == 0.0) {
            return;
        }
        out.times.push_back(t);
        out.marks.push_back(w == 1.0 ? mark : scale(w, mark));
    };
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a.times[i] <= b.times[j])) {
            emit(a.times[i], wa(a.times[i]), a.marks[i]);
            ++i;
        } else {
            emit(b.times[j], wb(b.times[j]), b.marks[j]);
            ++j;
        }
    }
    return out;
}

}  // namespace

JumpPath superpose(const JumpPath& z1, const JumpPath& z2, double rho_prime) {
    if (!(rho_prime >= 0.0 && rho_prime <= 1.0)) {
        throw std::domain_error("rho' must lie in [0, 1]");
    }
    require_compatible(z1, z2);
    const double w2 = std::sqrt(1.0 - rho_prime * rho_prime);
    return merge_weighted(
        z1, z2, [rho_prime](double) { return rho_prime; }, [w2](double) { return w2; });
}

JumpPath convex_combine(const JumpPath& z, const JumpPath& zb, const ThetaSchedule& theta) {
    require_compatible(z, zb);
    if (!theta.covers(z.horizon)) {
        throw std::domain_error("theta schedule does not cover the path horizon");
    }
    return merge_weighted(
        z, zb, [&theta](double t) { return 1.0 - theta.at(t); }, [&theta](double t) { return theta.at(t); });
}

JumpPath convex_combine(const JumpPath& z, const JumpPath& zb, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw std::domain_error("theta must lie in [0, 1]");
    }
    return convex_combine(z, zb, ThetaSchedule::constant(theta));
}

}  // namespace fbns
