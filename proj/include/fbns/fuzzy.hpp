#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fbns {

/// Triangular fuzzy number stored by its endpoints: lower <= core <= upper.
///
/// A degenerate number (lower == core == upper) is a crisp real and every
/// operation below reduces to ordinary arithmetic on the core.
class TriangularFuzzyNumber {
  public:
    constexpr TriangularFuzzyNumber() = default;
    /// Throws std::domain_error unless l <= m <= u (NaN rejected).
    TriangularFuzzyNumber(double l, double m, double u);

    static constexpr TriangularFuzzyNumber crisp(double x) noexcept {
        TriangularFuzzyNumber t;
        t.l_ = t.m_ = t.u_ = x;
        return t;
    }

    [[nodiscard]] constexpr double lower() const noexcept { return l_; }
    [[nodiscard]] constexpr double core() const noexcept { return m_; }
    [[nodiscard]] constexpr double upper() const noexcept { return u_; }
    [[nodiscard]] constexpr double left_spread() const noexcept { return m_ - l_; }
    [[nodiscard]] constexpr double right_spread() const noexcept { return u_ - m_; }
    [[nodiscard]] constexpr bool is_crisp() const noexcept { return l_ == m_ && m_ == u_; }

    friend constexpr bool operator==(const TriangularFuzzyNumber&, const TriangularFuzzyNumber&) = default;

  private:
    // Used by the arithmetic helpers that already guarantee ordering.
    struct Unchecked {};
    constexpr TriangularFuzzyNumber(double l, double m, double u, Unchecked) noexcept : l_(l), m_(m), u_(u) {}

    friend TriangularFuzzyNumber scale(double, const TriangularFuzzyNumber&) noexcept;
    friend TriangularFuzzyNumber add(const TriangularFuzzyNumber&, const TriangularFuzzyNumber&) noexcept;

    double l_ = 0.0;
    double m_ = 0.0;
    double u_ = 0.0;
};

struct AlphaCut {
    double lo;
    double hi;
    double alpha;
};

/// Weight on the upper endpoint of a fuzzy price; 0.5 is risk neutral.
class RiskAttitude {
  public:
    constexpr RiskAttitude() = default;
    explicit RiskAttitude(double eta);
    [[nodiscard]] constexpr double eta() const noexcept { return eta_; }

  private:
    double eta_ = 0.5;
};

enum class SubtractionMode {
    interval,  ///< (l_a - u_b, m_a - m_b, u_a - l_b), always a valid TFN
    literal,   ///< componentwise; throws when the result is not ordered
};

/// Piecewise-linear hat membership. A zero-width ramp is a step with value 1 at the core.
[[nodiscard]] double membership(const TriangularFuzzyNumber& a, double x) noexcept;

/// [m - (1-alpha)(m-l), m + (1-alpha)(u-m)]. alpha outside [0,1] throws std::domain_error.
[[nodiscard]] AlphaCut alpha_cut(const TriangularFuzzyNumber& a, double alpha);

/// ((1-eta) l + m + eta u) / 2.
[[nodiscard]] double expectation(const TriangularFuzzyNumber& a, RiskAttitude eta = {}) noexcept;

/// gamma * a; endpoints are reflected for negative gamma.
[[nodiscard]] TriangularFuzzyNumber scale(double gamma, const TriangularFuzzyNumber& a) noexcept;

/// gamma / a with endpoints re-sorted. Requires gamma != 0 and a support that excludes 0.
[[nodiscard]] TriangularFuzzyNumber reciprocal_scale(double gamma, const TriangularFuzzyNumber& a);

[[nodiscard]] TriangularFuzzyNumber add(const TriangularFuzzyNumber& a, const TriangularFuzzyNumber& b) noexcept;
[[nodiscard]] TriangularFuzzyNumber sub(const TriangularFuzzyNumber& a, const TriangularFuzzyNumber& b,
                                        SubtractionMode mode = SubtractionMode::interval);

/// Applies a non-decreasing real function to each endpoint (extension principle for monotone maps).
template <typename F>
[[nodiscard]] TriangularFuzzyNumber map_increasing(const TriangularFuzzyNumber& a, F&& f) {
    return TriangularFuzzyNumber(f(a.lower()), f(a.core()), f(a.upper()));
}

inline TriangularFuzzyNumber operator+(const TriangularFuzzyNumber& a, const TriangularFuzzyNumber& b) noexcept {
    return add(a, b);
}
inline TriangularFuzzyNumber operator-(const TriangularFuzzyNumber& a, const TriangularFuzzyNumber& b) {
    return sub(a, b);
}
inline TriangularFuzzyNumber operator*(double gamma, const TriangularFuzzyNumber& a) noexcept {
    return scale(gamma, a);
}

/// Realizations of a fuzzy random variable. Moments integrate the alpha-cut
/// endpoint statistics over a uniform alpha grid with the trapezoidal rule.
class FuzzyEnsemble {
  public:
    static constexpr std::size_t default_alpha_grid = 101;

    explicit FuzzyEnsemble(std::vector<TriangularFuzzyNumber> samples,
                           std::size_t alpha_grid_size = default_alpha_grid);

    [[nodiscard]] std::span<const TriangularFuzzyNumber> samples() const noexcept { return samples_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] std::size_t alpha_grid_size() const noexcept { return grid_; }

  private:
    std::vector<TriangularFuzzyNumber> samples_;
    std::size_t grid_;
};

[[nodiscard]] TriangularFuzzyNumber frv_expectation(const FuzzyEnsemble& ens);
[[nodiscard]] double frv_variance(const FuzzyEnsemble& ens);
[[nodiscard]] double frv_covariance(const FuzzyEnsemble& a, const FuzzyEnsemble& b);
[[nodiscard]] double frv_correlation(const FuzzyEnsemble& a, const FuzzyEnsemble& b);

}  // namespace fbns
