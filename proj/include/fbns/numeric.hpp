#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fbns {

/// Pairwise (cascade) summation. The result depends only on the input order,
/// so aggregated Monte-Carlo results are reproducible.
[[nodiscard]] double pairwise_sum(std::span<const double> xs) noexcept;

[[nodiscard]] double mean(std::span<const double> xs);
/// Unbiased (n - 1) sample variance.
[[nodiscard]] double sample_variance(std::span<const double> xs);
/// Pearson correlation; NaN when either side has zero variance.
[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);

/// Trapezoidal integral of samples taken on a uniform grid over [0, 1].
[[nodiscard]] double trapezoid_unit(std::span<const double> f);
/// Trapezoidal integral of samples f[k] on a uniform grid with step h.
[[nodiscard]] double trapezoid(std::span<const double> f, double h);

/// Linear-interpolation quantile of sorted data (the "type 7" convention).
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace fbns
