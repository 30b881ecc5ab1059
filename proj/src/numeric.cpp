#include "fbns/numeric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fbns {

double pairwise_sum(std::span<const double> xs) noexcept {
    constexpr std::size_t block = 16;
    if (xs.size() <= block) {
        double s = 0.0;
        for (double x : xs) {
            s += x;
        }
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double mean(std::span<const double> xs) {
    if (xs.empty()) {
        throw std::domain_error("mean of an empty sample");
    }
    return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) {
        throw std::domain_error("sample variance needs at least two values");
    }
    const double m = mean(xs);
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - m;
        sq[i] = d * d;
    }
    return pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::domain_error("pearson needs paired samples of size >= 2");
    }
    const double mx = mean(x);
    const double my = mean(y);
    std::vector<double> sxy(x.size()), sxx(x.size()), syy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy[i] = dx * dy;
        sxx[i] = dx * dx;
        syy[i] = dy * dy;
    }
    const double vx = pairwise_sum(sxx);
    const double vy = pairwise_sum(syy);
    if (vx == 0.0 || vy == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return pairwise_sum(sxy) / std::sqrt(vx * vy);
}

double trapezoid(std::span<const double> f, double h) {
    if (f.size() < 2) {
        throw std::domain_error("trapezoid needs at least two samples");
    }
    std::vector<double> w(f.begin(), f.end());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return h * pairwise_sum(w);
}

double trapezoid_unit(std::span<const double> f) {
    if (f.size() < 2) {
        throw std::domain_error("trapezoid needs at least two samples");
    }
    return trapezoid(f, 1.0 / static_cast<double>(f.size() - 1));
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw std::domain_error("quantile of an empty sample");
    }
    if (p <= 0.0) {
        return sorted.front();
    }
    if (p >= 1.0) {
        return sorted.back();
    }
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace fbns
