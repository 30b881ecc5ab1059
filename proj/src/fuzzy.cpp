#include "fbns/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fbns/numeric.hpp"

namespace fbns {

TriangularFuzzyNumber::TriangularFuzzyNumber(double l, double m, double u) : l_(l), m_(m), u_(u) {
    if (!(l <= m && m <= u)) {
        throw std::domain_error("triangular fuzzy number requires l <= m <= u, got (" + std::to_string(l) + ", " +
                                std::to_string(m) + ", " + std::to_string(u) + ")");
    }
}

RiskAttitude::RiskAttitude(double eta) : eta_(eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::domain_error("risk attitude eta must lie in [0, 1]");
    }
}

double membership(const TriangularFuzzyNumber& a, double x) noexcept {
    const double l = a.lower();
    const double m = a.core();
    const double u = a.upper();
    if (x == m) {
        return 1.0;
    }
    if (x < m) {
        if (x <= l) {
            return 0.0;
        }
        return (x - l) / (m - l);
    }
    if (x >= u) {
        return 0.0;
    }
    return (u - x) / (u - m);
}

AlphaCut alpha_cut(const TriangularFuzzyNumber& a, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::domain_error("alpha must lie in [0, 1]");
    }
    const double shrink = 1.0 - alpha;
    return {a.core() - shrink * a.left_spread(), a.core() + shrink * a.right_spread(), alpha};
}

double expectation(const TriangularFuzzyNumber& a, RiskAttitude eta) noexcept {
    const double w = eta.eta();
    return 0.5 * (a.lower() + a.core()) + 0.5 * w * (a.upper() - a.lower());
}

TriangularFuzzyNumber scale(double gamma, const TriangularFuzzyNumber& a) noexcept {
    using U = TriangularFuzzyNumber::Unchecked;
    if (gamma > 0.0) {
        return {gamma * a.l_, gamma * a.m_, gamma * a.u_, U{}};
    }
    if (gamma < 0.0) {
        return {gamma * a.u_, gamma * a.m_, gamma * a.l_, U{}};
    }
    return TriangularFuzzyNumber::crisp(0.0);
}

TriangularFuzzyNumber reciprocal_scale(double gamma, const TriangularFuzzyNumber& a) {
    if (gamma == 0.0) {
        throw std::domain_error("reciprocal_scale requires a nonzero numerator");
    }
    const bool positive = a.lower() > 0.0;
    const bool negative = a.upper() < 0.0;
    if (!positive && !negative) {
        throw std::domain_error("reciprocal_scale requires a support that excludes zero");
    }
    const double p = gamma / a.lower();
    const double q = gamma / a.upper();
    return {std::min(p, q), gamma / a.core(), std::max(p, q)};
}

TriangularFuzzyNumber add(const TriangularFuzzyNumber& a, const TriangularFuzzyNumber& b) noexcept {
    return {a.l_ + b.l_, a.m_ + b.m_, a.u_ + b.u_, TriangularFuzzyNumber::Unchecked{}};
}

TriangularFuzzyNumber sub(const TriangularFuzzyNumber& a, const TriangularFuzzyNumber& b, SubtractionMode mode) {
    if (mode == SubtractionMode::literal) {
        return {a.lower() - b.lower(), a.core() - b.core(), a.upper() - b.upper()};
    }
    return {a.lower() - b.upper(), a.core() - b.core(), a.upper() - b.lower()};
}

FuzzyEnsemble::FuzzyEnsemble(std::vector<TriangularFuzzyNumber> samples, std::size_t alpha_grid_size)
    : samples_(std::move(samples)), grid_(alpha_grid_size) {
    if (grid_ < 2) {
        throw std::domain_error("alpha grid needs at least two points");
    }
}

namespace {

// Endpoints of the alpha-cut as affine functions of alpha: base + alpha * slope.
struct EndpointLines {
    std::vector<double> lo_base, lo_slope, hi_base, hi_slope;
};

EndpointLines endpoint_lines(const FuzzyEnsemble& e) {
    EndpointLines out;
    const auto n = e.size();
    out.lo_base.reserve(n);
    out.lo_slope.reserve(n);
    out.hi_base.reserve(n);
    out.hi_slope.reserve(n);
    for (const auto& s : e.samples()) {
        out.lo_base.push_back(s.lower());
        out.lo_slope.push_back(s.left_spread());
        out.hi_base.push_back(s.upper());
        out.hi_slope.push_back(-s.right_spread());
    }
    return out;
}

double sample_cov(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = pairwise_sum(x) / n;
    const double my = pairwise_sum(y) / n;
    std::vector<double> terms(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        terms[i] = (x[i] - mx) * (y[i] - my);
    }
    return pairwise_sum(terms) / (n - 1.0);
}

// 1/2 * int_0^1 (Cov(A_L, B_L) + Cov(A_U, B_U)) d alpha, trapezoidal on the ensemble grid.
double alpha_integrated_cov(const FuzzyEnsemble& a, const FuzzyEnsemble& b) {
    const auto la = endpoint_lines(a);
    const auto lb = endpoint_lines(b);
    const std::size_t n = a.size();
    const std::size_t grid = a.alpha_grid_size();
    std::vector<double> xa(n), xb(n), ya(n), yb(n);
    std::vector<double> f(grid);
    for (std::size_t g = 0; g < grid; ++g) {
        const double alpha = static_cast<double>(g) / static_cast<double>(grid - 1);
        for (std::size_t i = 0; i < n; ++i) {
            xa[i] = la.lo_base[i] + alpha * la.lo_slope[i];
            xb[i] = lb.lo_base[i] + alpha * lb.lo_slope[i];
            ya[i] = la.hi_base[i] + alpha * la.hi_slope[i];
            yb[i] = lb.hi_base[i] + alpha * lb.hi_slope[i];
        }
        f[g] = sample_cov(xa, xb) + sample_cov(ya, yb);
    }
    return 0.5 * trapezoid_unit(f);
}

void require_moment_size(const FuzzyEnsemble& e, const char* what) {
    if (e.size() < 2) {
        throw std::domain_error(std::string(what) + " needs at least two samples");
    }
}

}  // namespace

TriangularFuzzyNumber frv_expectation(const FuzzyEnsemble& ens) {
    if (ens.size() == 0) {
        throw std::domain_error("expectation of an empty ensemble");
    }
    std::vector<double> l, m, u;
    l.reserve(ens.size());
    m.reserve(ens.size());
    u.reserve(ens.size());
    for (const auto& s : ens.samples()) {
        l.push_back(s.lower());
        m.push_back(s.core());
        u.push_back(s.upper());
    }
    const double n = static_cast<double>(ens.size());
    // Means of ordered samples stay ordered up to rounding; clamp the last ulp.
    const double ml = pairwise_sum(l) / n;
    const double mm = pairwise_sum(m) / n;
    const double mu = pairwise_sum(u) / n;
    return {std::min(ml, mm), mm, std::max(mu, mm)};
}

double frv_variance(const FuzzyEnsemble& ens) {
    require_moment_size(ens, "variance");
    return alpha_integrated_cov(ens, ens);
}

double frv_covariance(const FuzzyEnsemble& a, const FuzzyEnsemble& b) {
    require_moment_size(a, "covariance");
    if (a.size() != b.size()) {
        throw std::domain_error("covariance requires paired ensembles of equal size");
    }
    if (a.alpha_grid_size() != b.alpha_grid_size()) {
        throw std::domain_error("covariance requires matching alpha grids");
    }
    return alpha_integrated_cov(a, b);
}

double frv_correlation(const FuzzyEnsemble& a, const FuzzyEnsemble& b) {
    const double cov = frv_covariance(a, b);
    const double va = frv_variance(a);
    const double vb = frv_variance(b);
    if (va == 0.0 || vb == 0.0) {
        throw std::domain_error("correlation undefined for a zero-variance ensemble");
    }
    return cov / std::sqrt(va * vb);
}

}  // namespace fbns
