#include "fbns/bns.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fbns/numeric.hpp"

namespace fbns {

void ModelParams::validate() const {
    if (!(rho <= 0.0)) {
        throw std::domain_error("leverage rho must be <= 0");
    }
    if (!(lambda > 0.0)) {
        throw std::domain_error("mean-reversion rate lambda must be positive");
    }
    if (!(sigma0_sq.lower() > 0.0)) {
        throw std::domain_error("initial variance must be strictly positive");
    }
    if (!(rho_prime >= 0.0 && rho_prime <= 1.0)) {
        throw std::domain_error("rho' must lie in [0, 1]");
    }
    if (!(fuzz_spread >= 0.0 && fuzz_spread < 1.0)) {
        throw std::domain_error("fuzz spread delta must lie in [0, 1)");
    }
    if (!std::isfinite(mu) || !std::isfinite(beta)) {
        throw std::domain_error("drift parameters must be finite");
    }
    spec.validate();
    spec_b.validate();
    if (!spec.no_jumps && !(spec_b.intensity() > spec.intensity())) {
        throw std::domain_error("big-jump process must have strictly greater intensity");
    }
}

std::size_t TimeGrid::index_of(double t) const {
    const double pos = t / horizon * static_cast<double>(steps);
    const double k = std::round(pos);
    if (k < 0.0 || k > static_cast<double>(steps) || std::abs(pos - k) > 1e-9 * std::max(1.0, pos)) {
        throw std::domain_error("time " + std::to_string(t) + " is not a grid point");
    }
    return static_cast<std::size_t>(k);
}

TimeGrid make_grid(double horizon, double dt) {
    if (!(dt > 0.0) || !(horizon > dt)) {
        throw std::domain_error("grid requires horizon > dt > 0");
    }
    const double n = std::round(horizon / dt);
    if (std::abs(n * dt - horizon) > 1e-9 * horizon) {
        throw std::domain_error("horizon must be an integer multiple of dt");
    }
    return {horizon, static_cast<std::size_t>(n)};
}

double variance_exact_step(double sigma_sq, double lambda, double dt, std::span<const StepJump> jumps) {
    double next = std::exp(-lambda * dt) * sigma_sq;
    for (const auto& j : jumps) {
        next += std::exp(-lambda * (dt - j.offset)) * j.size;
    }
    return next;
}

TriangularFuzzyNumber variance_exact_step(const TriangularFuzzyNumber& sigma_sq, double lambda, double dt,
                                          std::span<const FuzzyStepJump> jumps) {
    TriangularFuzzyNumber next = scale(std::exp(-lambda * dt), sigma_sq);
    for (const auto& j : jumps) {
        next = add(next, scale(std::exp(-lambda * (dt - j.offset)), j.size));
    }
    return next;
}

namespace {

// Arithmetic used by the engine, written so the fuzzy core performs exactly the
// same floating-point operations as the crisp instantiation.
struct CrispOps {
    using Value = double;
    using Jump = StepJump;
    static double lift(double x) { return x; }
    static double mark(const TriangularFuzzyNumber& m) { return m.core(); }
    static double scale(double g, double v) { return g * v; }
    static double add(double a, double b) { return a + b; }
    static double sqrt(double v) { return std::sqrt(v); }
    static double decay(double v, double factor) { return factor * v; }
    static double step(double v, double lambda, double dt, std::span<const Jump> j) {
        return variance_exact_step(v, lambda, dt, j);
    }
};

struct FuzzyOps {
    using Value = TriangularFuzzyNumber;
    using Jump = FuzzyStepJump;
    static Value lift(double x) { return Value::crisp(x); }
    static Value mark(const TriangularFuzzyNumber& m) { return m; }
    static Value scale(double g, const Value& v) { return fbns::scale(g, v); }
    static Value add(const Value& a, const Value& b) { return fbns::add(a, b); }
    static Value sqrt(const Value& v) { return map_increasing(v, [](double x) { return std::sqrt(x); }); }
    static Value decay(const Value& v, double factor) { return fbns::scale(factor, v); }
    static Value step(const Value& v, double lambda, double dt, std::span<const Jump> j) {
        return variance_exact_step(v, lambda, dt, j);
    }
};

template <typename Ops>
struct EngineOutput {
    std::vector<double> t;
    std::vector<typename Ops::Value> x;
    std::vector<typename Ops::Value> sigma_sq;
};

template <typename Ops>
EngineOutput<Ops> run_engine(const ModelParams& p, const TimeGrid& grid, const RngStream& rng,
                             const JumpPath& return_jumps, const JumpPath& variance_jumps,
                             typename Ops::Value sigma0) {
    using V = typename Ops::Value;
    RngStream normals = rng.derive(streams::diffusion);
    const std::size_t n = grid.steps;
    EngineOutput<Ops> out;
    out.t.resize(n + 1);
    out.x.resize(n + 1);
    out.sigma_sq.resize(n + 1);
    out.t[0] = 0.0;
    out.x[0] = Ops::lift(0.0);
    out.sigma_sq[0] = sigma0;

    // sigma^2 between jumps is anchor * exp(-lambda (t - anchor_t)), evaluated
    // directly so jump-free stretches carry no accumulated rounding.
    V anchor = sigma0;
    double anchor_t = 0.0;
    std::size_t ri = 0;
    std::size_t vi = 0;
    std::vector<typename Ops::Jump> step_jumps;
    const V mu = Ops::lift(p.mu);

    for (std::size_t k = 0; k < n; ++k) {
        const double t0 = out.t[k];
        const double t1 = grid.at(k + 1);
        const double dt = t1 - t0;
        out.t[k + 1] = t1;
        const V& s2 = out.sigma_sq[k];

        const V drift = Ops::scale(dt, Ops::add(mu, Ops::scale(p.beta, s2)));
        const double dw = std::sqrt(dt) * normals.normal();
        const V diffusion = Ops::scale(dw, Ops::sqrt(s2));
        V x = Ops::add(Ops::add(out.x[k], drift), diffusion);

        bool any_return_jump = false;
        V jump_sum = Ops::lift(0.0);
        while (ri < return_jumps.size() && return_jumps.times[ri] <= t1) {
            jump_sum = Ops::add(jump_sum, Ops::mark(return_jumps.marks[ri]));
            any_return_jump = true;
            ++ri;
        }
        if (any_return_jump) {
            x = Ops::add(x, Ops::scale(p.rho, jump_sum));
        }
        out.x[k + 1] = x;

        step_jumps.clear();
        while (vi < variance_jumps.size() && variance_jumps.times[vi] <= t1) {
            step_jumps.push_back({variance_jumps.times[vi] - t0, Ops::mark(variance_jumps.marks[vi])});
            ++vi;
        }
        if (step_jumps.empty()) {
            out.sigma_sq[k + 1] = Ops::decay(anchor, std::exp(-p.lambda * (t1 - anchor_t)));
        } else {
            out.sigma_sq[k + 1] = Ops::step(s2, p.lambda, dt, step_jumps);
            anchor = out.sigma_sq[k + 1];
            anchor_t = t1;
        }
    }
    return out;
}

struct Drivers {
    JumpPath base;        // Z~
    JumpPath big;         // Z~^(b), generalized only
    JumpPath returns;     // drives log-return jumps
    JumpPath variance;    // drives the variance
};

Drivers make_drivers(const ModelParams& p, ModelVariant variant, double horizon, const RngStream& rng) {
    Drivers d;
    const double delta = variant == ModelVariant::classic ? 0.0 : p.fuzz_spread;
    RngStream base_rng = rng.derive(streams::base_jumps);
    d.base = simulate_subordinator(p.spec, p.lambda, horizon, delta, base_rng);
    if (variant != ModelVariant::generalized) {
        d.returns = d.base;
        d.variance = d.base;
        return d;
    }
    if (!p.theta.covers(horizon)) {
        throw std::domain_error("theta schedule does not cover [0, " + std::to_string(horizon) + "]");
    }
    RngStream big_rng = rng.derive(streams::big_jumps);
    d.big = simulate_subordinator(p.spec_b, p.lambda, horizon, delta, big_rng);
    if (p.driver == VarianceDriver::superposition) {
        RngStream star_rng = rng.derive(streams::star_jumps);
        const JumpPath star = simulate_subordinator(p.spec, p.lambda, horizon, delta, star_rng);
        d.returns = d.base;
        d.variance = superpose(d.base, star, p.rho_prime);
        return d;
    }
    d.returns = convex_combine(d.base, d.big, p.theta);
    if (p.sharing == JumpSharing::shared) {
        d.variance = d.returns;
    } else {
        RngStream vb = rng.derive(streams::variance_base_jumps);
        RngStream vg = rng.derive(streams::variance_big_jumps);
        const JumpPath z = simulate_subordinator(p.spec, p.lambda, horizon, delta, vb);
        const JumpPath zb = simulate_subordinator(p.spec_b, p.lambda, horizon, delta, vg);
        d.variance = convex_combine(z, zb, p.theta);
    }
    return d;
}

}  // namespace

SimulatedPath simulate_driven(const ModelParams& params, const TimeGrid& grid, const RngStream& rng,
                              const JumpPath& return_jumps, const JumpPath& variance_jumps) {
    params.validate();
    auto out = run_engine<CrispOps>(params, grid, rng, return_jumps, variance_jumps, params.sigma0_sq.core());
    return {std::move(out.t), std::move(out.x), std::move(out.sigma_sq), return_jumps};
}

FuzzySimulatedPath simulate_driven_fuzzy(const ModelParams& params, const TimeGrid& grid, const RngStream& rng,
                                         const JumpPath& return_jumps, const JumpPath& variance_jumps) {
    params.validate();
    auto out = run_engine<FuzzyOps>(params, grid, rng, return_jumps, variance_jumps, params.sigma0_sq);
    return {std::move(out.t), std::move(out.x), std::move(out.sigma_sq), return_jumps, variance_jumps};
}

SimulatedPath simulate_classic(const ModelParams& params, double horizon, double dt, const RngStream& rng) {
    params.validate();
    const TimeGrid grid = make_grid(horizon, dt);
    const Drivers d = make_drivers(params, ModelVariant::classic, horizon, rng);
    return simulate_driven(params, grid, rng, d.returns, d.variance);
}

FuzzySimulatedPath simulate_fuzzy(const ModelParams& params, double horizon, double dt, const RngStream& rng) {
    params.validate();
    const TimeGrid grid = make_grid(horizon, dt);
    const Drivers d = make_drivers(params, ModelVariant::fuzzy, horizon, rng);
    return simulate_driven_fuzzy(params, grid, rng, d.returns, d.variance);
}

FuzzySimulatedPath simulate_generalized(const ModelParams& params, double horizon, double dt,
                                        const RngStream& rng) {
    params.validate();
    const TimeGrid grid = make_grid(horizon, dt);
    const Drivers d = make_drivers(params, ModelVariant::generalized, horizon, rng);
    return simulate_driven_fuzzy(params, grid, rng, d.returns, d.variance);
}

std::vector<TriangularFuzzyNumber> price_path(std::span<const TriangularFuzzyNumber> x,
                                              const TriangularFuzzyNumber& s0) {
    if (!(s0.lower() > 0.0)) {
        throw std::domain_error("initial price must be strictly positive");
    }
    std::vector<TriangularFuzzyNumber> out;
    out.reserve(x.size());
    for (const auto& xi : x) {
        out.emplace_back(s0.lower() * std::exp(xi.lower()), s0.core() * std::exp(xi.core()),
                         s0.upper() * std::exp(xi.upper()));
    }
    return out;
}

std::vector<TriangularFuzzyNumber> price_path(const FuzzySimulatedPath& path, const TriangularFuzzyNumber& s0) {
    return price_path(path.x, s0);
}

// ---------------------------------------------------------------------------
// Correlation of log-returns
// ---------------------------------------------------------------------------

namespace {

// Per-path quantities needed by both correlation estimators.
struct PathSummary {
    double x_s = 0.0;
    std::vector<double> x_t;
    double int_s = 0.0;            // int_0^s sigma^2
    std::vector<double> int_t;     // int_0^t sigma^2
    double jumps_s = 0.0;          // weighted J functional over (0, s]
};

double jump_functional(const JumpPath& path, double s, JumpFunctional f,
                       const ThetaSchedule* theta, bool big) {
    double acc = 0.0;
    for (std::size_t i = 0; i < path.size() && path.times[i] <= s; ++i) {
        double w = 1.0;
        if (theta != nullptr) {
            const double th = theta->at(path.times[i]);
            w = big ? th : 1.0 - th;
        }
        const double y = path.marks[i].core();
        acc += w * w * (f == JumpFunctional::squared_sizes ? y * y : 1.0);
    }
    return acc;
}

bool uses_theta_formula(const ModelParams& p, ModelVariant v) {
    return v == ModelVariant::generalized && p.driver == VarianceDriver::convex_combination;
}

std::vector<double> checked_times(double s, std::span<const double> ts) {
    if (!(s > 0.0)) {
        throw std::domain_error("correlation requires s > 0");
    }
    if (ts.empty()) {
        throw std::domain_error("correlation requires at least one t");
    }
    for (double t : ts) {
        if (!(t >= s)) {
            throw std::domain_error("correlation requires t > s (t == s allowed as the self-correlation case)");
        }
    }
    return {ts.begin(), ts.end()};
}

std::vector<PathSummary> summarize_paths(const ModelParams& p, const CorrelationConfig& cfg, double s,
                                         std::span<const double> ts, const RngStream& rng) {
    p.validate();
    if (cfg.n_paths < 2) {
        throw std::domain_error("correlation needs at least two paths");
    }
    double horizon = s;
    for (double t : ts) {
        horizon = std::max(horizon, t);
    }
    const TimeGrid grid = make_grid(horizon, cfg.dt);
    const std::size_t is = grid.index_of(s);
    std::vector<std::size_t> it;
    for (double t : ts) {
        it.push_back(grid.index_of(t));
    }
    const bool theta_form = uses_theta_formula(p, cfg.variant);

    std::vector<PathSummary> out(cfg.n_paths);
    std::vector<double> xs_core, s2_core;
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        const RngStream path_rng = rng.derive(i);
        const Drivers d = make_drivers(p, cfg.variant, horizon, path_rng);
        if (cfg.variant == ModelVariant::classic) {
            auto path = simulate_driven(p, grid, path_rng, d.returns, d.variance);
            xs_core = std::move(path.x);
            s2_core = std::move(path.sigma_sq);
        } else {
            auto path = simulate_driven_fuzzy(p, grid, path_rng, d.returns, d.variance);
            xs_core.resize(path.x.size());
            s2_core.resize(path.x.size());
            for (std::size_t k = 0; k < path.x.size(); ++k) {
                xs_core[k] = path.x[k].core();
                s2_core[k] = path.sigma_sq[k].core();
            }
        }
        PathSummary& ps = out[i];
        ps.x_s = xs_core[is];
        const double h = grid.dt();
        ps.int_s = trapezoid(std::span<const double>(s2_core).first(is + 1), h);
        for (std::size_t j = 0; j < it.size(); ++j) {
            ps.x_t.push_back(xs_core[it[j]]);
            ps.int_t.push_back(trapezoid(std::span<const double>(s2_core).first(it[j] + 1), h));
        }
        if (theta_form) {
            ps.jumps_s = jump_functional(d.base, s, cfg.functional, &p.theta, false) +
                         jump_functional(d.big, s, cfg.functional, &p.theta, true);
        } else {
            ps.jumps_s = jump_functional(d.base, s, cfg.functional, nullptr, false);
        }
    }
    return out;
}

// rho^2 lambda int_0^v of the per-time jump variance rate.
double jump_variance_term(const ModelParams& p, ModelVariant v, double horizon) {
    const double r2 = p.rho * p.rho;
    const double var_base = levy_moments(p.spec).var_rate;
    if (!uses_theta_formula(p, v)) {
        return horizon * r2 * p.lambda * var_base;
    }
    const double var_big = levy_moments(p.spec_b).var_rate;
    return r2 * p.lambda * p.theta.integrate(horizon, [&](double th) {
        return (1.0 - th) * (1.0 - th) * var_base + th * th * var_big;
    });
}

// Formula value from (possibly resampled) path averages.
double formula_value(const ModelParams& p, ModelVariant v, double s, double t, double mean_int_s,
                     double mean_int_t, double mean_jumps_s) {
    const double num = mean_int_s + p.rho * p.rho * mean_jumps_s;
    const double den_t = mean_int_t + jump_variance_term(p, v, t);
    const double den_s = mean_int_s + jump_variance_term(p, v, s);
    return num / std::sqrt(den_t * den_s);
}

CorrelationMethod formula_method(ModelVariant v) {
    switch (v) {
        case ModelVariant::classic:
            return CorrelationMethod::formula_classic;
        case ModelVariant::fuzzy:
            return CorrelationMethod::formula_fuzzy;
        case ModelVariant::generalized:
            return CorrelationMethod::formula_generalized;
    }
    return CorrelationMethod::formula_classic;
}

double bootstrap_se(std::span<const double> replicates) {
    if (replicates.size() < 2) {
        return std::numeric_limits<double>::infinity();
    }
    return std::sqrt(sample_variance(replicates));
}

}  // namespace

std::vector<CorrelationEstimate> corr_formula(const ModelParams& params, const CorrelationConfig& cfg, double s,
                                              std::span<const double> ts_in, const RngStream& rng) {
    const auto ts = checked_times(s, ts_in);
    const auto paths = summarize_paths(params, cfg, s, ts, rng.derive(0));
    RngStream boot = rng.derive(1);
    const std::size_t n = paths.size();

    std::vector<CorrelationEstimate> out;
    for (std::size_t j = 0; j < ts.size(); ++j) {
        CorrelationEstimate e;
        e.s = s;
        e.t = ts[j];
        e.method = formula_method(cfg.variant);
        if (ts[j] == s) {
            e.value = 1.0;
            out.push_back(e);
            continue;
        }
        auto averages = [&](auto&& index) {
            std::vector<double> a(n), b(n), c(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& ps = paths[index(i)];
                a[i] = ps.int_s;
                b[i] = ps.int_t[j];
                c[i] = ps.jumps_s;
            }
            return formula_value(params, cfg.variant, s, ts[j], mean(a), mean(b), mean(c));
        };
        e.value = averages([](std::size_t i) { return i; });
        std::vector<double> reps;
        reps.reserve(cfg.bootstrap_resamples);
        std::vector<std::size_t> idx(n);
        for (std::size_t r = 0; r < cfg.bootstrap_resamples; ++r) {
            for (auto& k : idx) {
                k = boot.below(n);
            }
            reps.push_back(averages([&idx](std::size_t i) { return idx[i]; }));
        }
        e.std_error = bootstrap_se(reps);
        out.push_back(e);
    }
    return out;
}

CorrelationEstimate corr_formula(const ModelParams& params, const CorrelationConfig& cfg, double s, double t,
                                 const RngStream& rng) {
    const double ts[] = {t};
    return corr_formula(params, cfg, s, ts, rng).front();
}

std::vector<CorrelationEstimate> corr_monte_carlo(const ModelParams& params, const CorrelationConfig& cfg, double s,
                                                  std::span<const double> ts_in, const RngStream& rng) {
    const auto ts = checked_times(s, ts_in);
    const auto paths = summarize_paths(params, cfg, s, ts, rng.derive(0));
    RngStream boot = rng.derive(1);
    const std::size_t n = paths.size();

    std::vector<double> xs(n), xt(n), bs(n), bt(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = paths[i].x_s;
    }
    std::vector<CorrelationEstimate> out;
    for (std::size_t j = 0; j < ts.size(); ++j) {
        CorrelationEstimate e;
        e.s = s;
        e.t = ts[j];
        e.method = CorrelationMethod::monte_carlo;
        if (ts[j] == s) {
            e.value = 1.0;
            out.push_back(e);
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            xt[i] = paths[i].x_t[j];
        }
        const double r = pearson(xs, xt);
        if (std::isnan(r)) {
            e.value = 0.0;
            e.std_error = std::numeric_limits<double>::infinity();
            e.degenerate = true;
            out.push_back(e);
            continue;
        }
        e.value = r;
        std::vector<double> reps;
        reps.reserve(cfg.bootstrap_resamples);
        for (std::size_t rep = 0; rep < cfg.bootstrap_resamples; ++rep) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto k = boot.below(n);
                bs[i] = xs[k];
                bt[i] = xt[k];
            }
            const double rr = pearson(bs, bt);
            if (!std::isnan(rr)) {
                reps.push_back(rr);
            }
        }
        e.std_error = bootstrap_se(reps);
        out.push_back(e);
    }
    return out;
}

CorrelationEstimate corr_monte_carlo(const ModelParams& params, const CorrelationConfig& cfg, double s, double t,
                                     const RngStream& rng) {
    const double ts[] = {t};
    return corr_monte_carlo(params, cfg, s, ts, rng).front();
}

}  // namespace fbns
