#pragma once

#include <pdgeo/pd.hpp>
#include <pdgeo/problem.hpp>
#include <pdgeo/run_record.hpp>

#include <algorithm>
#include <chrono>
#include <functional>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pdgeo {

// =======================================================================
// Projected nonmonotone spectral gradient method and the safeguarded
// augmented Lagrangian loop built on it.
// =======================================================================

struct SpectralParams {
    double sigma = 1e-5;
    double gamma0 = 1.0;
    double gamma_max = 1e12;
    int m = 10;
    double step_growth = 2.0;
    double eps_in = 1e-5;
    int max_iters = 10000;
};

inline void validate(const SpectralParams& p)
{
    if (!(p.sigma > 0.0) || !(p.gamma0 > 0.0) || !(p.gamma_max >= p.gamma0) || p.m < 1
        || !(p.step_growth > 1.0) || !(p.eps_in > 0.0) || p.max_iters < 1) {
        throw InvalidArgument("SpectralParams: invalid parameter values");
    }
}

/// Value-and-gradient oracle for the function minimized over D.
using SmoothOracle = std::function<double(const Vector& x, Vector& grad)>;

struct SpectralState {
    double gamma_bb = 1.0;
    std::deque<double> window;  // last m accepted values, newest at the back

    static SpectralState fresh(const SpectralParams& p, double value)
    {
        SpectralState s;
        s.gamma_bb = p.gamma0;
        s.window.push_back(value);
        return s;
    }
};

struct SpectralStepResult {
    Vector x;
    double value = 0.0;
    Vector grad;
    bool stalled = false;
    int trials = 0;
    long projections = 0;
    long evaluations = 0;
};

/// One step x⁺ = Π_D(x − ∇L(x)/γ) with γ = γ_bb · growth^i, i = 0, 1, ...,
/// accepted once L(x⁺) ≤ max(window) − σ‖x⁺ − x‖².
inline SpectralStepResult spectral_step(const SmoothOracle& oracle, const GeometricSet& d, const Vector& x,
                                        double value, const Vector& grad, SpectralState& state,
                                        const SpectralParams& p)
{
    SpectralStepResult r;
    const double ref = *std::max_element(state.window.begin(), state.window.end());
    double gamma = std::clamp(state.gamma_bb, p.gamma0, p.gamma_max);
    Vector g_trial(x.size());
    for (;;) {
        Vector trial = d.project(x - grad / gamma);
        ++r.projections;
        ++r.trials;
        const double step2 = (trial - x).squaredNorm();
        if (step2 > 0.0) {
            double lv = std::numeric_limits<double>::infinity();
            try {
                lv = oracle(trial, g_trial);
                ++r.evaluations;
            } catch (const NumericalFailure&) {
            }
            if (std::isfinite(lv) && lv <= ref - p.sigma * step2) {
                const Vector s = trial - x;
                const Vector yv = g_trial - grad;
                const double sy = s.dot(yv);
                state.gamma_bb = (sy > 1e-12 * s.norm() * yv.norm()) ? std::clamp(sy / step2, p.gamma0, p.gamma_max)
                                                                       : p.gamma0;
                state.window.push_back(lv);
                while (static_cast<int>(state.window.size()) > p.m) {
                    state.window.pop_front();
                }
                r.x = std::move(trial);
                r.value = lv;
                r.grad = g_trial;
                return r;
            }
        }
        if (gamma >= p.gamma_max) {
            break;
        }
        gamma = std::min(gamma * p.step_growth, p.gamma_max);
    }
    r.x = x;
    r.value = value;
    r.grad = grad;
    r.stalled = true;
    return r;
}

enum class SpectralStop { window, stalled, iteration_cap, time_limit };

inline std::string_view to_string(SpectralStop s)
{
    switch (s) {
    case SpectralStop::window: return "window";
    case SpectralStop::stalled: return "stalled";
    case SpectralStop::iteration_cap: return "iteration_cap";
    case SpectralStop::time_limit: return "time_limit";
    }
    return "?";
}

struct SpectralResult {
    Vector x;
    double value = 0.0;
    SpectralStop reason = SpectralStop::iteration_cap;
    int iterations = 0;
    long projections = 0;
    long evaluations = 0;
    std::vector<double> values;  // L(x⁰), L(x¹), ...
};

/// Spectral gradient loop from x0 ∈ D. Stops once
/// max_{j<m} L(x^{ℓ−j}) − min_{j≤m} L(x^{ℓ+1−j}) ≤ eps_in.
inline SpectralResult spectral_minimize(const SmoothOracle& oracle, const GeometricSet& d, const Vector& x0,
                                        const SpectralParams& p,
                                        std::optional<Clock::time_point> deadline = std::nullopt)
{
    validate(p);
    SpectralResult r;
    Vector x = x0;
    Vector grad(x.size());
    double value = oracle(x, grad);
    ++r.evaluations;
    require_finite(value, "spectral_minimize initial value");
    r.values.push_back(value);
    SpectralState state = SpectralState::fresh(p, value);
    for (;;) {
        if (r.iterations >= p.max_iters) {
            r.reason = SpectralStop::iteration_cap;
            break;
        }
        if (deadline && Clock::now() > *deadline) {
            r.reason = SpectralStop::time_limit;
            break;
        }
        SpectralStepResult st = spectral_step(oracle, d, x, value, grad, state, p);
        r.projections += st.projections;
        r.evaluations += st.evaluations;
        if (st.stalled) {
            r.reason = SpectralStop::stalled;
            break;
        }
        x = std::move(st.x);
        value = st.value;
        grad = std::move(st.grad);
        r.values.push_back(value);
        ++r.iterations;
        const std::size_t l1 = r.values.size() - 1;  // index of x^{ℓ+1}
        const std::size_t mm = static_cast<std::size_t>(p.m);
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j <= mm && j <= l1; ++j) {
            hi = std::max(hi, r.values[l1 - j]);
        }
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j <= mm && j <= l1; ++j) {
            lo = std::min(lo, r.values[l1 - j]);
        }
        if (hi - lo <= p.eps_in) {
            r.reason = SpectralStop::window;
            break;
        }
    }
    r.x = std::move(x);
    r.value = value;
    return r;
}

struct AlmParams {
    double tau0 = 1.0;
    double alpha_tau = 1.1;
    double tau_cap = 1e8;
    double eps_out = 1e-5;
    double eta = 0.8;
    double multiplier_bound = kDefaultMultiplierBound;
    int max_outer_iters = 10000;
    SpectralParams spectral;
    bool keep_iterates = false;
    double time_limit = 0.0;
};

inline Json to_json(const AlmParams& p)
{
    return Json{{"tau0", p.tau0},
                {"alpha_tau", p.alpha_tau},
                {"tau_cap", p.tau_cap},
                {"eps_out", p.eps_out},
                {"eta", p.eta},
                {"multiplier_bound", p.multiplier_bound},
                {"max_outer_iters", p.max_outer_iters},
                {"sigma", p.spectral.sigma},
                {"gamma0", p.spectral.gamma0},
                {"gamma_max", p.spectral.gamma_max},
                {"m", p.spectral.m},
                {"step_growth", p.spectral.step_growth},
                {"eps_in", p.spectral.eps_in},
                {"max_inner_iters", p.spectral.max_iters},
                {"time_limit", p.time_limit}};
}

inline AlmParams alm_params_from_json(const Json& j, AlmParams base = {})
{
    detail::reject_unknown(j, to_json(base), "AlmParams");
    AlmParams p = std::move(base);
    detail::read_field(j, "tau0", p.tau0);
    detail::read_field(j, "alpha_tau", p.alpha_tau);
    detail::read_field(j, "tau_cap", p.tau_cap);
    detail::read_field(j, "eps_out", p.eps_out);
    detail::read_field(j, "eta", p.eta);
    detail::read_field(j, "multiplier_bound", p.multiplier_bound);
    detail::read_field(j, "max_outer_iters", p.max_outer_iters);
    detail::read_field(j, "sigma", p.spectral.sigma);
    detail::read_field(j, "gamma0", p.spectral.gamma0);
    detail::read_field(j, "gamma_max", p.spectral.gamma_max);
    detail::read_field(j, "m", p.spectral.m);
    detail::read_field(j, "step_growth", p.spectral.step_growth);
    detail::read_field(j, "eps_in", p.spectral.eps_in);
    detail::read_field(j, "max_inner_iters", p.spectral.max_iters);
    detail::read_field(j, "time_limit", p.time_limit);
    return p;
}

inline void validate(const AlmParams& p)
{
    if (!(p.tau0 > 0.0) || !(p.alpha_tau > 1.0) || !(p.tau_cap >= p.tau0) || !(p.eps_out > 0.0)
        || !(p.eta > 0.0 && p.eta < 1.0) || !(p.multiplier_bound > 0.0) || p.max_outer_iters < 1
        || !(p.time_limit >= 0.0)) {
        throw InvalidArgument("AlmParams: invalid parameter values");
    }
    validate(p.spectral);
}

/// L(x) = f(x) + τ/2 dist_C²(G(x) + λ/τ) − ‖λ‖²/(2τ).
inline SmoothOracle augmented_lagrangian(const Problem& problem, double tau, const Vector& lambda)
{
    return [&problem, tau, lambda](const Vector& x, Vector& grad) {
        double v = problem.objective(x, grad);
        if (problem.constraints) {
            const Vector w = problem.constraints->value(x) + lambda / tau;
            const Vector r = w - problem.target.project(w);
            v += 0.5 * tau * r.squaredNorm() - lambda.squaredNorm() / (2.0 * tau);
            grad += problem.constraints->adjoint(x, tau * r);
        }
        require_finite(v, "augmented Lagrangian value");
        return v;
    };
}

inline RunRecord solve_alm(const Problem& problem, const AlmParams& params, const Vector& x0)
{
    validate(problem);
    validate(params);
    require_size(x0.size(), problem.dim_x(), "solve_alm x0");
    const auto start = Clock::now();
    std::optional<Clock::time_point> deadline;
    if (params.time_limit > 0.0) {
        deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(params.time_limit));
    }

    RunRecord rec;
    rec.solver = "alm";
    rec.problem = problem.name;
    rec.params = to_json(params);

    Vector x = problem.geometric.project(x0);
    ++rec.projections;
    Vector lambda = Vector::Zero(problem.dim_y());
    double tau = params.tau0;
    double prev_residual = std::numeric_limits<double>::infinity();
    const double b = params.multiplier_bound;

    rec.status = RunStatus::iteration_cap;
    try {
        for (int k = 0; k < params.max_outer_iters; ++k) {
            const SmoothOracle lag = augmented_lagrangian(problem, tau, lambda);
            SpectralResult sr = spectral_minimize(lag, problem.geometric, x, params.spectral, deadline);
            x = std::move(sr.x);
            rec.inner_iterations += sr.iterations;
            rec.projections += sr.projections;
            rec.evaluations += sr.evaluations;
            rec.outer_iterations = k + 1;

            OuterRecord o;
            o.k = k;
            o.tau = tau;
            o.inner_iterations = sr.iterations;
            o.inner_stop = std::string(to_string(sr.reason));
            o.projections = rec.projections;
            Vector gf(x.size());
            o.objective = problem.objective(x, gf);
            o.residual_c = evaluate_constraints(problem, x).residual;
            Vector gl(x.size());
            lag(x, gl);
            o.eps_norm = (x - problem.geometric.project(x - gl)).norm();
            o.lambda_norm = lambda.norm();
            rec.history.push_back(o);
            if (params.keep_iterates) {
                rec.x_history.push_back(x);
                rec.y_history.push_back(x);
            }

            if (o.residual_c <= params.eps_out) {
                rec.status = RunStatus::converged;
                break;
            }
            if (sr.reason == SpectralStop::time_limit) {
                rec.status = RunStatus::time_limit;
                break;
            }
            const Vector w = problem.constraints->value(x) + lambda / tau;
            lambda = (tau * (w - problem.target.project(w))).cwiseMax(-b).cwiseMin(b);
            if (o.residual_c > params.eta * prev_residual) {
                tau *= params.alpha_tau;
            }
            prev_residual = o.residual_c;
            if (tau > params.tau_cap) {
                rec.status = RunStatus::tau_cap_reached;
                break;
            }
        }
    } catch (const NumericalFailure& e) {
        rec.status = RunStatus::numerical_failure;
        rec.message = e.what();
    }

    Vector g(x.size());
    rec.x = x;
    rec.y = x;
    rec.objective = problem.objective(x, g);
    rec.objective_y = rec.objective;
    rec.residual_c = evaluate_constraints(problem, x).residual;
    rec.residual = rec.residual_c;
    if (problem.constraints) {
        const Vector gx = problem.constraints->value(x);
        rec.certificate.z = gx - problem.target.project(gx);
        rec.certificate.lambda = lambda;
    }
    rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return rec;
}

} // namespace pdgeo
