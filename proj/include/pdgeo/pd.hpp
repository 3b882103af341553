#pragma once

#include <pdgeo/altmin.hpp>
#include <pdgeo/inner_solver.hpp>
#include <pdgeo/penalty.hpp>
#include <pdgeo/problem.hpp>
#include <pdgeo/run_record.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace pdgeo {

struct PdParams {
    double tau0 = 1.0;
    double alpha_tau = 1.1;
    double tau_cap = 1e8;
    double eps_out = 1e-5;
    // δ_k = max(delta0 · delta_decay^k, delta_floor)
    double delta0 = 1.0;
    double delta_decay = 0.5;
    double delta_floor = 1e-8;
    int max_outer_iters = 10000;
    MultiplierMode multipliers = MultiplierMode::none;
    double multiplier_bound = kDefaultMultiplierBound;
    // When positive, τ grows only if the outer residual failed to drop below
    // tau_progress_eta times its previous value. 0 means unconditional growth.
    double tau_progress_eta = 0.0;
    AltMinParams inner;  // inner.delta is overwritten by the schedule
    DirectionParams direction;
    bool keep_iterates = false;
    double time_limit = 0.0;  // seconds; 0 disables
};

inline Json to_json(const PdParams& p)
{
    return Json{{"tau0", p.tau0},
                {"alpha_tau", p.alpha_tau},
                {"tau_cap", p.tau_cap},
                {"eps_out", p.eps_out},
                {"delta0", p.delta0},
                {"delta_decay", p.delta_decay},
                {"delta_floor", p.delta_floor},
                {"max_outer_iters", p.max_outer_iters},
                {"multipliers", std::string(to_string(p.multipliers))},
                {"multiplier_bound", p.multiplier_bound},
                {"tau_progress_eta", p.tau_progress_eta},
                {"eps_in", p.inner.eps_in},
                {"max_inner_iters", p.inner.max_inner_iters},
                {"descent_steps", p.inner.descent_steps},
                {"eps_solv", p.inner.eps_solv},
                {"exact_x_update", p.inner.use_exact_update},
                {"gamma", p.inner.line_search.gamma},
                {"beta", p.inner.line_search.beta},
                {"max_backtracks", p.inner.line_search.max_backtracks},
                {"direction", std::string(to_string(p.direction.kind))},
                {"memory", p.direction.memory},
                {"c1", p.direction.c1},
                {"c2", p.direction.c2},
                {"time_limit", p.time_limit}};
}

namespace detail {

template <class T>
void read_field(const Json& j, const char* key, T& out)
{
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("parameter '") + key + "': " + e.what());
    }
}

inline void reject_unknown(const Json& j, const Json& known, std::string_view what)
{
    if (!j.is_object()) {
        throw InvalidArgument(std::string(what) + ": expected an object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.contains(it.key())) {
            throw InvalidArgument(std::string(what) + ": unknown parameter '" + it.key() + "'");
        }
    }
}

} // namespace detail

/// Overrides on top of `base`; keys are the ones written by to_json.
inline PdParams pd_params_from_json(const Json& j, PdParams base = {})
{
    detail::reject_unknown(j, to_json(base), "PdParams");
    PdParams p = std::move(base);
    detail::read_field(j, "tau0", p.tau0);
    detail::read_field(j, "alpha_tau", p.alpha_tau);
    detail::read_field(j, "tau_cap", p.tau_cap);
    detail::read_field(j, "eps_out", p.eps_out);
    detail::read_field(j, "delta0", p.delta0);
    detail::read_field(j, "delta_decay", p.delta_decay);
    detail::read_field(j, "delta_floor", p.delta_floor);
    detail::read_field(j, "max_outer_iters", p.max_outer_iters);
    if (j.contains("multipliers")) {
        p.multipliers = multiplier_mode_from_string(j.at("multipliers").get<std::string>());
    }
    detail::read_field(j, "multiplier_bound", p.multiplier_bound);
    detail::read_field(j, "tau_progress_eta", p.tau_progress_eta);
    detail::read_field(j, "eps_in", p.inner.eps_in);
    detail::read_field(j, "max_inner_iters", p.inner.max_inner_iters);
    detail::read_field(j, "descent_steps", p.inner.descent_steps);
    detail::read_field(j, "eps_solv", p.inner.eps_solv);
    detail::read_field(j, "exact_x_update", p.inner.use_exact_update);
    detail::read_field(j, "gamma", p.inner.line_search.gamma);
    detail::read_field(j, "beta", p.inner.line_search.beta);
    detail::read_field(j, "max_backtracks", p.inner.line_search.max_backtracks);
    if (j.contains("direction")) {
        p.direction.kind = direction_kind_from_string(j.at("direction").get<std::string>());
    }
    detail::read_field(j, "memory", p.direction.memory);
    detail::read_field(j, "c1", p.direction.c1);
    detail::read_field(j, "c2", p.direction.c2);
    detail::read_field(j, "time_limit", p.time_limit);
    return p;
}

inline void validate(const PdParams& p)
{
    if (!(p.tau0 > 0.0) || !(p.alpha_tau > 1.0) || !(p.tau_cap >= p.tau0) || !(p.eps_out > 0.0)
        || !(p.delta0 >= 0.0) || !(p.delta_decay > 0.0 && p.delta_decay <= 1.0) || !(p.delta_floor >= 0.0)
        || p.max_outer_iters < 1 || !(p.multiplier_bound > 0.0) || !(p.time_limit >= 0.0)
        || !(p.tau_progress_eta >= 0.0 && p.tau_progress_eta < 1.0)) {
        throw InvalidArgument("PdParams: invalid parameter values");
    }
}

inline double delta_schedule(const PdParams& p, int k)
{
    return std::max(p.delta0 * std::pow(p.delta_decay, k), p.delta_floor);
}

namespace detail {

inline void fill_final(RunRecord& rec, const Problem& problem, const Vector& x, const Vector& y)
{
    Vector g(x.size());
    rec.x = x;
    rec.y = y;
    rec.objective = problem.objective(x, g);
    rec.objective_y = problem.objective(y, g);
    rec.residual_xy = (x - y).norm();
    rec.residual_c = evaluate_constraints(problem, x).residual;
    rec.residual = rec.residual_xy + rec.residual_c;
    const FeasibilityResiduals fr = feasibility_stationarity_check(problem, x, y);
    rec.stationarity_r1 = fr.r1;
    rec.stationarity_r2 = fr.r2;
}

} // namespace detail

/// Penalty decomposition. With `params.multipliers != none` this is the
/// multiplier-augmented variant (solver id "pdlm").
inline RunRecord solve_pd(const Problem& problem, const PdParams& params, const Vector& x0,
                          std::optional<Vector> y0 = std::nullopt)
{
    validate(problem);
    validate(params);
    require_size(x0.size(), problem.dim_x(), "solve_pd x0");
    const auto start = Clock::now();

    RunRecord rec;
    rec.solver = params.multipliers == MultiplierMode::none ? "pd" : "pdlm";
    rec.problem = problem.name;
    rec.params = to_json(params);

    Vector x = x0;
    Vector y;
    if (y0 && y0->size() == x0.size() && problem.geometric.contains(*y0)) {
        y = *y0;
    } else {
        y = problem.geometric.project(x0);
        ++rec.projections;
    }

    PenaltyObjective po = PenaltyObjective::make(problem, params.tau0, params.multipliers, params.multiplier_bound);
    DirectionStrategy strategy(params.direction);
    AltMinParams inner = params.inner;
    if (params.time_limit > 0.0) {
        inner.deadline = start + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(params.time_limit));
    }

    double prev_residual = std::numeric_limits<double>::infinity();
    rec.status = RunStatus::iteration_cap;
    try {
        for (int k = 0; k < params.max_outer_iters; ++k) {
            inner.delta = delta_schedule(params, k);
            strategy.reset();
            AltMinResult am = alternating_minimize(po, x, y, inner, strategy);
            x = std::move(am.x);
            y = std::move(am.y);
            rec.inner_iterations += am.iterations;
            rec.projections += am.projections;
            rec.evaluations += am.evaluations;
            rec.outer_iterations = k + 1;

            rec.certificate = make_certificate(po, x, y);
            OuterRecord o;
            o.k = k;
            o.tau = po.tau;
            o.delta = inner.delta;
            o.inner_iterations = am.iterations;
            o.inner_stop = std::string(to_string(am.reason));
            o.projections = rec.projections;
            Vector gf(x.size());
            o.objective = problem.objective(x, gf);
            o.residual_xy = (x - y).norm();
            o.residual_c = evaluate_constraints(problem, x).residual;
            o.eps_norm = rec.certificate.epsilon.norm();
            o.z_norm = rec.certificate.z.norm();
            o.lambda_norm = rec.certificate.lambda.norm();
            o.mu_norm = rec.certificate.mu.norm();
            o.identity_error = rec.certificate.identity_error;
            rec.history.push_back(std::move(o));
            if (params.keep_iterates) {
                rec.x_history.push_back(x);
                rec.y_history.push_back(y);
            }

            const OuterRecord& last = rec.history.back();
            if (last.residual_xy + last.residual_c <= params.eps_out) {
                rec.status = RunStatus::converged;
                break;
            }
            if (am.reason == InnerStop::time_limit) {
                rec.status = RunStatus::time_limit;
                break;
            }
            if (po.use_lambda || po.use_mu) {
                po = update_multipliers(po, x, y);
            }
            const double residual = last.residual_xy + last.residual_c;
            const bool grow = params.tau_progress_eta == 0.0 || residual > params.tau_progress_eta * prev_residual;
            prev_residual = residual;
            if (grow) {
                const double next_tau = params.alpha_tau * po.tau;
                if (next_tau > params.tau_cap) {
                    rec.status = RunStatus::tau_cap_reached;
                    break;
                }
                po.tau = next_tau;
            }
        }
    } catch (const NumericalFailure& e) {
        rec.status = RunStatus::numerical_failure;
        rec.message = e.what();
    }

    detail::fill_final(rec, problem, x, y);
    if (rec.status == RunStatus::tau_cap_reached && rec.residual > params.eps_out) {
        rec.feasibility_candidate = true;
        rec.message = "stationary-of-feasibility-candidate";
    }
    rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return rec;
}

} // namespace pdgeo
