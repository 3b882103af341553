#pragma once

#include <pdgeo/inner_solver.hpp>
#include <pdgeo/penalty.hpp>
#include <pdgeo/types.hpp>

#include <chrono>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace pdgeo {

using Clock = std::chrono::steady_clock;

struct AltMinParams {
    double delta = 0.0;         // stop when ‖∇_x q‖ ≤ delta
    double eps_in = 1e-5;       // stop when q(uˡ,vˡ) − q(uˡ⁺¹,vˡ⁺¹) ≤ eps_in
    int max_inner_iters = 10000;
    LineSearchParams line_search;
    // Descent steps per x-update. With more than one, the block ends early
    // once ‖∇_x q‖ ≤ eps_solv.
    int descent_steps = 1;
    double eps_solv = 0.0;
    bool use_exact_update = false;  // requires problem.exact_x_update
    double q_floor = -1e12;
    bool record_history = true;
    std::optional<Clock::time_point> deadline;
};

enum class InnerStop { gradient, decrease, iteration_cap, precision_stall, time_limit };

inline std::string_view to_string(InnerStop s)
{
    switch (s) {
    case InnerStop::gradient: return "gradient";
    case InnerStop::decrease: return "decrease";
    case InnerStop::iteration_cap: return "iteration_cap";
    case InnerStop::precision_stall: return "precision_stall";
    case InnerStop::time_limit: return "time_limit";
    }
    return "?";
}

struct AltMinResult {
    Vector x;
    Vector y;
    double q = 0.0;
    Vector grad_x;
    InnerStop reason = InnerStop::iteration_cap;
    int iterations = 0;
    long projections = 0;
    long descent_steps = 0;
    long evaluations = 0;
    std::vector<double> q_history;  // q(u⁰,v⁰), then q after each full iteration
};

/// Inexact alternating minimization of q_τ(·,·) over 𝕏 × D starting from
/// (x0, y0) with y0 ∈ D. Each iteration takes descent steps in x and then
/// exactly one projection for y.
inline AltMinResult alternating_minimize(const PenaltyObjective& po, const Vector& x0, const Vector& y0,
                                         const AltMinParams& params, DirectionStrategy& strategy)
{
    if (!(params.delta >= 0.0) || !(params.eps_in > 0.0) || params.max_inner_iters < 1
        || params.descent_steps < 1) {
        throw InvalidArgument("alternating_minimize: invalid parameters");
    }
    const Problem& p = *po.problem;
    if (params.use_exact_update && !p.exact_x_update) {
        throw InvalidArgument("alternating_minimize: problem has no exact x-update");
    }

    AltMinResult r;
    Vector u = x0;
    Vector v = y0;
    PenaltyValue pv = penalty_value_and_xgrad(po, u, v);
    ++r.evaluations;
    double q = pv.q;
    Vector g = std::move(pv.grad_x);
    if (params.record_history) {
        r.q_history.push_back(q);
    }

    auto finish = [&](InnerStop why) {
        r.x = std::move(u);
        r.y = std::move(v);
        r.q = q;
        r.grad_x = std::move(g);
        r.reason = why;
        return std::move(r);
    };

    for (;;) {
        if (g.norm() <= params.delta) {
            return finish(InnerStop::gradient);
        }
        if (r.iterations >= params.max_inner_iters) {
            return finish(InnerStop::iteration_cap);
        }
        if (params.deadline && Clock::now() > *params.deadline) {
            return finish(InnerStop::time_limit);
        }
        const double q_pair = q;
        bool stalled = false;

        if (params.use_exact_update) {
            u = (*p.exact_x_update)(v, po.tau, po.lambda_ptr(), po.mu_ptr());
        } else {
            strategy.begin_block();
            for (int j = 0; j < params.descent_steps; ++j) {
                const double gn = g.norm();
                if (gn == 0.0 || (params.descent_steps > 1 && gn <= params.eps_solv)) {
                    break;
                }
                const Vector d = strategy.compute(g);
                const double slope = g.dot(d);
                Vector trial_grad;
                Vector trial;
                auto eval = [&](double alpha) {
                    trial = u + alpha * d;
                    ++r.evaluations;
                    try {
                        PenaltyValue t = penalty_value_and_xgrad(po, trial, v);
                        trial_grad = std::move(t.grad_x);
                        return t.q;
                    } catch (const NumericalFailure&) {
                        return std::numeric_limits<double>::infinity();
                    }
                };
                const ArmijoResult ls = armijo_search(eval, q, slope, params.line_search);
                if (!ls.accepted) {
                    if (ls.flat) {
                        stalled = true;
                        break;
                    }
                    throw NumericalFailure("alternating_minimize: line search failed");
                }
                // The accepted α is always the last trial evaluated.
                strategy.record_step(ls.alpha, trial - u, trial_grad - g);
                u = std::move(trial);
                g = std::move(trial_grad);
                q = ls.value;
                ++r.descent_steps;
            }
        }

        v = y_subproblem(po, u);
        ++r.projections;
        pv = penalty_value_and_xgrad(po, u, v);
        ++r.evaluations;
        q = pv.q;
        g = std::move(pv.grad_x);
        ++r.iterations;
        if (params.record_history) {
            r.q_history.push_back(q);
        }
        if (q < params.q_floor) {
            throw NumericalFailure("alternating_minimize: penalty value below divergence floor");
        }
        if (stalled) {
            return finish(InnerStop::precision_stall);
        }
        if (q_pair - q <= params.eps_in) {
            return finish(InnerStop::decrease);
        }
    }
}

} // namespace pdgeo
