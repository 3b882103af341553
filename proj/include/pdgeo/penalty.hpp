#pragma once

#include <pdgeo/problem.hpp>
#include <pdgeo/types.hpp>

#include <algorithm>
#include <string>
#include <string_view>

namespace pdgeo {

/// Which safeguarded multiplier estimates enter the penalty function.
/// λ belongs to G(x) ∈ C, μ to the coupling x = y.
enum class MultiplierMode { none, constraints_only, equality_only, both };

inline std::string_view to_string(MultiplierMode m)
{
    switch (m) {
    case MultiplierMode::none: return "none";
    case MultiplierMode::constraints_only: return "constraints_only";
    case MultiplierMode::equality_only: return "equality_only";
    case MultiplierMode::both: return "both";
    }
    return "?";
}

inline MultiplierMode multiplier_mode_from_string(std::string_view s)
{
    if (s == "none") return MultiplierMode::none;
    if (s == "constraints_only") return MultiplierMode::constraints_only;
    if (s == "equality_only") return MultiplierMode::equality_only;
    if (s == "both") return MultiplierMode::both;
    throw InvalidArgument("unknown multiplier mode '" + std::string(s) + "'");
}

inline constexpr double kDefaultMultiplierBound = 1e8;

/// q_τ(x, y) = f(x) + ⟨μ, x−y⟩ + τ/2‖x−y‖² + τ/2 dist_C²(G(x) + λ/τ) − ‖λ‖²/(2τ).
/// Without multipliers this is the plain partial penalty
/// f(x) + τ/2 (‖x−y‖² + dist_C²(G(x))).
struct PenaltyObjective {
    const Problem* problem = nullptr;
    double tau = 1.0;
    bool use_lambda = false;
    bool use_mu = false;
    Vector lambda;  // dim 𝕐 when use_lambda
    Vector mu;      // dim 𝕏 when use_mu
    double bound = kDefaultMultiplierBound;

    static PenaltyObjective make(const Problem& p, double tau, MultiplierMode mode = MultiplierMode::none,
                                 double bound = kDefaultMultiplierBound)
    {
        if (!(tau > 0.0)) {
            throw InvalidArgument("PenaltyObjective: tau must be positive");
        }
        PenaltyObjective po;
        po.problem = &p;
        po.tau = tau;
        po.bound = bound;
        po.use_lambda = p.has_constraints()
                        && (mode == MultiplierMode::constraints_only || mode == MultiplierMode::both);
        po.use_mu = mode == MultiplierMode::equality_only || mode == MultiplierMode::both;
        if (po.use_lambda) {
            po.lambda = Vector::Zero(p.dim_y());
        }
        if (po.use_mu) {
            po.mu = Vector::Zero(p.dim_x());
        }
        return po;
    }

    const Vector* lambda_ptr() const { return use_lambda ? &lambda : nullptr; }
    const Vector* mu_ptr() const { return use_mu ? &mu : nullptr; }
};

struct PenaltyValue {
    double q;
    Vector grad_x;
};

namespace detail {

// w − P_C(w) for the shifted constraint point w = G(x) + λ/τ.
inline Vector shifted_constraint_residual(const PenaltyObjective& po, const Vector& g)
{
    if (po.use_lambda) {
        const Vector w = g + po.lambda / po.tau;
        return w - po.problem->target.project(w);
    }
    return g - po.problem->target.project(g);
}

} // namespace detail

inline PenaltyValue penalty_value_and_xgrad(const PenaltyObjective& po, const Vector& x, const Vector& y)
{
    const Problem& p = *po.problem;
    require_size(x.size(), p.dim_x(), "penalty_value_and_xgrad x");
    require_size(y.size(), p.dim_x(), "penalty_value_and_xgrad y");
    Vector grad(x.size());
    double q = p.objective(x, grad);
    const Vector diff = x - y;
    q += 0.5 * po.tau * diff.squaredNorm();
    grad += po.tau * diff;
    if (po.use_mu) {
        q += po.mu.dot(diff);
        grad += po.mu;
    }
    if (p.constraints) {
        const Vector g = p.constraints->value(x);
        const Vector r = detail::shifted_constraint_residual(po, g);
        q += 0.5 * po.tau * r.squaredNorm();
        grad += p.constraints->adjoint(x, po.tau * r);
        if (po.use_lambda) {
            q -= po.lambda.squaredNorm() / (2.0 * po.tau);
        }
    }
    require_finite(q, "penalty value");
    require_finite(grad, "penalty gradient");
    return {q, std::move(grad)};
}

/// Exact minimizer of q_τ(x, ·) over D: Π_D(x + μ/τ).
inline Vector y_subproblem(const PenaltyObjective& po, const Vector& x)
{
    if (!(po.tau > 0.0)) {
        throw InvalidArgument("y_subproblem: tau must be positive");
    }
    if (po.use_mu) {
        return po.problem->geometric.project(x + po.mu / po.tau);
    }
    return po.problem->geometric.project(x);
}

/// Hestenes–Powell–Rockafellar step followed by clamping to [−B, B].
inline PenaltyObjective update_multipliers(const PenaltyObjective& po, const Vector& x, const Vector& y)
{
    if (!po.use_lambda && !po.use_mu) {
        throw InvalidArgument("update_multipliers: multipliers are disabled");
    }
    PenaltyObjective next = po;
    const double b = po.bound;
    if (po.use_lambda) {
        const Vector g = po.problem->constraints->value(x);
        next.lambda = (po.tau * detail::shifted_constraint_residual(po, g)).cwiseMax(-b).cwiseMin(b);
    }
    if (po.use_mu) {
        next.mu = (po.mu + po.tau * (x - y)).cwiseMax(-b).cwiseMin(b);
    }
    return next;
}

/// Residuals of the stationarity system of the feasibility problem
/// min ½dist_C²(G(x)) + ½‖x−y‖² s.t. y ∈ D:
///   r1 = ‖G'(x)*(G(x) − P_C(G(x))) + x − y‖,  r2 = ‖y − Π_D(x)‖.
struct FeasibilityResiduals {
    double r1;
    double r2;
};

inline FeasibilityResiduals feasibility_stationarity_check(const Problem& p, const Vector& x, const Vector& y)
{
    Vector v = x - y;
    if (p.constraints) {
        const Vector g = p.constraints->value(x);
        v += p.constraints->adjoint(x, g - p.target.project(g));
    }
    return {v.norm(), (y - p.geometric.project(x)).norm()};
}

/// One element of the asymptotic M-stationarity certificate sequence.
struct Certificate {
    Vector epsilon;  // ∇_x q_τ(x, y)
    Vector z;        // G(x) − P_C(G(x))
    Vector lambda;   // τ(w − P_C(w)), w = G(x) + λ/τ
    Vector mu;       // μ + τ(x − y)
    // ‖ε − (∇f + G'(x)*λ + μ)‖ relative to the largest term.
    double identity_error = 0.0;
};

inline Certificate make_certificate(const PenaltyObjective& po, const Vector& x, const Vector& y)
{
    const Problem& p = *po.problem;
    Certificate c;
    PenaltyValue pv = penalty_value_and_xgrad(po, x, y);
    c.epsilon = std::move(pv.grad_x);
    Vector gf(x.size());
    p.objective(x, gf);
    c.mu = po.tau * (x - y);
    if (po.use_mu) {
        c.mu += po.mu;
    }
    Vector rhs = gf + c.mu;
    if (p.constraints) {
        const Vector g = p.constraints->value(x);
        c.z = g - p.target.project(g);
        c.lambda = po.tau * detail::shifted_constraint_residual(po, g);
        rhs += p.constraints->adjoint(x, c.lambda);
    } else {
        c.z = Vector();
        c.lambda = Vector();
    }
    const double scale = std::max({1.0, gf.norm(), c.mu.norm(), c.epsilon.norm()});
    c.identity_error = (c.epsilon - rhs).norm() / scale;
    return c;
}

} // namespace pdgeo
