#pragma once

#include <pdgeo/convex_sets.hpp>
#include <pdgeo/geometric_sets.hpp>
#include <pdgeo/types.hpp>

#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace pdgeo {

/// Smooth objective oracle. Writes ∇f(x) into `grad` (already sized) and
/// returns f(x). Value and gradient come from one call so line searches can
/// share work.
using ObjectiveFn = std::function<double(const Vector& x, Vector& grad)>;

/// Constraint map G: 𝕏 → 𝕐, exposed only through G(x) and G'(x)*λ.
struct ConstraintMap {
    Index dim_y = 0;
    std::function<Vector(const Vector& x)> value;
    std::function<Vector(const Vector& x, const Vector& lambda)> adjoint;
};

/// Closed-form minimizer of the penalty subproblem in x for fixed y, for
/// families where one exists. `lambda`/`mu` are null when the corresponding
/// multipliers are off.
using ExactXUpdate = std::function<Vector(const Vector& y, double tau, const Vector* lambda,
                                          const Vector* mu)>;

/// min f(x) s.t. G(x) ∈ C, x ∈ D.
///
/// Oracles must be safe to call concurrently; every generator in the zoo
/// captures immutable shared data only.
struct Problem {
    std::string name;
    Shape shape;  // shape of 𝕏 (rows × cols; cols = 1 for plain vectors)
    ObjectiveFn objective;
    std::optional<ConstraintMap> constraints;
    ConvexTarget target;  // over 𝕐; ignored when `constraints` is empty
    GeometricSet geometric;
    std::optional<ExactXUpdate> exact_x_update;

    Index dim_x() const { return shape.size(); }
    Index dim_y() const { return constraints ? constraints->dim_y : 0; }
    bool has_constraints() const { return constraints.has_value(); }
};

struct ObjectiveValue {
    double value;
    Vector gradient;
};

inline ObjectiveValue evaluate_objective(const Problem& problem, const Vector& x)
{
    require_size(x.size(), problem.dim_x(), "evaluate_objective");
    Vector g(x.size());
    const double v = problem.objective(x, g);
    require_size(g.size(), x.size(), "evaluate_objective gradient");
    require_finite(v, "evaluate_objective");
    require_finite(g, "evaluate_objective gradient");
    return {v, std::move(g)};
}

struct ConstraintValue {
    Vector g;         // G(x); empty without a constraint map
    double residual;  // dist_C(G(x))
};

inline ConstraintValue evaluate_constraints(const Problem& problem, const Vector& x)
{
    require_size(x.size(), problem.dim_x(), "evaluate_constraints");
    if (!problem.constraints) {
        return {Vector(), 0.0};
    }
    Vector g = problem.constraints->value(x);
    require_size(g.size(), problem.dim_y(), "evaluate_constraints");
    require_finite(g, "evaluate_constraints");
    const double r = distance(problem.target, g);
    return {std::move(g), r};
}

/// Structural checks shared by all solvers.
inline void validate(const Problem& problem)
{
    if (!problem.objective) {
        throw InvalidArgument("problem '" + problem.name + "' has no objective");
    }
    require_size(problem.geometric.dim(), problem.dim_x(), "problem geometric set");
    if (problem.constraints) {
        if (!problem.constraints->value || !problem.constraints->adjoint) {
            throw InvalidArgument("problem '" + problem.name + "' has an incomplete constraint map");
        }
        require_size(problem.target.dim(), problem.dim_y(), "problem convex target");
    }
}

} // namespace pdgeo
