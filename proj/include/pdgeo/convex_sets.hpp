#pragma once

#include <pdgeo/types.hpp>

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>
#include <variant>
#include <vector>

namespace pdgeo {

// Membership tolerance on the distance to a convex target.
inline constexpr double kMembershipTol = 1e-12;

class ConvexTarget;

namespace convex {

struct WholeSpace {
    Index dim;
};

struct SingletonZero {
    Index dim;
};

/// Componentwise bounds; ±infinity is allowed. l = u pins a coordinate.
struct Box {
    Vector lower;
    Vector upper;
};

/// { z : z >= 0, sum(z) = 1 }
struct UnitSimplex {
    Index dim;
};

/// { z : z <= t } componentwise.
struct ShiftedNonpositive {
    Vector t;
};

struct Product {
    std::vector<ConvexTarget> parts;
};

} // namespace convex

/// Closed convex set C in the constraint space, exposing the projection P_C,
/// dist_C and the gradient of s_C = ½ dist_C².
class ConvexTarget {
public:
    using Variant = std::variant<convex::WholeSpace, convex::SingletonZero, convex::Box,
                                 convex::UnitSimplex, convex::ShiftedNonpositive,
                                 convex::Product>;

    ConvexTarget() : v_(convex::WholeSpace{0}) {}

    static ConvexTarget whole_space(Index dim) { return ConvexTarget(convex::WholeSpace{dim}); }
    static ConvexTarget singleton_zero(Index dim) { return ConvexTarget(convex::SingletonZero{dim}); }
    static ConvexTarget box(Vector lower, Vector upper)
    {
        require_size(upper.size(), lower.size(), "ConvexTarget::box");
        for (Index i = 0; i < lower.size(); ++i) {
            if (!(lower[i] <= upper[i])) {
                throw InvalidArgument("ConvexTarget::box: lower bound exceeds upper bound");
            }
        }
        return ConvexTarget(convex::Box{std::move(lower), std::move(upper)});
    }
    static ConvexTarget unit_simplex(Index dim) { return ConvexTarget(convex::UnitSimplex{dim}); }
    static ConvexTarget nonpositive_shifted(Vector t)
    {
        return ConvexTarget(convex::ShiftedNonpositive{std::move(t)});
    }
    static ConvexTarget product(std::vector<ConvexTarget> parts)
    {
        return ConvexTarget(convex::Product{std::move(parts)});
    }

    const Variant& variant() const { return v_; }

    Index dim() const
    {
        return std::visit(
            [](const auto& s) -> Index {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, convex::Box>) {
                    return s.lower.size();
                } else if constexpr (std::is_same_v<T, convex::ShiftedNonpositive>) {
                    return s.t.size();
                } else if constexpr (std::is_same_v<T, convex::Product>) {
                    Index d = 0;
                    for (const auto& p : s.parts) {
                        d += p.dim();
                    }
                    return d;
                } else {
                    return s.dim;
                }
            },
            v_);
    }

    const char* kind() const
    {
        static constexpr const char* names[] = {"whole_space", "singleton_zero", "box",
                                                "unit_simplex", "nonpositive_shifted",
                                                "cartesian_product"};
        return names[v_.index()];
    }

    Vector project(const Vector& y) const;

private:
    explicit ConvexTarget(Variant v) : v_(std::move(v)) {}

    Variant v_;
};

namespace detail {

/// Sort-based Euclidean projection onto the unit simplex.
inline Vector project_unit_simplex(const Vector& y)
{
    const Index n = y.size();
    std::vector<double> u(y.data(), y.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double running = 0.0;
    double theta = 0.0;
    for (Index j = 0; j < n; ++j) {
        running += u[j];
        const double shift = (running - 1.0) / static_cast<double>(j + 1);
        if (u[j] - shift > 0.0) {
            theta = shift;
        }
    }
    return (y.array() - theta).max(0.0).matrix();
}

} // namespace detail

inline Vector ConvexTarget::project(const Vector& y) const
{
    require_size(y.size(), dim(), "project_convex");
    return std::visit(
        [&](const auto& s) -> Vector {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, convex::WholeSpace>) {
                return y;
            } else if constexpr (std::is_same_v<T, convex::SingletonZero>) {
                return Vector::Zero(y.size());
            } else if constexpr (std::is_same_v<T, convex::Box>) {
                return y.cwiseMax(s.lower).cwiseMin(s.upper);
            } else if constexpr (std::is_same_v<T, convex::UnitSimplex>) {
                return detail::project_unit_simplex(y);
            } else if constexpr (std::is_same_v<T, convex::ShiftedNonpositive>) {
                return y.cwiseMin(s.t);
            } else {
                Vector out(y.size());
                Index offset = 0;
                for (const auto& part : s.parts) {
                    const Index d = part.dim();
                    out.segment(offset, d) = part.project(y.segment(offset, d));
                    offset += d;
                }
                return out;
            }
        },
        v_);
}

inline Vector project_convex(const ConvexTarget& set, const Vector& y)
{
    return set.project(y);
}

inline double distance(const ConvexTarget& set, const Vector& y)
{
    return (y - set.project(y)).norm();
}

inline bool contains(const ConvexTarget& set, const Vector& y, double tol = kMembershipTol)
{
    return distance(set, y) <= tol;
}

struct SquaredDistance {
    double value;  // ½‖y − P_C(y)‖²
    Vector grad;   // y − P_C(y)
};

inline SquaredDistance squared_distance_and_gradient(const ConvexTarget& set, const Vector& y)
{
    Vector r = y - set.project(y);
    const double s = 0.5 * r.squaredNorm();
    return {s, std::move(r)};
}

} // namespace pdgeo
