#pragma once

#include <pdgeo/linalg.hpp>
#include <pdgeo/types.hpp>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pdgeo {

// =======================================================================
// Closed-form and small-QP projections onto nonconvex sets D.
// All ties are broken deterministically (lowest index / first branch /
// lowest member), so Π_D is a single-valued selection.
// =======================================================================

/// Keep the s entries of largest magnitude; ties go to the lower index.
inline Vector project_sparse(const Vector& x, Index s)
{
    const Index n = x.size();
    if (s <= 0 || s >= n) {
        throw InvalidArgument("project_sparse: require 0 < s < n");
    }
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    auto before = [&x](Index a, Index b) {
        const double fa = std::abs(x[a]);
        const double fb = std::abs(x[b]);
        return fa > fb || (fa == fb && a < b);
    };
    std::nth_element(idx.begin(), idx.begin() + (s - 1), idx.end(), before);
    Vector out = Vector::Zero(n);
    for (Index i = 0; i < s; ++i) {
        out[idx[i]] = x[idx[i]];
    }
    return out;
}

/// Best rank-κ approximation (Eckart–Young) from the SVD.
inline Matrix truncated_svd_project(const Matrix& x, Index kappa)
{
    const Index q = std::min(x.rows(), x.cols());
    if (kappa < 1 || kappa > q - 1) {
        throw InvalidArgument("truncated_svd_project: require 1 <= kappa <= min(m,n)-1");
    }
    const auto f = linalg::svd(x);
    return f.vectors.leftCols(kappa) * f.values.head(kappa).asDiagonal()
           * f.right_vectors.leftCols(kappa).transpose();
}

inline constexpr double kSymmetryTol = 1e-8;

/// Σ_{i≤κ} max(0, λ_i) v_i v_iᵀ over the κ largest eigenpairs.
inline Matrix psd_lowrank_project(const Matrix& x, Index kappa)
{
    if (x.rows() != x.cols()) {
        throw DimensionError("psd_lowrank_project: matrix must be square");
    }
    const Index n = x.rows();
    if (kappa < 1 || kappa > n - 1) {
        throw InvalidArgument("psd_lowrank_project: require 1 <= kappa <= n-1");
    }
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if ((x - x.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw InvalidArgument("psd_lowrank_project: matrix is not symmetric");
    }
    const Matrix sym = 0.5 * (x + x.transpose());
    const auto f = linalg::top_eigenpairs(sym, kappa);
    Matrix out = Matrix::Zero(n, n);
    for (Index i = 0; i < f.values.size(); ++i) {
        if (f.values[i] > 0.0) {
            out.noalias() += f.values[i] * f.vectors.col(i) * f.vectors.col(i).transpose();
        }
    }
    return 0.5 * (out + out.transpose());
}

// Packed symmetric storage: upper triangle, column-major, off-diagonal
// entries scaled by √2 so the packing is an isometry for the Frobenius norm.
inline Index packed_size(Index n) { return n * (n + 1) / 2; }

inline Index packed_index(Index i, Index j)
{
    if (i > j) {
        std::swap(i, j);
    }
    return j * (j + 1) / 2 + i;
}

inline Vector pack_symmetric(const Matrix& x)
{
    const Index n = x.rows();
    Vector out(packed_size(n));
    const double r2 = std::sqrt(2.0);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i <= j; ++i) {
            out[packed_index(i, j)] = (i == j) ? x(i, i) : r2 * 0.5 * (x(i, j) + x(j, i));
        }
    }
    return out;
}

inline Index packed_order(Index packed_len)
{
    const auto n = static_cast<Index>(std::llround((std::sqrt(8.0 * static_cast<double>(packed_len) + 1.0) - 1.0) / 2.0));
    if (packed_size(n) != packed_len) {
        throw DimensionError("unpack_symmetric: length is not triangular");
    }
    return n;
}

inline Matrix unpack_symmetric(const Vector& v)
{
    const Index n = packed_order(v.size());
    Matrix out(n, n);
    const double inv_r2 = 1.0 / std::sqrt(2.0);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i <= j; ++i) {
            const double val = (i == j) ? v[packed_index(i, j)] : inv_r2 * v[packed_index(i, j)];
            out(i, j) = val;
            out(j, i) = val;
        }
    }
    return out;
}

struct BoxSwitchingBounds {
    Vector lx, ux, ly, uy;
};

/// Pairwise projection onto { x_i y_i = 0, l ≤ (x, y) ≤ u }. On equal branch
/// distances the (x̃_i, 0) branch is kept.
inline std::pair<Vector, Vector> project_box_switching(const Vector& x, const Vector& y,
                                                      const BoxSwitchingBounds& b)
{
    const Index n = x.size();
    require_size(y.size(), n, "project_box_switching");
    require_size(b.lx.size(), n, "project_box_switching bounds");
    require_size(b.ux.size(), n, "project_box_switching bounds");
    require_size(b.ly.size(), n, "project_box_switching bounds");
    require_size(b.uy.size(), n, "project_box_switching bounds");
    Vector px(n), py(n);
    for (Index i = 0; i < n; ++i) {
        if (!(b.lx[i] <= 0.0 && 0.0 <= b.ux[i] && b.ly[i] <= 0.0 && 0.0 <= b.uy[i])) {
            throw InvalidArgument("project_box_switching: bounds must contain 0");
        }
        const double xt = std::clamp(x[i], b.lx[i], b.ux[i]);
        const double yt = std::clamp(y[i], b.ly[i], b.uy[i]);
        const double keep_x = (xt - x[i]) * (xt - x[i]) + y[i] * y[i];
        const double keep_y = x[i] * x[i] + (yt - y[i]) * (yt - y[i]);
        if (keep_y >= keep_x) {
            px[i] = xt;
            py[i] = 0.0;
        } else {
            px[i] = 0.0;
            py[i] = yt;
        }
    }
    return {std::move(px), std::move(py)};
}

// -----------------------------------------------------------------------
// Polyhedron projection: least-distance programming through Lawson–Hanson
// nonnegative least squares.
// -----------------------------------------------------------------------

struct NnlsResult {
    Vector u;
    Vector residual; // E u − f
    int iterations = 0;
};

/// min ‖E u − f‖ s.t. u ≥ 0 (Lawson–Hanson active set, lowest-index pivoting).
inline NnlsResult nnls(const Matrix& e, const Vector& f, int max_iterations = 0)
{
    const Index m = e.cols();
    require_size(f.size(), e.rows(), "nnls");
    if (max_iterations <= 0) {
        max_iterations = static_cast<int>(3 * m + 10);
    }
    Vector u = Vector::Zero(m);
    std::vector<bool> passive(static_cast<std::size_t>(m), false);
    std::vector<bool> skip(static_cast<std::size_t>(m), false);
    const double tol = 1e-13 * std::max(1.0, e.cwiseAbs().maxCoeff() * std::max(1.0, f.norm()));

    auto solve_passive = [&](Vector& z) {
        std::vector<Index> cols;
        for (Index j = 0; j < m; ++j) {
            if (passive[j]) {
                cols.push_back(j);
            }
        }
        Matrix ep(e.rows(), static_cast<Index>(cols.size()));
        for (std::size_t k = 0; k < cols.size(); ++k) {
            ep.col(static_cast<Index>(k)) = e.col(cols[k]);
        }
        const Vector zp = ep.colPivHouseholderQr().solve(f);
        z.setZero(m);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            z[cols[k]] = zp[static_cast<Index>(k)];
        }
    };

    int it = 0;
    for (; it < max_iterations; ++it) {
        const Vector w = e.transpose() * (f - e * u);
        Index t = -1;
        double best = tol;
        for (Index j = 0; j < m; ++j) {
            if (!passive[j] && !skip[j] && w[j] > best) {
                best = w[j];
                t = j;
            }
        }
        if (t < 0) {
            break;
        }
        passive[t] = true;
        std::fill(skip.begin(), skip.end(), false);
        Vector z;
        solve_passive(z);
        if (z[t] <= 0.0) {
            // Numerically unable to enter; exclude until the passive set changes.
            passive[t] = false;
            skip[t] = true;
            continue;
        }
        for (int inner = 0; inner < max_iterations; ++inner) {
            bool all_positive = true;
            double alpha = 1.0;
            for (Index j = 0; j < m; ++j) {
                if (passive[j] && z[j] <= 0.0) {
                    all_positive = false;
                    alpha = std::min(alpha, u[j] / (u[j] - z[j]));
                }
            }
            if (all_positive) {
                break;
            }
            u += alpha * (z - u);
            for (Index j = 0; j < m; ++j) {
                if (passive[j] && u[j] <= 1e-15) {
                    passive[j] = false;
                    u[j] = 0.0;
                }
            }
            solve_passive(z);
        }
        u = z;
    }
    if (it >= max_iterations) {
        throw NumericalFailure("nnls: active-set iteration limit exceeded");
    }
    return {u, e * u - f, it};
}

struct PolyhedronProjection {
    Vector point;
    Vector multipliers; // point = x − Aᵀ·multipliers, multipliers ≥ 0
};

inline constexpr double kPolyhedronFeasTol = 1e-8;

namespace detail {

inline PolyhedronProjection project_polyhedron_pass(const Vector& x, const Matrix& a, const Vector& b)
{
    const Index n = x.size();
    const Index s = a.rows();
    const Vector slack = b - a * x;
    if (s == 0 || (slack.array() >= 0.0).all()) {
        return {x, Vector::Zero(s)};
    }
    // min ‖w‖ s.t. (−A) w ≥ A x − b, via NNLS on E = [−Aᵀ; (Ax − b)ᵀ], f = e_{n+1}.
    const Vector h = a * x - b;
    Matrix e(n + 1, s);
    e.topRows(n) = -a.transpose();
    e.row(n) = h.transpose();
    Vector f = Vector::Zero(n + 1);
    f[n] = 1.0;
    const NnlsResult r = nnls(e, f);
    const double denom = -r.residual[n];
    if (r.residual.norm() <= 1e-10 || denom <= 1e-14) {
        throw NumericalFailure("project_polyhedron: polyhedron is empty");
    }
    Vector w = -r.residual.head(n) / r.residual[n];
    return {x + w, r.u / denom};
}

} // namespace detail

inline constexpr int kPolyhedronRefinePasses = 3;

/// Euclidean projection onto { z : A z ≤ b }. A few refinement passes from
/// the approximate projection absorb rounding in the NNLS reconstruction.
inline PolyhedronProjection project_polyhedron_kkt(const Vector& x, const Matrix& a, const Vector& b)
{
    require_size(a.cols(), x.size(), "project_polyhedron");
    require_size(b.size(), a.rows(), "project_polyhedron");
    PolyhedronProjection out = detail::project_polyhedron_pass(x, a, b);
    if (a.rows() == 0) {
        return out;
    }
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    for (int pass = 0; pass < kPolyhedronRefinePasses; ++pass) {
        if ((a * out.point - b).maxCoeff() <= kPolyhedronFeasTol * scale) {
            return out;
        }
        PolyhedronProjection again = detail::project_polyhedron_pass(out.point, a, b);
        out.point = std::move(again.point);
        out.multipliers += again.multipliers;
    }
    if ((a * out.point - b).maxCoeff() > kPolyhedronFeasTol * scale) {
        throw NumericalFailure("project_polyhedron: could not reach feasibility tolerance");
    }
    return out;
}

inline Vector project_polyhedron(const Vector& x, const Matrix& a, const Vector& b)
{
    return project_polyhedron_kkt(x, a, b).point;
}

struct Polyhedron {
    Matrix a;
    Vector b;
};

/// Closest of the member projections; ties go to the lowest member index.
inline Vector project_disjunctive(const Vector& x, const std::vector<Polyhedron>& members,
                                  Index* chosen = nullptr)
{
    if (members.empty()) {
        throw InvalidArgument("project_disjunctive: need at least one polyhedron");
    }
    Vector best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < members.size(); ++q) {
        Vector p = project_polyhedron(x, members[q].a, members[q].b);
        const double d = (p - x).squaredNorm();
        if (d < best_dist) {
            best_dist = d;
            best = std::move(p);
            if (chosen != nullptr) {
                *chosen = static_cast<Index>(q);
            }
        }
    }
    return best;
}

// -----------------------------------------------------------------------
// GeometricSet: the set-valued Π_D with a deterministic selection.
// -----------------------------------------------------------------------

class GeometricSet;

namespace geometric {

struct WholeSpace {
    Index dim;
};
struct Sparsity {
    Index dim;
    Index s;
};
struct LowRank {
    Shape shape;
    Index kappa;
};
/// PSD matrices of rank ≤ κ; `packed` selects the √2-scaled triangle storage.
struct PsdLowRank {
    Index n;
    Index kappa;
    bool packed = false;
};
/// Vector layout [x; y], each of length n.
struct BoxSwitching {
    BoxSwitchingBounds bounds;
};
struct DisjunctiveUnion {
    Index dim;
    std::vector<Polyhedron> members;
};
struct Product {
    std::vector<GeometricSet> parts;
};

} // namespace geometric

class GeometricSet {
public:
    using Variant = std::variant<geometric::WholeSpace, geometric::Sparsity, geometric::LowRank,
                                 geometric::PsdLowRank, geometric::BoxSwitching,
                                 geometric::DisjunctiveUnion, geometric::Product>;

    GeometricSet() : v_(geometric::WholeSpace{0}) {}

    static GeometricSet whole_space(Index dim) { return GeometricSet(geometric::WholeSpace{dim}); }

    static GeometricSet sparsity(Index n, Index s)
    {
        if (s <= 0 || s >= n) {
            throw InvalidArgument("GeometricSet::sparsity: require 0 < s < n");
        }
        return GeometricSet(geometric::Sparsity{n, s});
    }

    static GeometricSet low_rank(Shape shape, Index kappa)
    {
        if (kappa < 1 || kappa > std::min(shape.rows, shape.cols) - 1) {
            throw InvalidArgument("GeometricSet::low_rank: require 1 <= kappa <= min(m,n)-1");
        }
        return GeometricSet(geometric::LowRank{shape, kappa});
    }

    static GeometricSet psd_low_rank(Index n, Index kappa, bool packed = false)
    {
        if (kappa < 1 || kappa > n - 1) {
            throw InvalidArgument("GeometricSet::psd_low_rank: require 1 <= kappa <= n-1");
        }
        return GeometricSet(geometric::PsdLowRank{n, kappa, packed});
    }

    static GeometricSet box_switching(BoxSwitchingBounds b)
    {
        const Index n = b.lx.size();
        require_size(b.ux.size(), n, "GeometricSet::box_switching");
        require_size(b.ly.size(), n, "GeometricSet::box_switching");
        require_size(b.uy.size(), n, "GeometricSet::box_switching");
        for (Index i = 0; i < n; ++i) {
            if (!(b.lx[i] <= 0.0 && 0.0 <= b.ux[i] && b.ly[i] <= 0.0 && 0.0 <= b.uy[i])) {
                throw InvalidArgument("GeometricSet::box_switching: bounds must contain 0");
            }
        }
        return GeometricSet(geometric::BoxSwitching{std::move(b)});
    }

    static GeometricSet disjunctive_union(Index dim, std::vector<Polyhedron> members)
    {
        if (members.empty()) {
            throw InvalidArgument("GeometricSet::disjunctive_union: need N >= 1 members");
        }
        for (const auto& p : members) {
            require_size(p.a.cols(), dim, "GeometricSet::disjunctive_union");
            require_size(p.b.size(), p.a.rows(), "GeometricSet::disjunctive_union");
        }
        return GeometricSet(geometric::DisjunctiveUnion{dim, std::move(members)});
    }

    static GeometricSet product(std::vector<GeometricSet> parts)
    {
        return GeometricSet(geometric::Product{std::move(parts)});
    }

    const Variant& variant() const { return v_; }

    Index dim() const
    {
        return std::visit(
            [](const auto& s) -> Index {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, geometric::LowRank>) {
                    return s.shape.size();
                } else if constexpr (std::is_same_v<T, geometric::PsdLowRank>) {
                    return s.packed ? packed_size(s.n) : s.n * s.n;
                } else if constexpr (std::is_same_v<T, geometric::BoxSwitching>) {
                    return 2 * s.bounds.lx.size();
                } else if constexpr (std::is_same_v<T, geometric::Product>) {
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
        static constexpr const char* names[] = {"whole_space", "sparsity", "low_rank",
                                                "psd_low_rank", "box_switching",
                                                "disjunctive_union", "product"};
        return names[v_.index()];
    }

    Vector project(const Vector& x) const;

    /// Membership through the projection fixed-point identity.
    bool contains(const Vector& x, double tol = 1e-10) const
    {
        return (project(x) - x).norm() <= tol * std::max(1.0, x.norm());
    }

private:
    explicit GeometricSet(Variant v) : v_(std::move(v)) {}

    Variant v_;
};

inline Vector GeometricSet::project(const Vector& x) const
{
    require_size(x.size(), dim(), "GeometricSet::project");
    return std::visit(
        [&](const auto& s) -> Vector {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, geometric::WholeSpace>) {
                return x;
            } else if constexpr (std::is_same_v<T, geometric::Sparsity>) {
                return project_sparse(x, s.s);
            } else if constexpr (std::is_same_v<T, geometric::LowRank>) {
                return as_vector(truncated_svd_project(as_matrix(x, s.shape), s.kappa));
            } else if constexpr (std::is_same_v<T, geometric::PsdLowRank>) {
                if (s.packed) {
                    return pack_symmetric(psd_lowrank_project(unpack_symmetric(x), s.kappa));
                }
                return as_vector(psd_lowrank_project(as_matrix(x, Shape{s.n, s.n}), s.kappa));
            } else if constexpr (std::is_same_v<T, geometric::BoxSwitching>) {
                const Index n = s.bounds.lx.size();
                auto [px, py] = project_box_switching(x.head(n), x.tail(n), s.bounds);
                Vector out(2 * n);
                out << px, py;
                return out;
            } else if constexpr (std::is_same_v<T, geometric::DisjunctiveUnion>) {
                return project_disjunctive(x, s.members);
            } else {
                Vector out(x.size());
                Index offset = 0;
                for (const auto& part : s.parts) {
                    const Index d = part.dim();
                    out.segment(offset, d) = part.project(x.segment(offset, d));
                    offset += d;
                }
                return out;
            }
        },
        v_);
}

} // namespace pdgeo
