#pragma once

#include <pdgeo/convex_sets.hpp>
#include <pdgeo/geometric_sets.hpp>
#include <pdgeo/problem.hpp>
#include <pdgeo/rng.hpp>
#include <pdgeo/run_record.hpp>
#include <pdgeo/types.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pdgeo::zoo {

// -----------------------------------------------------------------------
// Quadratic families: ½xᵀQx + ν cᵀx
// -----------------------------------------------------------------------

/// Q is either explicit or Y·diag(d)·Y with the Householder reflector
/// Y = I − 2uuᵀ/‖u‖². In the reflector form products are applied factor by
/// factor so that xᵀQx ≥ 0 holds in floating point even when d spans many
/// orders of magnitude.
struct QuadraticData {
    Index n = 0;
    Matrix q;         // explicit form (always filled, used for inspection)
    Vector u;         // reflector vector, empty for the explicit form
    Vector d;         // spectrum in the reflector form
    Vector c;
    double nu = 1.0;

    bool factored() const { return u.size() > 0; }

    Vector reflect(const Vector& x) const
    {
        return x - (2.0 * u.dot(x) / u.squaredNorm()) * u;
    }

    Vector apply(const Vector& x) const
    {
        if (factored()) {
            return reflect(d.cwiseProduct(reflect(x)));
        }
        return q * x;
    }

    /// ½xᵀQx + νcᵀx and its gradient.
    double value(const Vector& x, Vector& grad) const
    {
        if (factored()) {
            const Vector z = reflect(x);
            const Vector dz = d.cwiseProduct(z);
            grad = reflect(dz) + nu * c;
            return 0.5 * z.dot(dz) + nu * c.dot(x);
        }
        const Vector qx = q * x;
        grad = qx + nu * c;
        return 0.5 * x.dot(qx) + nu * c.dot(x);
    }

    /// Principal submatrix Q_SS computed from the factors.
    Matrix restricted(const std::vector<Index>& support) const
    {
        const Index k = static_cast<Index>(support.size());
        Matrix out(k, k);
        if (factored()) {
            Matrix ys(n, k);
            for (Index j = 0; j < k; ++j) {
                ys.col(j) = reflect(Vector::Unit(n, support[j]));
            }
            out = ys.transpose() * d.asDiagonal() * ys;
            out = 0.5 * (out + out.transpose()).eval();
        } else {
            for (Index i = 0; i < k; ++i) {
                for (Index j = 0; j < k; ++j) {
                    out(i, j) = q(support[i], support[j]);
                }
            }
        }
        return out;
    }
};

/// Q = Y D Y with y_i ~ U(−1,1), d_i = exp(((i−1)/(n−1))·n_cond), c_i ~ U(−1,1).
/// Streams: 1 → reflector, 2 → c.
inline QuadraticData sparse_qp_data(Index n, double n_cond, double nu, std::uint64_t seed)
{
    if (n < 2) {
        throw InvalidArgument("sparse_qp_data: n must be >= 2");
    }
    QuadraticData data;
    data.n = n;
    data.nu = nu;
    Rng ry(seed, 1);
    data.u.resize(n);
    for (Index i = 0; i < n; ++i) {
        data.u[i] = ry.uniform(-1.0, 1.0);
    }
    data.d.resize(n);
    for (Index i = 0; i < n; ++i) {
        data.d[i] = std::exp(static_cast<double>(i) / static_cast<double>(n - 1) * n_cond);
    }
    Rng rc(seed, 2);
    data.c.resize(n);
    for (Index i = 0; i < n; ++i) {
        data.c[i] = rc.uniform(-1.0, 1.0);
    }
    const Matrix y = Matrix::Identity(n, n) - (2.0 / data.u.squaredNorm()) * data.u * data.u.transpose();
    data.q = y * data.d.asDiagonal() * y;
    data.q = 0.5 * (data.q + data.q.transpose()).eval();
    return data;
}

/// Q = E + I, c = −(3,2,3,12,5), ν = 1.
inline QuadraticData beck_eldar_data()
{
    QuadraticData data;
    data.n = 5;
    data.q = Matrix::Ones(5, 5) + Matrix::Identity(5, 5);
    data.c.resize(5);
    data.c << -3.0, -2.0, -3.0, -12.0, -5.0;
    data.nu = 1.0;
    return data;
}

inline ObjectiveFn quadratic_objective(std::shared_ptr<const QuadraticData> data)
{
    return [data](const Vector& x, Vector& grad) { return data->value(x, grad); };
}

inline Problem gen_sparse_qp(Index n, double n_cond, Index s, double nu, std::uint64_t seed)
{
    auto data = std::make_shared<const QuadraticData>(sparse_qp_data(n, n_cond, nu, seed));
    Problem p;
    p.name = "sparse_qp_n" + std::to_string(n) + "_c" + std::to_string(static_cast<long>(n_cond)) + "_s"
             + std::to_string(s) + "_seed" + std::to_string(seed);
    p.shape = Shape{n, 1};
    p.objective = quadratic_objective(data);
    p.geometric = GeometricSet::sparsity(n, s);
    return p;
}

inline Problem gen_beck_eldar()
{
    auto data = std::make_shared<const QuadraticData>(beck_eldar_data());
    Problem p;
    p.name = "beck_eldar";
    p.shape = Shape{5, 1};
    p.objective = quadratic_objective(data);
    p.geometric = GeometricSet::sparsity(5, 2);
    return p;
}

/// min ½xᵀQx + νcᵀx s.t. x ∈ unit simplex (G = identity), ‖x‖₀ ≤ s.
inline Problem gen_portfolio(Index n, double n_cond, Index s, double nu, std::uint64_t seed)
{
    auto data = std::make_shared<const QuadraticData>(sparse_qp_data(n, n_cond, nu, seed));
    Problem p;
    p.name = "portfolio_n" + std::to_string(n) + "_c" + std::to_string(static_cast<long>(n_cond)) + "_s"
             + std::to_string(s) + "_seed" + std::to_string(seed);
    p.shape = Shape{n, 1};
    p.objective = quadratic_objective(data);
    p.constraints = ConstraintMap{n, [](const Vector& x) { return x; },
                                  [](const Vector&, const Vector& lambda) { return lambda; }};
    p.target = ConvexTarget::unit_simplex(n);
    p.geometric = GeometricSet::sparsity(n, s);
    return p;
}

// -----------------------------------------------------------------------
// Nearest low-rank correlation matrices (packed symmetric variable)
// -----------------------------------------------------------------------

enum class CorrelationVariant { p1, p2, p3 };

inline CorrelationVariant correlation_variant_from_string(std::string_view s)
{
    if (s == "P1" || s == "p1") return CorrelationVariant::p1;
    if (s == "P2" || s == "p2") return CorrelationVariant::p2;
    if (s == "P3" || s == "p3") return CorrelationVariant::p3;
    throw InvalidArgument("unknown correlation variant '" + std::string(s) + "'");
}

inline std::string_view to_string(CorrelationVariant v)
{
    switch (v) {
    case CorrelationVariant::p1: return "P1";
    case CorrelationVariant::p2: return "P2";
    case CorrelationVariant::p3: return "P3";
    }
    return "?";
}

inline Matrix correlation_matrix(CorrelationVariant v, Index n)
{
    Matrix a(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double t = std::abs(static_cast<double>(i - j));
            switch (v) {
            case CorrelationVariant::p1: a(i, j) = 0.5 + 0.5 * std::exp(-0.05 * t); break;
            case CorrelationVariant::p2: a(i, j) = std::exp(-t); break;
            case CorrelationVariant::p3: a(i, j) = 0.6 + 0.4 * std::exp(-0.1 * t); break;
            }
        }
    }
    return a;
}

/// Positions of the diagonal entries inside the packed vector.
inline std::vector<Index> packed_diagonal(Index n)
{
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        idx[static_cast<std::size_t>(i)] = packed_index(i, i);
    }
    return idx;
}

enum class CorrelationUpdate { none, exact, exact_lower_level };

/// f(X) = ½‖X − A‖_F², G(X) = diag(X), C = {e}, D = PSD matrices of rank ≤ κ.
/// X lives in packed storage, so f(x) = ½‖x − pack(A)‖².
inline Problem gen_correlation(CorrelationVariant v, Index n, Index kappa,
                               CorrelationUpdate update = CorrelationUpdate::none)
{
    if (n < 2 || kappa < 1 || kappa >= n) {
        throw InvalidArgument("gen_correlation: require n >= 2 and 1 <= kappa < n");
    }
    auto a = std::make_shared<const Vector>(pack_symmetric(correlation_matrix(v, n)));
    auto diag = std::make_shared<const std::vector<Index>>(packed_diagonal(n));
    const Index len = packed_size(n);

    Problem p;
    p.name = std::string(to_string(v)) + "_n" + std::to_string(n) + "_k" + std::to_string(kappa);
    p.shape = Shape{len, 1};
    p.objective = [a](const Vector& x, Vector& grad) {
        grad = x - *a;
        return 0.5 * grad.squaredNorm();
    };
    p.constraints = ConstraintMap{
        n,
        [diag](const Vector& x) {
            Vector g(static_cast<Index>(diag->size()));
            for (std::size_t i = 0; i < diag->size(); ++i) {
                g[static_cast<Index>(i)] = x[(*diag)[i]];
            }
            return g;
        },
        [diag, len](const Vector&, const Vector& lambda) {
            Vector out = Vector::Zero(len);
            for (std::size_t i = 0; i < diag->size(); ++i) {
                out[(*diag)[i]] = lambda[static_cast<Index>(i)];
            }
            return out;
        }};
    p.target = ConvexTarget::box(Vector::Ones(n), Vector::Ones(n));
    p.geometric = GeometricSet::psd_low_rank(n, kappa, true);

    if (update == CorrelationUpdate::exact) {
        // argmin_x ½‖x−a‖² + ⟨μ,x−y⟩ + τ/2‖x−y‖² + τ/2‖diag(x) + λ/τ − e‖²
        p.exact_x_update = [a, diag](const Vector& y, double tau, const Vector* lambda, const Vector* mu) {
            Vector rhs = *a + tau * y;
            if (mu) {
                rhs -= *mu;
            }
            Vector x = rhs / (1.0 + tau);
            for (std::size_t i = 0; i < diag->size(); ++i) {
                const Index k = (*diag)[i];
                double r = rhs[k] + tau;
                if (lambda) {
                    r -= (*lambda)[static_cast<Index>(i)];
                }
                x[k] = r / (1.0 + 2.0 * tau);
            }
            return x;
        };
        p.name += "_exact";
    } else if (update == CorrelationUpdate::exact_lower_level) {
        // diag(X) = e kept inside the x-subproblem.
        p.exact_x_update = [a, diag](const Vector& y, double tau, const Vector*, const Vector* mu) {
            Vector rhs = *a + tau * y;
            if (mu) {
                rhs -= *mu;
            }
            Vector x = rhs / (1.0 + tau);
            for (Index k : *diag) {
                x[k] = 1.0;
            }
            return x;
        };
        p.name += "_lower_level";
    }
    return p;
}

// -----------------------------------------------------------------------
// Logistic losses
// -----------------------------------------------------------------------

namespace detail {

inline double log1p_exp(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

inline double sigmoid(double z)
{
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace detail

/// Σ_i log(1 + exp(a_iᵀw)) − y_i a_iᵀw with labels in {0,1}.
struct LogisticData {
    Matrix features;  // samples × dim
    Vector labels;

    double value(const Vector& w, Vector* grad) const
    {
        const Vector z = features * w;
        double v = 0.0;
        Vector r(z.size());
        for (Index i = 0; i < z.size(); ++i) {
            v += detail::log1p_exp(z[i]) - labels[i] * z[i];
            r[i] = detail::sigmoid(z[i]) - labels[i];
        }
        if (grad) {
            *grad = features.transpose() * r;
        }
        return v;
    }

    Matrix hessian(const Vector& w) const
    {
        const Vector z = features * w;
        Vector s(z.size());
        for (Index i = 0; i < z.size(); ++i) {
            const double p = detail::sigmoid(z[i]);
            s[i] = p * (1.0 - p);
        }
        return features.transpose() * s.asDiagonal() * features;
    }
};

/// Gaussian features, labels Bernoulli(σ(aᵀw_true)).
inline LogisticData logistic_data(Index samples, Index dim, const Vector& w_true, Rng& rng)
{
    LogisticData d;
    d.features.resize(samples, dim);
    d.labels.resize(samples);
    for (Index i = 0; i < samples; ++i) {
        for (Index j = 0; j < dim; ++j) {
            d.features(i, j) = rng.normal();
        }
    }
    for (Index i = 0; i < samples; ++i) {
        const double p = detail::sigmoid(d.features.row(i).dot(w_true));
        d.labels[i] = rng.uniform() < p ? 1.0 : 0.0;
    }
    return d;
}

// -----------------------------------------------------------------------
// Low-rank multitask logistic regression
// -----------------------------------------------------------------------

struct MultitaskData {
    Index tasks = 0;
    Index dim = 0;
    double eta = 0.1;
    std::vector<LogisticData> per_task;
};

/// Tasks split between two latent clusters (task t belongs to cluster t mod 2):
/// w_t = center + 0.3·N(0, I). Streams: 1 → centers, 2 + t → task t.
inline MultitaskData multitask_data(Index tasks, Index dim, Index samples, double eta, std::uint64_t seed)
{
    MultitaskData md;
    md.tasks = tasks;
    md.dim = dim;
    md.eta = eta;
    Rng rc(seed, 1);
    Matrix centers(2, dim);
    for (Index k = 0; k < 2; ++k) {
        for (Index j = 0; j < dim; ++j) {
            centers(k, j) = rc.normal();
        }
    }
    for (Index t = 0; t < tasks; ++t) {
        Rng rt(seed, 2 + static_cast<std::uint64_t>(t));
        Vector w = centers.row(t % 2).transpose();
        for (Index j = 0; j < dim; ++j) {
            w[j] += 0.3 * rt.normal();
        }
        md.per_task.push_back(logistic_data(samples, dim, w, rt));
    }
    return md;
}

/// Variables x = [vec(W); vec(U); vec(V)], each tasks × dim in column-major order.
/// f = Σ_t L(W_t) + η‖U‖², G = W − U − V, C = {0}, D = 𝕏 × 𝕏 × {rank(V) ≤ κ}.
inline Problem gen_multitask_logistic(Index tasks, Index dim, Index samples, Index kappa, double eta,
                                      std::uint64_t seed)
{
    if (tasks < 2 || dim < 2 || kappa < 1 || kappa >= std::min(tasks, dim)) {
        throw InvalidArgument("gen_multitask_logistic: require tasks, dim >= 2 and kappa < min(tasks, dim)");
    }
    auto md = std::make_shared<const MultitaskData>(multitask_data(tasks, dim, samples, eta, seed));
    const Index block = tasks * dim;
    Problem p;
    p.name = "multitask_m" + std::to_string(tasks) + "_n" + std::to_string(dim) + "_k" + std::to_string(kappa)
             + "_seed" + std::to_string(seed);
    p.shape = Shape{3 * block, 1};
    p.objective = [md, block](const Vector& x, Vector& grad) {
        grad = Vector::Zero(x.size());
        const Matrix w = Eigen::Map<const Matrix>(x.data(), md->tasks, md->dim);
        double v = 0.0;
        Matrix gw(md->tasks, md->dim);
        for (Index t = 0; t < md->tasks; ++t) {
            Vector gt;
            v += md->per_task[static_cast<std::size_t>(t)].value(w.row(t).transpose(), &gt);
            gw.row(t) = gt.transpose();
        }
        grad.head(block) = Eigen::Map<const Vector>(gw.data(), block);
        const auto u = x.segment(block, block);
        v += md->eta * u.squaredNorm();
        grad.segment(block, block) = 2.0 * md->eta * u;
        return v;
    };
    p.constraints = ConstraintMap{
        block,
        [block](const Vector& x) {
            return Vector(x.head(block) - x.segment(block, block) - x.tail(block));
        },
        [block](const Vector&, const Vector& lambda) {
            Vector out(3 * block);
            out << lambda, -lambda, -lambda;
            return out;
        }};
    p.target = ConvexTarget::singleton_zero(block);
    p.geometric = GeometricSet::product({GeometricSet::whole_space(block), GeometricSet::whole_space(block),
                                         GeometricSet::low_rank(Shape{tasks, dim}, kappa)});
    return p;
}

// -----------------------------------------------------------------------
// Log-barrier Newton machinery for small convex programs
// -----------------------------------------------------------------------

namespace detail {

// Smooth convex function with value, gradient and Hessian.
struct SmoothConvex {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> grad;
    std::function<Matrix(const Vector&)> hess;
};

// Centering step: Newton's method on t·f0(x) − Σ log(−h_k(x)) from a strictly
// feasible x. Returns false if Newton fails to make progress.
inline bool barrier_center(const SmoothConvex& f0, const std::vector<SmoothConvex>& h, double t, Vector& x)
{
    auto phi = [&](const Vector& z, bool& inside) {
        double v = t * f0.value(z);
        inside = true;
        for (const auto& hk : h) {
            const double hv = hk.value(z);
            if (!(hv < 0.0)) {
                inside = false;
                return std::numeric_limits<double>::infinity();
            }
            v -= std::log(-hv);
        }
        return v;
    };
    for (int it = 0; it < 200; ++it) {
        Vector g = t * f0.grad(x);
        Matrix hm = t * f0.hess(x);
        for (const auto& hk : h) {
            const double hv = hk.value(x);
            const Vector hg = hk.grad(x);
            g += hg / (-hv);
            hm += hg * hg.transpose() / (hv * hv) + hk.hess(x) / (-hv);
        }
        const Eigen::LDLT<Matrix> ldlt(hm);
        const Vector dx = -ldlt.solve(g);
        const double decrement2 = -g.dot(dx);
        if (!dx.allFinite()) {
            return false;
        }
        if (decrement2 / 2.0 <= 1e-12) {
            return true;
        }
        bool inside = true;
        const double v0 = phi(x, inside);
        double step = 1.0;
        for (int ls = 0; ls < 100; ++ls) {
            const Vector xn = x + step * dx;
            const double vn = phi(xn, inside);
            if (inside && vn <= v0 - 0.25 * step * decrement2) {
                x = xn;
                break;
            }
            step *= 0.5;
            if (ls == 99) {
                return true;  // no further progress possible at double precision
            }
        }
    }
    return true;
}

// min f0 s.t. h_k ≤ 0 via the barrier method, x strictly feasible on entry.
inline void barrier_solve(const SmoothConvex& f0, const std::vector<SmoothConvex>& h, Vector& x)
{
    const double kcount = static_cast<double>(h.size());
    double t = 1.0;
    for (int outer = 0; outer < 60; ++outer) {
        barrier_center(f0, h, t, x);
        if (kcount / t < 1e-10) {
            return;
        }
        t *= 10.0;
    }
}

inline SmoothConvex affine_constraint(Vector a, double b)
{
    // aᵀx − b ≤ 0
    const Index n = a.size();
    return {[a, b](const Vector& x) { return a.dot(x) - b; }, [a](const Vector&) { return a; },
            [n](const Vector&) { return Matrix(Matrix::Zero(n, n)); }};
}

// Strictly feasible point of {h_k ≤ 0} or nothing, from phase I on (x, s):
// min s s.t. h_k(x) − s ≤ 0.
inline std::optional<Vector> phase_one(const std::vector<SmoothConvex>& h, const Vector& start)
{
    const Index n = start.size();
    double s0 = -std::numeric_limits<double>::infinity();
    for (const auto& hk : h) {
        s0 = std::max(s0, hk.value(start));
    }
    if (s0 < 0.0) {
        return start;
    }
    Vector z(n + 1);
    z << start, s0 + 1.0;
    SmoothConvex obj{[n](const Vector& v) { return v[n]; },
                     [n](const Vector&) { return Vector(Vector::Unit(n + 1, n)); },
                     [n](const Vector&) { return Matrix(Matrix::Zero(n + 1, n + 1)); }};
    std::vector<SmoothConvex> hz;
    for (const auto& hk : h) {
        hz.push_back({[hk, n](const Vector& v) { return hk.value(v.head(n)) - v[n]; },
                      [hk, n](const Vector& v) {
                          Vector g(n + 1);
                          g << hk.grad(v.head(n)), -1.0;
                          return g;
                      },
                      [hk, n](const Vector& v) {
                          Matrix m = Matrix::Zero(n + 1, n + 1);
                          m.topLeftCorner(n, n) = hk.hess(v.head(n));
                          return m;
                      }});
    }
    // Keep s bounded below so the phase I problem has a minimizer.
    hz.push_back({[n](const Vector& v) { return -v[n] - 1.0; },
                  [n](const Vector&) { return Vector(-Vector::Unit(n + 1, n)); },
                  [n](const Vector&) { return Matrix(Matrix::Zero(n + 1, n + 1)); }});
    double t = 1.0;
    for (int outer = 0; outer < 40; ++outer) {
        barrier_center(obj, hz, t, z);
        if (z[n] < -1e-9) {
            return Vector(z.head(n));
        }
        if (static_cast<double>(hz.size()) / t < 1e-12) {
            break;
        }
        t *= 10.0;
    }
    return std::nullopt;
}

} // namespace detail

// -----------------------------------------------------------------------
// Disjunctive logistic problem
// -----------------------------------------------------------------------

struct DisjunctiveData {
    Index n = 0;
    LogisticData loss;
    std::vector<Polyhedron> members;
    Matrix c;  // n × m quartic weights
    Matrix p;  // n × m centers
    Vector t;  // m bounds

    /// G_j(x) = Σ_i c_ij (x_i − p_ij)⁴
    Vector constraint(const Vector& x) const
    {
        Vector g(c.cols());
        for (Index j = 0; j < c.cols(); ++j) {
            g[j] = (c.col(j).array() * (x - p.col(j)).array().pow(4)).sum();
        }
        return g;
    }

    Vector constraint_adjoint(const Vector& x, const Vector& lambda) const
    {
        Vector out = Vector::Zero(n);
        for (Index j = 0; j < c.cols(); ++j) {
            out.array() += lambda[j] * 4.0 * c.col(j).array() * (x - p.col(j)).array().cube();
        }
        return out;
    }
};

inline constexpr int kPolyhedronRetries = 200;

namespace detail {

// G_j(x) − t_j ≤ 0 as barrier constraints.
inline std::vector<SmoothConvex> quartic_constraints(const DisjunctiveData& dd)
{
    std::vector<SmoothConvex> out;
    for (Index j = 0; j < dd.c.cols(); ++j) {
        const Vector cj = dd.c.col(j);
        const Vector pj = dd.p.col(j);
        const double tj = dd.t[j];
        out.push_back({[cj, pj, tj](const Vector& x) { return (cj.array() * (x - pj).array().pow(4)).sum() - tj; },
                       [cj, pj](const Vector& x) { return Vector(4.0 * cj.array() * (x - pj).array().cube()); },
                       [cj, pj](const Vector& x) {
                           return Matrix(Vector(12.0 * cj.array() * (x - pj).array().square()).asDiagonal());
                       }});
    }
    return out;
}

inline std::vector<SmoothConvex> member_constraints(const DisjunctiveData& dd, const Polyhedron& poly)
{
    std::vector<SmoothConvex> h = quartic_constraints(dd);
    for (Index r = 0; r < poly.a.rows(); ++r) {
        h.push_back(affine_constraint(poly.a.row(r).transpose(), poly.b[r]));
    }
    return h;
}

inline Vector phase_one_start(const DisjunctiveData& dd)
{
    return dd.c.cols() > 0 ? Vector(dd.p.col(0)) : Vector(Vector::Zero(dd.n));
}

} // namespace detail

/// 200 Gaussian samples with labels from a random planted model; A_q, b_q ~ U(−1,1);
/// c ~ U(0,1); p ~ U(−0.5,0.5); t_j = 0.1. A polyhedron is redrawn until its
/// intersection with {G ≤ t} has nonempty interior, so every member carries a
/// feasible piece.
/// Streams: 1 → dataset, 2 → quartic data, 100 + q → polyhedron q.
inline DisjunctiveData disjunctive_data(Index n, Index members, Index rows, Index m, std::uint64_t seed,
                                        Index samples = 200)
{
    if (n < 1 || members < 1 || rows < 1 || m < 0) {
        throw InvalidArgument("disjunctive_data: invalid dimensions");
    }
    DisjunctiveData dd;
    dd.n = n;
    Rng rd(seed, 1);
    Vector w_true(n);
    for (Index j = 0; j < n; ++j) {
        w_true[j] = rd.normal();
    }
    dd.loss = logistic_data(samples, n, w_true, rd);

    Rng rq(seed, 2);
    dd.c.resize(n, m);
    dd.p.resize(n, m);
    for (Index j = 0; j < m; ++j) {
        for (Index i = 0; i < n; ++i) {
            dd.c(i, j) = rq.uniform(0.0, 1.0);
        }
        for (Index i = 0; i < n; ++i) {
            dd.p(i, j) = rq.uniform(-0.5, 0.5);
        }
    }
    dd.t = Vector::Constant(m, 0.1);

    for (Index q = 0; q < members; ++q) {
        Rng rp(seed, 100 + static_cast<std::uint64_t>(q));
        bool ok = false;
        for (int attempt = 0; attempt < kPolyhedronRetries && !ok; ++attempt) {
            Polyhedron poly{Matrix(rows, n), Vector(rows)};
            for (Index r = 0; r < rows; ++r) {
                for (Index j = 0; j < n; ++j) {
                    poly.a(r, j) = rp.uniform(-1.0, 1.0);
                }
                poly.b[r] = rp.uniform(-1.0, 1.0);
            }
            if (detail::phase_one(detail::member_constraints(dd, poly), detail::phase_one_start(dd))) {
                dd.members.push_back(std::move(poly));
                ok = true;
            }
        }
        if (!ok) {
            throw NumericalFailure("disjunctive_data: could not draw a polyhedron meeting the constraint set");
        }
    }
    return dd;
}

inline Problem disjunctive_problem(std::shared_ptr<const DisjunctiveData> dd, std::string name)
{
    Problem p;
    p.name = std::move(name);
    p.shape = Shape{dd->n, 1};
    p.objective = [dd](const Vector& x, Vector& grad) { return dd->loss.value(x, &grad); };
    if (dd->c.cols() > 0) {
        p.constraints = ConstraintMap{dd->c.cols(), [dd](const Vector& x) { return dd->constraint(x); },
                                      [dd](const Vector& x, const Vector& lambda) {
                                          return dd->constraint_adjoint(x, lambda);
                                      }};
        p.target = ConvexTarget::nonpositive_shifted(dd->t);
    }
    p.geometric = GeometricSet::disjunctive_union(dd->n, dd->members);
    return p;
}

inline Problem gen_disjunctive_logistic(Index n, Index members, Index rows, Index m, std::uint64_t seed)
{
    auto dd = std::make_shared<const DisjunctiveData>(disjunctive_data(n, members, rows, m, seed));
    return disjunctive_problem(dd, "disjunctive_n" + std::to_string(n) + "_N" + std::to_string(members) + "_s"
                                       + std::to_string(rows) + "_m" + std::to_string(m) + "_seed"
                                       + std::to_string(seed));
}

// -----------------------------------------------------------------------
// Exact oracles
// -----------------------------------------------------------------------

struct OracleResult {
    double f = std::numeric_limits<double>::infinity();
    Vector x;
    Index member = -1;  // best polyhedron for the disjunctive oracle
    bool feasible = false;
};

inline constexpr Index kOracleMaxDim = 25;

namespace detail {

// Calls fn(support) for every subset of {0..n−1} with exactly k elements, in
// lexicographic order.
template <class Fn>
void for_each_subset(Index n, Index k, Fn&& fn)
{
    std::vector<Index> idx(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) {
        idx[static_cast<std::size_t>(i)] = i;
    }
    for (;;) {
        fn(idx);
        Index i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) {
            --i;
        }
        if (i < 0) {
            return;
        }
        ++idx[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < k; ++j) {
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
}

inline double quadratic_value(const QuadraticData& data, const Vector& x)
{
    Vector g;
    return data.value(x, g);
}

} // namespace detail

/// Global minimum of ½xᵀQx + νcᵀx over ‖x‖₀ ≤ s by solving Q_S x_S = −νc_S on
/// every support of size s (smaller supports are faces of these).
inline OracleResult oracle_sparse_qp_global(const QuadraticData& data, Index s)
{
    const Index n = data.n;
    if (n > kOracleMaxDim) {
        throw InvalidArgument("oracle_sparse_qp_global: n exceeds the enumeration budget");
    }
    if (s < 1 || s > n) {
        throw InvalidArgument("oracle_sparse_qp_global: s out of range");
    }
    OracleResult best;
    detail::for_each_subset(n, s, [&](const std::vector<Index>& sup) {
        const Matrix qs = data.restricted(sup);
        Vector rhs(s);
        for (Index i = 0; i < s; ++i) {
            rhs[i] = -data.nu * data.c[sup[static_cast<std::size_t>(i)]];
        }
        const Vector xs = qs.ldlt().solve(rhs);
        Vector x = Vector::Zero(n);
        for (Index i = 0; i < s; ++i) {
            x[sup[static_cast<std::size_t>(i)]] = xs[i];
        }
        const double f = detail::quadratic_value(data, x);
        if (f < best.f) {
            best.f = f;
            best.x = x;
            best.feasible = true;
        }
    });
    return best;
}

/// Global minimum over the unit simplex with ‖x‖₀ ≤ s. Every face of the
/// simplex with at most s vertices is tried: the restricted equality-constrained
/// problem is solved through its KKT system and kept when nonnegative. The
/// minimum over these candidates is the global value because the optimum is
/// the stationary point of its own face.
inline OracleResult oracle_portfolio_global(const QuadraticData& data, Index s)
{
    const Index n = data.n;
    if (n > kOracleMaxDim) {
        throw InvalidArgument("oracle_portfolio_global: n exceeds the enumeration budget");
    }
    OracleResult best;
    for (Index k = 1; k <= s; ++k) {
        detail::for_each_subset(n, k, [&](const std::vector<Index>& sup) {
            Matrix kkt = Matrix::Zero(k + 1, k + 1);
            kkt.topLeftCorner(k, k) = data.restricted(sup);
            kkt.block(0, k, k, 1).setOnes();
            kkt.block(k, 0, 1, k).setOnes();
            Vector rhs(k + 1);
            for (Index i = 0; i < k; ++i) {
                rhs[i] = -data.nu * data.c[sup[static_cast<std::size_t>(i)]];
            }
            rhs[k] = 1.0;
            const Vector sol = kkt.fullPivLu().solve(rhs);
            if ((sol.head(k).array() < -1e-12).any()) {
                return;
            }
            Vector x = Vector::Zero(n);
            for (Index i = 0; i < k; ++i) {
                x[sup[static_cast<std::size_t>(i)]] = std::max(0.0, sol[i]);
            }
            x /= x.sum();
            const double f = detail::quadratic_value(data, x);
            if (f < best.f) {
                best.f = f;
                best.x = x;
                best.feasible = true;
            }
        });
    }
    return best;
}

/// Enumeration oracle: solve the convex problem min L(x) s.t. G(x) ≤ t, A_q x ≤ b_q
/// on each member with an interior-point (log-barrier Newton) method and keep
/// the best. Members whose intersection has empty interior are skipped.
inline OracleResult oracle_disjunctive(const DisjunctiveData& dd)
{
    detail::SmoothConvex f0{[&dd](const Vector& x) { return dd.loss.value(x, nullptr); },
                            [&dd](const Vector& x) {
                                Vector g;
                                dd.loss.value(x, &g);
                                return g;
                            },
                            [&dd](const Vector& x) { return dd.loss.hessian(x); }};
    OracleResult best;
    for (std::size_t q = 0; q < dd.members.size(); ++q) {
        const std::vector<detail::SmoothConvex> h = detail::member_constraints(dd, dd.members[q]);
        const Vector start = detail::phase_one_start(dd);
        std::optional<Vector> x = detail::phase_one(h, start);
        if (!x) {
            continue;
        }
        detail::barrier_solve(f0, h, *x);
        const double f = dd.loss.value(*x, nullptr);
        if (f < best.f) {
            best.f = f;
            best.x = *x;
            best.member = static_cast<Index>(q);
            best.feasible = true;
        }
    }
    return best;
}

// -----------------------------------------------------------------------
// Serializable specification
// -----------------------------------------------------------------------

struct ZooSpec {
    std::string family = "sparse_qp";  // sparse_qp | beck_eldar | portfolio | correlation | multitask | disjunctive
    Index n = 10;
    Index s = 3;
    Index kappa = 2;
    Index members = 2;     // N for disjunctive
    Index rows = 12;       // rows per polyhedron
    Index m = 1;           // quartic constraints (disjunctive) or tasks (multitask)
    Index samples = 40;    // per task (multitask)
    double n_cond = 10.0;
    double nu = 1.0;
    double eta = 0.1;
    std::string variant = "P1";       // correlation matrix
    std::string update = "none";      // correlation x-update: none | exact | exact_lower_level
    std::uint64_t seed = 0;

    bool operator==(const ZooSpec&) const = default;
};

inline Json to_json(const ZooSpec& z)
{
    return Json{{"family", z.family}, {"n", z.n},          {"s", z.s},         {"kappa", z.kappa},
                {"members", z.members}, {"rows", z.rows},  {"m", z.m},         {"samples", z.samples},
                {"n_cond", z.n_cond}, {"nu", z.nu},        {"eta", z.eta},     {"variant", z.variant},
                {"update", z.update}, {"seed", z.seed}};
}

inline ZooSpec zoo_spec_from_json(const Json& j)
{
    static const char* known[] = {"family", "n",      "s",   "kappa", "members", "rows",   "m",
                                  "samples", "n_cond", "nu", "eta",   "variant", "update", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; })
            == std::end(known)) {
            throw InvalidArgument("ZooSpec: unknown field '" + it.key() + "'");
        }
    }
    ZooSpec z;
    z.family = j.value("family", z.family);
    z.n = j.value("n", z.n);
    z.s = j.value("s", z.s);
    z.kappa = j.value("kappa", z.kappa);
    z.members = j.value("members", z.members);
    z.rows = j.value("rows", z.rows);
    z.m = j.value("m", z.m);
    z.samples = j.value("samples", z.samples);
    z.n_cond = j.value("n_cond", z.n_cond);
    z.nu = j.value("nu", z.nu);
    z.eta = j.value("eta", z.eta);
    z.variant = j.value("variant", z.variant);
    z.update = j.value("update", z.update);
    z.seed = j.value("seed", z.seed);
    return z;
}

/// A generated problem with its default start.
struct Instance {
    Problem problem;
    Vector x0;
    std::optional<Vector> y0;
};

inline CorrelationUpdate correlation_update_from_string(std::string_view s)
{
    if (s == "none") return CorrelationUpdate::none;
    if (s == "exact") return CorrelationUpdate::exact;
    if (s == "exact_lower_level") return CorrelationUpdate::exact_lower_level;
    throw InvalidArgument("unknown correlation update '" + std::string(s) + "'");
}

inline Instance make_instance(const ZooSpec& z)
{
    Instance inst;
    if (z.family == "sparse_qp") {
        inst.problem = gen_sparse_qp(z.n, z.n_cond, z.s, z.nu, z.seed);
        inst.x0 = Vector::Zero(z.n);
    } else if (z.family == "beck_eldar") {
        inst.problem = gen_beck_eldar();
        inst.x0 = Vector::Zero(5);
    } else if (z.family == "portfolio") {
        inst.problem = gen_portfolio(z.n, z.n_cond, z.s, z.nu, z.seed);
        inst.x0 = Vector::Constant(z.n, 1.0 / static_cast<double>(z.n));
    } else if (z.family == "correlation") {
        const CorrelationVariant v = correlation_variant_from_string(z.variant);
        inst.problem = gen_correlation(v, z.n, z.kappa, correlation_update_from_string(z.update));
        inst.x0 = pack_symmetric(correlation_matrix(v, z.n));
    } else if (z.family == "multitask") {
        inst.problem = gen_multitask_logistic(z.m, z.n, z.samples, z.kappa, z.eta, z.seed);
        inst.x0 = Vector::Zero(inst.problem.dim_x());
    } else if (z.family == "disjunctive") {
        inst.problem = gen_disjunctive_logistic(z.n, z.members, z.rows, z.m, z.seed);
        inst.x0 = Vector::Zero(z.n);
    } else {
        throw InvalidArgument("unknown problem family '" + z.family + "'");
    }
    return inst;
}

/// Certified optimum for the families with an enumeration oracle.
inline std::optional<double> oracle_value(const ZooSpec& z)
{
    if (z.family == "sparse_qp") {
        return oracle_sparse_qp_global(sparse_qp_data(z.n, z.n_cond, z.nu, z.seed), z.s).f;
    }
    if (z.family == "beck_eldar") {
        return oracle_sparse_qp_global(beck_eldar_data(), 2).f;
    }
    if (z.family == "portfolio") {
        return oracle_portfolio_global(sparse_qp_data(z.n, z.n_cond, z.nu, z.seed), z.s).f;
    }
    if (z.family == "disjunctive") {
        const OracleResult r = oracle_disjunctive(disjunctive_data(z.n, z.members, z.rows, z.m, z.seed));
        if (r.feasible) {
            return r.f;
        }
    }
    return std::nullopt;
}

} // namespace pdgeo::zoo
