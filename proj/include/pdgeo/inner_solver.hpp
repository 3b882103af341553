#pragma once

#include <pdgeo/types.hpp>

#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <string_view>

namespace pdgeo {

// =======================================================================
// Descent directions d = −H(∇) and the Armijo backtracking rule.
// =======================================================================

enum class DirectionKind { gradient, lbfgs, nonlinear_cg };

inline std::string_view to_string(DirectionKind k)
{
    switch (k) {
    case DirectionKind::gradient: return "gradient";
    case DirectionKind::lbfgs: return "lbfgs";
    case DirectionKind::nonlinear_cg: return "cg";
    }
    return "?";
}

inline DirectionKind direction_kind_from_string(std::string_view s)
{
    if (s == "gradient" || s == "gd") return DirectionKind::gradient;
    if (s == "lbfgs") return DirectionKind::lbfgs;
    if (s == "cg" || s == "nonlinear_cg") return DirectionKind::nonlinear_cg;
    throw InvalidArgument("unknown direction strategy '" + std::string(s) + "'");
}

struct DirectionParams {
    DirectionKind kind = DirectionKind::lbfgs;
    int memory = 10;
    double initial_scale = 1.0;  // H₀ = initial_scale·I while memory is empty
    // Bounded-eigenvalue safeguard: c1‖g‖² ≤ −⟨g,d⟩ and ‖d‖ ≤ c2‖g‖.
    double c1 = 1e-6;
    double c2 = 1e6;
    Index cg_restart = 0;  // 0 → restart every n iterations
};

/// Curvature pairs with ⟨s,y⟩ at or below this fraction of ‖s‖‖y‖ are dropped.
inline constexpr double kCurvatureTol = 1e-10;

/// Stateful direction strategy owned by one solver run.
class DirectionStrategy {
public:
    explicit DirectionStrategy(DirectionParams params = {}) : p_(params)
    {
        if (!(p_.c1 > 0.0 && p_.c1 <= p_.c2)) {
            throw InvalidArgument("DirectionStrategy: require 0 < c1 <= c2");
        }
        if (p_.memory < 1) {
            throw InvalidArgument("DirectionStrategy: memory must be >= 1");
        }
    }

    const DirectionParams& params() const { return p_; }

    /// d = −H(g). Falls back to −g whenever the safeguard is violated.
    Vector compute(const Vector& g)
    {
        const double gg = g.squaredNorm();
        if (!(gg > 0.0)) {
            throw InvalidArgument("compute_direction: zero gradient");
        }
        Vector d;
        switch (p_.kind) {
        case DirectionKind::gradient: d = -g; break;
        case DirectionKind::lbfgs: d = lbfgs_direction(g); break;
        case DirectionKind::nonlinear_cg: d = cg_direction(g); break;
        }
        const double slope = g.dot(d);
        if (!d.allFinite() || -slope < p_.c1 * gg || d.norm() > p_.c2 * std::sqrt(gg)) {
            d = -g;
            ++fallbacks_;
            if (p_.kind == DirectionKind::nonlinear_cg) {
                cg_dir_raw_ = -g;
                cg_theta_ = 1.0;
            }
        }
        return d;
    }

    /// Feed back the accepted step: s = α d, y = ∇⁺ − ∇ (same second block).
    void record_step([[maybe_unused]] double alpha, const Vector& s, const Vector& y)
    {
        switch (p_.kind) {
        case DirectionKind::gradient: break;
        case DirectionKind::lbfgs: {
            const double sy = s.dot(y);
            if (sy > kCurvatureTol * s.norm() * y.norm()) {
                s_.push_back(s);
                y_.push_back(y);
                if (static_cast<int>(s_.size()) > p_.memory) {
                    s_.pop_front();
                    y_.pop_front();
                }
            }
            break;
        }
        case DirectionKind::nonlinear_cg: {
            // Inverse secant curvature ⟨s,s⟩/⟨s,y⟩ scales the next direction.
            const double sy = s.dot(y);
            if (sy > kCurvatureTol * s.norm() * y.norm()) {
                cg_scale_ = s.squaredNorm() / sy;
                have_scale_ = true;
            }
            ++cg_count_;
            break;
        }
        }
    }

    /// Start of a new descent block on a shifted objective (second block moved):
    /// conjugacy is dropped, curvature pairs and step scale are kept since the
    /// x-Hessian of the penalty does not depend on the second block.
    void begin_block()
    {
        if (p_.kind == DirectionKind::nonlinear_cg) {
            cg_prev_grad_.resize(0);
            cg_count_ = 0;
        }
    }

    /// Full reset; used whenever the penalty parameter changes.
    void reset()
    {
        s_.clear();
        y_.clear();
        cg_prev_grad_.resize(0);
        cg_dir_raw_.resize(0);
        cg_count_ = 0;
        have_scale_ = false;
        cg_theta_ = 1.0;
    }

    std::size_t memory_size() const { return s_.size(); }
    long fallbacks() const { return fallbacks_; }

private:
    Vector lbfgs_direction(const Vector& g) const
    {
        const std::size_t m = s_.size();
        Vector q = g;
        std::vector<double> alpha(m), rho(m);
        for (std::size_t i = m; i-- > 0;) {
            rho[i] = 1.0 / s_[i].dot(y_[i]);
            alpha[i] = rho[i] * s_[i].dot(q);
            q -= alpha[i] * y_[i];
        }
        const double h0 = (m == 0) ? p_.initial_scale : s_.back().dot(y_.back()) / y_.back().squaredNorm();
        Vector r = h0 * q;
        for (std::size_t i = 0; i < m; ++i) {
            const double b = rho[i] * y_[i].dot(r);
            r += s_[i] * (alpha[i] - b);
        }
        return -r;
    }

    Vector cg_direction(const Vector& g)
    {
        const Index restart = p_.cg_restart > 0 ? p_.cg_restart : g.size();
        Vector raw;
        if (cg_prev_grad_.size() == g.size() && cg_count_ % restart != 0) {
            const double beta = std::max(0.0, g.dot(g - cg_prev_grad_) / cg_prev_grad_.squaredNorm());
            raw = -g + beta * cg_dir_raw_;
            if (g.dot(raw) >= 0.0) {
                raw = -g;
            }
        } else {
            raw = -g;
            cg_count_ = 0;
        }
        double theta = have_scale_ ? cg_scale_ : p_.initial_scale;
        if (!(theta > 0.0) || !std::isfinite(theta)) {
            theta = p_.initial_scale;
        }
        cg_prev_grad_ = g;
        cg_dir_raw_ = raw;
        cg_theta_ = theta;
        return theta * raw;
    }

    DirectionParams p_;
    std::deque<Vector> s_, y_;
    Vector cg_prev_grad_, cg_dir_raw_;
    Index cg_count_ = 0;
    double cg_theta_ = 1.0;
    bool have_scale_ = false;
    double cg_scale_ = 1.0;
    long fallbacks_ = 0;
};

struct LineSearchParams {
    double gamma = 1e-4;  // sufficient decrease
    double beta = 0.5;    // backtracking factor
    int max_backtracks = 60;
};

struct ArmijoResult {
    double alpha = 0.0;
    double value = 0.0;
    int trials = 0;
    bool accepted = false;
    // True when the shortest trial left q within rounding noise of q0: the
    // failure reflects exhausted precision, not an inconsistent gradient.
    bool flat = false;
};

/// α = β^j for the smallest j ≥ 0 with q(α) ≤ q0 + γ α slope.
/// `eval(α)` returns q at the trial point; non-finite trial values reject.
template <class Eval>
ArmijoResult armijo_search(Eval&& eval, double q0, double slope, const LineSearchParams& p)
{
    if (!(slope < 0.0)) {
        throw InvalidArgument("armijo_search: slope must be negative");
    }
    if (!(p.gamma > 0.0 && p.gamma < 1.0 && p.beta > 0.0 && p.beta < 1.0)) {
        throw InvalidArgument("armijo_search: require gamma, beta in (0,1)");
    }
    const double noise = 32.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(q0));
    ArmijoResult r;
    bool flat = true;
    double alpha = 1.0;
    for (int j = 0; j <= p.max_backtracks; ++j) {
        const double q = eval(alpha);
        ++r.trials;
        if (std::isfinite(q)) {
            if (q <= q0 + p.gamma * alpha * slope) {
                r.alpha = alpha;
                r.value = q;
                r.accepted = true;
                return r;
            }
            flat = std::abs(q - q0) <= noise;
        } else {
            flat = false;
        }
        alpha *= p.beta;
    }
    r.flat = flat;
    return r;
}

} // namespace pdgeo
