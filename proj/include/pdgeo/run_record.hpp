#pragma once

#include <pdgeo/penalty.hpp>
#include <pdgeo/types.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace pdgeo {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class RunStatus { converged, tau_cap_reached, iteration_cap, numerical_failure, time_limit };

inline std::string_view to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::tau_cap_reached: return "tau_cap_reached";
    case RunStatus::iteration_cap: return "iteration_cap";
    case RunStatus::numerical_failure: return "numerical_failure";
    case RunStatus::time_limit: return "time_limit";
    }
    return "?";
}

inline RunStatus run_status_from_string(std::string_view s)
{
    if (s == "converged") return RunStatus::converged;
    if (s == "tau_cap_reached") return RunStatus::tau_cap_reached;
    if (s == "iteration_cap") return RunStatus::iteration_cap;
    if (s == "numerical_failure") return RunStatus::numerical_failure;
    if (s == "time_limit") return RunStatus::time_limit;
    throw InvalidArgument("unknown run status '" + std::string(s) + "'");
}

/// Snapshot taken after each outer iteration.
struct OuterRecord {
    int k = 0;
    double tau = 0.0;
    double delta = 0.0;
    int inner_iterations = 0;
    std::string inner_stop;
    long projections = 0;  // cumulative
    double objective = 0.0;
    double residual_xy = 0.0;  // ‖x − y‖ (0 for ALM)
    double residual_c = 0.0;   // dist_C(G(x))
    double eps_norm = 0.0;
    double z_norm = 0.0;
    double lambda_norm = 0.0;
    double mu_norm = 0.0;
    double identity_error = 0.0;

    bool operator==(const OuterRecord&) const = default;
};

struct RunRecord {
    int schema_version = kSchemaVersion;
    std::string solver;
    std::string problem;
    Json params = Json::object();

    std::vector<OuterRecord> history;
    std::vector<Vector> x_history;  // filled only when iterates are kept
    std::vector<Vector> y_history;

    Vector x;
    Vector y;
    double objective = 0.0;     // f(x)
    double objective_y = 0.0;   // f(y), y ∈ D
    double residual = 0.0;      // quantity tested against eps_out
    double residual_xy = 0.0;
    double residual_c = 0.0;
    int outer_iterations = 0;
    long inner_iterations = 0;
    long projections = 0;
    long evaluations = 0;
    double seconds = 0.0;
    RunStatus status = RunStatus::iteration_cap;
    std::string message;

    // Set when the run hits the τ cap while still infeasible; r1, r2 are the
    // residuals of the feasibility-problem stationarity system.
    bool feasibility_candidate = false;
    double stationarity_r1 = 0.0;
    double stationarity_r2 = 0.0;

    Certificate certificate;

    bool ok() const { return status == RunStatus::converged; }
};

namespace detail {

inline Json number_to_json(double v)
{
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return v;
}

inline double number_from_json(const Json& j)
{
    if (j.is_null()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return j.get<double>();
}

inline Json vector_to_json(const Vector& v)
{
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) {
        a.push_back(number_to_json(v[i]));
    }
    return a;
}

inline Vector vector_from_json(const Json& j)
{
    Vector v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) {
        v[i] = number_from_json(j[static_cast<std::size_t>(i)]);
    }
    return v;
}

inline bool same_number(double a, double b)
{
    return a == b || (std::isnan(a) && std::isnan(b));
}

inline bool same_vector(const Vector& a, const Vector& b)
{
    if (a.size() != b.size()) {
        return false;
    }
    for (Index i = 0; i < a.size(); ++i) {
        if (!same_number(a[i], b[i])) {
            return false;
        }
    }
    return true;
}

} // namespace detail

inline Json to_json(const OuterRecord& o)
{
    using detail::number_to_json;
    return Json{{"k", o.k},
                {"tau", number_to_json(o.tau)},
                {"delta", number_to_json(o.delta)},
                {"inner_iterations", o.inner_iterations},
                {"inner_stop", o.inner_stop},
                {"projections", o.projections},
                {"objective", number_to_json(o.objective)},
                {"residual_xy", number_to_json(o.residual_xy)},
                {"residual_c", number_to_json(o.residual_c)},
                {"eps_norm", number_to_json(o.eps_norm)},
                {"z_norm", number_to_json(o.z_norm)},
                {"lambda_norm", number_to_json(o.lambda_norm)},
                {"mu_norm", number_to_json(o.mu_norm)},
                {"identity_error", number_to_json(o.identity_error)}};
}

inline OuterRecord outer_record_from_json(const Json& j)
{
    using detail::number_from_json;
    OuterRecord o;
    o.k = j.at("k").get<int>();
    o.tau = number_from_json(j.at("tau"));
    o.delta = number_from_json(j.at("delta"));
    o.inner_iterations = j.at("inner_iterations").get<int>();
    o.inner_stop = j.at("inner_stop").get<std::string>();
    o.projections = j.at("projections").get<long>();
    o.objective = number_from_json(j.at("objective"));
    o.residual_xy = number_from_json(j.at("residual_xy"));
    o.residual_c = number_from_json(j.at("residual_c"));
    o.eps_norm = number_from_json(j.at("eps_norm"));
    o.z_norm = number_from_json(j.at("z_norm"));
    o.lambda_norm = number_from_json(j.at("lambda_norm"));
    o.mu_norm = number_from_json(j.at("mu_norm"));
    o.identity_error = number_from_json(j.at("identity_error"));
    return o;
}

inline Json to_json(const RunRecord& r)
{
    using detail::number_to_json;
    using detail::vector_to_json;
    Json hist = Json::array();
    for (const auto& o : r.history) {
        hist.push_back(to_json(o));
    }
    Json xs = Json::array();
    for (const auto& v : r.x_history) {
        xs.push_back(vector_to_json(v));
    }
    Json ys = Json::array();
    for (const auto& v : r.y_history) {
        ys.push_back(vector_to_json(v));
    }
    return Json{
        {"schema_version", r.schema_version},
        {"solver", r.solver},
        {"problem", r.problem},
        {"params", r.params},
        {"status", std::string(to_string(r.status))},
        {"message", r.message},
        {"objective", number_to_json(r.objective)},
        {"objective_y", number_to_json(r.objective_y)},
        {"residual", number_to_json(r.residual)},
        {"residual_xy", number_to_json(r.residual_xy)},
        {"residual_c", number_to_json(r.residual_c)},
        {"outer_iterations", r.outer_iterations},
        {"inner_iterations", r.inner_iterations},
        {"projections", r.projections},
        {"evaluations", r.evaluations},
        {"seconds", number_to_json(r.seconds)},
        {"feasibility_candidate", r.feasibility_candidate},
        {"stationarity_r1", number_to_json(r.stationarity_r1)},
        {"stationarity_r2", number_to_json(r.stationarity_r2)},
        {"x", vector_to_json(r.x)},
        {"y", vector_to_json(r.y)},
        {"history", std::move(hist)},
        {"x_history", std::move(xs)},
        {"y_history", std::move(ys)},
        {"certificate",
         {{"epsilon", vector_to_json(r.certificate.epsilon)},
          {"z", vector_to_json(r.certificate.z)},
          {"lambda", vector_to_json(r.certificate.lambda)},
          {"mu", vector_to_json(r.certificate.mu)},
          {"identity_error", number_to_json(r.certificate.identity_error)}}},
    };
}

inline RunRecord run_record_from_json(const Json& j)
{
    using detail::number_from_json;
    using detail::vector_from_json;
    RunRecord r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion) {
        throw InvalidArgument("RunRecord: unsupported schema_version " + std::to_string(r.schema_version));
    }
    r.solver = j.at("solver").get<std::string>();
    r.problem = j.at("problem").get<std::string>();
    r.params = j.at("params");
    r.status = run_status_from_string(j.at("status").get<std::string>());
    r.message = j.at("message").get<std::string>();
    r.objective = number_from_json(j.at("objective"));
    r.objective_y = number_from_json(j.at("objective_y"));
    r.residual = number_from_json(j.at("residual"));
    r.residual_xy = number_from_json(j.at("residual_xy"));
    r.residual_c = number_from_json(j.at("residual_c"));
    r.outer_iterations = j.at("outer_iterations").get<int>();
    r.inner_iterations = j.at("inner_iterations").get<long>();
    r.projections = j.at("projections").get<long>();
    r.evaluations = j.at("evaluations").get<long>();
    r.seconds = number_from_json(j.at("seconds"));
    r.feasibility_candidate = j.at("feasibility_candidate").get<bool>();
    r.stationarity_r1 = number_from_json(j.at("stationarity_r1"));
    r.stationarity_r2 = number_from_json(j.at("stationarity_r2"));
    r.x = vector_from_json(j.at("x"));
    r.y = vector_from_json(j.at("y"));
    for (const auto& o : j.at("history")) {
        r.history.push_back(outer_record_from_json(o));
    }
    for (const auto& v : j.at("x_history")) {
        r.x_history.push_back(vector_from_json(v));
    }
    for (const auto& v : j.at("y_history")) {
        r.y_history.push_back(vector_from_json(v));
    }
    const Json& c = j.at("certificate");
    r.certificate.epsilon = vector_from_json(c.at("epsilon"));
    r.certificate.z = vector_from_json(c.at("z"));
    r.certificate.lambda = vector_from_json(c.at("lambda"));
    r.certificate.mu = vector_from_json(c.at("mu"));
    r.certificate.identity_error = number_from_json(c.at("identity_error"));
    return r;
}

inline std::string emit_json(const RunRecord& r, int indent = -1) { return to_json(r).dump(indent); }

inline RunRecord parse_json(std::string_view text) { return run_record_from_json(Json::parse(text)); }

/// Field-wise equality; NaN compares equal to NaN so that parse(emit(r)) == r
/// holds for non-finite values stored as null.
inline bool same_record(const RunRecord& a, const RunRecord& b)
{
    using detail::same_number;
    using detail::same_vector;
    auto same_outer = [](const OuterRecord& p, const OuterRecord& q) {
        return p.k == q.k && same_number(p.tau, q.tau) && same_number(p.delta, q.delta)
               && p.inner_iterations == q.inner_iterations && p.inner_stop == q.inner_stop
               && p.projections == q.projections && same_number(p.objective, q.objective)
               && same_number(p.residual_xy, q.residual_xy) && same_number(p.residual_c, q.residual_c)
               && same_number(p.eps_norm, q.eps_norm) && same_number(p.z_norm, q.z_norm)
               && same_number(p.lambda_norm, q.lambda_norm) && same_number(p.mu_norm, q.mu_norm)
               && same_number(p.identity_error, q.identity_error);
    };
    auto same_vectors = [](const std::vector<Vector>& p, const std::vector<Vector>& q) {
        if (p.size() != q.size()) {
            return false;
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!same_vector(p[i], q[i])) {
                return false;
            }
        }
        return true;
    };
    if (a.history.size() != b.history.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        if (!same_outer(a.history[i], b.history[i])) {
            return false;
        }
    }
    return a.schema_version == b.schema_version && a.solver == b.solver && a.problem == b.problem
           && a.params == b.params && a.status == b.status && a.message == b.message
           && same_number(a.objective, b.objective) && same_number(a.objective_y, b.objective_y)
           && same_number(a.residual, b.residual) && same_number(a.residual_xy, b.residual_xy)
           && same_number(a.residual_c, b.residual_c) && a.outer_iterations == b.outer_iterations
           && a.inner_iterations == b.inner_iterations && a.projections == b.projections
           && a.evaluations == b.evaluations && same_number(a.seconds, b.seconds)
           && a.feasibility_candidate == b.feasibility_candidate
           && same_number(a.stationarity_r1, b.stationarity_r1)
           && same_number(a.stationarity_r2, b.stationarity_r2) && same_vector(a.x, b.x)
           && same_vector(a.y, b.y) && same_vectors(a.x_history, b.x_history)
           && same_vectors(a.y_history, b.y_history)
           && same_vector(a.certificate.epsilon, b.certificate.epsilon)
           && same_vector(a.certificate.z, b.certificate.z)
           && same_vector(a.certificate.lambda, b.certificate.lambda)
           && same_vector(a.certificate.mu, b.certificate.mu)
           && same_number(a.certificate.identity_error, b.certificate.identity_error);
}

} // namespace pdgeo
