#pragma once

#include <pdgeo/alm.hpp>
#include <pdgeo/pd.hpp>
#include <pdgeo/run_record.hpp>
#include <pdgeo/zoo.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace pdgeo::bench {

// -----------------------------------------------------------------------
// Configuration
// -----------------------------------------------------------------------

inline const std::vector<std::string>& solver_ids()
{
    static const std::vector<std::string> ids = {"pd", "pdlm", "alm", "oracle"};
    return ids;
}

/// One grid row: a problem family, a solver and its parameter overrides.
/// Replication r uses problem seed `problem.seed + r` when `vary_seed` is set,
/// and, when `start_box > 0`, a start drawn uniformly from [−start_box, start_box]ⁿ
/// with Rng(seed_base, r).
struct BenchEntry {
    zoo::ZooSpec problem;
    std::string solver = "pd";
    Json overrides = Json::object();
    int replications = 1;
    std::uint64_t seed_base = 0;
    bool vary_seed = true;
    double start_box = 0.0;
};

struct BenchConfig {
    std::vector<BenchEntry> grid;
    std::string output_dir = "pdgeo_out";
    double time_limit = 600.0;  // seconds per run
    int threads = 1;
};

inline void validate(const BenchConfig& c)
{
    if (c.grid.empty()) {
        throw InvalidArgument("BenchConfig: empty grid");
    }
    if (!(c.time_limit > 0.0)) {
        throw InvalidArgument("BenchConfig: time_limit must be positive");
    }
    if (c.threads < 1) {
        throw InvalidArgument("BenchConfig: threads must be >= 1");
    }
    for (const BenchEntry& e : c.grid) {
        if (std::find(solver_ids().begin(), solver_ids().end(), e.solver) == solver_ids().end()) {
            throw InvalidArgument("BenchConfig: unknown solver '" + e.solver + "'");
        }
        if (e.replications < 1) {
            throw InvalidArgument("BenchConfig: replications must be >= 1");
        }
        if (!e.overrides.is_object()) {
            throw InvalidArgument("BenchConfig: params must be an object");
        }
    }
}

inline Json to_json(const BenchEntry& e)
{
    return Json{{"problem", zoo::to_json(e.problem)}, {"solver", e.solver},       {"params", e.overrides},
                {"replications", e.replications},      {"seed_base", e.seed_base}, {"vary_seed", e.vary_seed},
                {"start_box", e.start_box}};
}

inline Json to_json(const BenchConfig& c)
{
    Json grid = Json::array();
    for (const BenchEntry& e : c.grid) {
        grid.push_back(to_json(e));
    }
    return Json{{"grid", grid}, {"output_dir", c.output_dir}, {"time_limit", c.time_limit}, {"threads", c.threads}};
}

/// Parses a grid document. Environment variables PDGEO_OUT and PDGEO_THREADS,
/// when set, override the output directory and thread count.
inline BenchConfig bench_config_from_json(const Json& j)
{
    BenchConfig c;
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key() != "grid" && it.key() != "output_dir" && it.key() != "time_limit" && it.key() != "threads") {
                throw InvalidArgument("BenchConfig: unknown field '" + it.key() + "'");
            }
        }
        c.output_dir = j.value("output_dir", c.output_dir);
        c.time_limit = j.value("time_limit", c.time_limit);
        c.threads = j.value("threads", c.threads);
        for (const Json& row : j.at("grid")) {
            BenchEntry e;
            e.problem = zoo::zoo_spec_from_json(row.at("problem"));
            e.solver = row.value("solver", e.solver);
            e.overrides = row.value("params", Json::object());
            e.replications = row.value("replications", e.replications);
            e.seed_base = row.value("seed_base", e.seed_base);
            e.vary_seed = row.value("vary_seed", e.vary_seed);
            e.start_box = row.value("start_box", e.start_box);
            c.grid.push_back(std::move(e));
        }
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("BenchConfig: ") + e.what());
    }
    if (const char* out = std::getenv("PDGEO_OUT"); out != nullptr && *out != '\0') {
        c.output_dir = out;
    }
    if (const char* th = std::getenv("PDGEO_THREADS"); th != nullptr && *th != '\0') {
        try {
            c.threads = std::stoi(th);
        } catch (const std::exception&) {
            throw InvalidArgument("PDGEO_THREADS is not an integer");
        }
    }
    validate(c);
    return c;
}

// -----------------------------------------------------------------------
// Running
// -----------------------------------------------------------------------

/// A record counts as failed when the run broke down or ran out of time.
inline bool run_failed(const RunRecord& r)
{
    return r.status == RunStatus::numerical_failure || r.status == RunStatus::time_limit;
}

inline RunRecord oracle_record(const zoo::ZooSpec& spec, const std::string& name)
{
    RunRecord r;
    r.solver = "oracle";
    r.problem = name;
    const auto start = Clock::now();
    std::optional<double> value;
    if (spec.family == "disjunctive") {
        const zoo::OracleResult o = zoo::oracle_disjunctive(
            zoo::disjunctive_data(spec.n, spec.members, spec.rows, spec.m, spec.seed));
        if (o.feasible) {
            value = o.f;
            r.x = r.y = o.x;
        }
    } else if (spec.family == "sparse_qp" || spec.family == "beck_eldar") {
        const zoo::QuadraticData data = spec.family == "beck_eldar"
                                            ? zoo::beck_eldar_data()
                                            : zoo::sparse_qp_data(spec.n, spec.n_cond, spec.nu, spec.seed);
        const zoo::OracleResult o = zoo::oracle_sparse_qp_global(data, spec.family == "beck_eldar" ? 2 : spec.s);
        value = o.f;
        r.x = r.y = o.x;
    } else if (spec.family == "portfolio") {
        const zoo::OracleResult o =
            zoo::oracle_portfolio_global(zoo::sparse_qp_data(spec.n, spec.n_cond, spec.nu, spec.seed), spec.s);
        value = o.f;
        r.x = r.y = o.x;
    } else {
        throw InvalidArgument("no enumeration oracle for family '" + spec.family + "'");
    }
    if (value) {
        r.objective = r.objective_y = *value;
        r.status = RunStatus::converged;
    } else {
        r.objective = r.objective_y = std::numeric_limits<double>::quiet_NaN();
        r.status = RunStatus::numerical_failure;
        r.message = "oracle found no feasible member";
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

/// Runs one replication of one grid entry.
inline RunRecord run_entry(const BenchEntry& e, int rep, double time_limit)
{
    zoo::ZooSpec spec = e.problem;
    if (e.vary_seed) {
        spec.seed += static_cast<std::uint64_t>(rep);
    }
    zoo::Instance inst = zoo::make_instance(spec);
    std::string name = inst.problem.name;
    if (e.start_box > 0.0) {
        Rng rng(e.seed_base, static_cast<std::uint64_t>(rep));
        for (Index i = 0; i < inst.x0.size(); ++i) {
            inst.x0[i] = rng.uniform(-e.start_box, e.start_box);
        }
        inst.y0.reset();
        name += "/start" + std::to_string(rep);
    }
    if (e.solver == "oracle") {
        return oracle_record(spec, name);
    }
    RunRecord r;
    if (e.solver == "alm") {
        AlmParams p = alm_params_from_json(e.overrides);
        if (p.time_limit == 0.0) {
            p.time_limit = time_limit;
        }
        r = solve_alm(inst.problem, p, inst.x0);
    } else {
        PdParams base;
        if (e.solver == "pdlm") {
            base.multipliers = inst.problem.has_constraints() ? MultiplierMode::both : MultiplierMode::equality_only;
        }
        PdParams p = pd_params_from_json(e.overrides, base);
        if (e.solver == "pdlm" && p.multipliers == MultiplierMode::none) {
            throw InvalidArgument("solver 'pdlm' needs a multiplier mode other than none");
        }
        if (e.solver == "pd" && p.multipliers != MultiplierMode::none) {
            throw InvalidArgument("solver 'pd' runs without multipliers; use 'pdlm'");
        }
        if (p.time_limit == 0.0) {
            p.time_limit = time_limit;
        }
        r = solve_pd(inst.problem, p, inst.x0, inst.y0);
    }
    r.problem = name;
    return r;
}

struct Task {
    std::size_t entry = 0;
    int rep = 0;
};

inline std::vector<Task> expand(const BenchConfig& c)
{
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
        for (int r = 0; r < c.grid[i].replications; ++r) {
            tasks.push_back({i, r});
        }
    }
    return tasks;
}

inline const char* kCsvHeader = "problem,solver,f,residual,outer_iters,inner_iters,projections,seconds,status";

inline std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::string csv_row(const RunRecord& r)
{
    std::ostringstream os;
    os << r.problem << ',' << r.solver << ',' << format_double(r.objective) << ',' << format_double(r.residual) << ','
       << r.outer_iterations << ',' << r.inner_iterations << ',' << r.projections << ',' << format_double(r.seconds)
       << ',' << to_string(r.status);
    return os.str();
}

/// One CSV summary row read back.
struct SummaryRow {
    std::string problem;
    std::string solver;
    double f = 0.0;
    double residual = 0.0;
    long outer_iters = 0;
    long inner_iters = 0;
    long projections = 0;
    double seconds = 0.0;
    RunStatus status = RunStatus::converged;
};

inline SummaryRow summary_row(const RunRecord& r)
{
    return {r.problem,          r.solver,         r.objective, r.residual, r.outer_iterations,
            r.inner_iterations, r.projections,    r.seconds,   r.status};
}

inline std::vector<SummaryRow> parse_csv_summary(std::istream& in)
{
    std::vector<SummaryRow> rows;
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw InvalidArgument("summary CSV: unexpected header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cols.push_back(cell);
        }
        if (cols.size() != 9) {
            throw InvalidArgument("summary CSV: malformed row '" + line + "'");
        }
        SummaryRow r;
        r.problem = cols[0];
        r.solver = cols[1];
        r.f = std::stod(cols[2]);
        r.residual = std::stod(cols[3]);
        r.outer_iters = std::stol(cols[4]);
        r.inner_iters = std::stol(cols[5]);
        r.projections = std::stol(cols[6]);
        r.seconds = std::stod(cols[7]);
        r.status = run_status_from_string(cols[8]);
        rows.push_back(std::move(r));
    }
    return rows;
}

struct GridResult {
    std::vector<RunRecord> records;  // in task order
    std::vector<std::string> errors;  // per-run I/O or configuration failures
    bool all_ok() const
    {
        return errors.empty()
               && std::none_of(records.begin(), records.end(), [](const RunRecord& r) { return run_failed(r); });
    }
};

/// Runs every (entry, replication) pair on a pool of `config.threads` workers.
/// Each finished run is written to <output_dir>/runs/NNNNNN.json right away;
/// summary.csv is written in task order once the grid completes. An empty
/// output_dir disables file output.
inline GridResult run_grid(const BenchConfig& config)
{
    validate(config);
    const std::vector<Task> tasks = expand(config);
    GridResult out;
    out.records.resize(tasks.size());
    std::vector<std::string> task_errors(tasks.size());

    namespace fs = std::filesystem;
    const bool write = !config.output_dir.empty();
    const fs::path root(config.output_dir);
    if (write) {
        fs::create_directories(root / "runs");
    }

    std::mutex collector;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) {
                return;
            }
            const Task& t = tasks[i];
            const BenchEntry& e = config.grid[t.entry];
            RunRecord rec;
            try {
                rec = run_entry(e, t.rep, config.time_limit);
            } catch (const NumericalFailure& ex) {
                rec.solver = e.solver;
                rec.problem = e.problem.family;
                rec.status = RunStatus::numerical_failure;
                rec.message = ex.what();
            } catch (const std::exception& ex) {
                rec.solver = e.solver;
                rec.problem = e.problem.family;
                rec.status = RunStatus::numerical_failure;
                rec.message = ex.what();
                task_errors[i] = ex.what();
            }
            std::lock_guard<std::mutex> lock(collector);
            if (write) {
                char name[32];
                std::snprintf(name, sizeof name, "%06zu.json", i);
                std::ofstream f(root / "runs" / name);
                f << emit_json(rec, 1) << '\n';
                if (!f) {
                    task_errors[i] = std::string("could not write ") + name;
                }
            }
            out.records[i] = std::move(rec);
        }
    };
    const int nthreads = std::min<int>(config.threads, static_cast<int>(tasks.size()));
    std::vector<std::thread> pool;
    for (int k = 1; k < nthreads; ++k) {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread& th : pool) {
        th.join();
    }

    for (const std::string& e : task_errors) {
        if (!e.empty()) {
            out.errors.push_back(e);
        }
    }
    if (write) {
        std::ofstream csv(root / "summary.csv");
        csv << kCsvHeader << '\n';
        for (const RunRecord& r : out.records) {
            csv << csv_row(r) << '\n';
        }
        if (!csv) {
            out.errors.push_back("could not write summary.csv");
        }
    }
    return out;
}

// -----------------------------------------------------------------------
// Performance profiles and relative gaps
// -----------------------------------------------------------------------

enum class Metric { runtime, projections };

inline Metric metric_from_string(std::string_view s)
{
    if (s == "runtime") return Metric::runtime;
    if (s == "projections") return Metric::projections;
    throw InvalidArgument("unknown metric '" + std::string(s) + "'");
}

struct ProfileOptions {
    Metric metric = Metric::runtime;
    // When set, a run also counts as failed if its gap to the certified
    // optimum exceeds gap_tol.
    std::map<std::string, double> oracle;
    double gap_tol = 1e-6;
};

/// ρ_s as a step function: ratios[i] sorted ascending, one entry per problem
/// (+∞ for failures).
struct ProfileCurve {
    std::string solver;
    std::vector<double> ratios;

    double rho(double t) const
    {
        if (ratios.empty()) {
            return 0.0;
        }
        const auto n = static_cast<double>(ratios.size());
        return static_cast<double>(std::upper_bound(ratios.begin(), ratios.end(), t) - ratios.begin()) / n;
    }

    /// Breakpoints (t, ρ(t)) at each distinct finite ratio.
    std::vector<std::pair<double, double>> points() const
    {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            if (!std::isfinite(ratios[i])) {
                break;
            }
            if (i + 1 < ratios.size() && ratios[i + 1] == ratios[i]) {
                continue;
            }
            pts.emplace_back(ratios[i], rho(ratios[i]));
        }
        return pts;
    }
};

/// (f − f*)/max(1, |f*|), zero unless f exceeds f* by more than 1e−12.
inline double relative_gap(double f, double f_star)
{
    if (f - f_star <= 1e-12) {
        return 0.0;
    }
    return (f - f_star) / std::max(1.0, std::abs(f_star));
}

/// Dolan–Moré profiles over the problems every solver attempted. Oracle rows
/// are ignored as competitors.
inline std::vector<ProfileCurve> performance_profile(const std::vector<SummaryRow>& rows,
                                                     const ProfileOptions& opt = {})
{
    std::map<std::string, std::map<std::string, const SummaryRow*>> by_solver;
    for (const SummaryRow& r : rows) {
        if (r.solver != "oracle") {
            by_solver[r.solver][r.problem] = &r;
        }
    }
    if (by_solver.empty()) {
        throw InvalidArgument("performance_profile: no solver records");
    }
    std::set<std::string> problems;
    for (const auto& [p, _] : by_solver.begin()->second) {
        problems.insert(p);
    }
    for (const auto& [s, m] : by_solver) {
        std::set<std::string> keep;
        for (const std::string& p : problems) {
            if (m.count(p) != 0) {
                keep.insert(p);
            }
        }
        problems = std::move(keep);
    }
    if (problems.empty()) {
        throw InvalidArgument("performance_profile: solvers share no problem");
    }
    const double inf = std::numeric_limits<double>::infinity();
    auto cost = [&](const SummaryRow& r) {
        bool ok = r.status == RunStatus::converged;
        if (ok && !opt.oracle.empty()) {
            const auto it = opt.oracle.find(r.problem);
            if (it == opt.oracle.end()) {
                throw InvalidArgument("performance_profile: no oracle value for '" + r.problem + "'");
            }
            ok = relative_gap(r.f, it->second) <= opt.gap_tol;
        }
        if (!ok) {
            return inf;
        }
        return opt.metric == Metric::runtime ? r.seconds : static_cast<double>(r.projections);
    };
    std::vector<ProfileCurve> curves;
    for (const auto& [s, _] : by_solver) {
        curves.push_back({s, {}});
    }
    bool any_solved = false;
    for (const std::string& p : problems) {
        double best = inf;
        std::vector<double> costs;
        for (const auto& [s, m] : by_solver) {
            costs.push_back(cost(*m.at(p)));
            best = std::min(best, costs.back());
        }
        any_solved = any_solved || std::isfinite(best);
        for (std::size_t k = 0; k < costs.size(); ++k) {
            double r = inf;
            if (std::isfinite(costs[k])) {
                r = best > 0.0 ? costs[k] / best : (costs[k] == 0.0 ? 1.0 : inf);
            }
            curves[k].ratios.push_back(r);
        }
    }
    if (!any_solved) {
        throw InvalidArgument("performance_profile: no problem was solved by any solver");
    }
    for (ProfileCurve& c : curves) {
        std::sort(c.ratios.begin(), c.ratios.end());
    }
    return curves;
}

/// Sorted gaps per solver; fraction(i) = (i+1)/count.
struct GapDistribution {
    std::string solver;
    std::vector<double> gaps;
};

inline std::vector<GapDistribution> relative_gap_distribution(const std::vector<SummaryRow>& rows,
                                                              const std::map<std::string, double>& oracle)
{
    std::map<std::string, std::vector<double>> gaps;
    for (const SummaryRow& r : rows) {
        if (r.solver == "oracle") {
            continue;
        }
        const auto it = oracle.find(r.problem);
        if (it == oracle.end()) {
            throw InvalidArgument("relative_gap_distribution: no oracle value for '" + r.problem + "'");
        }
        gaps[r.solver].push_back(relative_gap(r.f, it->second));
    }
    std::vector<GapDistribution> out;
    for (auto& [s, g] : gaps) {
        std::sort(g.begin(), g.end());
        out.push_back({s, std::move(g)});
    }
    return out;
}

/// Oracle values taken from "oracle" rows of a summary.
inline std::map<std::string, double> oracle_values(const std::vector<SummaryRow>& rows)
{
    std::map<std::string, double> out;
    for (const SummaryRow& r : rows) {
        if (r.solver == "oracle" && r.status == RunStatus::converged) {
            out[r.problem] = r.f;
        }
    }
    return out;
}

inline void write_profile_csv(std::ostream& os, const std::vector<ProfileCurve>& curves)
{
    os << "solver,ratio,rho\n";
    for (const ProfileCurve& c : curves) {
        for (const auto& [t, r] : c.points()) {
            os << c.solver << ',' << format_double(t) << ',' << format_double(r) << '\n';
        }
    }
}

inline void write_gap_csv(std::ostream& os, const std::vector<GapDistribution>& dists)
{
    os << "solver,gap,fraction\n";
    for (const GapDistribution& d : dists) {
        const auto n = static_cast<double>(d.gaps.size());
        for (std::size_t i = 0; i < d.gaps.size(); ++i) {
            os << d.solver << ',' << format_double(d.gaps[i]) << ',' << format_double(static_cast<double>(i + 1) / n)
               << '\n';
        }
    }
}

} // namespace pdgeo::bench
