// pdgeo command-line front end.
//
//   pdgeo solve   --family sparse_qp --n 10 --solver pdlm --tau0 0.5 --out run.json
//   pdgeo bench   grid.json
//   pdgeo profile pdgeo_out/summary.csv --metric projections
//   pdgeo verify  [criterion ids]
//
// Exit codes: 0 success, 1 a run or criterion failed, 2 bad configuration.

#include <pdgeo/acceptance.hpp>
#include <pdgeo/bench.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

using namespace pdgeo;

namespace {

constexpr int kOk = 0;
constexpr int kRunFailed = 1;
constexpr int kConfigError = 2;

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

// Converts a flag value to the JSON type of the parameter's default.
Json typed_value(const Json& like, const std::string& text)
{
    try {
        if (like.is_boolean()) {
            if (text == "true" || text == "1") return true;
            if (text == "false" || text == "0") return false;
            throw InvalidArgument("expected true or false, got '" + text + "'");
        }
        if (like.is_number_integer()) return std::stoll(text);
        if (like.is_number()) return std::stod(text);
    } catch (const std::logic_error&) {
        throw InvalidArgument("not a number: '" + text + "'");
    }
    return text;
}

struct SolveArgs {
    zoo::ZooSpec spec;
    std::string solver = "pd";
    std::string config;
    std::string out;
    double start_box = 0.0;
    std::uint64_t start_seed = 0;
    std::map<std::string, std::string> flags;  // parameter name -> raw value
};

int run_solve(const SolveArgs& a)
{
    bench::BenchEntry e;
    e.problem = a.spec;
    e.solver = a.solver;
    e.vary_seed = false;
    e.start_box = a.start_box;
    e.seed_base = a.start_seed;
    Json overrides = Json::object();
    if (!a.config.empty()) {
        overrides = read_json_file(a.config);
        if (overrides.contains("problem")) {
            e.problem = zoo::zoo_spec_from_json(overrides.at("problem"));
            overrides.erase("problem");
        }
        if (overrides.contains("params")) {
            overrides = overrides.at("params");
        }
    }
    const Json defaults = a.solver == "alm" ? to_json(AlmParams{}) : to_json(PdParams{});
    for (const auto& [key, text] : a.flags) {
        if (!defaults.contains(key)) {
            throw InvalidArgument("--" + key + " does not apply to solver '" + a.solver + "'");
        }
        overrides[key] = typed_value(defaults.at(key), text);
    }
    e.overrides = overrides;
    bench::BenchConfig check;
    check.grid.push_back(e);
    bench::validate(check);

    const RunRecord r = bench::run_entry(e, 0, 0.0);
    const std::string text = emit_json(r, 2);
    if (a.out.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream os(a.out);
        os << text << '\n';
        if (!os) {
            std::cerr << "cannot write '" << a.out << "'\n";
            return kRunFailed;
        }
        std::cerr << r.problem << " " << r.solver << ": f=" << r.objective << " residual=" << r.residual
                  << " status=" << to_string(r.status) << '\n';
    }
    return bench::run_failed(r) ? kRunFailed : kOk;
}

int run_bench(const std::string& path, const std::string& out, int threads)
{
    bench::BenchConfig c = bench::bench_config_from_json(read_json_file(path));
    if (!out.empty()) c.output_dir = out;
    if (threads > 0) c.threads = threads;
    bench::validate(c);
    const bench::GridResult g = bench::run_grid(c);
    std::size_t failed = 0;
    for (const RunRecord& r : g.records) {
        failed += bench::run_failed(r);
    }
    for (const std::string& err : g.errors) {
        std::cerr << "error: " << err << '\n';
    }
    std::cerr << g.records.size() << " runs, " << failed << " failed";
    if (!c.output_dir.empty()) std::cerr << ", summary in " << c.output_dir << "/summary.csv";
    std::cerr << '\n';
    return g.all_ok() ? kOk : kRunFailed;
}

int run_profile(const std::string& summary, const std::string& metric, double gap_tol, const std::string& out_dir)
{
    std::ifstream in(summary);
    if (!in) {
        throw InvalidArgument("cannot open '" + summary + "'");
    }
    const std::vector<bench::SummaryRow> rows = bench::parse_csv_summary(in);
    bench::ProfileOptions opt;
    opt.metric = bench::metric_from_string(metric);
    opt.gap_tol = gap_tol;
    opt.oracle = bench::oracle_values(rows);
    const auto curves = bench::performance_profile(rows, opt);

    const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(summary).parent_path() : std::filesystem::path(out_dir);
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::ofstream pf(dir / ("profile_" + metric + ".csv"));
    bench::write_profile_csv(pf, curves);
    std::cerr << "wrote " << (dir / ("profile_" + metric + ".csv")).string() << '\n';
    if (!opt.oracle.empty()) {
        std::ofstream gf(dir / "gaps.csv");
        bench::write_gap_csv(gf, bench::relative_gap_distribution(rows, opt.oracle));
        std::cerr << "wrote " << (dir / "gaps.csv").string() << '\n';
    }
    for (const bench::ProfileCurve& c : curves) {
        std::cout << c.solver << ": rho(1)=" << c.rho(1.0) << " rho(10)=" << c.rho(10.0) << '\n';
    }
    return kOk;
}

int run_verify(const std::vector<int>& ids_in)
{
    using namespace pdgeo::acceptance;
    std::vector<int> ids = ids_in;
    const int count = static_cast<int>(all_criteria().size());
    if (ids.empty()) {
        for (int i = 1; i <= count; ++i) ids.push_back(i);
    }
    for (int id : ids) {
        if (id < 1 || id > count) throw InvalidArgument("unknown criterion " + std::to_string(id));
    }
    int failed = 0;
    for (int id : ids) {
        Verdict v;
        try {
            v = all_criteria()[static_cast<std::size_t>(id - 1)]();
        } catch (const std::exception& e) {
            v = {id, "exception", false, e.what()};
        }
        std::cout << format(v) << std::endl;
        failed += !v.passed;
    }
    return failed == 0 ? kOk : kRunFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Penalty decomposition solvers for problems with geometric constraints"};
    app.require_subcommand(1);

    SolveArgs sa;
    CLI::App* solve = app.add_subcommand("solve", "Solve one generated problem and print its run record");
    solve->add_option("--family", sa.spec.family, "sparse_qp|beck_eldar|portfolio|correlation|multitask|disjunctive");
    solve->add_option("--n", sa.spec.n);
    solve->add_option("--s", sa.spec.s);
    solve->add_option("--kappa", sa.spec.kappa);
    solve->add_option("--members", sa.spec.members);
    solve->add_option("--rows", sa.spec.rows);
    solve->add_option("--tasks", sa.spec.m, "multitask tasks or disjunctive quartic constraints");
    solve->add_option("--samples", sa.spec.samples);
    solve->add_option("--n_cond", sa.spec.n_cond);
    solve->add_option("--nu", sa.spec.nu);
    solve->add_option("--problem_eta", sa.spec.eta, "multitask label noise");
    solve->add_option("--variant", sa.spec.variant, "correlation matrix P1|P2|P3");
    solve->add_option("--update", sa.spec.update, "correlation x-update none|exact|exact_lower_level");
    solve->add_option("--seed", sa.spec.seed);
    solve->add_option("--solver", sa.solver)->check(CLI::IsMember(bench::solver_ids()));
    solve->add_option("--config", sa.config, "JSON file with solver parameters");
    solve->add_option("--out", sa.out, "write the run record here instead of stdout");
    solve->add_option("--start_box", sa.start_box, "random start in [-b, b]^n");
    solve->add_option("--start_seed", sa.start_seed);

    // One flag per solver parameter, named after the field.
    Json all_params = to_json(PdParams{});
    all_params.update(to_json(AlmParams{}));
    std::map<std::string, std::string> raw;
    for (auto it = all_params.begin(); it != all_params.end(); ++it) {
        solve->add_option("--" + it.key(), raw[it.key()], "solver parameter (default " + it.value().dump() + ")");
    }

    std::string grid_path, bench_out;
    int bench_threads = 0;
    CLI::App* benchc = app.add_subcommand("bench", "Run a grid of problems and solvers");
    benchc->add_option("grid", grid_path, "grid JSON file")->required();
    benchc->add_option("--out", bench_out, "output directory");
    benchc->add_option("--threads", bench_threads);

    std::string summary, metric = "runtime", profile_out;
    double gap_tol = 1e-6;
    CLI::App* profile = app.add_subcommand("profile", "Performance profiles and gap distributions from a summary");
    profile->add_option("summary", summary, "summary.csv from bench")->required();
    profile->add_option("--metric", metric)->check(CLI::IsMember({"runtime", "projections"}));
    profile->add_option("--gap_tol", gap_tol);
    profile->add_option("--out", profile_out, "output directory (default: next to the summary)");

    std::vector<int> verify_ids;
    CLI::App* verify = app.add_subcommand("verify", "Run the acceptance suites");
    verify->add_option("ids", verify_ids, "criterion ids (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (solve->parsed()) {
            for (const auto& [key, value] : raw) {
                if (solve->count("--" + key) > 0) sa.flags[key] = value;
            }
            return run_solve(sa);
        }
        if (benchc->parsed()) return run_bench(grid_path, bench_out, bench_threads);
        if (profile->parsed()) return run_profile(summary, metric, gap_tol, profile_out);
        if (verify->parsed()) return run_verify(verify_ids);
    } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRunFailed;
    }
    return kOk;
}
