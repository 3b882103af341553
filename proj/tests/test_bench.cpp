#include <pdgeo/bench.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace pdgeo;
using namespace pdgeo::bench;

namespace {

SummaryRow row(std::string problem, std::string solver, double seconds, RunStatus st = RunStatus::converged,
               double f = 0.0, long projections = 1)
{
    SummaryRow r;
    r.problem = std::move(problem);
    r.solver = std::move(solver);
    r.seconds = seconds;
    r.status = st;
    r.f = f;
    r.projections = projections;
    return r;
}

std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("pdgeo_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

BenchConfig small_grid(const std::string& out)
{
    BenchConfig c;
    c.output_dir = out;
    BenchEntry e;
    e.problem.family = "beck_eldar";
    e.solver = "pd";
    e.overrides = Json{{"tau0", 0.1}};
    c.grid.push_back(e);
    e.solver = "pdlm";
    c.grid.push_back(e);
    return c;
}

std::string strip_timing(Json j)
{
    j.erase("seconds");
    return j.dump();
}

} // namespace

TEST(Profile, TwoSolversSwapWins)
{
    const auto curves = performance_profile({row("a", "s1", 1), row("b", "s1", 2), row("a", "s2", 2), row("b", "s2", 1)});
    ASSERT_EQ(curves.size(), 2u);
    for (const ProfileCurve& c : curves) {
        EXPECT_DOUBLE_EQ(c.rho(1.0), 0.5);
        EXPECT_DOUBLE_EQ(c.rho(2.0), 1.0);
    }
}

TEST(Profile, SingleSolverIsOneEverywhere)
{
    const auto curves = performance_profile({row("a", "s1", 3), row("b", "s1", 7)});
    ASSERT_EQ(curves.size(), 1u);
    EXPECT_DOUBLE_EQ(curves[0].rho(1.0), 1.0);
    EXPECT_DOUBLE_EQ(curves[0].rho(1e9), 1.0);
}

TEST(Profile, FailureCapsCurve)
{
    const auto curves = performance_profile({row("a", "s1", 1), row("b", "s1", 1, RunStatus::numerical_failure),
                                             row("a", "s2", 5), row("b", "s2", 5)});
    EXPECT_DOUBLE_EQ(curves[0].rho(1e12), 0.5);
    EXPECT_DOUBLE_EQ(curves[1].rho(5.0), 1.0);
}

TEST(Profile, OracleGapCountsAsFailure)
{
    ProfileOptions opt;
    opt.oracle = {{"a", -41.33}};
    const auto curves = performance_profile({row("a", "s1", 1, RunStatus::converged, -39.0),
                                             row("a", "s2", 4, RunStatus::converged, -41.33)},
                                            opt);
    EXPECT_DOUBLE_EQ(curves[0].rho(1e12), 0.0);
    EXPECT_DOUBLE_EQ(curves[1].rho(1.0), 1.0);
}

TEST(Profile, MonotoneBoundedAndScaleInvariant)
{
    Rng rng(1, 1);
    std::vector<SummaryRow> rows, scaled;
    for (int p = 0; p < 30; ++p) {
        for (const char* s : {"pd", "pdlm", "alm"}) {
            const double t = rng.uniform(0.1, 10.0);
            const RunStatus st = rng.uniform() < 0.1 ? RunStatus::time_limit : RunStatus::converged;
            rows.push_back(row("p" + std::to_string(p), s, t, st));
            scaled.push_back(row("p" + std::to_string(p), s, 7.5 * t, st));
        }
    }
    const auto a = performance_profile(rows);
    const auto b = performance_profile(scaled);
    for (std::size_t k = 0; k < a.size(); ++k) {
        double last = 0.0;
        for (double t = 1.0; t < 200.0; t *= 1.1) {
            const double r = a[k].rho(t);
            EXPECT_GE(r, last);
            EXPECT_LE(r, 1.0);
            EXPECT_NEAR(r, b[k].rho(t), 1e-12);
            last = r;
        }
    }
}

TEST(Profile, ProjectionMetricAndZeroBest)
{
    ProfileOptions opt;
    opt.metric = Metric::projections;
    const auto curves = performance_profile({row("a", "s1", 1, RunStatus::converged, 0, 0),
                                             row("a", "s2", 1, RunStatus::converged, 0, 10)},
                                            opt);
    EXPECT_DOUBLE_EQ(curves[0].rho(1.0), 1.0);
    EXPECT_DOUBLE_EQ(curves[1].rho(1e12), 0.0);
}

TEST(Profile, NothingSolvedIsAnError)
{
    EXPECT_THROW(performance_profile({row("a", "s1", 1, RunStatus::numerical_failure)}), InvalidArgument);
    EXPECT_THROW(performance_profile({}), InvalidArgument);
}

TEST(Gaps, OracleSolverHasZeroGaps)
{
    const auto d = relative_gap_distribution({row("a", "pd", 1, RunStatus::converged, -3.0),
                                              row("b", "pd", 1, RunStatus::converged, 2.0)},
                                             {{"a", -3.0}, {"b", 2.0}});
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].gaps, (std::vector<double>{0.0, 0.0}));
}

TEST(Gaps, StationaryLevelGap)
{
    EXPECT_NEAR(relative_gap(-39.0, -41.33), 2.33 / 41.33, 1e-12);
    EXPECT_EQ(relative_gap(1.0 + 1e-13, 1.0), 0.0);
    EXPECT_GT(relative_gap(1.0 + 1e-11, 1.0), 0.0);
    EXPECT_EQ(relative_gap(-50.0, -41.33), 0.0);
}

TEST(Gaps, MissingOracleIsAnError)
{
    EXPECT_THROW(relative_gap_distribution({row("a", "pd", 1)}, {}), InvalidArgument);
}

TEST(Csv, EmitParseRoundTrip)
{
    RunRecord r;
    r.problem = "sparse_qp_n10/start3";
    r.solver = "pdlm";
    r.objective = -12.345678901234567;
    r.residual = 3.2e-7;
    r.outer_iterations = 12;
    r.inner_iterations = 345;
    r.projections = 346;
    r.seconds = 0.25;
    r.status = RunStatus::tau_cap_reached;
    std::stringstream ss;
    ss << kCsvHeader << '\n' << csv_row(r) << '\n';
    const auto rows = parse_csv_summary(ss);
    ASSERT_EQ(rows.size(), 1u);
    const SummaryRow want = summary_row(r);
    EXPECT_EQ(rows[0].problem, want.problem);
    EXPECT_EQ(rows[0].f, want.f);
    EXPECT_EQ(rows[0].residual, want.residual);
    EXPECT_EQ(rows[0].inner_iters, want.inner_iters);
    EXPECT_EQ(rows[0].status, want.status);
}

TEST(Config, ParsesAndRejects)
{
    const Json j = to_json(small_grid("out"));
    const BenchConfig c = bench_config_from_json(j);
    EXPECT_EQ(c.grid.size(), 2u);
    EXPECT_EQ(c.grid[1].solver, "pdlm");
    EXPECT_THROW(bench_config_from_json(Json{{"grid", Json::array()}}), InvalidArgument);
    Json bad = j;
    bad["grid"][0]["solver"] = "newton";
    EXPECT_THROW(bench_config_from_json(bad), InvalidArgument);
    bad = j;
    bad["time_limit"] = 0;
    EXPECT_THROW(bench_config_from_json(bad), InvalidArgument);
    bad = j;
    bad["extra"] = 1;
    EXPECT_THROW(bench_config_from_json(bad), InvalidArgument);
}

TEST(Grid, OneProblemTwoSolversGivesTwoRecords)
{
    const auto dir = scratch_dir("two");
    const GridResult g = run_grid(small_grid(dir.string()));
    ASSERT_EQ(g.records.size(), 2u);
    EXPECT_TRUE(g.all_ok());
    EXPECT_EQ(g.records[0].solver, "pd");
    EXPECT_EQ(g.records[1].solver, "pdlm");
    EXPECT_TRUE(std::filesystem::exists(dir / "runs" / "000000.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "runs" / "000001.json"));
    std::ifstream csv(dir / "summary.csv");
    EXPECT_EQ(parse_csv_summary(csv).size(), 2u);
}

TEST(Grid, RerunIsIdenticalExceptTiming)
{
    const auto d1 = scratch_dir("rerun1");
    const auto d2 = scratch_dir("rerun2");
    BenchConfig c = small_grid(d1.string());
    c.threads = 2;
    c.grid[0].replications = 3;
    c.grid[0].start_box = 10.0;
    run_grid(c);
    c.output_dir = d2.string();
    c.threads = 1;
    run_grid(c);
    for (const auto& f : std::filesystem::directory_iterator(d1 / "runs")) {
        std::ifstream a(f.path()), b(d2 / "runs" / f.path().filename());
        EXPECT_EQ(strip_timing(Json::parse(a)), strip_timing(Json::parse(b))) << f.path();
    }
}

TEST(Grid, BeckEldarRandomStartsAllGlobal)
{
    BenchConfig c = small_grid("");
    for (BenchEntry& e : c.grid) {
        e.replications = 50;
        e.start_box = 10.0;
        e.seed_base = 99;
    }
    c.threads = 4;
    const GridResult g = run_grid(c);
    ASSERT_EQ(g.records.size(), 100u);
    for (const RunRecord& r : g.records) {
        EXPECT_NEAR(r.objective, -124.0 / 3.0, 1e-2) << r.problem;
        EXPECT_NE(r.problem.find("/start"), std::string::npos);
    }
}

TEST(Grid, OracleEntriesAndPerRunErrors)
{
    BenchConfig c;
    c.output_dir = "";
    BenchEntry e;
    e.solver = "oracle";
    e.problem.nu = 5.0;
    c.grid.push_back(e);
    e.problem.family = "correlation";
    c.grid.push_back(e);  // no enumeration oracle for this family
    const GridResult g = run_grid(c);
    ASSERT_EQ(g.records.size(), 2u);
    EXPECT_EQ(g.records[0].status, RunStatus::converged);
    EXPECT_EQ(g.records[1].status, RunStatus::numerical_failure);
    EXPECT_EQ(g.errors.size(), 1u);
    EXPECT_FALSE(g.all_ok());
}

TEST(Grid, UnwritableOutputReportedPerRun)
{
    const auto dir = scratch_dir("blocked");
    std::filesystem::create_directories(dir / "runs" / "000000.json");  // a directory where a file should go
    const GridResult g = run_grid(small_grid(dir.string()));
    EXPECT_EQ(g.records.size(), 2u);
    EXPECT_EQ(g.errors.size(), 1u);
}
