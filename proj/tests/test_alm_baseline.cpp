#include <pdgeo/acceptance.hpp>
#include <pdgeo/alm.hpp>
#include <pdgeo/pd.hpp>
#include <pdgeo/zoo.hpp>

#include <gtest/gtest.h>

using namespace pdgeo;

namespace {

Problem shifted_quadratic(const Vector& a, GeometricSet d)
{
    Problem p;
    p.name = "shifted_quadratic";
    p.shape = {a.size(), 1};
    p.objective = [a](const Vector& x, Vector& g) {
        g = x - a;
        return 0.5 * (x - a).squaredNorm();
    };
    p.geometric = std::move(d);
    return p;
}

} // namespace

TEST(SpectralStep, UnitCurvatureExactStep)
{
    SmoothOracle half = [](const Vector& x, Vector& g) {
        g = x;
        return 0.5 * x.squaredNorm();
    };
    SpectralParams p;
    const Vector x = Vector::Constant(1, 4.0);
    SpectralState st = SpectralState::fresh(p, 8.0);
    const SpectralStepResult r = spectral_step(half, GeometricSet::whole_space(1), x, 8.0, x, st, p);
    ASSERT_FALSE(r.stalled);
    EXPECT_EQ(r.x[0], 0.0);
}

TEST(SpectralStep, FixedPointStalls)
{
    // min ½(x − 3)² over ‖x‖₀ ≤ 1 in 2-d, at x = (3, 0): every trial projects back.
    const Vector a = (Vector(2) << 3, 0).finished();
    const Problem prob = shifted_quadratic(a, GeometricSet::sparsity(2, 1));
    SmoothOracle f = [&](const Vector& x, Vector& g) { return prob.objective(x, g); };
    SpectralParams p;
    Vector g(2);
    const double v = f(a, g);
    SpectralState st = SpectralState::fresh(p, v);
    EXPECT_TRUE(spectral_step(f, prob.geometric, a, v, g, st, p).stalled);
}

TEST(SpectralStep, BarzilaiBorweinRecoversCurvature)
{
    SmoothOracle quad = [](const Vector& x, Vector& g) {
        g = 4.0 * x;
        return 2.0 * x.squaredNorm();
    };
    SpectralParams p;
    const Vector x = Vector::Constant(1, 1.0);
    Vector g(1);
    const double v = quad(x, g);
    SpectralState st = SpectralState::fresh(p, v);
    const SpectralStepResult r = spectral_step(quad, GeometricSet::whole_space(1), x, v, g, st, p);
    ASSERT_FALSE(r.stalled);
    EXPECT_NEAR(st.gamma_bb, 4.0, 1e-12);
}

TEST(SpectralMinimize, NonmonotoneAcceptanceHolds)
{
    const zoo::Instance inst = zoo::make_instance(zoo::ZooSpec{});
    SmoothOracle f = [&](const Vector& x, Vector& g) { return inst.problem.objective(x, g); };
    SpectralParams p;
    p.m = 4;
    const SpectralResult r = spectral_minimize(f, inst.problem.geometric, Vector::Zero(10), p);
    for (std::size_t l = 1; l < r.values.size(); ++l) {
        double ref = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j <= 4 && j <= l; ++j) {
            ref = std::max(ref, r.values[l - j]);
        }
        EXPECT_LE(r.values[l], ref);
    }
    EXPECT_TRUE(inst.problem.geometric.contains(r.x));
}

TEST(SolveAlm, SparseQuadraticWithoutConstraints)
{
    const Vector a = (Vector(2) << 3, 0.1).finished();
    const Problem p = shifted_quadratic(a, GeometricSet::sparsity(2, 1));
    const RunRecord r = solve_alm(p, AlmParams{}, Vector::Zero(2));
    EXPECT_EQ(r.status, RunStatus::converged);
    EXPECT_NEAR(r.x[0], 3.0, 1e-6);
    EXPECT_EQ(r.x[1], 0.0);
}

TEST(SolveAlm, FeasibleMinimizerStopsAtFirstOuterIteration)
{
    const Vector a = (Vector(2) << 0.3, 0.7).finished();
    Problem p = shifted_quadratic(a, GeometricSet::sparsity(2, 1));
    p.geometric = GeometricSet::whole_space(2);
    p.constraints = ConstraintMap{2, [](const Vector& x) { return x; }, [](const Vector&, const Vector& l) { return l; }};
    p.target = ConvexTarget::unit_simplex(2);
    const RunRecord r = solve_alm(p, AlmParams{}, a);
    EXPECT_EQ(r.status, RunStatus::converged);
    EXPECT_EQ(r.outer_iterations, 1);
}

TEST(SolveAlm, IteratesStayInD)
{
    const zoo::Instance inst = zoo::make_instance([] {
        zoo::ZooSpec z;
        z.family = "portfolio";
        return z;
    }());
    AlmParams params;
    params.keep_iterates = true;
    const RunRecord r = solve_alm(inst.problem, params, inst.x0);
    ASSERT_FALSE(r.x_history.empty());
    for (const Vector& x : r.x_history) {
        EXPECT_TRUE(inst.problem.geometric.contains(x));
    }
    EXPECT_EQ(r.solver, "alm");
}

TEST(SolveAlm, GlobalMinimizerIsAFixedPointForBothSolvers)
{
    zoo::ZooSpec z;
    z.n = 12;
    z.s = 4;
    z.nu = 5.0;
    z.seed = 3;
    const zoo::Instance inst = zoo::make_instance(z);
    const zoo::OracleResult best = zoo::oracle_sparse_qp_global(zoo::sparse_qp_data(z.n, z.n_cond, z.nu, z.seed), z.s);
    PdParams stiff;
    stiff.tau0 = 1e6;
    stiff.tau_cap = 1e12;
    const RunRecord pd = solve_pd(inst.problem, stiff, best.x, best.x);
    const RunRecord alm = solve_alm(inst.problem, AlmParams{}, best.x);
    const double tol = 1e-6 * std::max(1.0, std::abs(best.f));
    EXPECT_NEAR(pd.objective_y, best.f, tol);
    EXPECT_NEAR(alm.objective, best.f, tol);
}

TEST(SolveAlm, UsesMoreProjectionsThanPdOnDisjunctive)
{
    zoo::ZooSpec z;
    z.family = "disjunctive";
    z.members = 3;
    const zoo::Instance inst = zoo::make_instance(z);
    const RunRecord pd = solve_pd(inst.problem, acceptance::disjunctive_pd_preset(), inst.x0);
    const RunRecord alm = solve_alm(inst.problem, acceptance::disjunctive_alm_preset(), inst.x0);
    EXPECT_GT(alm.projections, pd.projections);
}

TEST(AlmParamsJson, RoundTripAndValidation)
{
    const AlmParams p = acceptance::disjunctive_alm_preset();
    EXPECT_EQ(to_json(alm_params_from_json(to_json(p))), to_json(p));
    EXPECT_THROW(alm_params_from_json(Json{{"nope", 1}}), InvalidArgument);
    AlmParams bad;
    bad.eta = 1.0;
    EXPECT_THROW(validate(bad), InvalidArgument);
}
