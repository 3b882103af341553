#include <pdgeo/altmin.hpp>
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

TEST(AltMin, UnconstrainedQuadraticGoesToOrigin)
{
    const Problem p = shifted_quadratic(Vector::Zero(2), GeometricSet::whole_space(2));
    const PenaltyObjective po = PenaltyObjective::make(p, 1.0);
    DirectionStrategy s;
    AltMinParams ap;
    ap.eps_in = 1e-300;
    ap.delta = 1e-10;
    const AltMinResult r = alternating_minimize(po, Vector::Constant(2, 4.0), Vector::Constant(2, 4.0), ap, s);
    EXPECT_EQ(r.reason, InnerStop::gradient);
    EXPECT_LE(r.x.norm(), 1e-8);
    EXPECT_LE(r.y.norm(), 1e-8);
    EXPECT_LE(r.q, 1e-15);
}

TEST(AltMin, SparseCouplingKeepsLargerCoordinate)
{
    const Vector a = (Vector(2) << 3, 0.1).finished();
    const Problem p = shifted_quadratic(a, GeometricSet::sparsity(2, 1));
    const PenaltyObjective po = PenaltyObjective::make(p, 1e6);
    DirectionStrategy s;
    AltMinParams ap;
    ap.eps_in = 1e-12;
    const AltMinResult r = alternating_minimize(po, a, p.geometric.project(a), ap, s);
    EXPECT_NEAR(r.y[0], 3.0, 1e-5);
    EXPECT_EQ(r.y[1], 0.0);
    EXPECT_NEAR((r.x - r.y).norm(), 0.0, 1e-5);
}

TEST(AltMin, GradientCriterionFiresImmediately)
{
    const Vector a = Vector::Ones(3);
    const Problem p = shifted_quadratic(a, GeometricSet::whole_space(3));
    const PenaltyObjective po = PenaltyObjective::make(p, 1.0);
    DirectionStrategy s;
    AltMinParams ap;
    ap.delta = 1e-3;
    const AltMinResult r = alternating_minimize(po, a, a, ap, s);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.projections, 0);
    EXPECT_EQ(r.reason, InnerStop::gradient);
}

TEST(AltMin, OneProjectionPerIterationAndMonotoneQ)
{
    const zoo::Instance inst = zoo::make_instance(zoo::ZooSpec{});
    for (int steps : {1, 5}) {
        const PenaltyObjective po = PenaltyObjective::make(inst.problem, 3.0, MultiplierMode::equality_only);
        DirectionStrategy s;
        AltMinParams ap;
        ap.descent_steps = steps;
        ap.eps_in = 1e-10;
        const AltMinResult r = alternating_minimize(po, inst.x0, inst.problem.geometric.project(inst.x0), ap, s);
        EXPECT_EQ(r.projections, r.iterations);
        ASSERT_EQ(r.q_history.size(), static_cast<std::size_t>(r.iterations) + 1);
        for (std::size_t l = 1; l < r.q_history.size(); ++l) {
            EXPECT_LE(r.q_history[l], r.q_history[l - 1]);
        }
        EXPECT_TRUE(inst.problem.geometric.contains(r.y));
        EXPECT_LE((inst.problem.geometric.project(r.y) - r.y).norm(), 0.0);
    }
}

TEST(AltMin, IterationCapIsReported)
{
    const zoo::Instance inst = zoo::make_instance(zoo::ZooSpec{});
    const PenaltyObjective po = PenaltyObjective::make(inst.problem, 100.0);
    DirectionStrategy s;
    AltMinParams ap;
    ap.max_inner_iters = 2;
    ap.eps_in = 1e-300;
    const AltMinResult r = alternating_minimize(po, Vector::Ones(10), Vector::Zero(10), ap, s);
    EXPECT_EQ(r.reason, InnerStop::iteration_cap);
    EXPECT_EQ(r.iterations, 2);
}

TEST(AltMin, ExactUpdateNeedsPlugin)
{
    const Problem p = shifted_quadratic(Vector::Ones(2), GeometricSet::whole_space(2));
    const PenaltyObjective po = PenaltyObjective::make(p, 1.0);
    DirectionStrategy s;
    AltMinParams ap;
    ap.use_exact_update = true;
    EXPECT_THROW(alternating_minimize(po, Vector::Zero(2), Vector::Zero(2), ap, s), InvalidArgument);
}

TEST(AltMin, InvalidParametersRejected)
{
    const Problem p = shifted_quadratic(Vector::Ones(2), GeometricSet::whole_space(2));
    const PenaltyObjective po = PenaltyObjective::make(p, 1.0);
    DirectionStrategy s;
    AltMinParams ap;
    ap.eps_in = 0.0;
    EXPECT_THROW(alternating_minimize(po, Vector::Zero(2), Vector::Zero(2), ap, s), InvalidArgument);
}

TEST(AltMin, DivergenceFloorAborts)
{
    Problem p = shifted_quadratic(Vector::Zero(1), GeometricSet::whole_space(1));
    p.objective = [](const Vector& x, Vector& g) {
        g = Vector::Constant(1, -1e8);
        return -1e8 * x[0];
    };
    const PenaltyObjective po = PenaltyObjective::make(p, 1e-6);
    DirectionStrategy s;
    AltMinParams ap;
    EXPECT_THROW(alternating_minimize(po, Vector::Zero(1), Vector::Zero(1), ap, s), NumericalFailure);
}
