#include <pdgeo/acceptance.hpp>
#include <pdgeo/convex_sets.hpp>

#include <gtest/gtest.h>

using namespace pdgeo;

namespace {

Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) {
        out[i++] = x;
    }
    return out;
}

// Simplex projection by enumerating the support: on support S the projection
// is y_S − θ with θ = (Σ y_S − 1)/|S|; keep the feasible candidate closest to y.
Vector simplex_oracle(const Vector& y)
{
    const Index n = y.size();
    Vector best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        double sum = 0.0;
        int k = 0;
        for (Index i = 0; i < n; ++i) {
            if (mask >> i & 1u) {
                sum += y[i];
                ++k;
            }
        }
        const double theta = (sum - 1.0) / k;
        Vector z = Vector::Zero(n);
        bool ok = true;
        for (Index i = 0; i < n; ++i) {
            if (mask >> i & 1u) {
                z[i] = y[i] - theta;
                ok = ok && z[i] >= 0.0;
            }
        }
        if (ok && (z - y).squaredNorm() < best_d) {
            best_d = (z - y).squaredNorm();
            best = z;
        }
    }
    return best;
}

std::vector<ConvexTarget> variants(Index n)
{
    Vector lo = Vector::Constant(n, -1.0), hi = Vector::Constant(n, 2.0);
    lo[0] = -std::numeric_limits<double>::infinity();
    hi[1] = std::numeric_limits<double>::infinity();
    return {ConvexTarget::whole_space(n),
            ConvexTarget::singleton_zero(n),
            ConvexTarget::box(lo, hi),
            ConvexTarget::unit_simplex(n),
            ConvexTarget::nonpositive_shifted(Vector::LinSpaced(n, -1.0, 1.0)),
            ConvexTarget::product({ConvexTarget::unit_simplex(2), ConvexTarget::box(lo.tail(n - 2), hi.tail(n - 2))})};
}

// A random member of C: projection of a random point.
Vector random_member(const ConvexTarget& c, Rng& rng)
{
    return c.project(acceptance::random_vector(rng, c.dim(), 3.0));
}

} // namespace

TEST(ConvexProject, BoxClamp)
{
    const ConvexTarget box = ConvexTarget::box(Vector::Zero(2), Vector::Ones(2));
    EXPECT_EQ(box.project(vec({2, -3})), vec({1, 0}));
}

TEST(ConvexProject, SimplexSymmetricPoint)
{
    const Vector p = ConvexTarget::unit_simplex(3).project(vec({0.5, 0.5, 0.5}));
    EXPECT_LE((p - Vector::Constant(3, 1.0 / 3.0)).norm(), 1e-15);
}

TEST(ConvexProject, SimplexVertex)
{
    EXPECT_LE((ConvexTarget::unit_simplex(2).project(vec({2, 0})) - vec({1, 0})).norm(), 1e-15);
}

TEST(ConvexProject, SimplexMatchesSupportEnumeration)
{
    Rng rng(3, 1);
    for (int t = 0; t < 500; ++t) {
        const Index n = 1 + static_cast<Index>(rng.next() % 6);
        const Vector y = acceptance::random_vector(rng, n, 2.0);
        EXPECT_LE((ConvexTarget::unit_simplex(n).project(y) - simplex_oracle(y)).norm(), 1e-10);
    }
}

TEST(ConvexProject, ShiftedNonpositiveAndSingleton)
{
    EXPECT_EQ(ConvexTarget::nonpositive_shifted(vec({0.1, 0.1})).project(vec({1, -1})), vec({0.1, -1}));
    EXPECT_EQ(ConvexTarget::singleton_zero(2).project(vec({4, 5})), Vector::Zero(2));
}

TEST(ConvexProject, DimensionMismatchThrows)
{
    EXPECT_THROW(ConvexTarget::unit_simplex(3).project(Vector::Zero(2)), DimensionError);
    EXPECT_THROW(ConvexTarget::box(Vector::Zero(2), Vector::Ones(3)), DimensionError);
}

TEST(ConvexProject, BoxRequiresOrderedBounds)
{
    EXPECT_THROW(ConvexTarget::box(vec({1}), vec({0})), InvalidArgument);
}

TEST(SquaredDistance, MemberGivesZero)
{
    const auto sd = squared_distance_and_gradient(ConvexTarget::box(Vector::Zero(2), Vector::Ones(2)), vec({0.5, 0.2}));
    EXPECT_EQ(sd.value, 0.0);
    EXPECT_EQ(sd.grad, Vector::Zero(2));
}

TEST(SquaredDistance, ScalarClamp)
{
    const auto sd = squared_distance_and_gradient(ConvexTarget::box(vec({0}), vec({1})), vec({2}));
    EXPECT_DOUBLE_EQ(sd.value, 0.5);
    EXPECT_DOUBLE_EQ(sd.grad[0], 1.0);
}

TEST(SquaredDistance, GradientMatchesFiniteDifferences)
{
    Rng rng(8, 1);
    const ConvexTarget box = ConvexTarget::box(Vector::Constant(5, -0.5), Vector::Constant(5, 0.5));
    for (int t = 0; t < 20; ++t) {
        const Vector y = acceptance::random_vector(rng, 5, 2.0);
        const Vector g = squared_distance_and_gradient(box, y).grad;
        Vector fd(5);
        for (Index i = 0; i < 5; ++i) {
            Vector yp = y, ym = y;
            yp[i] += 1e-6;
            ym[i] -= 1e-6;
            fd[i] = (squared_distance_and_gradient(box, yp).value - squared_distance_and_gradient(box, ym).value) / 2e-6;
        }
        EXPECT_LE((fd - g).norm() / std::max(1.0, g.norm()), 1e-6);
    }
}

TEST(ConvexProperties, NonexpansiveIdempotentAndVariational)
{
    Rng rng(12, 1);
    for (const ConvexTarget& c : variants(5)) {
        for (int t = 0; t < 100; ++t) {
            const Vector a = acceptance::random_vector(rng, 5, 3.0);
            const Vector b = acceptance::random_vector(rng, 5, 3.0);
            EXPECT_LE((c.project(a) - c.project(b)).norm(), (a - b).norm() + 1e-12) << c.kind();
            EXPECT_LE((c.project(c.project(a)) - c.project(a)).norm(), 1e-12) << c.kind();
        }
        for (int t = 0; t < 20; ++t) {
            const Vector y = acceptance::random_vector(rng, 5, 3.0);
            const Vector p = c.project(y);
            for (int k = 0; k < 20; ++k) {
                const Vector z = random_member(c, rng);
                EXPECT_LE((y - p).dot(z - p), 1e-10) << c.kind();
            }
        }
    }
}

TEST(ConvexProperties, ProductDimensionSums)
{
    const ConvexTarget c = ConvexTarget::product({ConvexTarget::unit_simplex(3), ConvexTarget::whole_space(2)});
    EXPECT_EQ(c.dim(), 5);
    EXPECT_TRUE(contains(c, vec({0.2, 0.3, 0.5, -7, 9})));
}
