#include <pdgeo/acceptance.hpp>
#include <pdgeo/geometric_sets.hpp>
#include <pdgeo/linalg.hpp>

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

// Cyclic Jacobi eigen-decomposition, independent of the library's kernels.
void jacobi_eigen(Matrix a, Vector& values, Matrix& vectors)
{
    const Index n = a.rows();
    vectors = Matrix::Identity(n, n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                off += a(i, j) * a(i, j);
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (Index p = 0; p < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Index k = 0; k < n; ++k) {
                    const double vkp = vectors(k, p), vkq = vectors(k, q);
                    vectors(k, p) = c * vkp - s * vkq;
                    vectors(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    values = a.diagonal();
}

Matrix random_symmetric(Rng& rng, Index n)
{
    const Matrix b = Matrix::NullaryExpr(n, n, [&]() { return rng.normal(); });
    return 0.5 * (b + b.transpose());
}

// Dual of min ½‖z − x‖² s.t. Az ≤ b: for each active set W solve the equality
// system and keep the first KKT-consistent candidate.
Vector polyhedron_oracle(const Vector& x, const Matrix& a, const Vector& b)
{
    const Index m = a.rows();
    Vector best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<Index> w;
        for (Index i = 0; i < m; ++i) {
            if (mask >> i & 1u) {
                w.push_back(i);
            }
        }
        Vector z = x;
        if (!w.empty()) {
            Matrix aw(static_cast<Index>(w.size()), x.size());
            Vector bw(static_cast<Index>(w.size()));
            for (std::size_t k = 0; k < w.size(); ++k) {
                aw.row(static_cast<Index>(k)) = a.row(w[k]);
                bw[static_cast<Index>(k)] = b[w[k]];
            }
            const Eigen::FullPivLU<Matrix> lu(aw * aw.transpose());
            if (!lu.isInvertible()) {
                continue;
            }
            const Vector lambda = lu.solve(aw * x - bw);
            if ((lambda.array() < -1e-12).any()) {
                continue;
            }
            z = x - aw.transpose() * lambda;
        }
        if (((a * z - b).array() > 1e-9).any()) {
            continue;
        }
        if ((z - x).squaredNorm() < best_d) {
            best_d = (z - x).squaredNorm();
            best = z;
        }
    }
    return best;
}

} // namespace

TEST(SparseProjection, KeepsLargestMagnitudes)
{
    EXPECT_EQ(project_sparse(vec({3, -1, 2}), 2), vec({3, 0, 2}));
}

TEST(SparseProjection, SparseInputIsFixed)
{
    const Vector x = vec({0, 4, 0, -1});
    EXPECT_EQ(project_sparse(x, 2), x);
}

TEST(SparseProjection, TieKeepsLowestIndex)
{
    EXPECT_EQ(project_sparse(vec({1, -1}), 1), vec({1, 0}));
}

TEST(SparseProjection, RejectsBadSparsity)
{
    EXPECT_THROW(GeometricSet::sparsity(3, 0), InvalidArgument);
    EXPECT_THROW(GeometricSet::sparsity(3, 3), InvalidArgument);
}

TEST(TruncatedSvd, LowRankInputIsFixed)
{
    Rng rng(1, 1);
    const Matrix x = Matrix::NullaryExpr(5, 2, [&]() { return rng.normal(); })
                     * Matrix::NullaryExpr(2, 4, [&]() { return rng.normal(); });
    EXPECT_LE((truncated_svd_project(x, 2) - x).norm(), 1e-10);
}

TEST(TruncatedSvd, DiagonalDropsSmallest)
{
    const Matrix x = vec({3, 2, 1}).asDiagonal();
    const Matrix expected = vec({3, 2, 0}).asDiagonal();
    EXPECT_LE((truncated_svd_project(x, 2) - expected).norm(), 1e-12);
}

TEST(TruncatedSvd, ResidualEqualsTailEnergy)
{
    Rng rng(2, 1);
    for (int t = 0; t < 50; ++t) {
        const Matrix x = Matrix::NullaryExpr(5, 4, [&]() { return rng.normal(); });
        Vector ev;
        Matrix vecs;
        jacobi_eigen(x.transpose() * x, ev, vecs);
        std::sort(ev.data(), ev.data() + ev.size());
        const double tail = ev[0] + ev[1];
        const Matrix p = truncated_svd_project(x, 2);
        EXPECT_LE(std::abs((x - p).squaredNorm() - tail) / tail, 1e-8);
        Eigen::JacobiSVD<Matrix> svd(p);
        EXPECT_LE(svd.singularValues()[2], 1e-10 * svd.singularValues()[0]);
    }
}

TEST(PsdLowRank, PsdLowRankInputIsFixed)
{
    Rng rng(3, 1);
    const Matrix b = Matrix::NullaryExpr(6, 2, [&]() { return rng.normal(); });
    const Matrix x = b * b.transpose();
    EXPECT_LE((psd_lowrank_project(x, 2) - x).norm(), 1e-10);
}

TEST(PsdLowRank, NegativeEigenvalueClipped)
{
    const Matrix x = vec({2, -1}).asDiagonal();
    const Matrix expected = vec({2, 0}).asDiagonal();
    EXPECT_LE((psd_lowrank_project(x, 1) - expected).norm(), 1e-14);
}

TEST(PsdLowRank, MatchesJacobiClipAndTruncate)
{
    Rng rng(4, 1);
    for (int t = 0; t < 20; ++t) {
        const Matrix x = random_symmetric(rng, 8);
        Vector ev;
        Matrix v;
        jacobi_eigen(x, ev, v);
        std::vector<Index> order(8);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Index a, Index b) { return ev[a] > ev[b]; });
        Matrix expected = Matrix::Zero(8, 8);
        for (Index k = 0; k < 3; ++k) {
            const Index i = order[static_cast<std::size_t>(k)];
            expected += std::max(0.0, ev[i]) * v.col(i) * v.col(i).transpose();
        }
        EXPECT_LE((psd_lowrank_project(x, 3) - expected).norm(), 1e-8);
    }
}

TEST(PsdLowRank, LanczosPathMatchesDense)
{
    Rng rng(5, 1);
    const Matrix b = Matrix::NullaryExpr(100, 100, [&]() { return rng.normal(); });
    const Matrix x = 0.5 * (b + b.transpose());
    const Matrix p = psd_lowrank_project(x, 4);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(x);
    Matrix expected = Matrix::Zero(100, 100);
    for (Index k = 0; k < 4; ++k) {
        const Index i = 99 - k;
        expected += std::max(0.0, es.eigenvalues()[i]) * es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
    }
    EXPECT_LE((p - expected).norm(), 1e-8);
}

TEST(PsdLowRank, AsymmetryBeyondToleranceThrows)
{
    Matrix x = Matrix::Identity(3, 3);
    x(0, 1) = 1e-3;
    EXPECT_THROW(psd_lowrank_project(x, 1), InvalidArgument);
}

TEST(PackedSymmetric, RoundTripPreservesFrobenius)
{
    Rng rng(6, 1);
    const Matrix x = random_symmetric(rng, 5);
    const Vector v = pack_symmetric(x);
    EXPECT_EQ(v.size(), packed_size(5));
    EXPECT_NEAR(v.norm(), x.norm(), 1e-12);
    EXPECT_LE((unpack_symmetric(v) - x).norm(), 1e-14);
}

TEST(SpectralKernels, EigenvaluesSortedAndVectorsOrthonormal)
{
    Rng rng(7, 1);
    const Matrix x = random_symmetric(rng, 7);
    const linalg::SpectralFactors f = linalg::symmetric_eigen(x);
    for (Index i = 1; i < f.values.size(); ++i) {
        EXPECT_GE(f.values[i - 1], f.values[i]);
    }
    EXPECT_LE((f.vectors.transpose() * f.vectors - Matrix::Identity(7, 7)).norm(), 1e-10);
}

TEST(BoxSwitching, ComplementarityPicksCheaperBranch)
{
    const double inf = std::numeric_limits<double>::infinity();
    BoxSwitchingBounds b{vec({0}), vec({inf}), vec({0}), vec({inf})};
    const auto [x, y] = project_box_switching(vec({1}), vec({2}), b);
    EXPECT_EQ(x, vec({0}));
    EXPECT_EQ(y, vec({2}));
}

TEST(BoxSwitching, FeasiblePairUnchanged)
{
    BoxSwitchingBounds b{vec({-1, -1}), vec({1, 1}), vec({-1, -1}), vec({1, 1})};
    const auto [x, y] = project_box_switching(vec({0.5, 0}), vec({0, -0.3}), b);
    EXPECT_EQ(x, vec({0.5, 0}));
    EXPECT_EQ(y, vec({0, -0.3}));
}

TEST(BoxSwitching, TieKeepsFirstBranch)
{
    BoxSwitchingBounds b{vec({0}), vec({1}), vec({0}), vec({1})};
    const auto [x, y] = project_box_switching(vec({3}), vec({3}), b);
    EXPECT_EQ(x, vec({1}));
    EXPECT_EQ(y, vec({0}));
}

TEST(BoxSwitching, BoundsMustContainZero)
{
    BoxSwitchingBounds b{vec({0.5}), vec({1}), vec({0}), vec({1})};
    EXPECT_THROW(GeometricSet::box_switching(b), InvalidArgument);
}

TEST(Polyhedron, FeasiblePointIsFixed)
{
    const Matrix a = Matrix::Identity(2, 2);
    EXPECT_EQ(project_polyhedron(vec({0.2, -1}), a, vec({1, 1})), vec({0.2, -1}));
}

TEST(Polyhedron, HalfSpaceStep)
{
    Matrix a(1, 2);
    a << 1, 0;
    EXPECT_LE((project_polyhedron(vec({2, 5}), a, vec({0})) - vec({0, 5})).norm(), 1e-12);
}

TEST(Polyhedron, MatchesActiveSetEnumeration)
{
    Rng rng(9, 1);
    for (int t = 0; t < 20; ++t) {
        const Polyhedron p = acceptance::random_polyhedron(rng, 10, 12);
        const Vector x = acceptance::random_vector(rng, 10, 4.0);
        const Vector z = project_polyhedron(x, p.a, p.b);
        EXPECT_LE(((p.a * z - p.b).array()).maxCoeff(), 1e-8);
        EXPECT_LE((z - polyhedron_oracle(x, p.a, p.b)).norm(), 1e-6);
    }
}

TEST(Polyhedron, EmptyPolyhedronThrows)
{
    Matrix a(2, 1);
    a << 1, -1;
    EXPECT_THROW(project_polyhedron(vec({0}), a, vec({-1, -1})), NumericalFailure);
}

TEST(Disjunctive, MemberPointIsFixed)
{
    Matrix a(2, 1);
    a << 1, -1;
    const std::vector<Polyhedron> members = {{a, vec({1, 0})}, {a, vec({4, -3})}};
    EXPECT_EQ(project_disjunctive(vec({3.5}), members), vec({3.5}));
}

TEST(Disjunctive, NearerIntervalWins)
{
    Matrix a(2, 1);
    a << 1, -1;
    const std::vector<Polyhedron> members = {{a, vec({1, 0})}, {a, vec({4, -3})}};
    Index chosen = -1;
    EXPECT_NEAR(project_disjunctive(vec({2.4}), members, &chosen)[0], 3.0, 1e-12);
    EXPECT_EQ(chosen, 1);
}

TEST(Disjunctive, EqualsClosestMemberProjection)
{
    Rng rng(10, 1);
    std::vector<Polyhedron> members;
    for (int q = 0; q < 5; ++q) {
        members.push_back(acceptance::random_polyhedron(rng, 6, 8));
    }
    for (int t = 0; t < 50; ++t) {
        const Vector x = acceptance::random_vector(rng, 6, 4.0);
        const Vector p = project_disjunctive(x, members);
        double best = std::numeric_limits<double>::infinity();
        for (const Polyhedron& m : members) {
            best = std::min(best, (polyhedron_oracle(x, m.a, m.b) - x).norm());
        }
        EXPECT_NEAR((p - x).norm(), best, 1e-6);
    }
}

TEST(GeometricSetProperties, IdempotentOnAllFamilies)
{
    Rng rng(11, 1);
    BoxSwitchingBounds bb{Vector::Constant(3, -1), Vector::Constant(3, 1), Vector::Constant(3, -2), Vector::Constant(3, 0.5)};
    const std::vector<GeometricSet> sets = {
        GeometricSet::sparsity(8, 3), GeometricSet::low_rank(Shape{4, 5}, 2), GeometricSet::psd_low_rank(5, 2),
        GeometricSet::psd_low_rank(5, 2, true), GeometricSet::box_switching(bb),
        GeometricSet::disjunctive_union(3, {acceptance::random_polyhedron(rng, 3, 4), acceptance::random_polyhedron(rng, 3, 4)}),
        GeometricSet::product({GeometricSet::whole_space(2), GeometricSet::sparsity(4, 1)})};
    for (const GeometricSet& d : sets) {
        for (int t = 0; t < 50; ++t) {
            Vector x = acceptance::random_vector(rng, d.dim(), 3.0);
            if (std::holds_alternative<geometric::PsdLowRank>(d.variant()) && !std::get<geometric::PsdLowRank>(d.variant()).packed) {
                x = as_vector(0.5 * (as_matrix(x, {5, 5}) + as_matrix(x, {5, 5}).transpose()));
            }
            const Vector p = d.project(x);
            EXPECT_LE((d.project(p) - p).norm(), 1e-10 * std::max(1.0, p.norm())) << d.kind();
            EXPECT_TRUE(d.contains(p)) << d.kind();
        }
    }
}

TEST(GeometricSetProperties, SparseOptimalAgainstEnumeration)
{
    Rng rng(12, 1);
    for (int t = 0; t < 200; ++t) {
        const Vector x = acceptance::random_vector(rng, 8);
        const Vector p = project_sparse(x, 3);
        double best = std::numeric_limits<double>::infinity();
        for (std::uint32_t mask = 0; mask < 256; ++mask) {
            if (std::popcount(mask) != 3) {
                continue;
            }
            double r = 0.0;
            for (Index i = 0; i < 8; ++i) {
                r += (mask >> i & 1u) ? 0.0 : x[i] * x[i];
            }
            best = std::min(best, r);
        }
        EXPECT_NEAR((x - p).squaredNorm(), best, 1e-12);
    }
}

TEST(GeometricSetProperties, LowRankBounds)
{
    EXPECT_THROW(GeometricSet::low_rank(Shape{3, 4}, 3), InvalidArgument);
    EXPECT_THROW(GeometricSet::low_rank(Shape{3, 4}, 0), InvalidArgument);
    EXPECT_THROW(GeometricSet::disjunctive_union(2, {}), InvalidArgument);
}
