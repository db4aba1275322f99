#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "elliptope/decompose.hpp"
#include "elliptope/errors.hpp"
#include "elliptope/realizability.hpp"
#include "test_support.hpp"

using namespace elliptope;
using namespace elliptope::decompose;
using numerics::Mat;
using numerics::Partition;
using numerics::Subspace;
using numerics::SymMatrix;

namespace {

SymMatrix ones_plus_identity(int n) {
    SymMatrix x(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) x.set(i, j, (i == j) ? 2.0 : 1.0);
    return x;
}

SymMatrix all_ones(int n) {
    SymMatrix j(n);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c <= i; ++c) j.set(i, c, 1.0);
    return j;
}

} // namespace

TEST_CASE("mtfa: diagonal input is absorbed entirely") {
    const SymMatrix x = SymMatrix::diagonal({1.0, 2.0, 3.0});
    const DecompositionResult r = mtfa(x);
    REQUIRE(r.certified);
    CHECK(std::fabs(r.trace_l) <= 1e-7);
    CHECK((r.b - x).frobenius_norm() <= 1e-6);
    // strong duality: tr(B) = <X, Y>
    double xy = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) xy += x(i, j) * r.y(i, j);
    CHECK(r.b.trace() == doctest::Approx(xy).epsilon(1e-6));
}

TEST_CASE("mtfa: ones-plus-identity splits into I + J with the symmetric dual") {
    const SymMatrix x = ones_plus_identity(3);
    const DecompositionResult r = mtfa(x);
    REQUIRE(r.certified);
    CHECK((r.b - SymMatrix::identity(3)).frobenius_norm() <= 1e-6);
    CHECK((r.l - all_ones(3)).frobenius_norm() <= 1e-6);
    CHECK(r.trace_l == doctest::Approx(3.0).epsilon(1e-7));
    // unique dual: Y = 1.5 (I - J/3), i.e. unit diagonal, off-diagonal -1/2
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(r.y(i, j) == doctest::Approx(i == j ? 1.0 : -0.5).epsilon(1e-6));
    CHECK(r.complementarity <= 1e-6 * (1.0 + r.l.frobenius_norm()));
    CHECK(is_recovered(SymMatrix::identity(3), all_ones(3), r));
}

TEST_CASE("mtfa: unbalanced rank-one is not recovered") {
    // X = u u^T, u = (sqrt(3)/2, 1/2). Oracle: maximize d1 + d2 subject to
    // X - diag(d) >= 0 gives (by AM-GM on the 2x2 determinant constraint)
    // optimal value 1 - sqrt(3)/2, so trace_L = sqrt(3)/2 < 1 = tr(X).
    const double s3 = std::sqrt(3.0) / 2.0;
    std::vector<double> u = {s3, 0.5};
    const SymMatrix x = SymMatrix::outer(u);
    const DecompositionResult r = mtfa(x);
    REQUIRE(r.certified);
    CHECK(r.trace_l == doctest::Approx(s3).epsilon(1e-6));
    CHECK_FALSE(is_recovered(SymMatrix(2), x, r));
}

TEST_CASE("is_recovered: validation") {
    const SymMatrix x = SymMatrix::diagonal({1.0, 2.0, 3.0});
    const DecompositionResult r = mtfa(x);
    CHECK(is_recovered(x, SymMatrix(3), r)); // D = X, L = 0
    CHECK_THROWS_AS(is_recovered(SymMatrix(2), SymMatrix(2), r), UsageError);
    // wrong split of the right X
    CHECK_THROWS_AS(is_recovered(SymMatrix(3), SymMatrix(3), r), UsageError);
}

TEST_CASE("mtfa: strong duality and feasibility hold for arbitrary symmetric input") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const SymMatrix x = test_support::random_sym(8, 404, s);
        const DecompositionResult r = mtfa(x);
        REQUIRE(r.certified);
        // split reproduces the input to rounding
        CHECK((r.b + r.l - x).frobenius_norm() <= 1e-12 * (1.0 + x.frobenius_norm()));
        // L nearly PSD, Y feasible for the correlation dual
        CHECK(numerics::min_eigenvalue(r.l) >= -1e-8 * (1.0 + r.l.frobenius_norm()));
        CHECK(numerics::min_eigenvalue(r.y) >= -1e-8);
        for (int i = 0; i < 8; ++i) CHECK(std::fabs(r.y(i, i) - 1.0) <= 1e-8);
        // tr(B) = <X, Y> and trace_l = tr(X) - <X, Y>
        double xy = 0.0;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) xy += x(i, j) * r.y(i, j);
        const double scale = 1.0 + std::fabs(xy);
        CHECK(std::fabs(r.b.trace() - xy) <= 1e-6 * scale);
        CHECK(std::fabs(r.trace_l - (x.trace() - xy)) <= 1e-6 * scale);
    }
}

TEST_CASE("mtfa: recovery depends only on the column space") {
    // fixed incoherent U, twenty random (D*, L*) pairs sharing R(L*) = U
    Subspace u = test_support::random_subspace(10, 3, 777);
    for (std::uint64_t s = 778; faces::coherence(u) >= 0.45; ++s) {
        REQUIRE(s < 900);
        u = test_support::random_subspace(10, 3, s);
    }
    for (std::uint64_t t = 0; t < 20; ++t) {
        harness::Philox rng(888, t);
        std::vector<double> dvals(10);
        for (double& v : dvals) v = 0.5 + 1.5 * rng.next_uniform();
        const SymMatrix dstar = SymMatrix::diagonal(dvals);
        const SymMatrix lstar = test_support::psd_with_column_space(u, 999, t);
        const SymMatrix x = dstar + lstar;
        const DecompositionResult r = mtfa(x);
        REQUIRE(r.certified);
        CHECK(is_recovered(dstar, lstar, r));
    }
}

TEST_CASE("bmtfa: singleton partition degenerates to mtfa") {
    const SymMatrix x = test_support::random_sym(6, 1212);
    const DecompositionResult a = mtfa(x);
    const DecompositionResult b = bmtfa(x, Partition::singletons(6));
    CHECK((a.l - b.l).frobenius_norm() <= 1e-7 * (1.0 + a.l.frobenius_norm()));
    CHECK((a.b - b.b).frobenius_norm() <= 1e-7 * (1.0 + a.b.frobenius_norm()));
}

TEST_CASE("bmtfa: whole-set partition absorbs everything") {
    const SymMatrix x = test_support::random_sym(5, 31337);
    const DecompositionResult r = bmtfa(x, Partition::whole(5));
    REQUIRE(r.certified);
    CHECK(std::fabs(r.trace_l) <= 1e-6 * (1.0 + x.frobenius_norm()));
    CHECK((r.b - x).frobenius_norm() <= 1e-5 * (1.0 + x.frobenius_norm()));
}

TEST_CASE("bmtfa: ones plus block-diagonal with a 2+1 partition is NOT recovered") {
    // span{(1,1,1)} has P-coherence 2/3 > 1/2 for P = {{0,1},{2}} and
    // (1,1,1) is not P-balanced (sqrt(2) > 1), so the block split cannot be
    // recovered; the optimizer must find something strictly better than
    // leaving L = J.
    SymMatrix bstar(3);
    bstar.set(0, 0, 1.0);
    bstar.set(1, 1, 1.0);
    bstar.set(0, 1, 0.5);
    bstar.set(2, 2, 1.0);
    const SymMatrix x = all_ones(3) + bstar;
    const Partition p(3, {{0, 1}, {2}});
    const DecompositionResult r = bmtfa(x, p);
    REQUIRE(r.certified);
    CHECK((r.b + r.l - x).frobenius_norm() <= 1e-12 * (1.0 + x.frobenius_norm()));
    CHECK(numerics::min_eigenvalue(r.l) >= -1e-7);
    // dual feasible for the P-elliptope
    CHECK(numerics::min_eigenvalue(r.y) >= -1e-8);
    CHECK(std::fabs(r.y(0, 1)) <= 1e-8);
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(r.y(i, i) - 1.0) <= 1e-8);
    CHECK(r.complementarity <= 1e-6 * (1.0 + r.l.frobenius_norm()));
    // strictly better objective than the target split, hence not recovered
    CHECK(r.trace_l < 3.0 - 1e-4);
    CHECK_FALSE(is_recovered(bstar, all_ones(3), r, 1e-6));
}

TEST_CASE("bmtfa: incoherent-enough block instance is recovered") {
    // U = span{(1,...,1)} in R^6 with three blocks of two: mu_P = 1/3 < 1/2.
    const int n = 6;
    const Partition p(n, {{0, 1}, {2, 3}, {4, 5}});
    SymMatrix bstar(n);
    for (int blk = 0; blk < 3; ++blk) {
        bstar.set(2 * blk, 2 * blk, 1.0);
        bstar.set(2 * blk + 1, 2 * blk + 1, 1.0);
        bstar.set(2 * blk, 2 * blk + 1, 0.3);
    }
    const SymMatrix lstar = all_ones(n);
    const SymMatrix x = bstar + lstar;
    const DecompositionResult r = bmtfa(x, p);
    REQUIRE(r.certified);
    CHECK(is_recovered(bstar, lstar, r));
    CHECK(r.trace_l == doctest::Approx(double(n)).epsilon(1e-6));
}

TEST_CASE("bmtfa: recovery verdict is invariant under the block-orthogonal orbit") {
    const int n = 6;
    const Partition p(n, {{0, 1}, {2, 3}, {4, 5}});
    SymMatrix bstar(n);
    for (int blk = 0; blk < 3; ++blk) {
        bstar.set(2 * blk, 2 * blk, 1.2);
        bstar.set(2 * blk + 1, 2 * blk + 1, 0.9);
        bstar.set(2 * blk, 2 * blk + 1, -0.2);
    }
    const SymMatrix lstar = all_ones(n);

    for (std::uint64_t s = 0; s < 3; ++s) {
        // random block-orthogonal Q
        Mat q(n, n);
        for (int blk = 0; blk < 3; ++blk) {
            const Mat g = test_support::random_mat(2, 2, 555, 10 * s + blk);
            const Mat qb = numerics::qr_full_q(g);
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 2; ++c) q(2 * blk + a, 2 * blk + c) = qb(a, c);
        }
        const Mat qt = q.transposed();
        auto conj = [&](const SymMatrix& m) {
            const Mat full = numerics::matmul(q, numerics::matmul(m.to_dense(), qt));
            return SymMatrix::from_dense(full, 1e-8);
        };
        const SymMatrix br = conj(bstar);
        const SymMatrix lr = conj(lstar);
        const DecompositionResult base = bmtfa(bstar + lstar, p);
        const DecompositionResult rot = bmtfa(br + lr, p);
        REQUIRE(base.certified);
        REQUIRE(rot.certified);
        CHECK(is_recovered(bstar, lstar, base) == is_recovered(br, lr, rot));
    }
}
