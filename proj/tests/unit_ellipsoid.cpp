#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "elliptope/ellipsoid.hpp"
#include "elliptope/errors.hpp"
#include "elliptope/realizability.hpp"
#include "test_support.hpp"

using namespace elliptope;
using namespace elliptope::ellipsoid;
using numerics::Mat;
using numerics::Partition;
using numerics::Subspace;
using numerics::SymMatrix;

namespace {

Mat cols2(std::initializer_list<std::pair<double, double>> pts) {
    Mat m(2, int(pts.size()));
    int j = 0;
    for (const auto& [x, y] : pts) {
        m(0, j) = x;
        m(1, j) = y;
        ++j;
    }
    return m;
}

double form_value(const SymMatrix& m, const std::vector<double>& v) {
    double q = 0.0;
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j) q += v[i] * m(int(i), int(j)) * v[j];
    return q;
}

} // namespace

TEST_CASE("fit: few orthonormal points always fit") {
    const FitResult r = fit(PointSet(Mat::identity(2)));
    REQUIRE(r.status == FitStatus::fitted);
    REQUIRE(r.m.has_value());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK((*r.m)(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-6));
}

TEST_CASE("fit: three points in the plane with a unique conic") {
    // constraints pin M11 = M22 = 1 and 2 + 2 M12 = 1
    const FitResult r = fit(PointSet(cols2({{1, 0}, {0, 1}, {1, 1}})));
    REQUIRE(r.status == FitStatus::fitted);
    CHECK((*r.m)(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK((*r.m)(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK((*r.m)(0, 1) == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(numerics::min_eigenvalue(*r.m) >= -1e-8);
}

TEST_CASE("fit: point outside the admissible region is certified infeasible") {
    const Mat pts = cols2({{1, 0}, {0, 1}, {3, 0}});
    const FitResult r = fit(PointSet(pts));
    REQUIRE(r.status == FitStatus::infeasible);
    double sum = 0.0;
    for (double x : r.d) sum += x;
    CHECK(sum > 0.0);
    // V diag(d) V^T <= 1e-8 I
    SymMatrix vdv(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int t = 0; t < 3; ++t) s += pts(i, t) * r.d[t] * pts(j, t);
            vdv.set(i, j, s);
        }
    CHECK(numerics::max_eigenvalue(vdv) <= 1e-8 * std::max(1.0, sum));
}

TEST_CASE("fit: duplicates, antipodes and zero points") {
    // duplicate + antipodal duplicate collapse to one constraint
    const FitResult dup = fit(PointSet(cols2({{1, 0}, {0, 1}, {1, 0}, {-1, 0}})));
    CHECK(dup.status == FitStatus::fitted);

    // same ray, different norms: impossible
    const FitResult ray = fit(PointSet(cols2({{1, 0}, {2, 0}})));
    REQUIRE(ray.status == FitStatus::infeasible);
    CHECK(ray.d[0] * 1.0 + ray.d[1] * 4.0 <= 1e-9); // V diag(d) V^T = d1 + 4 d2
    CHECK(ray.d[0] + ray.d[1] > 0.0);

    // a zero point can never lie on an ellipsoid boundary
    const FitResult zero = fit(PointSet(cols2({{0, 0}, {0, 1}})));
    REQUIRE(zero.status == FitStatus::infeasible);
    CHECK(zero.d[0] > 0.0);
}

TEST_CASE("fit: rank-deficient configurations fit inside their span") {
    // three collinear-norm-one points in R^3 spanning a plane
    Mat pts(3, 3);
    pts(0, 0) = 1.0;
    pts(1, 1) = 1.0;
    pts(0, 2) = 1.0 / std::sqrt(2.0);
    pts(1, 2) = 1.0 / std::sqrt(2.0); // all in the z = 0 plane
    const FitResult r = fit(PointSet(pts));
    REQUIRE(r.status == FitStatus::fitted);
    for (int j = 0; j < 3; ++j)
        CHECK(form_value(*r.m, pts.col(j)) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("fit_blocks: singleton partition matches fit") {
    const Mat pts = cols2({{1, 0}, {0, 1}, {1, 1}});
    const FitResult a = fit(PointSet(pts));
    const FitResult b = fit_blocks(PointSet(pts), Partition::singletons(3));
    CHECK(a.status == b.status);
}

TEST_CASE("fit_blocks: identity points with one whole block force the unit sphere") {
    const FitResult r = fit_blocks(PointSet(Mat::identity(3)), Partition::whole(3));
    REQUIRE(r.status == FitStatus::fitted);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK((*r.m)(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-6));
}

TEST_CASE("fit_blocks: mixed 2+1 example pins M = I") {
    Mat pts(2, 3);
    pts(0, 0) = 1.0;
    pts(1, 1) = 1.0;
    pts(0, 2) = 1.0;
    const FitResult r = fit_blocks(PointSet(pts), Partition(3, {{0, 1}, {2}}));
    REQUIRE(r.status == FitStatus::fitted);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK((*r.m)(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-6));
}

TEST_CASE("fit_blocks: infeasible block instance carries a block certificate") {
    // span{(1,1,1)} complement points with P = {{0,1},{2}} is not P-realizable
    const Subspace u = Subspace::span_of([] {
        Mat m(3, 1);
        m(0, 0) = m(1, 0) = m(2, 0) = 1.0;
        return m;
    }());
    const Mat v = u.complement().basis().transposed();
    const Partition p(3, {{0, 1}, {2}});
    const FitResult r = fit_blocks(PointSet(v), p);
    REQUIRE(r.status == FitStatus::infeasible);
    REQUIRE(r.dual_block.has_value());
    CHECK(r.dual_block->trace() > 0.0);
    // negative semidefinite on the span of the points' preimage
    const Mat vd = v.transposed();
    const Mat prod = numerics::matmul(v, numerics::matmul(r.dual_block->to_dense(), vd));
    CHECK(numerics::max_eigenvalue(SymMatrix::from_dense(prod, 1e-6)) <=
          1e-8 * std::max(1.0, r.dual_block->frobenius_norm()));
}

TEST_CASE("sandwich_check: worked examples") {
    // (V V^T)^{-1} = (1/3) [[2,-1],[-1,2]]: all three forms equal 2/3
    CHECK(sandwich_check(PointSet(cols2({{1, 0}, {0, 1}, {1, 1}})), 0.5));
    // orthonormal points: forms are exactly 1
    CHECK(sandwich_check(PointSet(Mat::identity(2)), 0.5));
    // V V^T = diag(10, 1): form at e1 is 1/10 <= 1/2
    CHECK_FALSE(sandwich_check(PointSet(cols2({{1, 0}, {0, 1}, {3, 0}})), 0.5));

    CHECK_THROWS_AS(sandwich_check(PointSet(cols2({{1, 0}, {2, 0}})), 0.5), DegenerateInputError);
    CHECK_THROWS_AS(sandwich_check(PointSet(Mat::identity(2)), 1.5), UsageError);
}

TEST_CASE("hull_boundary: vertex and interior classification") {
    const HullReport square = hull_boundary(PointSet(Mat::identity(2)));
    CHECK(square.all_true);

    const HullReport mixed = hull_boundary(PointSet(cols2({{1, 0}, {0, 1}, {3, 0}})));
    REQUIRE(mixed.certain);
    CHECK(mixed.on_boundary[0] == 0); // e1 is interior to conv{±(3,0), ±e2}
    CHECK(mixed.on_boundary[1] == 1);
    CHECK(mixed.on_boundary[2] == 1);
    CHECK_FALSE(mixed.all_true);

    const HullReport tri = hull_boundary(PointSet(cols2({{1, 0}, {0, 1}, {1, 1}})));
    CHECK(tri.all_true);
}

TEST_CASE("region predicates: examples and inclusion") {
    CHECK(region_R({1.0, 1.0}));
    CHECK(region_Rprime({1.0, 1.0}));
    CHECK_FALSE(region_R({3.0, 0.0}));
    CHECK(region_Rprime({0.9, 0.44}));

    const FitResult r = fit(PointSet(cols2({{0.9, 0.44}, {1, 0}, {0, 1}})));
    CHECK(r.status == FitStatus::fitted);

    // R' is contained in R over the whole grid
    for (double x = -3.0; x <= 3.0; x += 0.1)
        for (double y = -3.0; y <= 3.0; y += 0.1)
            if (region_Rprime({x, y})) CHECK(region_R({x, y}));
}

TEST_CASE("triad link: fit of V matches realizability of the nullspace") {
    int compared = 0;
    for (std::uint64_t s = 0; s < 6; ++s) {
        const Mat v = test_support::random_mat(3, 5, 3131, s);
        const Subspace rowspace = Subspace::span_of(v.transposed());
        const Subspace nullspace = rowspace.complement(); // N(V) in R^5
        const FitResult fr = fit(PointSet(v));
        const faces::RealizabilityReport rep = faces::realizability_certificate(nullspace);
        if (fr.status == FitStatus::boundary_uncertain ||
            rep.verdict == faces::Verdict::boundary_uncertain)
            continue;
        if (std::min(fr.margin, rep.margin) <= 1e-6) continue;
        ++compared;
        CHECK((fr.status == FitStatus::fitted) == (rep.verdict == faces::Verdict::realizable));
    }
    CHECK(compared >= 4);
}

TEST_CASE("hull boundary is necessary for fitting, and sufficient at n = k+1") {
    int necessity = 0, converse = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        Mat v = test_support::random_mat(3, 4, 9090, s); // n = k + 1
        const FitResult fr = fit(PointSet(v));
        const HullReport hull = hull_boundary(PointSet(v));
        if (fr.status == FitStatus::boundary_uncertain || !hull.certain || fr.margin <= 1e-6)
            continue;
        if (fr.status == FitStatus::fitted) {
            CHECK(hull.all_true);
            ++necessity;
        }
        CHECK(hull.all_true == (fr.status == FitStatus::fitted));
        ++converse;
    }
    CHECK(converse >= 6);
    CHECK(necessity >= 1);
}

TEST_CASE("half-sandwich implies a fit on every tested instance") {
    // note sum_i q_i = k exactly, so all q_i > 1/2 needs n < 2k; use n = 4
    int found = 0;
    for (std::uint64_t s = 0; s < 30; ++s) {
        const Mat v = test_support::random_mat(3, 4, 727, s);
        const PointSet pts(v);
        bool sandwich;
        try {
            sandwich = sandwich_check(pts, 0.5);
        } catch (const DegenerateInputError&) {
            continue;
        }
        if (!sandwich) continue;
        ++found;
        CHECK(fit(pts).status == FitStatus::fitted);
    }
    CHECK(found >= 2);
}

TEST_CASE("fit verdict is invariant under well-conditioned linear maps") {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const Mat v = test_support::random_mat(2, 4, 808, s);
        // T = Q1 D Q2 with D in [0.5, 2]: condition number at most 4
        const Mat q1 = numerics::qr_full_q(test_support::random_mat(2, 2, 809, s));
        const Mat q2 = numerics::qr_full_q(test_support::random_mat(2, 2, 810, s));
        Mat d(2, 2);
        d(0, 0) = 0.5;
        d(1, 1) = 2.0;
        const Mat t = numerics::matmul(q1, numerics::matmul(d, q2));
        const FitResult a = fit(PointSet(v));
        const FitResult b = fit(PointSet(numerics::matmul(t, v)));
        if (a.margin <= 1e-6 || b.margin <= 1e-6) continue;
        CHECK(a.status == b.status);
    }
}

TEST_CASE("region_grid: small window smoke test") {
    const auto rows = region_grid(0.5, 1.5, 0.0, 0.5, 0.25);
    CHECK(rows.size() == 5 * 3);
    for (const auto& row : rows) {
        if (row.in_rprime) CHECK(row.in_r);
        // (1.0, 0.25) is interior to R and fits; (0.5, 0.0) is outside
        if (std::fabs(row.x - 1.0) < 1e-12 && std::fabs(row.y - 0.25) < 1e-12) {
            CHECK(row.in_r);
            CHECK(row.fitted);
        }
        if (std::fabs(row.x - 0.5) < 1e-12 && std::fabs(row.y) < 1e-12) {
            CHECK_FALSE(row.in_r);
            CHECK_FALSE(row.fitted);
        }
    }
}

TEST_CASE("PointSet: validation") {
    Mat bad(2, 1);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(PointSet{bad}, UsageError);
}
