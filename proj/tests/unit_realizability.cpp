#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "elliptope/errors.hpp"
#include "elliptope/realizability.hpp"
#include "test_support.hpp"

using namespace elliptope;
using namespace elliptope::faces;
using numerics::Mat;
using numerics::Partition;
using numerics::Subspace;
using numerics::SymMatrix;

namespace {

Subspace span_of_vector(const std::vector<double>& u) {
    Mat m(int(u.size()), 1);
    for (size_t i = 0; i < u.size(); ++i) m(int(i), 0) = u[i];
    return Subspace::span_of(m);
}

Subspace ones_span(int n) {
    return span_of_vector(std::vector<double>(n, 1.0));
}

} // namespace

TEST_CASE("coherence: examples and the dimension bounds") {
    Mat e1(4, 1);
    e1(0, 0) = 1.0;
    CHECK(coherence(Subspace::from_basis(e1)) == doctest::Approx(1.0));
    CHECK(coherence(ones_span(3)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    for (std::uint64_t s = 0; s < 8; ++s) {
        const Subspace u = test_support::random_subspace(10, 3, 42, s);
        const double mu = coherence(u);
        CHECK(mu >= 0.3 - 1e-12);
        CHECK(mu <= 1.0 + 1e-12);
    }
}

TEST_CASE("p_coherence: singleton equality, whole-set saturation, 2/3 example") {
    const Subspace u = test_support::random_subspace(8, 3, 7);
    CHECK(p_coherence(u, Partition::singletons(8)) == doctest::Approx(coherence(u)).epsilon(1e-12));
    CHECK(p_coherence(u, Partition::whole(8)) == doctest::Approx(1.0).epsilon(1e-9));

    // [P_U]_{12,12} = [[1/3,1/3],[1/3,1/3]] has spectral norm 2/3
    CHECK(p_coherence(ones_span(3), Partition(3, {{0, 1}, {2}})) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    // monotonicity: coherence <= p_coherence for random partitions
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Subspace v = test_support::random_subspace(9, 2, 19, s);
        const Partition p(9, {{0, 1, 2}, {3, 4}, {5}, {6, 7, 8}});
        CHECK(coherence(v) <= p_coherence(v, p) + 1e-12);
    }
}

TEST_CASE("is_balanced: examples") {
    CHECK(is_balanced({1.0, 1.0}));
    CHECK_FALSE(is_balanced({1.0, 1.0}, true)); // equality case is not strict
    CHECK_FALSE(is_balanced({std::sqrt(0.75), std::sqrt(0.25)}));
    CHECK(is_balanced({1.0, 1.0, 1.0}, true));
    CHECK_THROWS_AS(is_balanced({0.0, 0.0}), UsageError);
}

TEST_CASE("is_p_balanced: examples and necessity of plain balance") {
    const Partition p(3, {{0, 1}, {2}});
    // ||(3,4)|| = 5 = |5|
    CHECK(is_p_balanced({3.0, 4.0, 5.0}, p));
    CHECK_FALSE(is_p_balanced({3.0, 4.0, 5.0}, p, true));
    CHECK_THROWS_AS(is_p_balanced({0.0, 0.0, 0.0}, p), UsageError);

    // singleton partition coincides with scalar balance
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto u = test_support::random_unit_vector(5, 77, s);
        CHECK(is_p_balanced(u, Partition::singletons(5)) == is_balanced(u));
    }

    // P-balanced implies balanced
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto u = test_support::random_unit_vector(6, 78, s);
        const Partition q(6, {{0, 1, 2}, {3, 4}, {5}});
        if (is_p_balanced(u, q)) CHECK(is_balanced(u));
    }
}

TEST_CASE("all_balanced: witness extraction and boundary case") {
    const BalanceCheck bad = all_balanced(span_of_vector({std::sqrt(0.75), std::sqrt(0.25)}));
    REQUIRE(bad.certain);
    CHECK_FALSE(bad.holds);
    CHECK(bad.witness_index == 0);
    REQUIRE(bad.witness.size() == 2);
    CHECK_FALSE(is_balanced(bad.witness));

    const BalanceCheck ok = all_balanced(ones_span(3));
    REQUIRE(ok.certain);
    CHECK(ok.holds);

    // (2,1,1): 2 <= 1 + 1 with equality, still balanced
    const BalanceCheck edge = all_balanced(span_of_vector({2.0, 1.0, 1.0}));
    CHECK(edge.holds);
}

TEST_CASE("walters_solve: examples and named precondition failures") {
    const std::vector<double> ones3(3, 1.0);
    CHECK(walters_solve(SymMatrix::identity(3), ones3) == std::vector<double>(3, 1.0));

    // A = P_perp o P_perp for span{(1,1,1)}: solution is 1.5 everywhere
    const SymMatrix pperp = numerics::projector(ones_span(3).complement());
    SymMatrix had(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) had.set(i, j, pperp(i, j) * pperp(i, j));
    const auto lambda = walters_solve(had, ones3);
    for (double v : lambda) CHECK(v == doctest::Approx(1.5).epsilon(1e-10));

    SymMatrix bad(2);
    bad.set(0, 0, 1.0);
    bad.set(1, 1, 1.0);
    bad.set(0, 1, 3.0);
    try {
        walters_solve(bad, {1.0, 1.0});
        FAIL("expected PreconditionError");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("dominance") != std::string::npos);
    }

    SymMatrix neg(2);
    neg.set(0, 0, 1.0);
    neg.set(1, 1, 1.0);
    neg.set(0, 1, -0.1);
    CHECK_THROWS_AS(walters_solve(neg, {1.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(walters_solve(SymMatrix(2), {1.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(walters_solve(SymMatrix::identity(2), {1.0, 0.0}), PreconditionError);
}

TEST_CASE("hadamard_certificate: closed-form case and boundary precondition") {
    const CorrelationCertificate cert = hadamard_certificate(ones_span(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(cert.y(i, j) == doctest::Approx(i == j ? 1.0 : -0.5).epsilon(1e-9));
    const auto eig = numerics::eig_sym(cert.y);
    CHECK(eig.values[0] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(eig.values[1] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(std::fabs(eig.values[2]) <= 1e-10);
    CHECK(audit_correlation(cert, ones_span(3)).ok);

    CHECK_THROWS_AS(hadamard_certificate(span_of_vector({1.0, 1.0})), PreconditionError);
}

TEST_CASE("hadamard_certificate: positivity of lambda for incoherent subspaces in R^20") {
    int found = 0;
    for (std::uint64_t s = 0; s < 40 && found < 3; ++s) {
        const Subspace u = test_support::random_subspace(20, 5, 2121, s);
        if (coherence(u) >= 0.45) continue;
        ++found;
        const SymMatrix pperp = numerics::projector(u.complement());
        SymMatrix had(20);
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j <= i; ++j) had.set(i, j, pperp(i, j) * pperp(i, j));
        const auto lambda = walters_solve(had, std::vector<double>(20, 1.0));
        for (double v : lambda) CHECK(v > 0.0);
        CHECK(audit_correlation(hadamard_certificate(u), u).ok);
    }
    REQUIRE(found == 3);
}

TEST_CASE("squared_balance_check: equivalent coherence threshold") {
    CHECK(squared_balance_check(ones_span(3)));
    Mat e1(3, 1);
    e1(0, 0) = 1.0;
    CHECK_FALSE(squared_balance_check(Subspace::from_basis(e1)));
    CHECK_FALSE(squared_balance_check(span_of_vector({std::sqrt(0.6), std::sqrt(0.4)})));
}

TEST_CASE("realizability_certificate: sharp one-dimensional family") {
    const double alpha = 0.75;
    const Subspace u = span_of_vector({std::sqrt(alpha), std::sqrt(1.0 - alpha)});
    CHECK(coherence(u) == doctest::Approx(alpha).epsilon(1e-12));
    const RealizabilityReport rep = realizability_certificate(u);
    CHECK(rep.verdict == Verdict::not_realizable);
    CHECK(rep.method == Method::balance_necessity);
    REQUIRE(rep.failure.has_value());
    CHECK(audit_failure(*rep.failure, u).ok);
}

TEST_CASE("realizability_certificate: constructive route for the uniform span") {
    const RealizabilityReport rep = realizability_certificate(ones_span(3));
    CHECK(rep.verdict == Verdict::realizable);
    CHECK(rep.method == Method::constructive);
    REQUIRE(rep.correlation.has_value());
    CHECK(audit_correlation(*rep.correlation, ones_span(3)).ok);
}

TEST_CASE("realizability_certificate: balanced boundary vector goes through the SDP") {
    const Subspace u = span_of_vector({1.0, 1.0});
    const RealizabilityReport rep = realizability_certificate(u);
    CHECK(rep.verdict == Verdict::realizable);
    CHECK(rep.method == Method::sdp);
    REQUIRE(rep.correlation.has_value());
    const SymMatrix& y = rep.correlation->y;
    CHECK(y(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(y(0, 1) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("realizability_certificate: necessity of balance on realizable subspaces") {
    int checked = 0;
    for (std::uint64_t s = 0; s < 8; ++s) {
        const Subspace u = test_support::random_subspace(6, 2, 6161, s);
        const RealizabilityReport rep = realizability_certificate(u);
        if (rep.verdict != Verdict::realizable) continue;
        ++checked;
        CHECK(all_balanced(u).holds);
    }
    CHECK(checked > 0);
}

TEST_CASE("realizability_certificate: one-dimensional balance characterization against the SDP") {
    int agree = 0;
    for (std::uint64_t s = 0; s < 24; ++s) {
        auto u = test_support::random_unit_vector(6, 909, s);
        if (s % 2 == 0) u[int(s) % 6] += 2.0; // bias half the sample toward imbalance
        double l1 = 0.0, linf = 0.0;
        for (double x : u) {
            l1 += std::fabs(x);
            linf = std::max(linf, std::fabs(x));
        }
        if (std::fabs(2.0 * linf - l1) / l1 <= 1e-4) continue; // skip knife-edge cases
        const Subspace span = span_of_vector(u);
        RealizabilityOptions opts;
        opts.force_sdp = true;
        const RealizabilityReport sdp = realizability_certificate(span, {}, opts);
        REQUIRE(sdp.verdict != Verdict::boundary_uncertain);
        CHECK((sdp.verdict == Verdict::realizable) == is_balanced(u));
        ++agree;
    }
    CHECK(agree >= 15);
}

TEST_CASE("realizability_certificate: constructive and SDP routes agree below threshold") {
    int found = 0;
    for (std::uint64_t s = 0; s < 30 && found < 4; ++s) {
        const Subspace u = test_support::random_subspace(12, 3, 7777, s);
        if (coherence(u) >= 0.5 - 1e-3) continue;
        ++found;
        const RealizabilityReport a = realizability_certificate(u);
        RealizabilityOptions opts;
        opts.force_sdp = true;
        const RealizabilityReport b = realizability_certificate(u, {}, opts);
        CHECK(a.verdict == Verdict::realizable);
        CHECK(a.method == Method::constructive);
        CHECK(b.verdict == Verdict::realizable);
    }
    REQUIRE(found == 4);
}

TEST_CASE("realizability_certificate: no report ever carries both certificate kinds") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto u = test_support::random_unit_vector(5, 313, s);
        if (s % 3 == 0) u[0] += 1.5;
        const RealizabilityReport rep = realizability_certificate(span_of_vector(u));
        const bool both_kinds = rep.correlation.has_value() && rep.failure.has_value();
        CHECK_FALSE(both_kinds);
        if (rep.margin > 1e-6) CHECK(rep.verdict != Verdict::boundary_uncertain);
    }
}

TEST_CASE("realizability_certificate: partitioned route falls back to the block SDP") {
    // span{(1,1,1,1)} with two blocks of two: mu_P = 1/2 exactly, so the
    // constructive route must not fire; P-balance holds with equality and the
    // SDP decides.
    const Subspace u = ones_span(4);
    const Partition p(4, {{0, 1}, {2, 3}});
    CHECK(p_coherence(u, p) == doctest::Approx(0.5).epsilon(1e-12));
    const RealizabilityReport rep = realizability_certificate(u, p);
    CHECK(rep.method == Method::sdp);
    // one-dimensional and P-balanced (with equality), hence P-realizable
    CHECK(rep.verdict == Verdict::realizable);
    REQUIRE(rep.correlation.has_value());
    CHECK(audit_correlation(*rep.correlation, u, p).ok);
}

TEST_CASE("realizability_certificate: partitioned one-dimensional necessity") {
    // u = (1,1,1): not P-balanced for {{0,1},{2}}; explicit block certificate
    const Subspace u = ones_span(3);
    const Partition p(3, {{0, 1}, {2}});
    const RealizabilityReport rep = realizability_certificate(u, p);
    CHECK(rep.verdict == Verdict::not_realizable);
    CHECK(rep.method == Method::balance_necessity);
    REQUIRE(rep.failure.has_value());
    const CertificateAudit audit = audit_failure(*rep.failure, u, p);
    CHECK(audit.ok);
    CHECK(audit.trace_d > 0.0);
}

TEST_CASE("orbit_transform: validation and invariances") {
    const Subspace u = test_support::random_subspace(4, 2, 5555);
    const Partition p(4, {{0, 1}, {2, 3}});

    CHECK(orbit_transform(u, Mat::identity(4), p).same_as(u));

    // diagonal sign flips for the singleton partition preserve coherence
    Mat signs = Mat::identity(4);
    signs(1, 1) = -1.0;
    signs(3, 3) = -1.0;
    const Subspace flipped = orbit_transform(u, signs, Partition::singletons(4));
    CHECK(coherence(flipped) == doctest::Approx(coherence(u)).epsilon(1e-12));

    // random block rotation preserves p_coherence and the realizability verdict
    Mat q(4, 4);
    for (int blk = 0; blk < 2; ++blk) {
        const Mat g = test_support::random_mat(2, 2, 616, blk);
        const Mat qb = numerics::qr_full_q(g);
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) q(2 * blk + a, 2 * blk + c) = qb(a, c);
    }
    const Subspace moved = orbit_transform(u, q, p);
    CHECK(p_coherence(moved, p) == doctest::Approx(p_coherence(u, p)).epsilon(1e-9));
    const RealizabilityReport a = realizability_certificate(u, p);
    const RealizabilityReport b = realizability_certificate(moved, p);
    CHECK(a.verdict == b.verdict);

    // a non-block-diagonal orthogonal matrix is rejected
    Mat bad = Mat::identity(4);
    bad(0, 0) = 0.0;
    bad(0, 2) = 1.0;
    bad(2, 2) = 0.0;
    bad(2, 0) = 1.0;
    CHECK_THROWS_AS(orbit_transform(u, bad, p), UsageError);
    Mat notorth = Mat::identity(4);
    notorth(0, 1) = 0.5;
    CHECK_THROWS_AS(orbit_transform(u, notorth, Partition::whole(4)), UsageError);
}

TEST_CASE("realizability_certificate: input validation") {
    CHECK_THROWS_AS(realizability_certificate(Subspace::zero(3)), UsageError);
    CHECK_THROWS_AS(realizability_certificate(Subspace::from_basis(Mat::identity(3))), UsageError);
}
