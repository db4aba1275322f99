#pragma once

#include <optional>
#include <vector>

#include "elliptope/conic.hpp"
#include "elliptope/partition.hpp"
#include "elliptope/subspace.hpp"
#include "elliptope/sym.hpp"

namespace elliptope::faces {

using numerics::Mat;
using numerics::Partition;
using numerics::Subspace;
using numerics::SymMatrix;

/// max_i ||P_U e_i||^2, in [dim(U)/n, 1].
double coherence(const Subspace& u);

/// Partitioned analogue: max over blocks of the spectral norm of the
/// corresponding principal submatrix of P_U. Equals coherence for the
/// singleton partition and dominates it in general.
double p_coherence(const Subspace& u, const Partition& p);

/// |u_i| <= sum_{j != i} |u_j| for every i (strict with the flag).
bool is_balanced(const std::vector<double>& u, bool strict = false);

/// Block-norm analogue using ||u_I||_2 per block.
bool is_p_balanced(const std::vector<double>& u, const Partition& p, bool strict = false);

struct BalanceCheck {
    bool holds = false;
    bool certain = true;          ///< false when some per-index LP was undecided
    int witness_index = -1;       ///< index where balance fails
    std::vector<double> witness;  ///< unbalanced element of U (unit norm)
};

/// Does every u in U satisfy the balance inequalities? Decided by one
/// feasibility LP per index on a fixed orthonormal basis of the complement;
/// a failed LP's Farkas multipliers assemble an explicit unbalanced witness.
BalanceCheck all_balanced(const Subspace& u);

/// Solve A x = y for a nonnegative matrix with positive diagonal under the
/// dominance hypothesis 2y - A D^{-1} y > 0 (D = diag(A)); the solution is
/// then entrywise positive. Precondition violations name the failing
/// inequality.
std::vector<double> walters_solve(const SymMatrix& a, const std::vector<double>& y);

struct CorrelationCertificate {
    SymMatrix y;
    CorrelationCertificate() : y(1) {}
    explicit CorrelationCertificate(SymMatrix m) : y(std::move(m)) {}
};

/// Diagonal (or P-block-diagonal) D with tr(D) > 0 that is negative
/// semidefinite on the complement of the tested subspace; normalized to
/// unit max-entry.
struct FailureCertificate {
    SymMatrix d;
    FailureCertificate() : d(1) {}
    explicit FailureCertificate(SymMatrix m) : d(std::move(m)) {}
    std::vector<double> diag() const { return d.diag(); }
};

/// Correlation matrix with U inside its nullspace built from the linear
/// system diag(P_perp diag*(lambda) P_perp) = 1, i.e. (P_perp o P_perp)
/// lambda = 1, solved under Walters' hypothesis. Requires coherence
/// strictly below 1/2.
CorrelationCertificate hadamard_certificate(const Subspace& u);

/// Equivalent form of the strict element-wise-square balance condition:
/// true iff coherence(U) < 1/2.
bool squared_balance_check(const Subspace& u);

/// Image Q U under a P-block-diagonal orthogonal Q (validated to 1e-10).
Subspace orbit_transform(const Subspace& u, const Mat& q, const Partition& p);

enum class Verdict { realizable, not_realizable, boundary_uncertain };
enum class Method { constructive, sdp, balance_necessity };
const char* to_string(Verdict v);
const char* to_string(Method m);

struct RealizabilityReport {
    Verdict verdict = Verdict::boundary_uncertain;
    Method method = Method::sdp;
    double margin = 0.0;
    std::optional<CorrelationCertificate> correlation;
    std::optional<FailureCertificate> failure;
};

struct RealizabilityOptions {
    /// Skip the constructive and balance-necessity shortcuts; decide by the
    /// feasibility SDP alone.
    bool force_sdp = false;
    /// Constructive route is used only when mu < 1/2 - this margin; closer to
    /// the threshold the SDP decides.
    double constructive_margin = 1e-3;
    conic::Settings solver;
};

/// Is U the nullspace-subspace of some correlation matrix (or of a matrix in
/// the P-elliptope)? Routes: (a) one-dimensional unbalanced inputs get an
/// explicit failure certificate; (b) coherence safely below 1/2 gets the
/// constructive certificate; (c) otherwise the ellipsoid-fitting SDP on a
/// basis of the complement decides, in either direction with a certificate.
/// Every certificate is re-verified against its invariants before being
/// returned; verification failures downgrade to boundary-uncertain.
RealizabilityReport realizability_certificate(const Subspace& u,
                                              const std::optional<Partition>& p = {},
                                              const RealizabilityOptions& opts = {});

struct CertificateAudit {
    bool ok = false;
    double psd_slack = 0.0;     ///< min eigenvalue of Y (correlation case)
    double diag_err = 0.0;      ///< max |diag/block deviation from identity|
    double annihilation = 0.0;  ///< ||Y P_U||_F
    double trace_d = 0.0;       ///< tr(D) (failure case)
    double neg_slack = 0.0;     ///< lambda_max(P_perp D P_perp) / ||D||_F
    double structure_err = 0.0; ///< mass outside the allowed diagonal/blocks
};

/// Numerics-only re-validation of certificates (independent of any solver).
CertificateAudit audit_correlation(const CorrelationCertificate& c, const Subspace& u,
                                   const std::optional<Partition>& p = {});
CertificateAudit audit_failure(const FailureCertificate& c, const Subspace& u,
                               const std::optional<Partition>& p = {});

} // namespace elliptope::faces
