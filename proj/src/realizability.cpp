#include "elliptope/realizability.hpp"

#include <cmath>

#include "elliptope/ellipsoid.hpp"
#include "elliptope/errors.hpp"
#include "elliptope/lp.hpp"

namespace elliptope::faces {

using numerics::frobenius;
using numerics::matmul;
using numerics::matmul_nt;
using numerics::matmul_tn;
using numerics::norm2;
using numerics::norm_inf;

double coherence(const Subspace& u) {
    double mu = 0.0;
    const Mat& b = u.basis();
    for (int i = 0; i < u.ambient_dim(); ++i) {
        double row = 0.0;
        for (int k = 0; k < u.dim(); ++k) row += b(i, k) * b(i, k);
        mu = std::max(mu, row);
    }
    return mu;
}

double p_coherence(const Subspace& u, const Partition& p) {
    if (p.ambient_dim() != u.ambient_dim())
        throw UsageError("p_coherence: partition does not match ambient dimension");
    if (u.dim() == 0) return 0.0;
    const Mat& b = u.basis();
    double mu = 0.0;
    for (const auto& blk : p.blocks()) {
        // spectral norm of [P_U]_I = largest eigenvalue of B_I B_I^T
        const int m = int(blk.size());
        SymMatrix gram(m);
        for (int a = 0; a < m; ++a)
            for (int c = 0; c <= a; ++c) {
                double s = 0.0;
                for (int k = 0; k < u.dim(); ++k) s += b(blk[a], k) * b(blk[c], k);
                gram.set(a, c, s);
            }
        mu = std::max(mu, numerics::max_eigenvalue(gram));
    }
    return mu;
}

bool is_balanced(const std::vector<double>& u, bool strict) {
    double sum = 0.0;
    for (double x : u) sum += std::fabs(x);
    if (sum == 0.0) throw UsageError("is_balanced: zero vector");
    for (double x : u) {
        const double lhs = 2.0 * std::fabs(x);
        if (strict ? (lhs >= sum) : (lhs > sum)) return false;
    }
    return true;
}

bool is_p_balanced(const std::vector<double>& u, const Partition& p, bool strict) {
    if (int(u.size()) != p.ambient_dim()) throw UsageError("is_p_balanced: dimension mismatch");
    std::vector<double> norms;
    double total = 0.0;
    for (const auto& blk : p.blocks()) {
        double s = 0.0;
        for (int i : blk) s += u[i] * u[i];
        norms.push_back(std::sqrt(s));
        total += norms.back();
    }
    if (total == 0.0) throw UsageError("is_p_balanced: zero vector");
    for (double m : norms) {
        const double lhs = 2.0 * m;
        if (strict ? (lhs >= total) : (lhs > total)) return false;
    }
    return true;
}

BalanceCheck all_balanced(const Subspace& u) {
    const int n = u.ambient_dim();
    if (u.dim() >= n)
        throw PreconditionError("all_balanced: subspace must be proper (complement is trivial)");
    if (u.dim() == 0) {
        // vacuous: only the zero vector
        BalanceCheck out;
        out.holds = true;
        return out;
    }

    const Subspace comp = u.complement();
    const Mat v = comp.basis().transposed(); // k x n, columns are the points
    const int k = v.rows();

    BalanceCheck out;
    out.holds = true;
    for (int i = 0; i < n; ++i) {
        std::vector<conic::Inequality> ineqs;
        std::vector<int> col_of_ineq;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            ineqs.push_back({v.col(j), conic::Sense::le, 1.0});
            auto neg = v.col(j);
            for (double& x : neg) x = -x;
            ineqs.push_back({std::move(neg), conic::Sense::le, 1.0});
            col_of_ineq.push_back(j);
        }
        const std::vector<conic::Equality> eqs = {{v.col(i), 1.0}};
        const conic::LpFeasibility lp = conic::lp_feasible(ineqs, eqs, k);
        if (!lp.certain) {
            out.certain = false;
            continue;
        }
        if (lp.feasible) continue;

        // Assemble the unbalanced witness from the Farkas multipliers:
        // u_j = z_{j+} - z_{j-}, u_i = equality multiplier; the combination
        // lies in N(V) = U and violates balance at i.
        std::vector<double> w(n, 0.0);
        w[i] = lp.eq_multipliers[0];
        for (size_t t = 0; t < col_of_ineq.size(); ++t)
            w[col_of_ineq[t]] = lp.ineq_multipliers[2 * t] - lp.ineq_multipliers[2 * t + 1];
        for (double& x : w) x = -x; // Farkas sign convention
        const double wn = norm2(w);
        if (wn == 0.0) {
            out.certain = false;
            continue;
        }
        for (double& x : w) x /= wn;
        // re-verify membership and imbalance before trusting the certificate
        std::vector<double> proj = u.project(w);
        double perr = 0.0;
        for (int t = 0; t < n; ++t) perr = std::max(perr, std::fabs(proj[t] - w[t]));
        double sum = 0.0;
        for (double x : w) sum += std::fabs(x);
        const bool unbalanced_at_i = 2.0 * std::fabs(w[i]) > sum;
        if (perr > 1e-6 || !unbalanced_at_i) {
            out.certain = false;
            continue;
        }
        out.holds = false;
        out.witness_index = i;
        out.witness = std::move(w);
        return out;
    }
    return out;
}

std::vector<double> walters_solve(const SymMatrix& a, const std::vector<double>& y) {
    const int n = a.dim();
    if (int(y.size()) != n) throw UsageError("walters_solve: dimension mismatch");
    for (int i = 0; i < n; ++i) {
        if (!(a(i, i) > 0.0))
            throw PreconditionError("walters_solve: diagonal entry A[" + std::to_string(i) +
                                    "][" + std::to_string(i) + "] must be positive");
        if (!(y[i] > 0.0))
            throw PreconditionError("walters_solve: y[" + std::to_string(i) + "] must be positive");
        for (int j = 0; j < n; ++j)
            if (a(i, j) < 0.0)
                throw PreconditionError("walters_solve: entry A[" + std::to_string(i) + "][" +
                                        std::to_string(j) + "] must be nonnegative");
    }
    for (int i = 0; i < n; ++i) {
        double adinv = 0.0;
        for (int j = 0; j < n; ++j) adinv += a(i, j) * y[j] / a(j, j);
        const double slack = 2.0 * y[i] - adinv;
        if (!(slack > 0.0))
            throw PreconditionError("walters_solve: dominance inequality 2y - A D^{-1} y > 0 fails at index " +
                                    std::to_string(i) + " (value " + std::to_string(slack) + ")");
    }

    const Mat ad = a.to_dense();
    std::vector<double> x = numerics::lu_solve(ad, y);
    // one refinement pass
    std::vector<double> r = numerics::matvec(ad, x);
    for (int i = 0; i < n; ++i) r[i] = y[i] - r[i];
    const std::vector<double> corr = numerics::lu_solve(ad, r);
    for (int i = 0; i < n; ++i) x[i] += corr[i];

    r = numerics::matvec(ad, x);
    for (int i = 0; i < n; ++i) r[i] -= y[i];
    const double resid = norm2(r);
    if (resid > 1e-10 * (1.0 + norm2(y)))
        throw NumericalError("walters_solve: residual above tolerance", resid);
    for (int i = 0; i < n; ++i)
        if (!(x[i] > 0.0))
            throw NumericalError("walters_solve: positivity lost at index " + std::to_string(i), x[i]);
    return x;
}

CorrelationCertificate hadamard_certificate(const Subspace& u) {
    const int n = u.ambient_dim();
    if (u.dim() < 1 || u.dim() >= n)
        throw UsageError("hadamard_certificate: need a proper nonzero subspace");
    const double mu = coherence(u);
    if (!(mu < 0.5 - 1e-9))
        throw PreconditionError("hadamard_certificate: coherence must be strictly below 1/2 (got " +
                                std::to_string(mu) + ")");

    const SymMatrix pperp = numerics::projector(u.complement());
    SymMatrix had(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) had.set(i, j, pperp(i, j) * pperp(i, j));

    std::vector<double> lambda;
    try {
        lambda = walters_solve(had, std::vector<double>(n, 1.0));
    } catch (const DegenerateInputError&) {
        throw;
    } catch (const NumericalError&) {
        throw DegenerateInputError("hadamard_certificate: Hadamard-square system is numerically singular");
    }

    // Y = P_perp diag*(lambda) P_perp
    const Mat pd = pperp.to_dense();
    Mat scaled = pd;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scaled(i, j) *= lambda[j];
    const Mat yd = matmul(scaled, pd);
    SymMatrix y(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) y.set(i, j, 0.5 * (yd(i, j) + yd(j, i)));
    return CorrelationCertificate(y);
}

bool squared_balance_check(const Subspace& u) {
    if (u.dim() < 1) throw UsageError("squared_balance_check: empty subspace");
    return coherence(u) < 0.5;
}

Subspace orbit_transform(const Subspace& u, const Mat& q, const Partition& p) {
    const int n = u.ambient_dim();
    if (q.rows() != n || q.cols() != n) throw UsageError("orbit_transform: Q has wrong shape");
    if (p.ambient_dim() != n) throw UsageError("orbit_transform: partition mismatch");
    const Mat gram = matmul_tn(q, q);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::fabs(gram(i, j) - want) > 1e-10)
                throw UsageError("orbit_transform: Q is not orthogonal within 1e-10");
            if (p.block_of(i) != p.block_of(j) && std::fabs(q(i, j)) > 1e-10)
                throw UsageError("orbit_transform: Q is not block-diagonal for the partition");
        }
    const Mat image = matmul(q, u.basis());
    return Subspace::span_of(image);
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::realizable: return "realizable";
        case Verdict::not_realizable: return "not-realizable";
        case Verdict::boundary_uncertain: return "boundary-uncertain";
    }
    return "unknown";
}

const char* to_string(Method m) {
    switch (m) {
        case Method::constructive: return "constructive";
        case Method::sdp: return "sdp";
        case Method::balance_necessity: return "balance-necessity";
    }
    return "unknown";
}

namespace {

// Explicit failure certificate for a one-dimensional span{u} unbalanced at
// index i: d_i = u_i^2 / s, d_j = -|u_j| with s = sum_{j != i} |u_j|. Then
// v^T D v <= 0 on {u}^perp (Cauchy-Schwarz) and tr(D) = u_i^2/s - s > 0.
SymMatrix scalar_unbalance_certificate(const std::vector<double>& u, int i) {
    const int n = int(u.size());
    std::vector<double> d(n, 0.0);
    double s = 0.0;
    for (int j = 0; j < n; ++j)
        if (j != i) s += std::fabs(u[j]);
    if (s == 0.0) {
        d[i] = 1.0;
    } else {
        d[i] = u[i] * u[i] / s;
        for (int j = 0; j < n; ++j)
            if (j != i) d[j] = -std::fabs(u[j]);
        const double dn = norm_inf(d);
        for (double& x : d) x /= dn;
    }
    return SymMatrix::diagonal(d);
}

// Block-orthogonal Q rotating each u_I onto a single coordinate; used to pull
// the scalar certificate back through the group action.
Mat block_align_rotation(const std::vector<double>& u, const Partition& p) {
    const int n = int(u.size());
    Mat q = Mat::identity(n);
    for (const auto& blk : p.blocks()) {
        const int m = int(blk.size());
        if (m == 1) continue;
        double nrm2 = 0.0;
        for (int idx : blk) nrm2 += u[idx] * u[idx];
        const double nrm = std::sqrt(nrm2);
        if (nrm == 0.0) continue;
        // Householder within the block sending u_I to nrm * e_first
        std::vector<double> w(m);
        for (int a = 0; a < m; ++a) w[a] = u[blk[a]];
        w[0] -= nrm;
        double wn2 = 0.0;
        for (double x : w) wn2 += x * x;
        if (wn2 < 1e-30) continue; // already aligned
        for (int a = 0; a < m; ++a)
            for (int c = 0; c < m; ++c) {
                const double h = (a == c ? 1.0 : 0.0) - 2.0 * w[a] * w[c] / wn2;
                q(blk[a], blk[c]) = h;
            }
    }
    return q;
}

double unbalance_margin(const std::vector<double>& vals, int& worst) {
    double total = 0.0;
    for (double v : vals) total += v;
    double best = -1.0;
    worst = -1;
    for (size_t i = 0; i < vals.size(); ++i) {
        const double m = 2.0 * vals[i] - total;
        if (m > best) {
            best = m;
            worst = int(i);
        }
    }
    return best / std::max(total, 1e-300);
}

} // namespace

RealizabilityReport realizability_certificate(const Subspace& u, const std::optional<Partition>& p,
                                              const RealizabilityOptions& opts) {
    const int n = u.ambient_dim();
    const int r = u.dim();
    if (r < 1 || r >= n) throw UsageError("realizability_certificate: need 0 < dim(U) < n");
    if (p && p->ambient_dim() != n)
        throw UsageError("realizability_certificate: partition mismatch");

    RealizabilityReport rep;

    if (!opts.force_sdp) {
        // (a) one-dimensional necessity: span{u} realizable iff u balanced
        if (r == 1) {
            std::vector<double> uvec = u.basis().col(0);
            if (!p) {
                std::vector<double> mags(n);
                for (int i = 0; i < n; ++i) mags[i] = std::fabs(uvec[i]);
                int worst;
                const double margin = unbalance_margin(mags, worst);
                if (margin > 1e-12) {
                    FailureCertificate cert(scalar_unbalance_certificate(uvec, worst));
                    if (audit_failure(cert, u, p).ok) {
                        rep.verdict = Verdict::not_realizable;
                        rep.method = Method::balance_necessity;
                        rep.margin = margin;
                        rep.failure = std::move(cert);
                        return rep;
                    }
                }
            } else {
                std::vector<double> mags;
                for (const auto& blk : p->blocks()) {
                    double s = 0.0;
                    for (int i : blk) s += uvec[i] * uvec[i];
                    mags.push_back(std::sqrt(s));
                }
                int worst_block;
                const double margin = unbalance_margin(mags, worst_block);
                if (margin > 1e-12) {
                    const Mat q = block_align_rotation(uvec, *p);
                    std::vector<double> aligned = numerics::matvec(q, uvec);
                    const int pivot = p->block(worst_block)[0];
                    const SymMatrix dbar = scalar_unbalance_certificate(aligned, pivot);
                    // D = Q^T diag(dbar) Q stays block-diagonal
                    const Mat dd = matmul_tn(q, matmul(dbar.to_dense(), q));
                    SymMatrix dmat(n);
                    double dmax = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j <= i; ++j) {
                            dmat.set(i, j, 0.5 * (dd(i, j) + dd(j, i)));
                            dmax = std::max(dmax, std::fabs(dmat(i, j)));
                        }
                    if (dmax > 0.0) dmat *= 1.0 / dmax;
                    FailureCertificate cert(dmat);
                    if (audit_failure(cert, u, p).ok) {
                        rep.verdict = Verdict::not_realizable;
                        rep.method = Method::balance_necessity;
                        rep.margin = margin;
                        rep.failure = std::move(cert);
                        return rep;
                    }
                }
            }
        }

        // (b) constructive route for safely sub-threshold coherence
        const double mu = p ? p_coherence(u, *p) : coherence(u);
        if (mu < 0.5 - opts.constructive_margin) {
            CorrelationCertificate cert = hadamard_certificate(u);
            bool usable = true;
            if (p) {
                // the unblocked certificate only qualifies if it already
                // satisfies the block constraints
                for (const auto& blk : p->blocks())
                    for (size_t a = 0; a < blk.size() && usable; ++a)
                        for (size_t c = a + 1; c < blk.size() && usable; ++c)
                            if (std::fabs(cert.y(blk[a], blk[c])) > 1e-8) usable = false;
            }
            if (usable && audit_correlation(cert, u, p).ok) {
                rep.verdict = Verdict::realizable;
                rep.method = Method::constructive;
                rep.margin = 0.5 - mu;
                rep.correlation = std::move(cert);
                return rep;
            }
        }
    }

    // (c) feasibility SDP on a basis of the complement
    const Subspace comp = u.complement();
    const Mat basis_perp = comp.basis();           // n x k
    const Mat v = basis_perp.transposed();          // k x n points
    const ellipsoid::PointSet pts(v);
    conic::Settings solver = opts.solver;
    const ellipsoid::FitResult fr =
        p ? ellipsoid::fit_blocks(pts, *p, solver) : ellipsoid::fit(pts, solver);

    rep.method = Method::sdp;
    rep.margin = fr.margin;
    switch (fr.status) {
        case ellipsoid::FitStatus::fitted: {
            // Y = V^T M V annihilates U by construction
            const Mat m = fr.m->to_dense();
            const Mat yd = matmul(basis_perp, matmul_nt(m, basis_perp));
            SymMatrix y(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j) y.set(i, j, 0.5 * (yd(i, j) + yd(j, i)));
            CorrelationCertificate cert(y);
            if (audit_correlation(cert, u, p).ok) {
                rep.verdict = Verdict::realizable;
                rep.correlation = std::move(cert);
            } else {
                rep.verdict = Verdict::boundary_uncertain;
            }
            break;
        }
        case ellipsoid::FitStatus::infeasible: {
            FailureCertificate cert =
                p ? FailureCertificate(*fr.dual_block)
                  : FailureCertificate(SymMatrix::diagonal(fr.d));
            if (audit_failure(cert, u, p).ok) {
                rep.verdict = Verdict::not_realizable;
                rep.failure = std::move(cert);
            } else {
                rep.verdict = Verdict::boundary_uncertain;
            }
            break;
        }
        case ellipsoid::FitStatus::boundary_uncertain:
            rep.verdict = Verdict::boundary_uncertain;
            break;
    }
    return rep;
}

CertificateAudit audit_correlation(const CorrelationCertificate& c, const Subspace& u,
                                   const std::optional<Partition>& p) {
    CertificateAudit a;
    const int n = c.y.dim();
    if (n != u.ambient_dim()) throw UsageError("audit_correlation: dimension mismatch");
    a.psd_slack = numerics::min_eigenvalue(c.y);
    if (!p) {
        for (int i = 0; i < n; ++i) a.diag_err = std::max(a.diag_err, std::fabs(c.y(i, i) - 1.0));
    } else {
        for (const auto& blk : p->blocks())
            for (size_t i = 0; i < blk.size(); ++i)
                for (size_t j = i; j < blk.size(); ++j) {
                    const double want = (i == j) ? 1.0 : 0.0;
                    a.diag_err = std::max(a.diag_err, std::fabs(c.y(blk[i], blk[j]) - want));
                }
    }
    const Mat yp = matmul(c.y.to_dense(), numerics::projector(u).to_dense());
    a.annihilation = frobenius(yp);
    a.ok = a.psd_slack >= -1e-8 && a.diag_err <= 1e-8 && a.annihilation <= 1e-7;
    return a;
}

CertificateAudit audit_failure(const FailureCertificate& c, const Subspace& u,
                               const std::optional<Partition>& p) {
    CertificateAudit a;
    const int n = c.d.dim();
    if (n != u.ambient_dim()) throw UsageError("audit_failure: dimension mismatch");
    a.trace_d = c.d.trace();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const bool allowed = p && p->block_of(i) == p->block_of(j);
            if (!allowed) a.structure_err = std::max(a.structure_err, std::fabs(c.d(i, j)));
        }
    const SymMatrix pperp = numerics::projector(u.complement());
    const Mat pd = pperp.to_dense();
    const Mat pdp = matmul(pd, matmul(c.d.to_dense(), pd));
    SymMatrix sym(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) sym.set(i, j, 0.5 * (pdp(i, j) + pdp(j, i)));
    const double dnorm = c.d.frobenius_norm();
    a.neg_slack = numerics::max_eigenvalue(sym) / std::max(dnorm, 1e-300);
    a.ok = a.trace_d > 0.0 && a.neg_slack <= 1e-8 && a.structure_err <= 1e-10;
    return a;
}

} // namespace elliptope::faces
