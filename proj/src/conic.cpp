#include "elliptope/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "elliptope/errors.hpp"

namespace elliptope::conic {

using numerics::cholesky;
using numerics::cholesky_solve;
using numerics::EigResult;
using numerics::eig_sym;
using numerics::frobenius;
using numerics::lower_tri_inverse;
using numerics::matmul;
using numerics::matmul_nt;
using numerics::matmul_tn;
using numerics::matvec;
using numerics::norm2;
using numerics::norm_inf;

namespace {

SymMatrix symmetrized(const Mat& m) {
    SymMatrix s(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j <= i; ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return s;
}

void symmetrize_in_place(Mat& m) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < i; ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = v;
            m(j, i) = v;
        }
}

} // namespace

int BlockSpec::total() const {
    int t = 0;
    for (int s : sizes) t += s;
    return t;
}

BlockSym BlockSym::zeros(const BlockSpec& spec) {
    BlockSym b;
    b.blocks.reserve(spec.sizes.size());
    for (int s : spec.sizes) b.blocks.emplace_back(s, s);
    return b;
}

BlockSym BlockSym::scaled_identity(const BlockSpec& spec, double s) {
    BlockSym b = zeros(spec);
    for (auto& blk : b.blocks)
        for (int i = 0; i < blk.rows(); ++i) blk(i, i) = s;
    return b;
}

double BlockSym::inner(const BlockSym& o) const {
    double s = 0.0;
    for (size_t k = 0; k < blocks.size(); ++k) s += numerics::inner(blocks[k], o.blocks[k]);
    return s;
}

double BlockSym::frob() const {
    double s = 0.0;
    for (const auto& b : blocks) {
        const double f = frobenius(b);
        s += f * f;
    }
    return std::sqrt(s);
}

double BlockSym::trace() const {
    double t = 0.0;
    for (const auto& b : blocks)
        for (int i = 0; i < b.rows(); ++i) t += b(i, i);
    return t;
}

void BlockSym::add_scaled(double a, const BlockSym& x) {
    for (size_t k = 0; k < blocks.size(); ++k) {
        auto& dst = blocks[k].data();
        const auto& src = x.blocks[k].data();
        for (size_t i = 0; i < dst.size(); ++i) dst[i] += a * src[i];
    }
}

void BlockSym::scale(double a) {
    for (auto& b : blocks) b *= a;
}

double BlockSym::min_eig() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks)
        m = std::min(m, numerics::min_eigenvalue(symmetrized(b)));
    return m;
}

double BlockSym::max_eig() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& b : blocks)
        m = std::max(m, numerics::max_eigenvalue(symmetrized(b)));
    return m;
}

SymMatrix BlockSym::to_sym() const {
    if (blocks.size() != 1) throw UsageError("BlockSym::to_sym: value is not a single block");
    return symmetrized(blocks[0]);
}

Constraint Constraint::entry(int blk, int i, int j, double v) {
    Constraint c;
    c.entries.push_back({blk, std::max(i, j), std::min(i, j), v});
    return c;
}

Constraint Constraint::rank1(int blk, std::vector<double> v, double scale) {
    Constraint c;
    c.rank1s.push_back({blk, std::move(v), scale});
    return c;
}

Constraint Constraint::from_sym(int blk, const SymMatrix& a, double drop_below) {
    Constraint c;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j <= i; ++j)
            if (std::fabs(a(i, j)) > drop_below) c.entries.push_back({blk, i, j, a(i, j)});
    return c;
}

double Constraint::apply(const BlockSym& x) const {
    double s = 0.0;
    for (const auto& e : entries) s += e.v * x.blocks[e.blk](e.i, e.j);
    for (const auto& r : rank1s) {
        const Mat& b = x.blocks[r.blk];
        const int n = b.rows();
        double q = 0.0;
        for (int i = 0; i < n; ++i) {
            double row = 0.0;
            for (int j = 0; j < n; ++j) row += b(i, j) * r.v[j];
            q += r.v[i] * row;
        }
        s += r.scale * q;
    }
    return s;
}

void Constraint::add_to(double y, BlockSym& out) const {
    for (const auto& e : entries) {
        if (e.i == e.j) {
            out.blocks[e.blk](e.i, e.i) += y * e.v;
        } else {
            out.blocks[e.blk](e.i, e.j) += 0.5 * y * e.v;
            out.blocks[e.blk](e.j, e.i) += 0.5 * y * e.v;
        }
    }
    for (const auto& r : rank1s) {
        Mat& b = out.blocks[r.blk];
        const double f = y * r.scale;
        const int n = b.rows();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b(i, j) += f * r.v[i] * r.v[j];
    }
}

double Constraint::trace() const {
    double t = 0.0;
    for (const auto& e : entries)
        if (e.i == e.j) t += e.v;
    for (const auto& r : rank1s) {
        double n2 = 0.0;
        for (double v : r.v) n2 += v * v;
        t += r.scale * n2;
    }
    return t;
}

std::vector<double> ConicProblem::apply(const BlockSym& x) const {
    std::vector<double> out(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) out[i] = rows[i].apply(x);
    return out;
}

BlockSym ConicProblem::adjoint(const std::vector<double>& y) const {
    BlockSym out = BlockSym::zeros(cone);
    for (size_t i = 0; i < rows.size(); ++i) rows[i].add_to(y[i], out);
    return out;
}

void ConicProblem::validate() const {
    if (rows.empty()) throw UsageError("ConicProblem: at least one constraint is required");
    if (rows.size() != b.size()) throw UsageError("ConicProblem: rhs length does not match rows");
    if (int(c.blocks.size()) != cone.count())
        throw UsageError("ConicProblem: objective does not match block structure");
    for (int k = 0; k < cone.count(); ++k) {
        if (cone.sizes[k] < 1) throw UsageError("ConicProblem: block sizes must be positive");
        if (c.blocks[k].rows() != cone.sizes[k] || c.blocks[k].cols() != cone.sizes[k])
            throw UsageError("ConicProblem: objective block shape mismatch");
    }
    auto check_blk = [&](int blk) {
        if (blk < 0 || blk >= cone.count()) throw UsageError("ConicProblem: constraint block index out of range");
    };
    for (const auto& row : rows) {
        for (const auto& e : row.entries) {
            check_blk(e.blk);
            if (e.i < 0 || e.i >= cone.sizes[e.blk] || e.j < 0 || e.j >= cone.sizes[e.blk])
                throw UsageError("ConicProblem: constraint entry index out of range");
        }
        for (const auto& r : row.rank1s) {
            check_blk(r.blk);
            if (int(r.v.size()) != cone.sizes[r.blk])
                throw UsageError("ConicProblem: rank-one term length mismatch");
        }
    }
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::primal_infeasible: return "primal-infeasible";
        case SolveStatus::dual_infeasible_unbounded: return "dual-infeasible-unbounded";
        case SolveStatus::numerical_limit: return "numerical-limit";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Schur complement assembly
//
// M_kl = <A_k, W A_l W> never forms W A W densely: entry terms contract
// against entries of W directly and rank-one terms reduce to dot products
// with the per-constraint images w = W v. For the unit-diagonal constraint
// family this degenerates to M = W o W (the constraint Gram A A* is the
// identity there, which is what keeps this family cheap).
// ---------------------------------------------------------------------------

namespace {

struct RowImage {
    // per rank-one term of the row: W v (same order as row.rank1s)
    std::vector<std::vector<double>> wv;
};

double schur_pair(const Constraint& a, const RowImage& ia, const Constraint& bq, const RowImage& ib,
                  const std::vector<Mat>& w) {
    double s = 0.0;
    for (const auto& ea : a.entries)
        for (const auto& eb : bq.entries) {
            if (ea.blk != eb.blk) continue;
            const Mat& wb = w[ea.blk];
            s += 0.5 * ea.v * eb.v *
                 (wb(ea.i, eb.i) * wb(ea.j, eb.j) + wb(ea.i, eb.j) * wb(ea.j, eb.i));
        }
    for (const auto& ea : a.entries)
        for (size_t t = 0; t < bq.rank1s.size(); ++t) {
            if (ea.blk != bq.rank1s[t].blk) continue;
            const auto& wv = ib.wv[t];
            s += ea.v * bq.rank1s[t].scale * wv[ea.i] * wv[ea.j];
        }
    for (size_t t = 0; t < a.rank1s.size(); ++t)
        for (const auto& eb : bq.entries) {
            if (a.rank1s[t].blk != eb.blk) continue;
            const auto& wv = ia.wv[t];
            s += eb.v * a.rank1s[t].scale * wv[eb.i] * wv[eb.j];
        }
    for (size_t ta = 0; ta < a.rank1s.size(); ++ta)
        for (size_t tb = 0; tb < bq.rank1s.size(); ++tb) {
            if (a.rank1s[ta].blk != bq.rank1s[tb].blk) continue;
            const double d = numerics::dot(a.rank1s[ta].v, ib.wv[tb]);
            s += a.rank1s[ta].scale * bq.rank1s[tb].scale * d * d;
        }
    return s;
}

std::vector<RowImage> row_images(const ConicProblem& p, const std::vector<Mat>& w) {
    std::vector<RowImage> imgs(p.rows.size());
    for (size_t i = 0; i < p.rows.size(); ++i) {
        imgs[i].wv.reserve(p.rows[i].rank1s.size());
        for (const auto& r : p.rows[i].rank1s) imgs[i].wv.push_back(matvec(w[r.blk], r.v));
    }
    return imgs;
}

Mat build_schur(const ConicProblem& p, const std::vector<Mat>& w, const std::vector<RowImage>& imgs) {
    const int m = int(p.rows.size());
    Mat schur(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = schur_pair(p.rows[i], imgs[i], p.rows[j], imgs[j], w);
            schur(i, j) = v;
            schur(j, i) = v;
        }
    return schur;
}

// ---------------------------------------------------------------------------
// Constraint preprocessing: detect linearly dependent rows via Gram-space
// modified Gram-Schmidt. Consistent duplicates are dropped; an inconsistent
// dependency yields an exact Farkas ray (adjoint(d) = 0, <b, d> > 0).
// ---------------------------------------------------------------------------

struct Preprocessed {
    std::vector<int> kept;           // indices into the original rows
    std::vector<double> farkas;      // nonempty if the equalities are inconsistent
};

Preprocessed preprocess_rows(const ConicProblem& p) {
    const int m = int(p.rows.size());
    std::vector<Mat> wid;
    for (int s : p.cone.sizes) wid.push_back(Mat::identity(s));
    const std::vector<RowImage> imgs = row_images(p, wid);

    Mat gram(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = schur_pair(p.rows[i], imgs[i], p.rows[j], imgs[j], wid);
            gram(i, j) = v;
            gram(j, i) = v;
        }

    Preprocessed out;
    // Orthonormal abstract vectors q_k = sum_t alpha[k][t] row_t, t over kept.
    std::vector<std::vector<double>> alpha;
    for (int j = 0; j < m; ++j) {
        const int nk = int(out.kept.size());
        std::vector<double> beta(nk, 0.0);
        for (int k = 0; k < nk; ++k) {
            double s = 0.0;
            for (int t = 0; t < nk; ++t) s += alpha[k][t] * gram(out.kept[t], j);
            beta[k] = s;
        }
        double resid2 = gram(j, j);
        for (double bk : beta) resid2 -= bk * bk;
        resid2 = std::max(resid2, 0.0);

        if (resid2 <= 1e-20 * std::max(1.0, gram(j, j))) {
            // row_j = sum_t coef[t] row_kept[t]
            std::vector<double> coef(nk, 0.0);
            for (int k = 0; k < nk; ++k)
                for (int t = 0; t < nk; ++t) coef[t] += beta[k] * alpha[k][t];
            double bpred = 0.0;
            for (int t = 0; t < nk; ++t) bpred += coef[t] * p.b[out.kept[t]];
            const double gap = p.b[j] - bpred;
            if (std::fabs(gap) > 1e-8 * (1.0 + std::fabs(p.b[j]))) {
                std::vector<double> d(m, 0.0);
                d[j] = 1.0;
                for (int t = 0; t < nk; ++t) d[out.kept[t]] = -coef[t];
                if (gap < 0.0)
                    for (double& v : d) v = -v;
                const double dn = norm_inf(d);
                for (double& v : d) v /= dn;
                out.farkas = std::move(d);
                return out;
            }
            continue; // consistent duplicate
        }

        const double rnorm = std::sqrt(resid2);
        std::vector<double> a(nk + 1, 0.0);
        a[nk] = 1.0 / rnorm;
        for (int k = 0; k < nk; ++k)
            for (int t = 0; t < nk; ++t) a[t] -= (beta[k] / rnorm) * alpha[k][t];
        for (auto& row : alpha) row.push_back(0.0);
        alpha.push_back(std::move(a));
        out.kept.push_back(j);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nesterov-Todd scaling. G satisfies G^{-1} X G^{-T} = G^T S G = diag(lam),
// W = G G^T solves W S W = X. Computed from chol(X) and one eigendecomposition
// of Cx^T S Cx.
// ---------------------------------------------------------------------------

struct Scaling {
    Mat g, ginv, w;
    std::vector<double> lam;
};

bool nt_scaling(const Mat& x, const Mat& s, Scaling& out) {
    Mat cx = x;
    if (!cholesky(cx)) return false;
    const Mat k = matmul_tn(cx, matmul(s, cx));
    EigResult ek;
    try {
        ek = eig_sym(symmetrized(k));
    } catch (const NumericalError&) {
        return false;
    }
    const int n = x.rows();
    out.lam.resize(n);
    std::vector<double> q4(n);
    for (int i = 0; i < n; ++i) {
        const double th = ek.values[i];
        if (th <= 0.0 || !std::isfinite(th)) return false;
        out.lam[i] = std::sqrt(th);
        q4[i] = std::pow(th, 0.25);
    }
    Mat cq = matmul(cx, ek.vectors); // n x n
    out.g = cq;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out.g(i, j) /= q4[j];
    const Mat cxinv = lower_tri_inverse(cx);
    out.ginv = matmul_tn(ek.vectors, cxinv);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.ginv(i, j) *= q4[i];
    out.w = matmul_nt(out.g, out.g);
    symmetrize_in_place(out.w);
    return true;
}

// Largest step a with M + a * D staying PSD, measured in the scaled frame.
double max_step(const std::vector<double>& lam, const Mat& dtilde) {
    const int n = dtilde.rows();
    Mat nmat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            nmat(i, j) = dtilde(i, j) / std::sqrt(lam[i] * lam[j]);
    const double lmin = numerics::min_eigenvalue(symmetrized(nmat));
    if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (-lmin);
}

struct Residuals {
    std::vector<double> rp; // b - A(X)
    BlockSym rd;            // C - A*(y) - S
    double rel_p, rel_d, pobj, dobj, gap_rel, comp;
};

Residuals compute_residuals(const ConicProblem& p, const BlockSym& x, const std::vector<double>& y,
                            const BlockSym& s, double bnorm, double cnorm) {
    Residuals r{.rp = {}, .rd = BlockSym::zeros(p.cone), .rel_p = 0, .rel_d = 0, .pobj = 0, .dobj = 0, .gap_rel = 0, .comp = 0};
    r.rp = p.apply(x);
    for (size_t i = 0; i < r.rp.size(); ++i) r.rp[i] = p.b[i] - r.rp[i];
    r.rd = p.c;
    BlockSym ay = p.adjoint(y);
    r.rd.add_scaled(-1.0, ay);
    r.rd.add_scaled(-1.0, s);
    r.rel_p = norm2(r.rp) / (1.0 + bnorm);
    r.rel_d = r.rd.frob() / (1.0 + cnorm);
    r.pobj = p.c.inner(x);
    r.dobj = numerics::dot(p.b, y);
    r.gap_rel = std::fabs(r.pobj - r.dobj) / (1.0 + std::fabs(r.pobj) + std::fabs(r.dobj));
    r.comp = x.inner(s);
    return r;
}

} // namespace

ConicSolution solve(const ConicProblem& problem, const Settings& settings) {
    problem.validate();
    if (settings.tol_feas <= 0.0 || settings.tol_feas >= 1.0 || settings.tol_gap <= 0.0 ||
        settings.tol_gap >= 1.0)
        throw UsageError("solve: tolerances must lie in (0, 1)");

    // Reduce to independent rows; an inconsistent dependency is an immediate
    // infeasibility certificate.
    const Preprocessed pre = preprocess_rows(problem);
    ConicSolution sol;
    if (!pre.farkas.empty()) {
        sol.status = SolveStatus::primal_infeasible;
        sol.ray = pre.farkas;
        sol.x = BlockSym::zeros(problem.cone);
        sol.s = BlockSym::zeros(problem.cone);
        sol.y.assign(problem.rows.size(), 0.0);
        return sol;
    }

    ConicProblem p;
    bool reduced = int(pre.kept.size()) != int(problem.rows.size());
    if (reduced) {
        p.cone = problem.cone;
        p.c = problem.c;
        for (int k : pre.kept) {
            p.rows.push_back(problem.rows[k]);
            p.b.push_back(problem.b[k]);
        }
    }
    const ConicProblem& q = reduced ? p : problem;

    const int m = int(q.rows.size());
    const int nblk = q.cone.count();
    const double nu = double(q.cone.total());
    const double bnorm = norm2(q.b);
    const double cnorm = q.c.frob();

    double anorm_max = 0.0;
    for (const auto& row : q.rows) {
        BlockSym tmp = BlockSym::zeros(q.cone);
        row.add_to(1.0, tmp);
        anorm_max = std::max(anorm_max, tmp.frob());
    }
    const double xi = std::max(1.0, norm_inf(q.b) / std::max(1.0, anorm_max));
    const double eta = std::max({1.0, cnorm / std::sqrt(nu), anorm_max});

    BlockSym x = BlockSym::scaled_identity(q.cone, xi);
    BlockSym s = BlockSym::scaled_identity(q.cone, eta);
    std::vector<double> y(m, 0.0);

    ConicSolution best;
    best.status = SolveStatus::numerical_limit;
    double best_score = std::numeric_limits<double>::infinity();
    int stall_count = 0;
    int polish_count = 0;
    double last_xs_fro = std::numeric_limits<double>::infinity();

    auto finalize_y = [&](const std::vector<double>& yred) {
        if (!reduced) return yred;
        std::vector<double> full(problem.rows.size(), 0.0);
        for (size_t t = 0; t < pre.kept.size(); ++t) full[pre.kept[t]] = yred[t];
        return full;
    };

    for (int iter = 0; iter < settings.max_iter; ++iter) {
        const Residuals res = compute_residuals(q, x, y, s, bnorm, cnorm);
        const double mu = res.comp / nu;
        sol.trace.push_back({iter, res.pobj, res.dobj, res.rel_p, res.rel_d, mu, res.comp,
                             res.rd.inner(x), numerics::dot(res.rp, y)});
        sol.iterations = iter;

        const double comp_rel = res.comp / (1.0 + std::fabs(res.pobj) + std::fabs(res.dobj));
        const double score = std::max({res.rel_p, res.rel_d, comp_rel});
        if (score < best_score) {
            best_score = score;
            best.x = x;
            best.s = s;
            best.y = finalize_y(y);
            best.primal_obj = res.pobj;
            best.dual_obj = res.dobj;
            best.rel_primal_res = res.rel_p;
            best.rel_dual_res = res.rel_d;
            best.rel_gap = res.gap_rel;
            best.complementarity = res.comp;
        }

        bool polish_this_iter = false;
        if (res.rel_p <= settings.tol_feas && res.rel_d <= settings.tol_feas &&
            res.gap_rel <= settings.tol_gap && comp_rel <= settings.tol_gap) {
            double xs2 = 0.0;
            for (int k = 0; k < nblk; ++k) {
                const double f = frobenius(matmul(x.blocks[k], s.blocks[k]));
                xs2 += f * f;
            }
            const double xs_fro = std::sqrt(xs2);
            // A perfectly centered iterate has ||X S||_F = mu sqrt(nu); polish
            // until within a factor two of that floor (or the configured
            // absolute floor), or centering stops making progress (weakly
            // separated optima bottom out at kappa(W) * eps).
            const double center_floor = std::max(2.0 * mu * std::sqrt(nu), settings.comp_fro_tol);
            const bool stalled = polish_count >= 2 && xs_fro > 0.5 * last_xs_fro;
            if (xs_fro <= center_floor || stalled || polish_count >= 12) {
                sol.status = SolveStatus::optimal;
                sol.x = x;
                sol.s = s;
                sol.y = finalize_y(y);
                sol.primal_obj = res.pobj;
                sol.dual_obj = res.dobj;
                sol.rel_primal_res = res.rel_p;
                sol.rel_dual_res = res.rel_d;
                sol.rel_gap = res.gap_rel;
                sol.complementarity = res.comp;
                return sol;
            }
            polish_this_iter = true;
            ++polish_count;
            last_xs_fro = xs_fro;
        }

        // Divergence heuristics. A dual iterate that grows along an improving
        // ray with A*(y) pushed into the negative cone certifies primal
        // infeasibility (the clean rays come from phase-I; this guards direct
        // calls on infeasible data).
        const double ynorm = norm_inf(y);
        if (ynorm > 1e-8) {
            std::vector<double> d(y);
            for (double& v : d) v /= ynorm;
            const double gd = numerics::dot(q.b, d);
            if (gd >= 1e-5) {
                const double lam_max = q.adjoint(d).max_eig();
                if (lam_max <= 1e-9) {
                    sol.status = SolveStatus::primal_infeasible;
                    sol.ray = finalize_y(d);
                    sol.x = x;
                    sol.s = s;
                    sol.y = finalize_y(y);
                    return sol;
                }
            }
        }
        if (res.pobj < -1e14 * (1.0 + cnorm) && res.rel_p <= 1e-6) {
            sol.status = SolveStatus::dual_infeasible_unbounded;
            sol.x = x;
            sol.s = s;
            sol.y = finalize_y(y);
            return sol;
        }

        // NT scaling per block
        std::vector<Scaling> sc(nblk);
        bool scaling_ok = true;
        for (int k = 0; k < nblk && scaling_ok; ++k)
            scaling_ok = nt_scaling(x.blocks[k], s.blocks[k], sc[k]);
        if (!scaling_ok) break;

        std::vector<Mat> wmats;
        wmats.reserve(nblk);
        for (const auto& c : sc) wmats.push_back(c.w);
        const std::vector<RowImage> imgs = row_images(q, wmats);
        Mat schur = build_schur(q, wmats, imgs);

        Mat chol_schur = schur;
        {
            bool ok = cholesky(chol_schur);
            double jitter = 1e-14 * std::max(1.0, schur(0, 0));
            int tries = 0;
            while (!ok && tries < 10) {
                chol_schur = schur;
                for (int i = 0; i < m; ++i) chol_schur(i, i) += jitter;
                ok = cholesky(chol_schur);
                jitter *= 100.0;
                ++tries;
            }
            if (!ok) break;
        }

        // A(W Rd W) enters both directions' right-hand sides
        std::vector<double> a_wrdw(m, 0.0);
        {
            BlockSym wrdw = BlockSym::zeros(q.cone);
            for (int k = 0; k < nblk; ++k)
                wrdw.blocks[k] = matmul(sc[k].w, matmul(res.rd.blocks[k], sc[k].w));
            a_wrdw = q.apply(wrdw);
        }

        auto solve_direction = [&](const std::vector<Mat>& rhat, std::vector<double>& dy,
                                   BlockSym& dxv, BlockSym& dsv) {
            // A(G Rhat G^T)
            BlockSym grg = BlockSym::zeros(q.cone);
            for (int k = 0; k < nblk; ++k)
                grg.blocks[k] = matmul(sc[k].g, matmul_nt(rhat[k], sc[k].g));
            const std::vector<double> a_grg = q.apply(grg);

            std::vector<double> rhs(m);
            for (int i = 0; i < m; ++i) rhs[i] = res.rp[i] - a_grg[i] + a_wrdw[i];
            dy = cholesky_solve(chol_schur, rhs);

            dsv = res.rd;
            BlockSym ady = q.adjoint(dy);
            dsv.add_scaled(-1.0, ady);

            dxv = grg;
            for (int k = 0; k < nblk; ++k) {
                const Mat wdsw = matmul(sc[k].w, matmul(dsv.blocks[k], sc[k].w));
                dxv.blocks[k] -= wdsw;
                symmetrize_in_place(dxv.blocks[k]);
                symmetrize_in_place(dsv.blocks[k]);
            }
        };

        auto step_lengths = [&](const BlockSym& dxv, const BlockSym& dsv, double& ap, double& ad) {
            ap = std::numeric_limits<double>::infinity();
            ad = std::numeric_limits<double>::infinity();
            for (int k = 0; k < nblk; ++k) {
                const Mat dxt = matmul(sc[k].ginv, matmul_nt(dxv.blocks[k], sc[k].ginv));
                const Mat dst = matmul_tn(sc[k].g, matmul(dsv.blocks[k], sc[k].g));
                ap = std::min(ap, max_step(sc[k].lam, dxt));
                ad = std::min(ad, max_step(sc[k].lam, dst));
            }
        };

        // Predictor: in scaled space L_lam^{-1}(-lam o lam) = -diag(lam), and
        // G diag(-lam) G^T = -X.
        std::vector<Mat> rhat_aff(nblk);
        for (int k = 0; k < nblk; ++k) {
            const int n = q.cone.sizes[k];
            rhat_aff[k] = Mat(n, n);
            for (int i = 0; i < n; ++i) rhat_aff[k](i, i) = -sc[k].lam[i];
        }
        std::vector<double> dy_aff;
        BlockSym dx_aff, ds_aff;
        solve_direction(rhat_aff, dy_aff, dx_aff, ds_aff);

        double ap_aff, ad_aff;
        step_lengths(dx_aff, ds_aff, ap_aff, ad_aff);
        const double tau = settings.step_fraction;
        const double a_aff_p = std::min(1.0, tau * ap_aff);
        const double a_aff_d = std::min(1.0, tau * ad_aff);

        BlockSym xa = x;
        xa.add_scaled(a_aff_p, dx_aff);
        BlockSym sa = s;
        sa.add_scaled(a_aff_d, ds_aff);
        const double mu_aff = xa.inner(sa) / nu;
        double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
        sigma = std::clamp(sigma, 1e-10, 0.9999);
        if (polish_this_iter) sigma = 1.0; // recenter at the current mu

        // Corrector: target sigma*mu*I - lam o lam - H(dx_aff~ ds_aff~), then
        // invert L_lam entrywise.
        std::vector<Mat> rhat(nblk);
        for (int k = 0; k < nblk; ++k) {
            const int n = q.cone.sizes[k];
            Mat prod(n, n);
            if (!polish_this_iter) {
                const Mat dxt = matmul(sc[k].ginv, matmul_nt(dx_aff.blocks[k], sc[k].ginv));
                const Mat dst = matmul_tn(sc[k].g, matmul(ds_aff.blocks[k], sc[k].g));
                prod = matmul(dxt, dst);
            }
            Mat rc(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double v = -0.5 * (prod(i, j) + prod(j, i));
                    if (i == j) v += sigma * mu - sc[k].lam[i] * sc[k].lam[i];
                    rc(i, j) = 2.0 * v / (sc[k].lam[i] + sc[k].lam[j]);
                }
            rhat[k] = std::move(rc);
        }
        std::vector<double> dy;
        BlockSym dx, ds;
        solve_direction(rhat, dy, dx, ds);

        double ap_max, ad_max;
        step_lengths(dx, ds, ap_max, ad_max);
        double alpha_p = std::min(1.0, tau * ap_max);
        double alpha_d = std::min(1.0, tau * ad_max);

        // Commit only PD iterates; halve on roundoff overshoot.
        for (int guard = 0; guard < 40; ++guard) {
            BlockSym xn = x;
            xn.add_scaled(alpha_p, dx);
            BlockSym sn = s;
            sn.add_scaled(alpha_d, ds);
            bool pd = true;
            for (int k = 0; k < nblk && pd; ++k) {
                Mat cx = xn.blocks[k];
                Mat cs = sn.blocks[k];
                pd = cholesky(cx) && cholesky(cs);
            }
            if (pd) {
                x = std::move(xn);
                s = std::move(sn);
                for (int i = 0; i < m; ++i) y[i] += alpha_d * dy[i];
                break;
            }
            alpha_p *= 0.5;
            alpha_d *= 0.5;
            if (guard == 39) {
                alpha_p = 0.0;
            }
        }

        if (std::min(alpha_p, alpha_d) < 1e-7) {
            if (++stall_count >= 3) break;
        } else {
            stall_count = 0;
        }
        if (mu < 1e-18) break;
    }

    // Iteration cap or stall: report the best iterate, never a silent answer.
    best.trace = std::move(sol.trace);
    best.iterations = sol.iterations;
    best.status = SolveStatus::numerical_limit;
    return best;
}

OptimalityCheck verify_optimality(const ConicProblem& p, const ConicSolution& sol, double tol) {
    if (sol.status != SolveStatus::optimal)
        throw UsageError("verify_optimality: solution status is not optimal");
    p.validate();

    OptimalityCheck out;
    std::vector<double> ax = p.apply(sol.x);
    for (size_t i = 0; i < ax.size(); ++i) ax[i] -= p.b[i];
    out.primal_res = norm2(ax) / (1.0 + norm2(p.b));

    BlockSym rd = p.c;
    BlockSym ay = p.adjoint(sol.y);
    rd.add_scaled(-1.0, ay);
    rd.add_scaled(-1.0, sol.s);
    out.dual_res = rd.frob() / (1.0 + p.c.frob());

    out.min_eig_x = sol.x.min_eig();
    out.min_eig_s = sol.s.min_eig();

    double xs2 = 0.0;
    for (size_t k = 0; k < sol.x.blocks.size(); ++k) {
        const Mat prod = matmul(sol.x.blocks[k], sol.s.blocks[k]);
        const double f = frobenius(prod);
        xs2 += f * f;
    }
    const double xs_scale = 1.0 + sol.x.frob() * sol.s.frob();
    out.comp_res = std::sqrt(xs2) / xs_scale;

    out.ok = out.primal_res <= tol && out.dual_res <= tol &&
             out.min_eig_x >= -tol * (1.0 + sol.x.frob()) &&
             out.min_eig_s >= -tol * (1.0 + sol.s.frob()) && out.comp_res <= tol;
    return out;
}

FeasibilityResult phase1_feasibility(const ConicProblem& base, const Settings& settings) {
    base.validate();
    const double shift_floor = -4.0;

    ConicProblem ph;
    ph.cone = base.cone;
    ph.cone.sizes.push_back(1);
    const int pblk = base.cone.count();
    ph.c = BlockSym::zeros(ph.cone);
    ph.c.blocks[pblk](0, 0) = 1.0;
    ph.rows.reserve(base.rows.size());
    ph.b.reserve(base.b.size());
    for (size_t i = 0; i < base.rows.size(); ++i) {
        Constraint row = base.rows[i];
        const double tr = base.rows[i].trace();
        row.entries.push_back({pblk, 0, 0, -tr});
        ph.rows.push_back(std::move(row));
        ph.b.push_back(base.b[i] + shift_floor * tr);
    }

    const ConicSolution sol = solve(ph, settings);

    FeasibilityResult out;
    out.solver_status = sol.status;
    out.x = BlockSym::zeros(base.cone);

    auto validate_ray = [&](const std::vector<double>& d) {
        const double gd = numerics::dot(base.b, d);
        if (gd <= 0.0) return false;
        return base.adjoint(d).max_eig() <= 1e-8 * std::max(1.0, gd);
    };

    if (sol.status == SolveStatus::primal_infeasible && sol.ray) {
        std::vector<double> d = *sol.ray;
        const double dn = norm_inf(d);
        if (dn > 0.0)
            for (double& v : d) v /= dn;
        if (validate_ray(d)) {
            out.kind = FeasibilityResult::Kind::infeasible;
            out.ray = std::move(d);
            return out;
        }
        out.kind = FeasibilityResult::Kind::boundary;
        return out;
    }

    if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::numerical_limit) {
        out.kind = FeasibilityResult::Kind::boundary;
        return out;
    }

    const double s_opt = sol.x.blocks[pblk](0, 0) + shift_floor;
    out.shift = s_opt;
    for (int k = 0; k < base.cone.count(); ++k) {
        out.x.blocks[k] = sol.x.blocks[k];
        for (int i = 0; i < out.x.blocks[k].rows(); ++i) out.x.blocks[k](i, i) -= s_opt;
    }

    if (sol.status == SolveStatus::numerical_limit) {
        out.kind = FeasibilityResult::Kind::boundary;
        return out;
    }

    if (s_opt > 1e-7) {
        std::vector<double> d = sol.y;
        const double dn = norm_inf(d);
        if (dn > 0.0)
            for (double& v : d) v /= dn;
        if (validate_ray(d)) {
            out.kind = FeasibilityResult::Kind::infeasible;
            out.ray = std::move(d);
        } else {
            out.kind = FeasibilityResult::Kind::boundary;
        }
        return out;
    }

    if (s_opt <= 1e-9) {
        const double xnorm = out.x.frob();
        if (out.x.min_eig() >= -1e-8 * std::max(1.0, xnorm)) {
            out.kind = FeasibilityResult::Kind::feasible;
        } else {
            out.kind = FeasibilityResult::Kind::boundary;
        }
        return out;
    }

    out.kind = FeasibilityResult::Kind::boundary;
    return out;
}

} // namespace elliptope::conic
