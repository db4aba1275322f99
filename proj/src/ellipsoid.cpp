#include "elliptope/ellipsoid.hpp"

#include <cmath>

#include "elliptope/errors.hpp"
#include "elliptope/lp.hpp"
#include "elliptope/subspace.hpp"

namespace elliptope::ellipsoid {

using conic::BlockSym;
using conic::ConicProblem;
using conic::Constraint;
using conic::FeasibilityResult;
using numerics::matmul;
using numerics::matmul_tn;
using numerics::matvec;
using numerics::norm2;
using numerics::norm_inf;
using numerics::Subspace;

PointSet::PointSet(Mat points) : v(std::move(points)) {
    if (v.rows() < 1 || v.cols() < 1) throw UsageError("PointSet: needs at least one point in R^k, k >= 1");
    for (double x : v.data())
        if (!std::isfinite(x)) throw UsageError("PointSet: non-finite coordinate");
}

const char* to_string(FitStatus s) {
    switch (s) {
        case FitStatus::fitted: return "fitted";
        case FitStatus::infeasible: return "infeasible";
        case FitStatus::boundary_uncertain: return "boundary-uncertain";
    }
    return "unknown";
}

namespace {

struct Reduced {
    Mat v;           // k' x n, scaled, restricted to the span of the points
    Mat span_basis;  // k x k'
    double scale;    // original max column norm
};

Reduced reduce_points(const Mat& v) {
    Reduced out{Mat(), Mat(), 1.0};
    double gamma = 0.0;
    for (int j = 0; j < v.cols(); ++j) gamma = std::max(gamma, norm2(v.col(j)));
    out.scale = gamma;
    if (gamma == 0.0) {
        out.v = v;
        out.span_basis = Mat::identity(v.rows());
        return out;
    }
    Mat scaled = v;
    scaled *= 1.0 / gamma;
    const Subspace span = Subspace::span_of(scaled, 1e-12); // span of the points in R^k
    out.span_basis = span.basis();                          // k x k'
    out.v = matmul_tn(out.span_basis, scaled);
    return out;
}

// expand a ray on kept constraint indices back to all n points
std::vector<double> expand_ray(const std::vector<double>& ray, const std::vector<int>& kept, int n) {
    std::vector<double> d(n, 0.0);
    for (size_t t = 0; t < kept.size(); ++t) d[kept[t]] = ray[t];
    const double dn = norm_inf(d);
    if (dn > 0.0)
        for (double& x : d) x /= dn;
    return d;
}

} // namespace

FitResult fit(const PointSet& points, const conic::Settings& settings) {
    const int n = points.n();
    const Reduced red = reduce_points(points.v);
    FitResult out;

    if (red.scale == 0.0) {
        // only zero points; nothing lies on any ellipsoid boundary
        out.status = FitStatus::infeasible;
        out.d.assign(n, 0.0);
        out.d[0] = 1.0;
        out.solver_status = conic::SolveStatus::primal_infeasible;
        return out;
    }

    // collapse duplicate and antipodal-duplicate columns
    std::vector<int> kept;
    for (int j = 0; j < n; ++j) {
        bool dup = false;
        const auto cj = red.v.col(j);
        for (int i : kept) {
            const auto ci = red.v.col(i);
            double dplus = 0.0, dminus = 0.0;
            for (size_t t = 0; t < cj.size(); ++t) {
                dplus += (cj[t] - ci[t]) * (cj[t] - ci[t]);
                dminus += (cj[t] + ci[t]) * (cj[t] + ci[t]);
            }
            if (std::sqrt(std::min(dplus, dminus)) <= 1e-12) {
                dup = true;
                break;
            }
        }
        if (!dup) kept.push_back(j);
    }

    const int kr = red.v.rows();
    ConicProblem base;
    base.cone.sizes = {kr};
    base.c = BlockSym::zeros(base.cone);
    for (int j : kept) {
        base.rows.push_back(Constraint::rank1(0, red.v.col(j)));
        base.b.push_back(1.0);
    }

    const FeasibilityResult fr = conic::phase1_feasibility(base, settings);
    out.margin = std::fabs(fr.shift);
    out.solver_status = fr.solver_status;

    switch (fr.kind) {
        case FeasibilityResult::Kind::feasible: {
            out.status = FitStatus::fitted;
            // M = Q M_red Q^T / gamma^2
            const Mat mred = fr.x.blocks[0];
            Mat mfull = matmul(red.span_basis, numerics::matmul_nt(mred, red.span_basis));
            mfull *= 1.0 / (red.scale * red.scale);
            SymMatrix m(points.k());
            for (int i = 0; i < points.k(); ++i)
                for (int j = 0; j <= i; ++j) m.set(i, j, 0.5 * (mfull(i, j) + mfull(j, i)));
            out.m = m;
            break;
        }
        case FeasibilityResult::Kind::infeasible:
            out.status = FitStatus::infeasible;
            out.d = expand_ray(fr.ray, kept, n);
            break;
        case FeasibilityResult::Kind::boundary:
            out.status = FitStatus::boundary_uncertain;
            break;
    }
    return out;
}

FitResult fit_blocks(const PointSet& points, const Partition& p, const conic::Settings& settings) {
    const int n = points.n();
    if (p.ambient_dim() != n) throw UsageError("fit_blocks: partition does not index the points");
    if (p.is_singletons()) return fit(points, settings);

    const Reduced red = reduce_points(points.v);
    FitResult out;
    if (red.scale == 0.0) {
        out.status = FitStatus::infeasible;
        SymMatrix bd(n);
        bd.set(0, 0, 1.0);
        out.dual_block = bd;
        out.solver_status = conic::SolveStatus::primal_infeasible;
        return out;
    }

    const int kr = red.v.rows();
    ConicProblem base;
    base.cone.sizes = {kr};
    base.c = BlockSym::zeros(base.cone);
    struct RowId {
        int i, j;
    };
    std::vector<RowId> ids;
    for (const auto& blk : p.blocks())
        for (size_t a = 0; a < blk.size(); ++a)
            for (size_t bq = a; bq < blk.size(); ++bq) {
                const int i = blk[a];
                const int j = blk[bq];
                if (i == j) {
                    base.rows.push_back(Constraint::rank1(0, red.v.col(i)));
                    base.b.push_back(1.0);
                } else {
                    // (v_i v_j^T + v_j v_i^T)/2 = ((v_i+v_j)(v_i+v_j)^T - (v_i-v_j)(v_i-v_j)^T)/4
                    Constraint c;
                    std::vector<double> plus = red.v.col(i);
                    std::vector<double> minus = red.v.col(i);
                    const auto cj = red.v.col(j);
                    for (int t = 0; t < kr; ++t) {
                        plus[t] += cj[t];
                        minus[t] -= cj[t];
                    }
                    c.rank1s.push_back({0, std::move(plus), 0.25});
                    c.rank1s.push_back({0, std::move(minus), -0.25});
                    base.rows.push_back(std::move(c));
                    base.b.push_back(0.0);
                }
                ids.push_back({i, j});
            }

    const FeasibilityResult fr = conic::phase1_feasibility(base, settings);
    out.margin = std::fabs(fr.shift);
    out.solver_status = fr.solver_status;

    switch (fr.kind) {
        case FeasibilityResult::Kind::feasible: {
            out.status = FitStatus::fitted;
            const Mat mred = fr.x.blocks[0];
            Mat mfull = matmul(red.span_basis, numerics::matmul_nt(mred, red.span_basis));
            mfull *= 1.0 / (red.scale * red.scale);
            SymMatrix m(points.k());
            for (int i = 0; i < points.k(); ++i)
                for (int j = 0; j <= i; ++j) m.set(i, j, 0.5 * (mfull(i, j) + mfull(j, i)));
            out.m = m;
            break;
        }
        case FeasibilityResult::Kind::infeasible: {
            out.status = FitStatus::infeasible;
            SymMatrix bd(n);
            for (size_t t = 0; t < ids.size(); ++t) {
                const double yv = fr.ray[t];
                if (ids[t].i == ids[t].j)
                    bd.add(ids[t].i, ids[t].i, yv);
                else
                    bd.add(ids[t].i, ids[t].j, 0.5 * yv);
            }
            const double scale = std::max(1e-300, [&] {
                double mx = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j <= i; ++j) mx = std::max(mx, std::fabs(bd(i, j)));
                return mx;
            }());
            bd *= 1.0 / scale;
            out.dual_block = bd;
            break;
        }
        case FeasibilityResult::Kind::boundary:
            out.status = FitStatus::boundary_uncertain;
            break;
    }
    return out;
}

bool sandwich_check(const PointSet& points, double beta) {
    if (beta <= 0.0 || beta >= 1.0) throw UsageError("sandwich_check: beta must lie in (0, 1)");
    const int k = points.k();
    Mat gram(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            double s = 0.0;
            for (int t = 0; t < points.n(); ++t) s += points.v(i, t) * points.v(j, t);
            gram(i, j) = s;
        }
    Mat chol = gram;
    if (!numerics::cholesky(chol))
        throw DegenerateInputError("sandwich_check: points do not span R^k (V V^T is singular)");
    for (int t = 0; t < points.n(); ++t) {
        const auto vt = points.v.col(t);
        const auto sol = numerics::cholesky_solve(chol, vt);
        const double q = numerics::dot(vt, sol);
        if (!(q > beta && q <= 1.0 + 1e-12)) return false;
    }
    return true;
}

HullReport hull_boundary(const PointSet& points) {
    const int n = points.n();
    const int k = points.k();
    HullReport rep;
    rep.on_boundary.assign(n, -1);
    rep.all_true = true;
    for (int i = 0; i < n; ++i) {
        std::vector<conic::Inequality> ineqs;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            ineqs.push_back({points.v.col(j), conic::Sense::le, 1.0});
            auto neg = points.v.col(j);
            for (double& x : neg) x = -x;
            ineqs.push_back({std::move(neg), conic::Sense::le, 1.0});
        }
        std::vector<conic::Equality> eqs = {{points.v.col(i), 1.0}};
        if (ineqs.empty()) {
            // single point: on its own hull boundary iff nonzero
            rep.on_boundary[i] = norm2(points.v.col(i)) > 0.0 ? 1 : 0;
        } else {
            const conic::LpFeasibility lp = conic::lp_feasible(ineqs, eqs, k);
            if (!lp.certain) {
                rep.certain = false;
                rep.on_boundary[i] = -1;
                rep.all_true = false;
                continue;
            }
            rep.on_boundary[i] = lp.feasible ? 1 : 0;
        }
        if (rep.on_boundary[i] != 1) rep.all_true = false;
    }
    return rep;
}

bool region_R(const std::vector<double>& v) {
    if (v.empty()) throw UsageError("region_R: empty vector");
    double sum = 0.0;
    for (double x : v) sum += std::fabs(x);
    if (sum < 1.0) return false;
    for (double x : v)
        if (std::fabs(x) - (sum - std::fabs(x)) > 1.0) return false;
    return true;
}

bool region_Rprime(const std::vector<double>& v) {
    if (v.empty()) throw UsageError("region_Rprime: empty vector");
    double sum = 0.0;
    for (double x : v) sum += x * x;
    if (!(sum > 1.0)) return false;
    for (double x : v)
        if (!(x * x - (sum - x * x) < 1.0)) return false;
    return true;
}

std::vector<GridRow> region_grid(double xmin, double xmax, double ymin, double ymax, double step,
                                 const std::optional<Mat>& base, const conic::Settings& settings) {
    if (step <= 0.0) throw UsageError("region_grid: step must be positive");
    Mat b = base ? *base : Mat::identity(2);
    if (b.rows() != 2 || b.cols() != 2) throw UsageError("region_grid: base must be 2x2");

    // T = base^{-1} maps the actual configuration back to the standard one
    const double det = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
    if (std::fabs(det) < 1e-12) throw DegenerateInputError("region_grid: base points are collinear");
    Mat binv(2, 2);
    binv(0, 0) = b(1, 1) / det;
    binv(1, 1) = b(0, 0) / det;
    binv(0, 1) = -b(0, 1) / det;
    binv(1, 0) = -b(1, 0) / det;

    std::vector<GridRow> rows;
    const int nx = int(std::floor((xmax - xmin) / step + 1e-9)) + 1;
    const int ny = int(std::floor((ymax - ymin) / step + 1e-9)) + 1;
    for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < ny; ++iy) {
            const double x = xmin + ix * step;
            const double y = ymin + iy * step;
            Mat pts(2, 3);
            pts(0, 0) = b(0, 0);
            pts(1, 0) = b(1, 0);
            pts(0, 1) = b(0, 1);
            pts(1, 1) = b(1, 1);
            pts(0, 2) = x;
            pts(1, 2) = y;
            const FitResult fr = fit(PointSet(pts), settings);
            const std::vector<double> vstd = matvec(binv, {x, y});
            rows.push_back({x, y, region_R(vstd), region_Rprime(vstd), fr.status == FitStatus::fitted});
        }
    return rows;
}

} // namespace elliptope::ellipsoid
