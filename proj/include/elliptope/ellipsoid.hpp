#pragma once

#include <optional>
#include <vector>

#include "elliptope/conic.hpp"
#include "elliptope/partition.hpp"

namespace elliptope::ellipsoid {

using numerics::Mat;
using numerics::Partition;
using numerics::SymMatrix;

/// n points in R^k, stored as the columns of a k x n matrix.
struct PointSet {
    Mat v;
    PointSet(Mat points); // validates shape and finiteness
    int k() const { return v.rows(); }
    int n() const { return v.cols(); }
};

enum class FitStatus { fitted, infeasible, boundary_uncertain };
const char* to_string(FitStatus s);

struct FitResult {
    FitStatus status = FitStatus::boundary_uncertain;
    std::optional<SymMatrix> m;       ///< k x k PSD with v_i^T M v_i = 1 when fitted
    std::vector<double> d;            ///< dual ray (diagonal case), ||d||_inf = 1
    std::optional<SymMatrix> dual_block; ///< block-diagonal certificate (partitioned case)
    double margin = 0.0;              ///< |phase-I shift|
    conic::SolveStatus solver_status = conic::SolveStatus::numerical_limit;
};

/// Is there a centered ellipsoid through every point? Decided by phase-I on
/// the feasibility program { M >= 0 : v_i^T M v_i = 1 }. Points are rescaled
/// to unit max norm, duplicate and antipodal columns collapsed, and the
/// problem is restricted to the span of the points before solving.
FitResult fit(const PointSet& points, const conic::Settings& settings = {});

/// Partitioned variant: for each block I the whole principal block of V^T M V
/// must equal the identity (the image of the unit sphere of the coordinates
/// in I lies on the ellipsoid boundary).
FitResult fit_blocks(const PointSet& points, const Partition& p,
                     const conic::Settings& settings = {});

/// beta-sandwich test: every point's quadratic form q_i = v_i^T (V V^T)^{-1} v_i
/// lies in (beta, 1]. Throws DegenerateInputError when the points do not span.
bool sandwich_check(const PointSet& points, double beta);

struct HullReport {
    std::vector<int> on_boundary; ///< per point: 1 yes, 0 no, -1 undecided
    bool all_true = false;
    bool certain = true;
};

/// Per-point test whether v_i lies on the boundary of conv{±v_1, ..., ±v_n},
/// one feasibility LP per point.
HullReport hull_boundary(const PointSet& points);

/// Closed-form membership for the (k+1)-points-with-standard-basis regions.
bool region_R(const std::vector<double>& v);
bool region_Rprime(const std::vector<double>& v);

struct GridRow {
    double x, y;
    bool in_r, in_rprime, fitted;
};

/// Scan [xmin,xmax] x [ymin,ymax] with the given step: each grid point v is
/// fitted together with the two base points (default e1, e2) and compared
/// against the closed-form regions. A non-standard base maps v through its
/// inverse before the region predicates (fit feasibility is invariant under
/// invertible maps).
std::vector<GridRow> region_grid(double xmin, double xmax, double ymin, double ymax, double step,
                                 const std::optional<Mat>& base = {},
                                 const conic::Settings& settings = {});

} // namespace elliptope::ellipsoid
