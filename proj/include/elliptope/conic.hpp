#pragma once

#include <optional>
#include <vector>

#include "elliptope/mat.hpp"
#include "elliptope/sym.hpp"

namespace elliptope::conic {

using numerics::Mat;
using numerics::SymMatrix;

/// Sizes of the diagonal blocks of the PSD variable. LP profiles use all-ones.
struct BlockSpec {
    std::vector<int> sizes;
    int count() const { return int(sizes.size()); }
    int total() const;
};

/// Block-diagonal symmetric value (dense per block).
struct BlockSym {
    std::vector<Mat> blocks;

    static BlockSym zeros(const BlockSpec& spec);
    static BlockSym scaled_identity(const BlockSpec& spec, double s);

    double inner(const BlockSym& o) const;
    double frob() const;
    double trace() const;
    void add_scaled(double a, const BlockSym& x); // this += a * x
    void scale(double a);
    /// Smallest eigenvalue across blocks.
    double min_eig() const;
    /// max_i lambda_max(block_i)
    double max_eig() const;
    /// For a single-block value, view as SymMatrix.
    SymMatrix to_sym() const;
};

/// One linear functional <A_i, .>. A_i is a sum of sparse symmetric unit
/// entries and rank-one outer products:
///   sym_unit(i,i) = e_i e_i^T,  sym_unit(i,j) = (e_i e_j^T + e_j e_i^T)/2,
/// so <sym_unit(i,j), X> = X_ij.
struct EntryTerm {
    int blk;
    int i, j;
    double v;
};
struct Rank1Term {
    int blk;
    std::vector<double> v;
    double scale;
};
struct Constraint {
    std::vector<EntryTerm> entries;
    std::vector<Rank1Term> rank1s;

    static Constraint entry(int blk, int i, int j, double v = 1.0);
    static Constraint rank1(int blk, std::vector<double> v, double scale = 1.0);
    static Constraint from_sym(int blk, const SymMatrix& a, double drop_below = 0.0);

    double apply(const BlockSym& x) const;       // <A, X>
    void add_to(double y, BlockSym& out) const;  // out += y * A
    double norm_f() const;                       // ||A||_F
    double trace() const;                        // <A, I>
};

/// min <C, X>  s.t.  <A_i, X> = b_i,  X in the block PSD cone.
struct ConicProblem {
    BlockSpec cone;
    BlockSym c;
    std::vector<Constraint> rows;
    std::vector<double> b;

    std::vector<double> apply(const BlockSym& x) const;
    BlockSym adjoint(const std::vector<double>& y) const;
    void validate() const;
};

enum class SolveStatus { optimal, primal_infeasible, dual_infeasible_unbounded, numerical_limit };
const char* to_string(SolveStatus s);

struct IterStat {
    int iter;
    double pobj, dobj;
    double rel_p, rel_d;
    double mu;
    double comp;  // <X, S> (nonnegative on cone-interior iterates)
    double rd_x;  // <C - A*(y) - S, X>
    double rp_y;  // <b - A(X), y>
};

struct Settings {
    double tol_feas = 1e-8;
    double tol_gap = 1e-8;
    /// After the residual/gap criteria hold, centering steps continue until
    /// ||X S||_F sits within a factor two of the central-path level
    /// mu sqrt(nu) (or below this absolute floor), so complementarity holds
    /// matrix-wise, not just in trace.
    double comp_fro_tol = 1e-7;
    int max_iter = 200;
    double step_fraction = 0.98;
};

struct ConicSolution {
    SolveStatus status = SolveStatus::numerical_limit;
    BlockSym x, s;
    std::vector<double> y;
    double primal_obj = 0.0, dual_obj = 0.0;
    double rel_primal_res = 0.0, rel_dual_res = 0.0, rel_gap = 0.0;
    double complementarity = 0.0; // <X, S>
    /// Improving dual ray certifying primal infeasibility (||.||_inf = 1):
    /// <b, ray> > 0 and lambda_max(adjoint(ray)) <= 1e-8.
    std::optional<std::vector<double>> ray;
    std::vector<IterStat> trace;
    int iterations = 0;
};

/// Primal-dual path following with Nesterov-Todd scaling and a Mehrotra
/// predictor-corrector step. Deterministic for fixed inputs and settings.
ConicSolution solve(const ConicProblem& p, const Settings& settings = {});

struct OptimalityCheck {
    bool ok = false;
    double primal_res = 0.0;  // ||A(X)-b|| / (1+||b||)
    double dual_res = 0.0;    // ||C - A*(y) - S||_F / (1+||C||_F)
    double min_eig_x = 0.0;
    double min_eig_s = 0.0;
    double comp_res = 0.0;    // ||X S||_F / (1 + ||X||_F ||S||_F)
    explicit operator bool() const { return ok; }
};

/// Re-derives feasibility and complementarity of a claimed optimal pair using
/// eigenvalue checks only (independent of the solver's internal state).
OptimalityCheck verify_optimality(const ConicProblem& p, const ConicSolution& sol, double tol);

/// Phase-I reformulation of the feasibility problem "find X in the cone with
/// A(X) = b": minimize s subject to A(Z - sI) = b, Z >= 0, s >= shift_floor.
/// Feasible iff the optimal shift is <= 0 (within tolerance); an infeasibility
/// ray is read off the phase-I dual variables.
struct FeasibilityResult {
    enum class Kind { feasible, infeasible, boundary };
    Kind kind = Kind::boundary;
    double shift = 0.0;                     // optimal s
    BlockSym x;                             // feasible point (Z - sI) when kind != infeasible
    std::vector<double> ray;                // when infeasible, ||.||_inf = 1
    SolveStatus solver_status = SolveStatus::numerical_limit;
};

FeasibilityResult phase1_feasibility(const ConicProblem& base, const Settings& settings = {});

} // namespace elliptope::conic
