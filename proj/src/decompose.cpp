#include "elliptope/decompose.hpp"

#include <cmath>

#include "elliptope/errors.hpp"

namespace elliptope::decompose {

using conic::BlockSym;
using conic::ConicProblem;
using conic::ConicSolution;
using conic::Constraint;
using numerics::Mat;

namespace {

ConicProblem dual_problem(const SymMatrix& x, const Partition& p) {
    const int n = x.dim();
    ConicProblem prob;
    prob.cone.sizes = {n};
    prob.c = BlockSym::zeros(prob.cone);
    prob.c.blocks[0] = x.to_dense();
    for (const auto& blk : p.blocks())
        for (size_t a = 0; a < blk.size(); ++a)
            for (size_t bidx = a; bidx < blk.size(); ++bidx) {
                prob.rows.push_back(Constraint::entry(0, blk[a], blk[bidx], 1.0));
                prob.b.push_back(a == bidx ? 1.0 : 0.0);
            }
    return prob;
}

DecompositionResult run(const SymMatrix& x, const Partition& p, const conic::Settings& settings) {
    if (p.ambient_dim() != x.dim()) throw UsageError("bmtfa: partition does not match matrix dimension");
    const ConicProblem prob = dual_problem(x, p);
    const ConicSolution sol = conic::solve(prob, settings);

    DecompositionResult out;
    out.input = x;
    out.status = sol.status;
    out.certified = (sol.status == conic::SolveStatus::optimal);

    // B = A*(y) is block-diagonal by construction; L = X - B exactly.
    const BlockSym ay = prob.adjoint(sol.y);
    Mat bdense = ay.blocks[0];
    SymMatrix b(x.dim());
    for (int i = 0; i < x.dim(); ++i)
        for (int j = 0; j <= i; ++j) b.set(i, j, 0.5 * (bdense(i, j) + bdense(j, i)));
    out.b = b;
    out.l = x - b;
    out.trace_l = out.l.trace();
    out.y = sol.x.to_sym();

    const Mat yl = numerics::matmul(out.y.to_dense(), out.l.to_dense());
    out.complementarity = numerics::frobenius(yl);

    // Margin: the smallest eigenvalue of Y that the certificate actually
    // stands on (zero eigenvalues of Y carve out the recovered column space).
    const auto ey = numerics::eig_sym(out.y);
    double margin = 0.0;
    // eigenvalues at the solver's accuracy level are numerically zero
    const double cutoff = 1e-7 * std::max(1.0, std::fabs(ey.values.front()));
    for (double v : ey.values)
        if (v > cutoff) margin = v; // descending: the last one above cutoff
    out.certificate_margin = margin;
    out.boundary_flag = margin < 1e-5;
    return out;
}

} // namespace

DecompositionResult mtfa(const SymMatrix& x, const conic::Settings& settings) {
    return run(x, Partition::singletons(x.dim()), settings);
}

DecompositionResult bmtfa(const SymMatrix& x, const Partition& p, const conic::Settings& settings) {
    return run(x, p, settings);
}

bool is_recovered(const SymMatrix& d_true, const SymMatrix& l_true,
                  const DecompositionResult& result, double tol) {
    if (d_true.dim() != l_true.dim() || d_true.dim() != result.input.dim())
        throw UsageError("is_recovered: dimension mismatch");
    const SymMatrix sum_err = d_true + l_true - result.input;
    if (sum_err.frobenius_norm() > tol * (1.0 + result.input.frobenius_norm()))
        throw UsageError("is_recovered: d_true + l_true does not reproduce the decomposed input");
    const SymMatrix diff = result.l - l_true;
    return diff.frobenius_norm() <= tol * (1.0 + l_true.frobenius_norm());
}

} // namespace elliptope::decompose
