#pragma once

#include "elliptope/conic.hpp"
#include "elliptope/partition.hpp"
#include "elliptope/sym.hpp"

namespace elliptope::decompose {

using numerics::Partition;
using numerics::SymMatrix;

/// Outcome of a diagonal/block-diagonal + PSD split X = B + L with tr(L)
/// minimal. The dual certificate Y is a correlation-type matrix (unit
/// diagonal, or identity blocks in the partitioned case) with <X, Y> = tr(B)
/// at the optimum and Y L = 0.
struct DecompositionResult {
    conic::SolveStatus status = conic::SolveStatus::numerical_limit;
    SymMatrix input;   ///< the X that was decomposed
    SymMatrix b;       ///< diagonal or P-block-diagonal part
    SymMatrix l;       ///< PSD part, b + l = input exactly
    SymMatrix y;       ///< dual certificate
    double trace_l = 0.0;
    double complementarity = 0.0;    ///< ||Y L||_F
    double certificate_margin = 0.0; ///< smallest significant eigenvalue of Y
    bool boundary_flag = false;      ///< margin below 1e-5
    bool certified = false;          ///< false when the solver hit its cap

    /// Diagonal of b (the natural representation for the unpartitioned case).
    std::vector<double> d_diag() const { return b.diag(); }

    DecompositionResult() : input(1), b(1), l(1), y(1) {}
};

/// Minimum-trace split of X into diagonal D plus PSD L, solved through the
/// correlation-matrix dual (minimize <X, Y> over the elliptope); D and L are
/// read off the dual variables.
DecompositionResult mtfa(const SymMatrix& x, const conic::Settings& settings = {});

/// Block variant: B is P-block-diagonal, the dual ranges over PSD matrices
/// whose principal blocks equal the identity.
DecompositionResult bmtfa(const SymMatrix& x, const Partition& p,
                          const conic::Settings& settings = {});

/// True iff the computed L matches L_true to tol (relative Frobenius).
/// Validates that d_true + l_true reproduces the decomposed input first.
bool is_recovered(const SymMatrix& d_true, const SymMatrix& l_true,
                  const DecompositionResult& result, double tol = 1e-6);

} // namespace elliptope::decompose
