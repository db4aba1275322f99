#pragma once

#include <vector>

#include "elliptope/mat.hpp"
#include "elliptope/sym.hpp"

namespace elliptope::numerics {

/// A subspace of R^n held as an n x r matrix with orthonormal columns.
/// r may be zero (the trivial subspace).
class Subspace {
public:
    /// Wraps an already-orthonormal basis; validates basis^T basis = I within
    /// 1e-12 per entry.
    static Subspace from_basis(Mat basis);
    /// Orthonormalizes arbitrary spanning columns (modified Gram-Schmidt with
    /// one reorthogonalization pass), dropping numerically dependent columns.
    static Subspace span_of(const Mat& columns, double drop_tol = 1e-12);
    static Subspace zero(int n);

    int ambient_dim() const { return n_; }
    int dim() const { return r_; }
    const Mat& basis() const { return basis_; }

    /// Orthogonal complement, via full Householder QR of the basis.
    Subspace complement() const;

    /// ||P_U x|| for a unit test hook; P_U x = basis (basis^T x).
    std::vector<double> project(const std::vector<double>& x) const;

    /// True when the two subspaces agree as projectors: ||P_U - P_V||_F <= tol.
    bool same_as(const Subspace& other, double tol = 1e-8) const;

private:
    Subspace(int n, int r, Mat basis) : n_(n), r_(r), basis_(std::move(basis)) {}
    int n_;
    int r_;
    Mat basis_; // n x r
};

/// Orthogonal projector P_U = basis basis^T.
SymMatrix projector(const Subspace& u);

/// Span of the eigenvectors of A with |lambda| > rank_tol * max|lambda|.
/// The zero matrix yields the zero-dimensional subspace.
Subspace column_space(const SymMatrix& a, double rank_tol = 1e-9);

} // namespace elliptope::numerics
