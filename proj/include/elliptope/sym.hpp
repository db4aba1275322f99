#pragma once

#include <vector>

#include "elliptope/mat.hpp"

namespace elliptope::numerics {

/// Dense real symmetric matrix. Storage is the packed lower triangle, so the
/// value is symmetric by construction.
class SymMatrix {
public:
    explicit SymMatrix(int n);

    static SymMatrix identity(int n);
    static SymMatrix zero(int n) { return SymMatrix(n); }
    /// Validates |A_ij - A_ji| against `sym_tol` * max(1, max|A|) and
    /// symmetrizes by averaging. Throws UsageError on shape/symmetry failure.
    static SymMatrix from_dense(const Mat& a, double sym_tol = 1e-9);
    /// v * v^T
    static SymMatrix outer(const std::vector<double>& v);
    static SymMatrix diagonal(const std::vector<double>& d);

    int dim() const { return n_; }

    double operator()(int i, int j) const {
        return i >= j ? data_[index(i, j)] : data_[index(j, i)];
    }
    void set(int i, int j, double v) { data_[i >= j ? index(i, j) : index(j, i)] = v; }
    void add(int i, int j, double v) { data_[i >= j ? index(i, j) : index(j, i)] += v; }

    Mat to_dense() const;

    double trace() const;
    double frobenius_norm() const;
    std::vector<double> diag() const;
    std::vector<double> apply(const std::vector<double>& x) const;

    SymMatrix& operator+=(const SymMatrix& o);
    SymMatrix& operator-=(const SymMatrix& o);
    SymMatrix& operator*=(double s);

private:
    size_t index(int i, int j) const { return size_t(i) * (i + 1) / 2 + j; } // i >= j
    int n_;
    std::vector<double> data_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

struct EigResult {
    std::vector<double> values; ///< descending
    Mat vectors;                ///< orthonormal columns, vectors.col(i) pairs with values[i]
};

enum class EigMethod {
    automatic,   ///< cyclic Jacobi up to dimension 64, tridiagonal QL above
    jacobi,      ///< cyclic Jacobi sweeps
    tridiagonal, ///< Householder reduction + implicit-shift QL
};

/// Full eigendecomposition of a symmetric matrix. Eigenvalues are returned in
/// descending order with matching orthonormal eigenvectors. Throws
/// NumericalError if the iteration cap is hit.
EigResult eig_sym(const SymMatrix& a, EigMethod method = EigMethod::automatic);

/// Smallest and largest eigenvalue (via full decomposition; inputs here are
/// desk-scale).
double min_eigenvalue(const SymMatrix& a);
double max_eigenvalue(const SymMatrix& a);

/// True iff lambda_min(A) >= -tol.
bool psd_check(const SymMatrix& a, double tol);

} // namespace elliptope::numerics
