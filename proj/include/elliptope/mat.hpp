#pragma once

#include <cstddef>
#include <vector>

namespace elliptope::numerics {

/// Dense row-major matrix of doubles. Workhorse for bases, point sets and the
/// solver's internal block arithmetic; the symmetric domain type lives in
/// sym.hpp.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols, 0.0) {}
    Mat(int rows, int cols, std::vector<double> data);

    static Mat identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[size_t(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Mat transposed() const;

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);

    std::vector<double> col(int j) const;
    std::vector<double> row(int i) const;
    void set_col(int j, const std::vector<double>& v);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a);

/// C = A * B
Mat matmul(const Mat& a, const Mat& b);
/// C = A^T * B
Mat matmul_tn(const Mat& a, const Mat& b);
/// C = A * B^T
Mat matmul_nt(const Mat& a, const Mat& b);

std::vector<double> matvec(const Mat& a, const std::vector<double>& x);
std::vector<double> matvec_t(const Mat& a, const std::vector<double>& x);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& v);
double norm_inf(const std::vector<double>& v);
double frobenius(const Mat& a);
double max_abs(const Mat& a);
/// Frobenius inner product <A, B>.
double inner(const Mat& a, const Mat& b);

/// In-place Cholesky of a symmetric positive definite matrix (lower triangle).
/// Returns false (leaving `a` clobbered) if a non-positive pivot is hit.
bool cholesky(Mat& a);
/// Solve L L^T x = b given the Cholesky factor from cholesky().
std::vector<double> cholesky_solve(const Mat& chol, const std::vector<double>& b);
/// Solve L y = b (forward) and L^T x = y (backward) for a batch of columns.
Mat cholesky_solve_mat(const Mat& chol, const Mat& b);

/// LU factorization with partial pivoting; solves a general square system.
/// Throws DegenerateInputError on (numerical) singularity.
std::vector<double> lu_solve(const Mat& a, const std::vector<double>& b);

/// Full Householder QR of an n x k matrix (k <= n) with orthonormal columns
/// extended to an n x n orthogonal Q; columns k..n-1 span the orthogonal
/// complement of the column space. Throws DegenerateInputError if the input
/// columns are numerically dependent.
Mat qr_full_q(const Mat& a);

/// Inverse of a lower-triangular matrix.
Mat lower_tri_inverse(const Mat& l);

} // namespace elliptope::numerics
