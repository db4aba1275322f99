#include "elliptope/mat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elliptope/errors.hpp"

namespace elliptope::numerics {

Mat::Mat(int rows, int cols, std::vector<double> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != size_t(rows) * cols) throw UsageError("Mat: data size does not match shape");
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::transposed() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Mat& Mat::operator+=(const Mat& o) {
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

std::vector<double> Mat::col(int j) const {
    std::vector<double> v(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

std::vector<double> Mat::row(int i) const {
    return std::vector<double>(data_.begin() + size_t(i) * cols_, data_.begin() + size_t(i + 1) * cols_);
}

void Mat::set_col(int j, const std::vector<double>& v) {
    for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat matmul(const Mat& a, const Mat& b) {
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
    Mat c(a.cols(), b.cols());
    for (int k = 0; k < a.rows(); ++k) {
        for (int i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
        }
    }
    return c;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
    Mat c(a.rows(), b.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.rows(); ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
            c(i, j) = s;
        }
    return c;
}

std::vector<double> matvec(const Mat& a, const std::vector<double>& x) {
    std::vector<double> y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> matvec_t(const Mat& a, const std::vector<double>& x) {
    std::vector<double> y(a.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (int j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
    }
    return y;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double frobenius(const Mat& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

double max_abs(const Mat& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::fabs(v));
    return m;
}

double inner(const Mat& a, const Mat& b) {
    double s = 0.0;
    const auto& da = a.data();
    const auto& db = b.data();
    for (size_t i = 0; i < da.size(); ++i) s += da[i] * db[i];
    return s;
}

bool cholesky(Mat& a) {
    const int n = a.rows();
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (d <= 0.0 || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / ljj;
        }
        for (int i = 0; i < j; ++i) a(i, j) = 0.0;
    }
    return true;
}

std::vector<double> cholesky_solve(const Mat& chol, const std::vector<double>& b) {
    const int n = chol.rows();
    std::vector<double> x(b);
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= chol(i, k) * x[k];
        x[i] = s / chol(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= chol(k, i) * x[k];
        x[i] = s / chol(i, i);
    }
    return x;
}

Mat cholesky_solve_mat(const Mat& chol, const Mat& b) {
    Mat x(b.rows(), b.cols());
    for (int j = 0; j < b.cols(); ++j) x.set_col(j, cholesky_solve(chol, b.col(j)));
    return x;
}

std::vector<double> lu_solve(const Mat& a, const std::vector<double>& b) {
    const int n = a.rows();
    Mat lu = a;
    std::vector<int> piv(n);
    std::iota(piv.begin(), piv.end(), 0);

    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::fabs(lu(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::fabs(lu(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best == 0.0 || !std::isfinite(best))
            throw DegenerateInputError("lu_solve: matrix is numerically singular");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
            std::swap(piv[k], piv[p]);
        }
        const double pivot = lu(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double m = lu(i, k) / pivot;
            lu(i, k) = m;
            for (int j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
        }
    }

    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[piv[i]];
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= lu(i, k) * x[k];
        x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= lu(i, k) * x[k];
        x[i] = s / lu(i, i);
    }
    return x;
}

Mat qr_full_q(const Mat& a) {
    const int n = a.rows();
    const int k = a.cols();
    if (k > n) throw UsageError("qr_full_q: more columns than rows");

    // Householder reduction of a copy, accumulating the reflectors into Q.
    Mat r = a;
    std::vector<std::vector<double>> vs;
    vs.reserve(k);
    for (int j = 0; j < k; ++j) {
        std::vector<double> v(n, 0.0);
        double nrm = 0.0;
        for (int i = j; i < n; ++i) nrm += r(i, j) * r(i, j);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-13) throw DegenerateInputError("qr_full_q: numerically dependent columns");
        const double alpha = (r(j, j) >= 0.0) ? -nrm : nrm;
        for (int i = j; i < n; ++i) v[i] = r(i, j);
        v[j] -= alpha;
        double vn2 = 0.0;
        for (int i = j; i < n; ++i) vn2 += v[i] * v[i];
        if (vn2 > 0.0) {
            for (int c = j; c < k; ++c) {
                double s = 0.0;
                for (int i = j; i < n; ++i) s += v[i] * r(i, c);
                s *= 2.0 / vn2;
                for (int i = j; i < n; ++i) r(i, c) -= s * v[i];
            }
        }
        vs.push_back(std::move(v));
    }

    Mat q = Mat::identity(n);
    for (int j = k - 1; j >= 0; --j) {
        const auto& v = vs[j];
        double vn2 = 0.0;
        for (int i = j; i < n; ++i) vn2 += v[i] * v[i];
        if (vn2 == 0.0) continue;
        for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int i = j; i < n; ++i) s += v[i] * q(i, c);
            s *= 2.0 / vn2;
            for (int i = j; i < n; ++i) q(i, c) -= s * v[i];
        }
    }
    return q;
}

Mat lower_tri_inverse(const Mat& l) {
    const int n = l.rows();
    Mat inv(n, n);
    for (int j = 0; j < n; ++j) {
        inv(j, j) = 1.0 / l(j, j);
        for (int i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (int k = j; k < i; ++k) s += l(i, k) * inv(k, j);
            inv(i, j) = -s / l(i, i);
        }
    }
    return inv;
}

} // namespace elliptope::numerics
