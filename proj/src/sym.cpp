#include "elliptope/sym.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "elliptope/errors.hpp"

namespace elliptope::numerics {

SymMatrix::SymMatrix(int n) : n_(n), data_(size_t(n) * (n + 1) / 2, 0.0) {
    if (n < 1) throw UsageError("SymMatrix: dimension must be at least 1");
}

SymMatrix SymMatrix::identity(int n) {
    SymMatrix a(n);
    for (int i = 0; i < n; ++i) a.set(i, i, 1.0);
    return a;
}

SymMatrix SymMatrix::from_dense(const Mat& a, double sym_tol) {
    if (a.rows() != a.cols()) throw UsageError("SymMatrix: matrix is not square");
    const double scale = std::max(1.0, max_abs(a));
    SymMatrix s(a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j <= i; ++j) {
            if (std::fabs(a(i, j) - a(j, i)) > sym_tol * scale)
                throw UsageError("SymMatrix: input is not symmetric within tolerance");
            s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
        }
    return s;
}

SymMatrix SymMatrix::outer(const std::vector<double>& v) {
    SymMatrix a(int(v.size()));
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j <= i; ++j) a.set(i, j, v[i] * v[j]);
    return a;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
    SymMatrix a(int(d.size()));
    for (int i = 0; i < a.dim(); ++i) a.set(i, i, d[i]);
    return a;
}

Mat SymMatrix::to_dense() const {
    Mat m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
    return m;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
        s += (*this)(i, i) * (*this)(i, i);
        for (int j = 0; j < i; ++j) s += 2.0 * (*this)(i, j) * (*this)(i, j);
    }
    return std::sqrt(s);
}

std::vector<double> SymMatrix::diag() const {
    std::vector<double> d(n_);
    for (int i = 0; i < n_; ++i) d[i] = (*this)(i, i);
    return d;
}

std::vector<double> SymMatrix::apply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
    if (o.n_ != n_) throw UsageError("SymMatrix: dimension mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
    if (o.n_ != n_) throw UsageError("SymMatrix: dimension mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

namespace {

double off_diag_norm(const Mat& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

// Cyclic Jacobi sweeps. Quadratic convergence once the off-diagonal mass is
// small; the method of choice for small dense problems where every eigenpair
// must be accurate.
void jacobi_eig(Mat& a, Mat& v, int max_sweeps) {
    const int n = a.rows();
    v = Mat::identity(n);
    const double anorm = frobenius(a);
    if (anorm == 0.0) return;
    const double tol = 1e-15 * anorm;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diag_norm(a) <= tol) return;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::fabs(theta) > 1e153) {
                    t = 1.0 / (2.0 * theta);
                } else {
                    t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const double app = a(p, p);
                const double aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(p, i) = a(i, p);
                    a(i, q) = s * aip + c * aiq;
                    a(q, i) = a(i, q);
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    const double res = off_diag_norm(a);
    if (res > tol) throw NumericalError("jacobi eigensolver did not converge", res);
}

// Householder reduction to tridiagonal form, accumulating the orthogonal
// transform in z (classic tred2).
void tridiagonalize(Mat& z, std::vector<double>& d, std::vector<double>& e) {
    const int n = z.rows();
    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0;
        double scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = z(i, j);
                    g = e[j] - hh * f;
                    e[j] = g;
                    for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
                for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = 1.0;
        for (int j = 0; j <= l; ++j) z(j, i) = z(i, j) = 0.0;
    }
}

// Implicit-shift QL iteration on a symmetric tridiagonal matrix with
// eigenvector accumulation (classic tql2). d holds the diagonal, e the
// subdiagonal in e[1..n-1] on entry.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e, Mat& z) {
    const int n = int(d.size());
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60)
                    throw NumericalError("tridiagonal QL did not converge", std::fabs(e[l]));
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace

EigResult eig_sym(const SymMatrix& a, EigMethod method) {
    const int n = a.dim();
    if (method == EigMethod::automatic)
        method = (n <= 64) ? EigMethod::jacobi : EigMethod::tridiagonal;

    EigResult out;
    out.values.resize(n);
    Mat work = a.to_dense();

    if (method == EigMethod::jacobi) {
        Mat v;
        jacobi_eig(work, v, 50);
        for (int i = 0; i < n; ++i) out.values[i] = work(i, i);
        out.vectors = std::move(v);
    } else {
        std::vector<double> d(n, 0.0);
        std::vector<double> e(n, 0.0);
        tridiagonalize(work, d, e);
        tridiag_ql(d, e, work);
        out.values = std::move(d);
        out.vectors = std::move(work);
    }

    // descending order
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return out.values[i] > out.values[j]; });
    std::vector<double> sorted(n);
    Mat vsorted(n, n);
    for (int k = 0; k < n; ++k) {
        sorted[k] = out.values[order[k]];
        for (int i = 0; i < n; ++i) vsorted(i, k) = out.vectors(i, order[k]);
    }
    out.values = std::move(sorted);
    out.vectors = std::move(vsorted);
    return out;
}

double min_eigenvalue(const SymMatrix& a) { return eig_sym(a).values.back(); }
double max_eigenvalue(const SymMatrix& a) { return eig_sym(a).values.front(); }

bool psd_check(const SymMatrix& a, double tol) {
    if (tol < 0.0) throw UsageError("psd_check: tolerance must be nonnegative");
    return min_eigenvalue(a) >= -tol;
}

} // namespace elliptope::numerics
