#include "elliptope/subspace.hpp"

#include <cmath>

#include "elliptope/errors.hpp"

namespace elliptope::numerics {

Subspace Subspace::from_basis(Mat basis) {
    const int n = basis.rows();
    const int r = basis.cols();
    if (r > n) throw UsageError("Subspace: basis has more columns than ambient dimension");
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            double g = 0.0;
            for (int k = 0; k < n; ++k) g += basis(k, i) * basis(k, j);
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::fabs(g - want) > 1e-12)
                throw UsageError("Subspace: basis columns are not orthonormal within 1e-12");
        }
    return Subspace(n, r, std::move(basis));
}

Subspace Subspace::span_of(const Mat& columns, double drop_tol) {
    const int n = columns.rows();
    std::vector<std::vector<double>> kept;

    for (int j = 0; j < columns.cols(); ++j) {
        std::vector<double> v = columns.col(j);
        const double orig = norm2(v);
        if (orig == 0.0) continue;
        // MGS pass plus one reorthogonalization
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : kept) {
                const double c = dot(q, v);
                for (int i = 0; i < n; ++i) v[i] -= c * q[i];
            }
        const double rem = norm2(v);
        if (rem <= drop_tol * std::max(1.0, orig)) continue;
        for (double& x : v) x /= rem;
        kept.push_back(std::move(v));
    }

    Mat basis(n, int(kept.size()));
    for (int j = 0; j < int(kept.size()); ++j) basis.set_col(j, kept[j]);
    return Subspace(n, int(kept.size()), std::move(basis));
}

Subspace Subspace::zero(int n) { return Subspace(n, 0, Mat(n, 0)); }

Subspace Subspace::complement() const {
    if (r_ == 0) {
        Mat full = Mat::identity(n_);
        return Subspace(n_, n_, std::move(full));
    }
    if (r_ == n_) return Subspace::zero(n_);
    Mat q = qr_full_q(basis_);
    Mat comp(n_, n_ - r_);
    for (int j = r_; j < n_; ++j)
        for (int i = 0; i < n_; ++i) comp(i, j - r_) = q(i, j);
    return Subspace(n_, n_ - r_, std::move(comp));
}

std::vector<double> Subspace::project(const std::vector<double>& x) const {
    if (int(x.size()) != n_) throw UsageError("Subspace::project: dimension mismatch");
    std::vector<double> c = matvec_t(basis_, x);
    return matvec(basis_, c);
}

bool Subspace::same_as(const Subspace& other, double tol) const {
    if (other.n_ != n_) return false;
    const Mat pu = projector(*this).to_dense();
    const Mat pv = projector(other).to_dense();
    return frobenius(pu - pv) <= tol;
}

SymMatrix projector(const Subspace& u) {
    const Mat& b = u.basis();
    SymMatrix p(u.ambient_dim());
    for (int i = 0; i < u.ambient_dim(); ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < u.dim(); ++k) s += b(i, k) * b(j, k);
            p.set(i, j, s);
        }
    return p;
}

Subspace column_space(const SymMatrix& a, double rank_tol) {
    if (rank_tol <= 0.0 || rank_tol >= 1.0)
        throw UsageError("column_space: rank_tol must lie in (0, 1)");
    const EigResult eig = eig_sym(a);
    double maxabs = 0.0;
    for (double v : eig.values) maxabs = std::max(maxabs, std::fabs(v));
    if (maxabs == 0.0) return Subspace::zero(a.dim());

    std::vector<int> keep;
    for (int i = 0; i < a.dim(); ++i)
        if (std::fabs(eig.values[i]) > rank_tol * maxabs) keep.push_back(i);

    Mat basis(a.dim(), int(keep.size()));
    for (int j = 0; j < int(keep.size()); ++j)
        for (int i = 0; i < a.dim(); ++i) basis(i, j) = eig.vectors(i, keep[j]);
    return Subspace::from_basis(std::move(basis));
}

} // namespace elliptope::numerics
