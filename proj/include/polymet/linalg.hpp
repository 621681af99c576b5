#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "polymet/errors.hpp"

namespace polymet {

// Dense symmetric eigensolver for the small per-node matrices (n <= ~8):
// cyclic Jacobi rotations with a fixed sweep order, so results are
// deterministic across platforms. Eigenvalues unsorted unless requested.
class JacobiEigen {
public:
    // a: row-major n*n symmetric matrix. Vectors stored column-wise in v_.
    JacobiEigen(const double* a, int n, bool want_vectors = false) : n_(n) {
        m_.assign(a, a + static_cast<std::size_t>(n) * n);
        if (want_vectors) {
            v_.assign(static_cast<std::size_t>(n) * n, 0.0);
            for (int i = 0; i < n; ++i) v_[idx(i, i)] = 1.0;
        }
        sweep(want_vectors);
    }

    int n() const { return n_; }
    double eigenvalue(int i) const { return m_[idx(i, i)]; }
    std::vector<double> eigenvalues_sorted() const {
        std::vector<double> e(n_);
        for (int i = 0; i < n_; ++i) e[i] = m_[idx(i, i)];
        std::sort(e.begin(), e.end());
        return e;
    }
    // Column i of the accumulated rotation = eigenvector i.
    double vector(int row, int i) const { return v_[idx(row, i)]; }

private:
    std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * n_ + c; }

    void sweep(bool vecs) {
        const int max_sweeps = 64;
        for (int s = 0; s < max_sweeps; ++s) {
            double off = 0.0;
            for (int p = 0; p < n_; ++p)
                for (int q = p + 1; q < n_; ++q) off += m_[idx(p, q)] * m_[idx(p, q)];
            if (off < 1e-30 * (1.0 + frob2())) return;
            for (int p = 0; p < n_; ++p)
                for (int q = p + 1; q < n_; ++q) rotate(p, q, vecs);
        }
    }

    double frob2() const {
        double f = 0.0;
        for (double x : m_) f += x * x;
        return f;
    }

    void rotate(int p, int q, bool vecs) {
        const double apq = m_[idx(p, q)];
        if (apq == 0.0) return;
        const double app = m_[idx(p, p)], aqq = m_[idx(q, q)];
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n_; ++k) {
            const double akp = m_[idx(k, p)], akq = m_[idx(k, q)];
            m_[idx(k, p)] = c * akp - s * akq;
            m_[idx(k, q)] = s * akp + c * akq;
        }
        for (int k = 0; k < n_; ++k) {
            const double apk = m_[idx(p, k)], aqk = m_[idx(q, k)];
            m_[idx(p, k)] = c * apk - s * aqk;
            m_[idx(q, k)] = s * apk + c * aqk;
        }
        if (vecs)
            for (int k = 0; k < n_; ++k) {
                const double vkp = v_[idx(k, p)], vkq = v_[idx(k, q)];
                v_[idx(k, p)] = c * vkp - s * vkq;
                v_[idx(k, q)] = s * vkp + c * vkq;
            }
    }

    int n_;
    std::vector<double> m_;
    std::vector<double> v_;
};

namespace smallmat {

inline double max_abs(const double* a, int n) {
    double m = 0.0;
    for (int i = 0; i < n * n; ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

inline double asymmetry(const double* a, int n) {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            m = std::max(m, std::abs(a[i * n + j] - a[j * n + i]));
    return m;
}

// Inverse of a symmetric matrix through its eigendecomposition; throws
// SingularMetric when the spectrum reaches down to roundoff scale.
inline void sym_inverse(const double* a, int n, double* out,
                        double rel_tol = 1e-12) {
    JacobiEigen eig(a, n, /*want_vectors=*/true);
    double max_e = 0.0, min_e = 1e300;
    for (int i = 0; i < n; ++i) {
        max_e = std::max(max_e, std::abs(eig.eigenvalue(i)));
        min_e = std::min(min_e, std::abs(eig.eigenvalue(i)));
    }
    if (max_e == 0.0 || min_e <= rel_tol * max_e)
        throw SingularMetric("nodewise inversion failed: |lambda_min| <= tol*|lambda_max|");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k)
                acc += eig.vector(i, k) * eig.vector(j, k) / eig.eigenvalue(k);
            out[i * n + j] = acc;
        }
}

inline double det(const double* a, int n) {
    // LU with partial pivoting on a copy; n is tiny.
    std::vector<double> m(a, a + static_cast<std::size_t>(n) * n);
    double d = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
        if (m[piv * n + c] == 0.0) return 0.0;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(m[piv * n + k], m[c * n + k]);
            d = -d;
        }
        d *= m[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            const double f = m[r * n + c] / m[c * n + c];
            for (int k = c; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
        }
    }
    return d;
}

// Symmetric operator norm (largest |eigenvalue|).
inline double sym_op_norm(const double* a, int n) {
    JacobiEigen eig(a, n);
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(eig.eigenvalue(i)));
    return m;
}

}  // namespace smallmat

}  // namespace polymet
