#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "polymet/linalg.hpp"
#include "polymet/errors.hpp"

namespace polymet {

// Minimum-volume enclosing ellipsoid certificate: unit ball {x : x^T Q x <= 1}
// contains the sampled body, and the ball shrunk by bilipschitz_factor fits
// inside its convex hull. John's theorem bounds the factor by sqrt(n) for
// centrally symmetric bodies.
struct EllipsoidCertificate {
    int dim = 0;
    std::vector<double> matrix;  // row-major n*n, symmetric positive definite
    double bilipschitz_factor = 1.0;

    void validate(double tol = 1e-4) const {
        JacobiEigen eig(matrix.data(), dim);
        for (int i = 0; i < dim; ++i)
            if (eig.eigenvalue(i) <= 0.0)
                throw DegenerateBody("certificate matrix not positive definite");
        if (bilipschitz_factor > std::sqrt(static_cast<double>(dim)) + tol)
            throw DegenerateBody("bilipschitz factor exceeds sqrt(n)");
    }
};

namespace detail_john {

// Inradius of the symmetric convex hull of 2-D points (distance from the
// origin to the nearest hull edge). Monotone-chain hull.
inline double hull_inradius_2d(std::vector<std::array<double, 2>> pts) {
    std::sort(pts.begin(), pts.end());
    // collapse near-duplicates; cross products between coincident points are
    // pure roundoff and corrupt the chain
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max({scale, std::abs(p[0]), std::abs(p[1])});
    const double tol = 1e-9 * std::max(scale, 1e-300);
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [tol](const std::array<double, 2>& a, const std::array<double, 2>& b) {
                              return std::abs(a[0] - b[0]) <= tol &&
                                     std::abs(a[1] - b[1]) <= tol;
                          }),
              pts.end());
    const auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                          const std::array<double, 2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    const std::size_t m = pts.size();
    std::vector<std::array<double, 2>> hull(2 * m);
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = m - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    double r = 1e300;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        const double dx = b[0] - a[0], dy = b[1] - a[1];
        const double len = std::hypot(dx, dy);
        if (len == 0.0) continue;
        r = std::min(r, std::abs(a[0] * b[1] - a[1] * b[0]) / len);
    }
    return r;
}

// For n >= 3 the exact hull is not assembled; the inradius is lower-bounded by
// minimizing the support function over many deterministic directions.
inline double support_inradius(const std::vector<std::vector<double>>& pts, int n) {
    double r = 1e300;
    const int samples = 4096;
    std::uint64_t s = 0x2545F4914F6CDD1Dull;
    const auto next = [&s]() {
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        return s * 0x2545F4914F6CDD1Dull;
    };
    std::vector<double> d(n);
    for (int it = 0; it < samples; ++it) {
        double norm = 0.0;
        for (int i = 0; i < n; ++i) {
            const double u1 = static_cast<double>(next() >> 11) * 0x1.0p-53;
            const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
            d[i] = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300))) *
                   std::cos(2.0 * M_PI * u2);
            norm += d[i] * d[i];
        }
        norm = std::sqrt(norm);
        double h = 0.0;
        for (const auto& p : pts) {
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += p[i] * d[i];
            h = std::max(h, dot / norm);
        }
        r = std::min(r, h);
    }
    return r;
}

}  // namespace detail_john

// Khachiyan's barycentric coordinate-ascent for the centered minimum-volume
// enclosing ellipsoid of a symmetric sample cloud. Relative duality gap 1e-7.
inline EllipsoidCertificate john_metric(const std::vector<std::vector<double>>& norm_samples,
                                        double gap_tol = 1e-7) {
    if (norm_samples.empty()) throw EmptySamples("john_metric: no samples");
    const int n = static_cast<int>(norm_samples[0].size());
    if (static_cast<int>(norm_samples.size()) < 2 * n)
        throw InvalidArgument("john_metric: need at least 2n samples");

    // central symmetrization: each p contributes -p (same M(u), doubled list
    // only matters for the hull factor below)
    std::vector<std::vector<double>> pts;
    pts.reserve(2 * norm_samples.size());
    for (const auto& p : norm_samples) {
        if (static_cast<int>(p.size()) != n)
            throw InvalidArgument("john_metric: inconsistent sample dimension");
        pts.push_back(p);
        std::vector<double> q(p);
        for (double& x : q) x = -x;
        pts.push_back(std::move(q));
    }
    const std::size_t m = norm_samples.size();

    // span check
    {
        std::vector<double> gram(static_cast<std::size_t>(n) * n, 0.0);
        for (const auto& p : norm_samples)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) gram[i * n + j] += p[i] * p[j];
        JacobiEigen eig(gram.data(), n);
        double mx = 0.0, mn = 1e300;
        for (int i = 0; i < n; ++i) {
            mx = std::max(mx, std::abs(eig.eigenvalue(i)));
            mn = std::min(mn, std::abs(eig.eigenvalue(i)));
        }
        if (mx == 0.0 || mn < 1e-12 * mx)
            throw DegenerateBody("samples span fewer than n dimensions");
    }

    // Khachiyan coordinate ascent with Wolfe-Atwood away steps (linear local
    // convergence, unlike plain add-steps). Maintains Minv and the leverages
    // w_i = p_i^T Minv p_i incrementally, refreshing periodically.
    std::vector<double> u(m, 1.0 / static_cast<double>(m));
    std::vector<double> M(static_cast<std::size_t>(n) * n), Minv(M.size());
    std::vector<double> w(m), v(n), s(m);
    const auto refresh = [&] {
        std::fill(M.begin(), M.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& p = norm_samples[i];
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) M[r * n + c] += u[i] * p[r] * p[c];
        }
        smallmat::sym_inverse(M.data(), n, Minv.data());
        for (std::size_t i = 0; i < m; ++i) {
            const auto& p = norm_samples[i];
            double acc = 0.0;
            for (int r = 0; r < n; ++r) {
                double t = 0.0;
                for (int c = 0; c < n; ++c) t += Minv[r * n + c] * p[c];
                acc += p[r] * t;
            }
            w[i] = acc;
        }
    };
    refresh();
    const long max_iter = 1000000;
    for (long iter = 0;; ++iter) {
        double plus = 0.0, minus = 1e300;
        std::size_t arg_plus = 0, arg_minus = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (w[i] > plus) {
                plus = w[i];
                arg_plus = i;
            }
            if (u[i] > 0.0 && w[i] < minus) {
                minus = w[i];
                arg_minus = i;
            }
        }
        if (plus <= n * (1.0 + gap_tol)) break;
        if (iter >= max_iter)
            throw SolverNonconvergence("john_metric: Khachiyan iteration cap reached");

        std::size_t k;
        double lambda;
        if (plus - n >= n - minus) {
            k = arg_plus;
            lambda = (plus - n) / (n * (plus - 1.0));
        } else {
            k = arg_minus;
            lambda = (minus - n) / (n * (minus - 1.0));  // negative: away step
            lambda = std::max(lambda, -u[k] / (1.0 - u[k]));
        }
        const auto& pk = norm_samples[k];
        // rank-one update of Minv and the leverages (Sherman-Morrison on
        // M_new = (1-lambda) M + lambda pk pk^T)
        for (int r = 0; r < n; ++r) {
            double t = 0.0;
            for (int c = 0; c < n; ++c) t += Minv[r * n + c] * pk[c];
            v[r] = t;
        }
        const double wk = w[k];
        const double denom = 1.0 - lambda + lambda * wk;
        for (std::size_t i = 0; i < m; ++i) {
            const auto& p = norm_samples[i];
            double dot = 0.0;
            for (int r = 0; r < n; ++r) dot += p[r] * v[r];
            s[i] = dot;
        }
        const double f = 1.0 / (1.0 - lambda);
        for (std::size_t i = 0; i < m; ++i)
            w[i] = f * (w[i] - lambda * s[i] * s[i] / denom);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                Minv[r * n + c] = f * (Minv[r * n + c] - lambda * v[r] * v[c] / denom);
        for (double& x : u) x *= (1.0 - lambda);
        u[k] += lambda;
        if ((iter & 0xFFF) == 0xFFF) refresh();
    }
    refresh();  // final Minv from the converged weights

    // Q = Minv / n, then rescaled so the farthest sample touches the ball.
    std::vector<double> Q(Minv);
    for (double& x : Q) x /= n;
    double worst = 0.0;
    for (const auto& p : norm_samples) {
        double w = 0.0;
        for (int r = 0; r < n; ++r) {
            double t = 0.0;
            for (int c = 0; c < n; ++c) t += Q[r * n + c] * p[c];
            w += p[r] * t;
        }
        worst = std::max(worst, w);
    }
    for (double& x : Q) x /= worst;

    // hull factor in the Q-metric: map by Q^{1/2} and find the inradius
    JacobiEigen qe(Q.data(), n, /*want_vectors=*/true);
    std::vector<double> qhalf(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k)
                acc += qe.vector(i, k) * qe.vector(j, k) * std::sqrt(qe.eigenvalue(k));
            qhalf[i * n + j] = acc;
        }
    double inr;
    if (n == 2) {
        std::vector<std::array<double, 2>> mapped;
        mapped.reserve(pts.size());
        for (const auto& p : pts)
            mapped.push_back({qhalf[0] * p[0] + qhalf[1] * p[1],
                              qhalf[2] * p[0] + qhalf[3] * p[1]});
        inr = detail_john::hull_inradius_2d(std::move(mapped));
    } else {
        std::vector<std::vector<double>> mapped(pts.size(), std::vector<double>(n));
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (int r = 0; r < n; ++r) {
                double acc = 0.0;
                for (int c = 0; c < n; ++c) acc += qhalf[r * n + c] * pts[i][c];
                mapped[i][r] = acc;
            }
        inr = detail_john::support_inradius(mapped, n);
    }

    EllipsoidCertificate cert;
    cert.dim = n;
    cert.matrix = std::move(Q);
    cert.bilipschitz_factor = 1.0 / inr;
    cert.validate();
    return cert;
}

}  // namespace polymet
