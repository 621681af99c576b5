#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "polymet/fields.hpp"

namespace polymet {

enum class DiffScheme { Central2, Central4, Spectral };

inline const char* to_string(DiffScheme s) {
    switch (s) {
        case DiffScheme::Central2: return "central2";
        case DiffScheme::Central4: return "central4";
        case DiffScheme::Spectral: return "spectral";
    }
    return "?";
}

namespace detail {

// Dense trigonometric differentiation matrix on a periodic axis.
// Exact for trigonometric polynomials up to the resolvable band; antisymmetric,
// so summation by parts holds with no boundary term.
inline std::vector<double> spectral_matrix(int n, double length) {
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    const double scale = 2.0 * M_PI / length;
    const bool even = (n % 2 == 0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            const int m = j - k;
            const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
            const double arg = M_PI * m / n;
            const double v = even ? 0.5 * sgn / std::tan(arg) : 0.5 * sgn / std::sin(arg);
            d[static_cast<std::size_t>(j) * n + k] = scale * v;
        }
    return d;
}

struct LineView {
    const double* src;
    double* dst;
    std::size_t stride;
    int n;
    double get(int k) const { return src[static_cast<std::size_t>(k) * stride]; }
    void set(int k, double v) const { dst[static_cast<std::size_t>(k) * stride] = v; }
    int wrap(int k) const {
        k %= n;
        return k < 0 ? k + n : k;
    }
};

inline void diff_line_central2(const LineView& L, double h, bool periodic) {
    const double inv = 1.0 / (2.0 * h);
    if (periodic) {
        for (int k = 0; k < L.n; ++k)
            L.set(k, (L.get(L.wrap(k + 1)) - L.get(L.wrap(k - 1))) * inv);
        return;
    }
    L.set(0, (-3.0 * L.get(0) + 4.0 * L.get(1) - L.get(2)) * inv);
    for (int k = 1; k < L.n - 1; ++k) L.set(k, (L.get(k + 1) - L.get(k - 1)) * inv);
    L.set(L.n - 1, (3.0 * L.get(L.n - 1) - 4.0 * L.get(L.n - 2) + L.get(L.n - 3)) * inv);
}

inline void diff_line_central4(const LineView& L, double h, bool periodic) {
    const double inv = 1.0 / (12.0 * h);
    if (periodic) {
        for (int k = 0; k < L.n; ++k)
            L.set(k, (-L.get(L.wrap(k + 2)) + 8.0 * L.get(L.wrap(k + 1)) -
                      8.0 * L.get(L.wrap(k - 1)) + L.get(L.wrap(k - 2))) *
                         inv);
        return;
    }
    const int n = L.n;
    L.set(0, (-25.0 * L.get(0) + 48.0 * L.get(1) - 36.0 * L.get(2) + 16.0 * L.get(3) -
              3.0 * L.get(4)) *
                 inv);
    L.set(1, (-3.0 * L.get(0) - 10.0 * L.get(1) + 18.0 * L.get(2) - 6.0 * L.get(3) +
              L.get(4)) *
                 inv);
    for (int k = 2; k < n - 2; ++k)
        L.set(k, (-L.get(k + 2) + 8.0 * L.get(k + 1) - 8.0 * L.get(k - 1) + L.get(k - 2)) * inv);
    L.set(n - 2, (3.0 * L.get(n - 1) + 10.0 * L.get(n - 2) - 18.0 * L.get(n - 3) +
                  6.0 * L.get(n - 4) - L.get(n - 5)) *
                     inv);
    L.set(n - 1, (25.0 * L.get(n - 1) - 48.0 * L.get(n - 2) + 36.0 * L.get(n - 3) -
                  16.0 * L.get(n - 4) + 3.0 * L.get(n - 5)) *
                     inv);
}

inline void diff_line_spectral(const LineView& L, const std::vector<double>& mat) {
    const int n = L.n;
    std::vector<double> tmp(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) tmp[k] = L.get(k);
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        const double* row = mat.data() + static_cast<std::size_t>(j) * n;
        for (int k = 0; k < n; ++k) acc += row[k] * tmp[k];
        L.set(j, acc);
    }
}

// Applies the 1-D derivative along `axis` to every (line, component) of a
// node-major array with `comps` entries per node.
inline void differentiate_axis(const Chart& chart, const double* src, double* dst,
                               std::size_t comps, int axis, DiffScheme scheme) {
    if (axis < 0 || axis >= chart.dim()) throw InvalidArgument("axis out of range");
    const int n = chart.resolution(axis);
    if (n < 8)
        throw ResolutionTooSmall("axis " + std::to_string(axis) +
                                 " has resolution < 8 but is differentiated");
    const bool periodic = chart.periodic(axis);
    if (scheme == DiffScheme::Spectral && !periodic)
        throw SchemeUnsupported("spectral differentiation on a non-periodic axis");

    std::vector<double> smat;
    if (scheme == DiffScheme::Spectral) smat = spectral_matrix(n, chart.length(axis));

    const std::size_t node_stride = chart.stride(axis);
    const std::size_t total = chart.node_count();
    const std::size_t block = node_stride * static_cast<std::size_t>(n);
    // Enumerate line starts: flat node indices whose component along `axis` is 0.
    for (std::size_t base = 0; base < total; base += block) {
        for (std::size_t off = 0; off < node_stride; ++off) {
            const std::size_t start = base + off;
            for (std::size_t c = 0; c < comps; ++c) {
                LineView L{src + start * comps + c, dst + start * comps + c,
                           node_stride * comps, n};
                switch (scheme) {
                    case DiffScheme::Central2:
                        diff_line_central2(L, chart.spacing(axis), periodic);
                        break;
                    case DiffScheme::Central4:
                        diff_line_central4(L, chart.spacing(axis), periodic);
                        break;
                    case DiffScheme::Spectral:
                        diff_line_spectral(L, smat);
                        break;
                }
            }
        }
    }
}

}  // namespace detail

// Sampled partial derivative along one axis; same shape as the input.
inline ScalarField differentiate(const ScalarField& f, int axis,
                                 DiffScheme scheme = DiffScheme::Central4) {
    std::vector<double> out(f.size());
    detail::differentiate_axis(f.chart(), f.values().data(), out.data(), 1, axis, scheme);
    return ScalarField(f.chart(), std::move(out));
}

inline TensorField differentiate(const TensorField& t, int axis,
                                 DiffScheme scheme = DiffScheme::Central4) {
    std::vector<double> out(t.data().size());
    detail::differentiate_axis(t.chart(), t.data().data(), out.data(),
                               t.components_per_node(), axis, scheme);
    return TensorField(t.chart(), t.contravariant_rank(), t.covariant_rank(), std::move(out));
}

// Full coordinate gradient: stacks the axis derivatives into one new covariant
// slot placed first in the covariant block, out^{a..}_{m b..} = d_m t^{a..}_{b..}.
inline TensorField gradient(const TensorField& t, DiffScheme scheme = DiffScheme::Central4) {
    const Chart& chart = t.chart();
    const int n = chart.dim();
    const std::size_t comps = t.components_per_node();
    const std::size_t cov_block = detail::ipow(static_cast<std::size_t>(n), t.covariant_rank());
    const std::size_t contra_block = comps / cov_block;
    std::vector<double> out(chart.node_count() * comps * static_cast<std::size_t>(n));
    std::vector<double> d(t.data().size());
    const std::size_t out_comps = comps * static_cast<std::size_t>(n);
    for (int m = 0; m < n; ++m) {
        detail::differentiate_axis(chart, t.data().data(), d.data(), comps, m, scheme);
        for (std::size_t node = 0; node < chart.node_count(); ++node)
            for (std::size_t a = 0; a < contra_block; ++a)
                for (std::size_t b = 0; b < cov_block; ++b) {
                    const std::size_t src = node * comps + a * cov_block + b;
                    const std::size_t dst =
                        node * out_comps + (a * n + static_cast<std::size_t>(m)) * cov_block + b;
                    out[dst] = d[src];
                }
    }
    return TensorField(chart, t.contravariant_rank(), t.covariant_rank() + 1, std::move(out));
}

inline TensorField gradient(const ScalarField& f, DiffScheme scheme = DiffScheme::Central4) {
    return gradient(TensorField(f.chart(), 0, 0, f.values()), scheme);
}

// Quadrature: sum of f*weight*cellvolume with trapezoid end-weights on
// bounded axes and uniform weights on periodic ones.
inline double integrate(const ScalarField& f, const ScalarField& weight) {
    f.require_same_chart(weight);
    const Chart& chart = f.chart();
    for (std::size_t i = 0; i < weight.size(); ++i)
        if (weight[i] < 0.0) throw InvalidArgument("integration weight must be nonnegative");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        acc += f[i] * weight[i] * chart.quadrature_weight(chart.multi_index(i));
    return acc;
}

inline double integrate(const ScalarField& f) {
    return integrate(f, ScalarField::constant(f.chart(), 1.0));
}

}  // namespace polymet
