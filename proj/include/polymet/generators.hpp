#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "polymet/metric.hpp"
#include "polymet/rng.hpp"

namespace polymet {

// Named geometries used across the suites. All metrics carry eigenvalue
// inertia validated at construction.

inline MetricField euclidean_metric(const Chart& chart) {
    const int n = chart.dim();
    return MetricField(sample_sym2(chart,
                                   [n](const std::vector<double>&) {
                                       std::vector<double> m(n * n, 0.0);
                                       for (int i = 0; i < n; ++i) m[i * n + i] = 1.0;
                                       return m;
                                   }),
                       riemannian_inertia(n));
}

inline MetricField diagonal_metric(const Chart& chart, std::vector<double> diag) {
    const int n = chart.dim();
    Inertia in;
    for (double d : diag) (d > 0 ? in.positive : in.negative)++;
    return MetricField(sample_sym2(chart,
                                   [n, diag](const std::vector<double>&) {
                                       std::vector<double> m(n * n, 0.0);
                                       for (int i = 0; i < n; ++i) m[i * n + i] = diag[i];
                                       return m;
                                   }),
                       in);
}

// Conformally flat torus metric (1 + eps sin x sin y) * delta.
inline MetricField bumpy_torus_metric(const Chart& chart, double eps) {
    const int n = chart.dim();
    return MetricField(sample_sym2(chart,
                                   [n, eps](const std::vector<double>& x) {
                                       const double f = 1.0 + eps * std::sin(x[0]) *
                                                                  std::sin(x.size() > 1 ? x[1] : x[0]);
                                       std::vector<double> m(n * n, 0.0);
                                       for (int i = 0; i < n; ++i) m[i * n + i] = f;
                                       return m;
                                   }),
                       riemannian_inertia(n));
}

// Round unit sphere in polar coordinates (theta, phi): diag(1, sin^2 theta).
inline MetricField sphere_metric(const Chart& chart) {
    return MetricField(sample_sym2(chart,
                                   [](const std::vector<double>& x) {
                                       const double s = std::sin(x[0]);
                                       return std::vector<double>{1.0, 0.0, 0.0, s * s};
                                   }),
                       riemannian_inertia(2));
}

// Flat plane in polar coordinates (r, theta): diag(1, r^2).
inline MetricField polar_plane_metric(const Chart& chart) {
    return MetricField(sample_sym2(chart,
                                   [](const std::vector<double>& x) {
                                       return std::vector<double>{1.0, 0.0, 0.0, x[0] * x[0]};
                                   }),
                       riemannian_inertia(2));
}

// Poincare upper half-plane (dx^2 + dy^2)/y^2 on a strip with y > 0.
inline MetricField hyperbolic_halfplane_metric(const Chart& chart) {
    return MetricField(sample_sym2(chart,
                                   [](const std::vector<double>& x) {
                                       const double w = 1.0 / (x[1] * x[1]);
                                       return std::vector<double>{w, 0.0, 0.0, w};
                                   }),
                       riemannian_inertia(2));
}

// Warped half-cylinder dt^2 + e^{2at} dtheta^2 on (t, theta).
inline MetricField warped_cylinder_metric(const Chart& chart, double a) {
    return MetricField(sample_sym2(chart,
                                   [a](const std::vector<double>& x) {
                                       const double w = std::exp(2.0 * a * x[0]);
                                       return std::vector<double>{1.0, 0.0, 0.0, w};
                                   }),
                       riemannian_inertia(2));
}

// Product-end cylinder dt^2 + (1 + eps sin t) dtheta^2.
inline MetricField product_end_metric(const Chart& chart, double eps) {
    return MetricField(sample_sym2(chart,
                                   [eps](const std::vector<double>& x) {
                                       const double w = 1.0 + eps * std::sin(x[0]);
                                       return std::vector<double>{1.0, 0.0, 0.0, w};
                                   }),
                       riemannian_inertia(2));
}

namespace detail_gen {

// Enumerates nonzero integer modes in [-band, band]^dim whose first nonzero
// entry is positive (one representative per +-pair).
inline std::vector<std::vector<int>> half_modes(int dim, int band) {
    std::vector<std::vector<int>> modes;
    std::vector<int> cur(dim, -band);
    for (;;) {
        int first_nonzero = 0;
        for (int a = 0; a < dim; ++a)
            if (cur[a] != 0) {
                first_nonzero = cur[a];
                break;
            }
        if (first_nonzero > 0) modes.push_back(cur);
        int a = dim - 1;
        while (a >= 0 && cur[a] == band) cur[a--] = -band;
        if (a < 0) break;
        ++cur[a];
    }
    return modes;
}

}  // namespace detail_gen

// Random band-limited trigonometric polynomial on a fully periodic chart.
inline ScalarField random_bandlimited_scalar(const Chart& chart, CounterRng& rng, int band,
                                             double amplitude, bool zero_mean = true) {
    if (!chart.fully_periodic())
        throw NonPeriodicChart("band-limited generator needs a fully periodic chart");
    const int n = chart.dim();
    const auto modes = detail_gen::half_modes(n, band);
    std::vector<double> a(modes.size()), b(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m) {
        a[m] = amplitude * rng.uniform(-1.0, 1.0);
        b[m] = amplitude * rng.uniform(-1.0, 1.0);
    }
    const double c0 = zero_mean ? 0.0 : amplitude * rng.uniform(-1.0, 1.0);
    std::vector<double> k(n);
    for (int i = 0; i < n; ++i) k[i] = 2.0 * M_PI / chart.length(i);
    return ScalarField::sample(chart, [&, c0](const std::vector<double>& x) {
        double v = c0;
        for (std::size_t m = 0; m < modes.size(); ++m) {
            double phase = 0.0;
            for (int i = 0; i < n; ++i) phase += modes[m][i] * k[i] * x[i];
            v += a[m] * std::cos(phase) + b[m] * std::sin(phase);
        }
        return v;
    });
}

inline TensorField random_bandlimited_vector(const Chart& chart, CounterRng& rng, int band,
                                             double amplitude) {
    const int n = chart.dim();
    std::vector<ScalarField> comps;
    comps.reserve(n);
    for (int i = 0; i < n; ++i)
        comps.push_back(random_bandlimited_scalar(chart, rng, band, amplitude, false));
    std::vector<double> data(chart.node_count() * static_cast<std::size_t>(n));
    for (std::size_t node = 0; node < chart.node_count(); ++node)
        for (int i = 0; i < n; ++i) data[node * n + i] = comps[i][node];
    return TensorField(chart, 1, 0, std::move(data));
}

inline TensorField random_bandlimited_sym2(const Chart& chart, CounterRng& rng, int band,
                                           double amplitude) {
    const int n = chart.dim();
    std::vector<std::vector<ScalarField>> comp(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            comp[i].push_back(random_bandlimited_scalar(chart, rng, band, amplitude, false));
    std::vector<double> data(chart.node_count() * static_cast<std::size_t>(n) * n);
    for (std::size_t node = 0; node < chart.node_count(); ++node)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double v = comp[i][j - i][node];
                data[node * n * n + i * n + j] = v;
                data[node * n * n + j * n + i] = v;
            }
    return TensorField(chart, 0, 2, std::move(data), /*symmetric=*/true);
}

// Random positive-definite metric: band-limited symmetric field shifted so the
// smallest nodewise eigenvalue is at least `margin`.
inline MetricField random_pd_metric(const Chart& chart, CounterRng& rng, int band = 2,
                                    double amplitude = 0.4, double margin = 0.5) {
    const int n = chart.dim();
    TensorField b = random_bandlimited_sym2(chart, rng, band, amplitude);
    double min_eig = 1e300;
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        JacobiEigen eig(b.data().data() + node * n * n, n);
        for (int i = 0; i < n; ++i) min_eig = std::min(min_eig, eig.eigenvalue(i));
    }
    const double shift = margin - std::min(min_eig, 0.0);
    for (std::size_t node = 0; node < chart.node_count(); ++node)
        for (int i = 0; i < n; ++i) b.data()[node * n * n + i * n + i] += shift;
    return MetricField(TensorField(chart, 0, 2, b.data(), true), riemannian_inertia(n));
}

// Conformal rescale e^{2u} g.
inline MetricField conformal_scale(const MetricField& g, const ScalarField& u) {
    if (g.chart() != u.chart()) throw ChartMismatch("conformal_scale");
    const int n = g.dim();
    std::vector<double> data(g.components().data());
    for (std::size_t node = 0; node < g.chart().node_count(); ++node) {
        const double f = std::exp(2.0 * u[node]);
        for (int c = 0; c < n * n; ++c) data[node * n * n + c] *= f;
    }
    return MetricField(TensorField(g.chart(), 0, 2, std::move(data), true),
                       g.declared_inertia(), g.eig_tolerance());
}

inline MetricField scale_metric(const MetricField& g, double factor) {
    std::vector<double> data(g.components().data());
    for (double& x : data) x *= factor;
    Inertia in = g.declared_inertia();
    if (factor < 0.0) std::swap(in.positive, in.negative);
    return MetricField(TensorField(g.chart(), 0, 2, std::move(data), true), in,
                       g.eig_tolerance());
}

}  // namespace polymet
