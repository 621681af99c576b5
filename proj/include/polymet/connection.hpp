#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "polymet/differentiate.hpp"
#include "polymet/metric.hpp"

namespace polymet {

// Nodewise inverse metric, computed through the symmetric eigendecomposition
// so near-degenerate pseudo-metrics fail loudly instead of silently.
inline TensorField inverse_metric(const MetricField& g) {
    const int n = g.dim();
    std::vector<double> inv(g.chart().node_count() * static_cast<std::size_t>(n) * n);
    for (std::size_t node = 0; node < g.chart().node_count(); ++node)
        smallmat::sym_inverse(g.node_matrix(node), n, inv.data() + node * n * n);
    return TensorField(g.chart(), 2, 0, std::move(inv));
}

// Levi-Civita connection coefficients Gamma^k_{ij}, node-major blocks of n^3
// laid out ((k*n)+i)*n+j. Torsion-free symmetry in (i,j) is exact by the
// Koszul assembly.
class ConnectionCoeffs {
public:
    ConnectionCoeffs(Chart chart, std::vector<double> gamma)
        : chart_(std::move(chart)), gamma_(std::move(gamma)) {
        const std::size_t n = static_cast<std::size_t>(chart_.dim());
        if (gamma_.size() != chart_.node_count() * n * n * n)
            throw InvalidArgument("connection coefficient array size mismatch");
    }

    const Chart& chart() const { return chart_; }
    const std::vector<double>& data() const { return gamma_; }

    double gamma(std::size_t node, int k, int i, int j) const {
        const int n = chart_.dim();
        return gamma_[(node * n + k) * static_cast<std::size_t>(n) * n + i * n + j];
    }

    const double* node_block(std::size_t node) const {
        const std::size_t n = static_cast<std::size_t>(chart_.dim());
        return gamma_.data() + node * n * n * n;
    }

private:
    Chart chart_;
    std::vector<double> gamma_;
};

inline ConnectionCoeffs christoffel(const MetricField& g,
                                    DiffScheme scheme = DiffScheme::Central4) {
    const Chart& chart = g.chart();
    const int n = chart.dim();
    const TensorField ginv = inverse_metric(g);
    const TensorField dg = gradient(g.components(), scheme);  // (m,i,j) -> d_m g_ij

    std::vector<double> gamma(chart.node_count() * detail::ipow(n, 3));
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const double* gi = ginv.data().data() + node * n2;
        const double* d = dg.data().data() + node * n2 * n;  // [m][i][j]
        double* out = gamma.data() + node * n2 * n;
        // d has layout [m][i][j] (derivative index outermost): d_m g_ij at
        // offset ((m*n)+i)*n+j
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    double acc = 0.0;
                    for (int l = 0; l < n; ++l)
                        acc += gi[k * n + l] *
                               (d[(static_cast<std::size_t>(i) * n + j) * n + l] +
                                d[(static_cast<std::size_t>(j) * n + i) * n + l] -
                                d[(static_cast<std::size_t>(l) * n + i) * n + j]);
                    acc *= 0.5;
                    out[(k * n + i) * n + j] = acc;
                    out[(k * n + j) * n + i] = acc;
                }
    }
    return ConnectionCoeffs(chart, std::move(gamma));
}

// Covariant derivative with the derivative index first in the covariant block:
// (nabla T)^{a..}_{m b..} = d_m T^{a..}_{b..} + Gamma^{a}_{mc} T^{c..}_{b..}
//                          - Gamma^{c}_{mb} T^{a..}_{c..}.
inline TensorField covariant_derivative(const TensorField& t, const ConnectionCoeffs& conn,
                                        DiffScheme scheme = DiffScheme::Central4) {
    if (t.chart() != conn.chart()) throw ChartMismatch("covariant_derivative");
    const Chart& chart = t.chart();
    const int n = chart.dim();
    const int r = t.contravariant_rank();
    const int s = t.covariant_rank();
    TensorField out = gradient(t, scheme);  // layout (a.., m, b..)

    const std::size_t in_comps = t.components_per_node();
    const std::size_t out_comps = out.components_per_node();
    const std::size_t cov_block = detail::ipow(static_cast<std::size_t>(n), s);
    std::vector<int> digits(r + s);
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const double* G = conn.node_block(node);
        const double* tv = t.data().data() + node * in_comps;
        double* ov = out.data().data() + node * out_comps;
        for (std::size_t comp = 0; comp < in_comps; ++comp) {
            std::size_t rem = comp;
            for (int d = r + s - 1; d >= 0; --d) {
                digits[d] = static_cast<int>(rem % n);
                rem /= n;
            }
            for (int m = 0; m < n; ++m) {
                // output offset for (a.., m, b..)
                std::size_t head = 0;
                for (int d = 0; d < r; ++d) head = head * n + digits[d];
                std::size_t tail = 0;
                for (int d = r; d < r + s; ++d) tail = tail * n + digits[d];
                const std::size_t oidx = (head * n + static_cast<std::size_t>(m)) * cov_block + tail;
                double corr = 0.0;
                // contravariant slots: + Gamma^{a_t}_{m c} T(..c..)
                for (int slot = 0; slot < r; ++slot) {
                    const int a = digits[slot];
                    const std::size_t stride =
                        detail::ipow(static_cast<std::size_t>(n), r + s - 1 - slot);
                    const std::size_t base = comp - static_cast<std::size_t>(a) * stride;
                    for (int c = 0; c < n; ++c)
                        corr += G[(a * n + m) * n + c] * tv[base + c * stride];
                }
                // covariant slots: - Gamma^{c}_{m b_t} T(..c..)
                for (int slot = r; slot < r + s; ++slot) {
                    const int b = digits[slot];
                    const std::size_t stride =
                        detail::ipow(static_cast<std::size_t>(n), r + s - 1 - slot);
                    const std::size_t base = comp - static_cast<std::size_t>(b) * stride;
                    for (int c = 0; c < n; ++c)
                        corr -= G[(c * n + m) * n + b] * tv[base + c * stride];
                }
                ov[oidx] += corr;
            }
        }
    }
    return out;
}

// Curvature package for one metric: Riemann (1,3), Ricci, scalar curvature,
// and the volume density sqrt|det g|.
struct CurvatureData {
    TensorField riemann;         // (node, l, i, j, k) for R^l_{ijk}
    TensorField ricci;           // symmetric (0,2)
    ScalarField scalar;
    ScalarField volume_density;
};

inline ScalarField volume_density(const MetricField& g) {
    const int n = g.dim();
    std::vector<double> v(g.chart().node_count());
    for (std::size_t node = 0; node < g.chart().node_count(); ++node)
        v[node] = std::sqrt(std::abs(smallmat::det(g.node_matrix(node), n)));
    return ScalarField(g.chart(), std::move(v));
}

inline CurvatureData curvature(const MetricField& g, DiffScheme scheme = DiffScheme::Central4) {
    const Chart& chart = g.chart();
    const int n = chart.dim();
    const ConnectionCoeffs conn = christoffel(g, scheme);
    const TensorField ginv = inverse_metric(g);

    // dGamma[(m, k, i, j)] = d_m Gamma^k_{ij}
    TensorField gamma_field(chart, 0, 3, conn.data());
    const TensorField dgamma = gradient(gamma_field, scheme);

    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    const std::size_t n3 = n2 * n;
    const std::size_t n4 = n3 * n;
    std::vector<double> riem(chart.node_count() * n4);
    std::vector<double> ric(chart.node_count() * n2, 0.0);
    std::vector<double> scal(chart.node_count(), 0.0);
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const double* G = conn.node_block(node);
        const double* dG = dgamma.data().data() + node * n4;  // [m][k][i][j]
        const double* gi = ginv.data().data() + node * n2;
        double* R = riem.data() + node * n4;
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double acc = dG[((static_cast<std::size_t>(j) * n + l) * n + i) * n + k] -
                                     dG[((static_cast<std::size_t>(k) * n + l) * n + i) * n + j];
                        for (int m = 0; m < n; ++m)
                            acc += G[(l * n + j) * n + m] * G[(m * n + i) * n + k] -
                                   G[(l * n + k) * n + m] * G[(m * n + i) * n + j];
                        R[((static_cast<std::size_t>(l) * n + i) * n + j) * n + k] = acc;
                    }
        double* Rc = ric.data() + node * n2;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k)
                    acc += R[((static_cast<std::size_t>(k) * n + i) * n + k) * n + j];
                Rc[i * n + j] = acc;
            }
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += gi[i * n + j] * Rc[i * n + j];
        scal[node] = s;
    }
    return CurvatureData{TensorField(chart, 1, 3, std::move(riem)),
                         TensorField(chart, 0, 2, std::move(ric), /*symmetric=*/true),
                         ScalarField(chart, std::move(scal)), volume_density(g)};
}

// Residuals of the structural curvature identities, all relative to the sup
// of the lowered tensor. Used by the suites as invariant checks.
struct CurvatureResiduals {
    double antisym_first_pair;
    double antisym_second_pair;
    double pair_swap;
    double first_bianchi;
    double ricci_contraction;
};

inline CurvatureResiduals curvature_residuals(const MetricField& g, const CurvatureData& cd) {
    const Chart& chart = g.chart();
    const int n = chart.dim();
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    const std::size_t n4 = n2 * n2;
    double scale = 0.0, a1 = 0.0, a2 = 0.0, sw = 0.0, b1 = 0.0, rc = 0.0;
    std::vector<double> low(n4);
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const double* gm = g.node_matrix(node);
        const double* R = cd.riemann.data().data() + node * n4;
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double acc = 0.0;
                        for (int m = 0; m < n; ++m)
                            acc += gm[l * n + m] *
                                   R[((static_cast<std::size_t>(m) * n + i) * n + j) * n + k];
                        low[((static_cast<std::size_t>(l) * n + i) * n + j) * n + k] = acc;
                    }
        for (std::size_t c = 0; c < n4; ++c) scale = std::max(scale, std::abs(low[c]));
        const auto L = [&](int l, int i, int j, int k) {
            return low[((static_cast<std::size_t>(l) * n + i) * n + j) * n + k];
        };
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        a1 = std::max(a1, std::abs(L(l, i, j, k) + L(i, l, j, k)));
                        a2 = std::max(a2, std::abs(L(l, i, j, k) + L(l, i, k, j)));
                        sw = std::max(sw, std::abs(L(l, i, j, k) - L(j, k, l, i)));
                    }
        const auto Ru = [&](int l, int i, int j, int k) {
            return R[((static_cast<std::size_t>(l) * n + i) * n + j) * n + k];
        };
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        b1 = std::max(b1,
                                      std::abs(Ru(l, i, j, k) + Ru(l, j, k, i) + Ru(l, k, i, j)));
        const double* Rc = cd.ricci.data().data() + node * n2;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) acc += Ru(k, i, k, j);
                rc = std::max(rc, std::abs(acc - Rc[i * n + j]));
            }
    }
    if (scale == 0.0) scale = 1.0;
    return CurvatureResiduals{a1 / scale, a2 / scale, sw / scale, b1 / scale, rc / scale};
}

// Beltrami Laplacian in divergence form, (1/sqrt g) d_i (sqrt g g^{ij} d_j u);
// on flat space this is the plain second-derivative sum, so sin -> -sin.
inline ScalarField laplace_beltrami(const MetricField& g, const ScalarField& u,
                                    DiffScheme scheme = DiffScheme::Central4) {
    if (g.chart() != u.chart()) throw ChartMismatch("laplace_beltrami");
    const Chart& chart = g.chart();
    const int n = chart.dim();
    const TensorField ginv = inverse_metric(g);
    const ScalarField vol = volume_density(g);
    std::vector<ScalarField> du;
    du.reserve(n);
    for (int j = 0; j < n; ++j) du.push_back(differentiate(u, j, scheme));
    ScalarField acc = ScalarField::constant(chart, 0.0);
    for (int i = 0; i < n; ++i) {
        std::vector<double> flux(chart.node_count());
        for (std::size_t node = 0; node < chart.node_count(); ++node) {
            double f = 0.0;
            for (int j = 0; j < n; ++j)
                f += ginv.data()[node * n * n + i * n + j] * du[j][node];
            flux[node] = vol[node] * f;
        }
        acc += differentiate(ScalarField(chart, std::move(flux)), i, scheme);
    }
    std::vector<double> out(chart.node_count());
    for (std::size_t node = 0; node < chart.node_count(); ++node)
        out[node] = acc[node] / vol[node];
    return ScalarField(chart, std::move(out));
}

// --- pullback ---------------------------------------------------------------

// A sampled smooth map between charts: target coordinates and Jacobian at
// every source node.
struct ChartMap {
    Chart source;
    Chart target;
    std::vector<double> values;    // (node, a): phi^a(x)
    std::vector<double> jacobian;  // (node, a, i): d phi^a / d x^i
};

inline ChartMap sample_map(
    const Chart& source, const Chart& target,
    const std::function<std::vector<double>(const std::vector<double>&)>& phi,
    const std::function<std::vector<double>(const std::vector<double>&)>& jac) {
    const int ns = source.dim(), nt = target.dim();
    ChartMap m{source, target, {}, {}};
    m.values.resize(source.node_count() * static_cast<std::size_t>(nt));
    m.jacobian.resize(source.node_count() * static_cast<std::size_t>(nt) * ns);
    for (std::size_t node = 0; node < source.node_count(); ++node) {
        const auto x = source.node_coords(node);
        const auto y = phi(x);
        const auto J = jac(x);
        std::copy(y.begin(), y.end(), m.values.begin() + node * nt);
        std::copy(J.begin(), J.end(), m.jacobian.begin() + node * nt * ns);
    }
    return m;
}

// Multilinear interpolation of a node-major component array at a chart point.
// Periodic axes wrap; leaving a bounded axis throws MapsOutsideChart.
inline void interpolate_components(const Chart& chart, const std::vector<double>& data,
                                   std::size_t comps, const std::vector<double>& x,
                                   double* out) {
    const int n = chart.dim();
    std::vector<int> base(n);
    std::vector<double> frac(n);
    for (int a = 0; a < n; ++a) {
        const double h = chart.spacing(a);
        double t = (x[a] - chart.lo(a)) / h;
        if (chart.periodic(a)) {
            const int res = chart.resolution(a);
            t -= std::floor(t / res) * res;
            base[a] = static_cast<int>(std::floor(t)) % res;
            frac[a] = t - std::floor(t);
        } else {
            const double eps = 1e-9;
            if (t < -eps || t > chart.resolution(a) - 1 + eps)
                throw MapsOutsideChart("interpolation point outside bounded axis");
            t = std::min(std::max(t, 0.0), static_cast<double>(chart.resolution(a) - 1));
            base[a] = std::min(static_cast<int>(std::floor(t)), chart.resolution(a) - 2);
            frac[a] = t - base[a];
        }
    }
    for (std::size_t c = 0; c < comps; ++c) out[c] = 0.0;
    const int corners = 1 << n;
    for (int mask = 0; mask < corners; ++mask) {
        double w = 1.0;
        std::size_t node = 0;
        for (int a = 0; a < n; ++a) {
            const bool up = mask & (1 << a);
            w *= up ? frac[a] : 1.0 - frac[a];
            const int k = chart.wrap_node(a, base[a] + (up ? 1 : 0));
            node += chart.stride(a) * static_cast<std::size_t>(k);
        }
        if (w == 0.0) continue;
        const double* blk = data.data() + node * comps;
        for (std::size_t c = 0; c < comps; ++c) out[c] += w * blk[c];
    }
}

// (phi^* g)_{ij}(x) = J^a_i J^b_j g_{ab}(phi(x)).
inline MetricField pullback_metric(const MetricField& g, const ChartMap& map) {
    if (g.chart() != map.target) throw ChartMismatch("pullback_metric: map target != metric chart");
    const int ns = map.source.dim();
    const int nt = map.target.dim();
    if (ns != nt) throw InvalidArgument("pullback_metric requires equal dimensions");
    const std::size_t n2 = static_cast<std::size_t>(nt) * nt;
    std::vector<double> out(map.source.node_count() * n2);
    std::vector<double> gval(n2);
    std::vector<double> y(nt);
    for (std::size_t node = 0; node < map.source.node_count(); ++node) {
        const double* J = map.jacobian.data() + node * n2;
        if (std::abs(smallmat::det(J, nt)) < 1e-12)
            throw SingularJacobian("pullback map has singular Jacobian at a node");
        for (int a = 0; a < nt; ++a) y[a] = map.values[node * nt + a];
        interpolate_components(map.target, g.components().data(), n2, y, gval.data());
        for (int i = 0; i < ns; ++i)
            for (int j = 0; j < ns; ++j) {
                double acc = 0.0;
                for (int a = 0; a < nt; ++a)
                    for (int b = 0; b < nt; ++b)
                        acc += J[a * ns + i] * J[b * ns + j] * gval[a * nt + b];
                out[node * n2 + i * ns + j] = acc;
            }
    }
    return MetricField(TensorField(map.source, 0, 2, std::move(out), /*symmetric=*/true),
                       g.declared_inertia(), g.eig_tolerance());
}

// --- bounded geometry --------------------------------------------------------

// Full g-contraction norm squared of a tensor: covariant slots paired with
// g^{-1}, contravariant slots with g.
inline double tensor_g_norm2_at(const TensorField& t, std::size_t node, const double* gmat,
                                const double* ginv) {
    const int n = t.chart().dim();
    const int r = t.contravariant_rank();
    const int s = t.covariant_rank();
    const std::size_t comps = t.components_per_node();
    const double* tv = t.data().data() + node * comps;
    std::vector<int> di(r + s), dj(r + s);
    double acc = 0.0;
    for (std::size_t ci = 0; ci < comps; ++ci) {
        std::size_t rem = ci;
        for (int d = r + s - 1; d >= 0; --d) {
            di[d] = static_cast<int>(rem % n);
            rem /= n;
        }
        for (std::size_t cj = 0; cj < comps; ++cj) {
            rem = cj;
            for (int d = r + s - 1; d >= 0; --d) {
                dj[d] = static_cast<int>(rem % n);
                rem /= n;
            }
            double w = 1.0;
            for (int d = 0; d < r; ++d) w *= gmat[di[d] * n + dj[d]];
            for (int d = r; d < r + s; ++d) w *= ginv[di[d] * n + dj[d]];
            acc += w * tv[ci] * tv[cj];
        }
    }
    return acc;
}

inline double sup_tensor_g_norm(const TensorField& t, const MetricField& g) {
    const TensorField ginv = inverse_metric(g);
    const int n = g.dim();
    double m = 0.0;
    for (std::size_t node = 0; node < g.chart().node_count(); ++node) {
        const double v = tensor_g_norm2_at(t, node, g.node_matrix(node),
                                           ginv.data().data() + node * n * n);
        m = std::max(m, std::abs(v));
    }
    return std::sqrt(m);
}

struct BoundedGeometryReport {
    std::vector<double> sup_norms;  // |Riem|, |nabla Riem|, ..., |nabla^m Riem|
};

inline BoundedGeometryReport bounded_geometry_report(const MetricField& g, int order,
                                                     DiffScheme scheme = DiffScheme::Central4) {
    if (order < 0 || order > 2)
        throw InvalidArgument("bounded_geometry_report supports derivative order <= 2");
    const CurvatureData cd = curvature(g, scheme);
    const ConnectionCoeffs conn = christoffel(g, scheme);
    const int n = g.dim();
    // lowered Riemann (0,4)
    const std::size_t n4 = detail::ipow(static_cast<std::size_t>(n), 4);
    std::vector<double> low(g.chart().node_count() * n4);
    for (std::size_t node = 0; node < g.chart().node_count(); ++node) {
        const double* gm = g.node_matrix(node);
        const double* R = cd.riemann.data().data() + node * n4;
        for (std::size_t c = 0; c < n4; ++c) {
            const int l = static_cast<int>(c / (n * n * n));
            const std::size_t rest = c % (static_cast<std::size_t>(n) * n * n);
            double acc = 0.0;
            for (int m = 0; m < n; ++m)
                acc += gm[l * n + m] * R[static_cast<std::size_t>(m) * n * n * n + rest];
            low[node * n4 + c] = acc;
        }
    }
    TensorField t(g.chart(), 0, 4, std::move(low));
    BoundedGeometryReport rep;
    rep.sup_norms.push_back(sup_tensor_g_norm(t, g));
    for (int k = 1; k <= order; ++k) {
        t = covariant_derivative(t, conn, scheme);
        rep.sup_norms.push_back(sup_tensor_g_norm(t, g));
    }
    return rep;
}

}  // namespace polymet
