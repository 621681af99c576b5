#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "polymet/connection.hpp"
#include "polymet/generators.hpp"

namespace polymet {

// (L_X g)_{ij} = X^k d_k g_{ij} + g_{kj} d_i X^k + g_{ik} d_j X^k.
inline TensorField lie_derivative_metric(const TensorField& X, const MetricField& g,
                                         DiffScheme scheme = DiffScheme::Central4) {
    if (X.chart() != g.chart()) throw ChartMismatch("lie_derivative_metric");
    if (X.contravariant_rank() != 1 || X.covariant_rank() != 0)
        throw InvalidArgument("lie_derivative_metric expects a vector field");
    const Chart& chart = g.chart();
    const int n = chart.dim();
    const TensorField dg = gradient(g.components(), scheme);  // [m][i][j]
    const TensorField dX = gradient(X, scheme);               // [k][m] = d_m X^k
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    std::vector<double> out(chart.node_count() * n2, 0.0);
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const double* gm = g.node_matrix(node);
        const double* dgv = dg.data().data() + node * n2 * n;
        const double* dXv = dX.data().data() + node * n2;
        const double* Xv = X.data().data() + node * n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k)
                    acc += Xv[k] * dgv[(static_cast<std::size_t>(k) * n + i) * n + j] +
                           gm[k * n + j] * dXv[k * n + i] + gm[i * n + k] * dXv[k * n + j];
                out[node * n2 + i * n + j] = acc;
            }
    }
    return TensorField(chart, 0, 2, std::move(out), /*symmetric=*/true);
}

inline ScalarField metric_trace(const MetricField& g, const TensorField& h) {
    if (h.chart() != g.chart()) throw ChartMismatch("metric_trace");
    const int n = g.dim();
    const TensorField ginv = inverse_metric(g);
    std::vector<double> out(g.chart().node_count());
    for (std::size_t node = 0; node < g.chart().node_count(); ++node) {
        const double* gi = ginv.data().data() + node * n * n;
        const double* hv = h.data().data() + node * n * n;
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) acc += gi[i * n + j] * hv[i * n + j];
        out[node] = acc;
    }
    return ScalarField(g.chart(), std::move(out));
}

// (div_g h)_j = g^{ik} nabla_i h_{kj}; one covariant derivative then a trace.
inline TensorField metric_divergence(const MetricField& g, const TensorField& h,
                                     const ConnectionCoeffs& conn,
                                     DiffScheme scheme = DiffScheme::Central4) {
    const int n = g.dim();
    const TensorField ginv = inverse_metric(g);
    const TensorField nh = covariant_derivative(h, conn, scheme);  // [m][k][j]
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    std::vector<double> out(g.chart().node_count() * static_cast<std::size_t>(n));
    for (std::size_t node = 0; node < g.chart().node_count(); ++node) {
        const double* gi = ginv.data().data() + node * n2;
        const double* nhv = nh.data().data() + node * n2 * n;
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k)
                    acc += gi[i * n + k] * nhv[(static_cast<std::size_t>(i) * n + k) * n + j];
            out[node * n + j] = acc;
        }
    }
    return TensorField(g.chart(), 0, 1, std::move(out));
}

inline TensorField metric_divergence(const MetricField& g, const TensorField& h,
                                     DiffScheme scheme = DiffScheme::Central4) {
    return metric_divergence(g, h, christoffel(g, scheme), scheme);
}

// B_g(h) = div_g h - 1/2 d(tr_g h).
inline TensorField bianchi_operator(const MetricField& g, const TensorField& h,
                                    DiffScheme scheme = DiffScheme::Central4) {
    if (h.chart() != g.chart()) throw ChartMismatch("bianchi_operator");
    TensorField div = metric_divergence(g, h, scheme);
    const ScalarField tr = metric_trace(g, h);
    const int n = g.dim();
    for (int j = 0; j < n; ++j) {
        const ScalarField dtr = differentiate(tr, j, scheme);
        for (std::size_t node = 0; node < g.chart().node_count(); ++node)
            div.data()[node * n + j] -= 0.5 * dtr[node];
    }
    return div;
}

struct L2Pairing {
    double value = 0.0;
    std::vector<int> quadrature_resolution;
};

// <h1, h2>_g = integral of g^{ik} g^{jl} h1_{ij} h2_{kl} dvol_g.
inline L2Pairing l2_pairing(const MetricField& g, const TensorField& h1,
                            const TensorField& h2) {
    if (h1.chart() != g.chart() || h2.chart() != g.chart()) throw ChartMismatch("l2_pairing");
    const int n = g.dim();
    const TensorField ginv = inverse_metric(g);
    const ScalarField vol = volume_density(g);
    std::vector<double> dens(g.chart().node_count());
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    for (std::size_t node = 0; node < g.chart().node_count(); ++node) {
        const double* gi = ginv.data().data() + node * n2;
        const double* a = h1.data().data() + node * n2;
        const double* b = h2.data().data() + node * n2;
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        acc += gi[i * n + k] * gi[j * n + l] * a[i * n + j] * b[k * n + l];
        dens[node] = acc;
    }
    return L2Pairing{integrate(ScalarField(g.chart(), std::move(dens)), vol),
                     g.chart().resolution()};
}

inline double l2_norm(const MetricField& g, const TensorField& h) {
    return std::sqrt(std::max(0.0, l2_pairing(g, h, h).value));
}

// integral of <X, omega^sharp>_g dvol = integral of X^j omega_j dvol.
inline double vector_form_pairing(const MetricField& g, const TensorField& X,
                                  const TensorField& omega) {
    const int n = g.dim();
    const ScalarField vol = volume_density(g);
    std::vector<double> dens(g.chart().node_count());
    for (std::size_t node = 0; node < g.chart().node_count(); ++node) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += X.data()[node * n + j] * omega.data()[node * n + j];
        dens[node] = acc;
    }
    return integrate(ScalarField(g.chart(), std::move(dens)), vol);
}

struct AdjointIdentityRecord {
    double lie_pairing;      // <L_X g, h>_g
    double div_pairing;      // int <X, (div_g h)^sharp>
    double bianchi_pairing;  // int <X, B_g(h)^sharp>
    double residual;         // |lie + 2 div| / scale
};

// The literally-true integration-by-parts statement on a closed chart is
// <L_X g, h> = -2 int <X, div_g h>; the Bianchi pairing (extra trace term) is
// reported alongside for comparison.
inline AdjointIdentityRecord adjoint_identity_residual(const MetricField& g,
                                                       const TensorField& X,
                                                       const TensorField& h,
                                                       DiffScheme scheme = DiffScheme::Spectral) {
    if (!g.chart().fully_periodic())
        throw NonPeriodicChart("adjoint identity needs a boundary-free chart");
    const TensorField lxg = lie_derivative_metric(X, g, scheme);
    const double lie = l2_pairing(g, lxg, h).value;
    const TensorField div = metric_divergence(g, h, scheme);
    const double divp = vector_form_pairing(g, X, div);
    const TensorField bi = bianchi_operator(g, h, scheme);
    const double bip = vector_form_pairing(g, X, bi);
    const double scale = std::max(l2_norm(g, lxg) * l2_norm(g, h), 1e-300);
    return AdjointIdentityRecord{lie, divp, bip, std::abs(lie + 2.0 * divp) / scale};
}

struct ConformalVariationRecord {
    ScalarField fd_scal_rate;
    ScalarField formula_scal_rate;
    double fd_vol_rate;
    double formula_vol_rate;
    double max_residual;   // sup |fd - formula| for the scalar-curvature rate
    double vol_residual;
};

// d/dt Scal(e^{2ut} g)|_0 = -2(n-1) Lap_g u - 2 u Scal(g);
// d/dt vol(e^{2ut} g)|_0 = n int u dvol_g. Centered differences at +-tau with
// one Richardson refinement at tau/2 when the residual misses the tolerance.
inline ConformalVariationRecord conformal_variation_check(
    const MetricField& g, const ScalarField& u, DiffScheme scheme = DiffScheme::Central4,
    double tau = 1e-4, double tolerance = 1e-4) {
    if (u.chart() != g.chart()) throw ChartMismatch("conformal_variation_check");
    const Chart& chart = g.chart();
    const int n = chart.dim();

    const CurvatureData cd = curvature(g, scheme);
    const ScalarField lap = laplace_beltrami(g, u, scheme);
    std::vector<double> formula(chart.node_count());
    for (std::size_t i = 0; i < chart.node_count(); ++i)
        formula[i] = -2.0 * (n - 1) * lap[i] - 2.0 * u[i] * cd.scalar[i];
    ScalarField formula_field(chart, std::move(formula));

    const auto fd_at = [&](double step) {
        ScalarField up = step * ScalarField(u);
        ScalarField un = (-step) * ScalarField(u);
        const ScalarField sp = curvature(conformal_scale(g, up), scheme).scalar;
        const ScalarField sn = curvature(conformal_scale(g, un), scheme).scalar;
        return (1.0 / (2.0 * step)) * (sp - sn);
    };
    ScalarField fd = fd_at(tau);
    double resid = (fd - formula_field).sup_norm();
    if (resid > tolerance) {
        // Richardson: centered difference has an O(tau^2) term
        const ScalarField fd_half = fd_at(0.5 * tau);
        fd = (1.0 / 3.0) * (4.0 * ScalarField(fd_half) - fd);
        resid = (fd - formula_field).sup_norm();
    }

    const ScalarField vol = volume_density(g);
    const double formula_vol = n * integrate(u, vol);
    const double volp = integrate(ScalarField::constant(chart, 1.0),
                                  volume_density(conformal_scale(g, tau * ScalarField(u))));
    const double voln = integrate(ScalarField::constant(chart, 1.0),
                                  volume_density(conformal_scale(g, -tau * ScalarField(u))));
    const double fd_vol = (volp - voln) / (2.0 * tau);

    return ConformalVariationRecord{std::move(fd),       std::move(formula_field),
                                    fd_vol,              formula_vol,
                                    resid,               std::abs(fd_vol - formula_vol)};
}

struct VolumeVariationRecord {
    double fd_rate;
    double formula_rate;
    double residual;
};

// D vol_g[h] = 1/2 int tr_g h dvol_g; the finite-difference step is kept
// inside the stability radius so g + tau h stays in the declared cone.
inline VolumeVariationRecord volume_first_variation(const MetricField& g, const TensorField& h,
                                                    double tau = 1e-4) {
    if (h.chart() != g.chart()) throw ChartMismatch("volume_first_variation");
    const ScalarField vol = volume_density(g);
    const double formula = 0.5 * integrate(metric_trace(g, h), vol);

    double h_op = 0.0;
    const int n = g.dim();
    for (std::size_t node = 0; node < g.chart().node_count(); ++node)
        h_op = std::max(h_op, smallmat::sym_op_norm(h.data().data() + node * n * n, n));
    if (h_op > 0.0) tau = std::min(tau, 0.45 * stability_radius(g) / h_op);

    const auto vol_at = [&](double t) {
        TensorField comps = g.components() + t * TensorField(h);
        TensorField sym(g.chart(), 0, 2, comps.data(), true);
        MetricField gt(std::move(sym), g.declared_inertia(), g.eig_tolerance());
        return integrate(ScalarField::constant(g.chart(), 1.0), volume_density(gt));
    };
    double fd;
    try {
        fd = (vol_at(tau) - vol_at(-tau)) / (2.0 * tau);
    } catch (const InertiaMismatch& e) {
        throw SignatureLost(std::string("finite-difference step left the cone: ") + e.what());
    }
    return VolumeVariationRecord{fd, formula, std::abs(fd - formula)};
}

// --- slice decomposition -----------------------------------------------------

struct SliceDecomposition {
    TensorField vector_part;   // X
    TensorField divfree_part;  // k = h - L_X g
    double residual;           // sup |h - L_X g - k|
    double orthogonality_defect;  // <L_X g, k> / (|L_X g| |k|)
    double div_defect;            // sup |div_g k|
    int iterations;
};

namespace detail_slice {

// Discrete adjoint of X -> L_X g under the unweighted nodal pairing on a
// fully periodic chart (the derivative matrices are antisymmetric there):
// (A^T y)_k = dg[k,i,j] y_ij - 2 d_i (g_{kj} y_ij).
inline TensorField lie_adjoint(const MetricField& g, const TensorField& dg,
                               const TensorField& y, DiffScheme scheme) {
    const Chart& chart = g.chart();
    const int n = chart.dim();
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    std::vector<double> out(chart.node_count() * static_cast<std::size_t>(n), 0.0);
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const double* dgv = dg.data().data() + node * n2 * n;
        const double* yv = y.data().data() + node * n2;
        for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    acc += dgv[(static_cast<std::size_t>(k) * n + i) * n + j] * yv[i * n + j];
            out[node * n + k] = acc;
        }
    }
    // - 2 d_i (g_{kj} y_ij): assemble the flux F^k_i then differentiate
    std::vector<double> flux(chart.node_count() * n2);
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const double* gm = g.node_matrix(node);
        const double* yv = y.data().data() + node * n2;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += gm[k * n + j] * yv[i * n + j];
                flux[node * n2 + k * n + i] = acc;
            }
    }
    TensorField fluxf(chart, 1, 1, std::move(flux));  // F^k_i
    for (int i = 0; i < n; ++i) {
        const TensorField dflux = differentiate(fluxf, i, scheme);
        for (std::size_t node = 0; node < chart.node_count(); ++node)
            for (int k = 0; k < n; ++k)
                out[node * n + k] -= 2.0 * dflux.data()[node * n2 + k * n + i];
    }
    return TensorField(chart, 1, 0, std::move(out));
}

// Quadrature-plus-metric weight on symmetric 2-tensors:
// (W y)_ij = w sqrt(g) g^{ia} g^{jb} y_ab.
inline TensorField apply_weight(const MetricField& g, const TensorField& ginv,
                                const ScalarField& vol, const TensorField& y) {
    const Chart& chart = g.chart();
    const int n = chart.dim();
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    const double w = chart.quadrature_weight(std::vector<int>(chart.dim(), 1));
    std::vector<double> out(chart.node_count() * n2);
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const double* gi = ginv.data().data() + node * n2;
        const double* yv = y.data().data() + node * n2;
        const double f = w * vol[node];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        acc += gi[i * n + a] * gi[j * n + b] * yv[a * n + b];
                out[node * n2 + i * n + j] = f * acc;
            }
    }
    return TensorField(chart, 0, 2, std::move(out));
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace detail_slice

// L^2(g) least-squares projection of h onto the orbit tangent {L_X g}:
// min_X |h - L_X g|^2 by conjugate gradients on the normal equations.
// Grid translations that are exact Killing fields (constant fields on a
// translation-invariant metric) are removed by mean-zero projection.
inline SliceDecomposition slice_decompose(const MetricField& g, const TensorField& h,
                                          DiffScheme scheme = DiffScheme::Spectral,
                                          double rel_tol = 1e-10) {
    if (!g.chart().fully_periodic())
        throw NonPeriodicChart("slice_decompose needs a fully periodic chart");
    if (h.chart() != g.chart()) throw ChartMismatch("slice_decompose");
    const Chart& chart = g.chart();
    const int n = chart.dim();
    const std::size_t nodes = chart.node_count();
    const std::size_t dof = nodes * static_cast<std::size_t>(n);

    const TensorField dg = gradient(g.components(), scheme);
    const TensorField ginv = inverse_metric(g);
    const ScalarField vol = volume_density(g);

    const auto applyA = [&](const std::vector<double>& x) {
        return lie_derivative_metric(TensorField(chart, 1, 0, x), g, scheme);
    };
    const auto applyNormal = [&](const std::vector<double>& x) {
        const TensorField ax = applyA(x);
        const TensorField wax = detail_slice::apply_weight(g, ginv, vol, ax);
        return detail_slice::lie_adjoint(g, dg, wax, scheme).data();
    };

    // detect exact constant Killing directions
    std::vector<bool> kill(n, false);
    {
        const double dg_scale = dg.sup_norm() + g.components().sup_norm();
        for (int k = 0; k < n; ++k) {
            std::vector<double> ck(dof, 0.0);
            for (std::size_t node = 0; node < nodes; ++node) ck[node * n + k] = 1.0;
            kill[k] = applyA(ck).sup_norm() < 1e-12 * dg_scale;
        }
    }
    const auto project = [&](std::vector<double>& x) {
        for (int k = 0; k < n; ++k) {
            if (!kill[k]) continue;
            double mean = 0.0;
            for (std::size_t node = 0; node < nodes; ++node) mean += x[node * n + k];
            mean /= static_cast<double>(nodes);
            for (std::size_t node = 0; node < nodes; ++node) x[node * n + k] -= mean;
        }
    };

    const TensorField wh = detail_slice::apply_weight(g, ginv, vol, h);
    std::vector<double> b = detail_slice::lie_adjoint(g, dg, wh, scheme).data();
    project(b);

    std::vector<double> x(dof, 0.0), r(b), p(b);
    double rs = detail_slice::dot(r, r);
    const double b_norm = std::sqrt(detail_slice::dot(b, b));
    // roundoff floor: a right-hand side at this scale means h is already
    // orthogonal to the orbit and X = 0 is the answer
    const double op_scale =
        (1.0 + dg.sup_norm() + g.components().sup_norm()) * (1.0 + h.sup_norm());
    const double floor = 1e-12 * op_scale * std::sqrt(static_cast<double>(dof));
    const long max_iter = 10 * static_cast<long>(dof);
    int iter = 0;
    if (b_norm > floor) {
        const double stop = std::max(rel_tol * b_norm, floor);
        for (; iter < max_iter; ++iter) {
            if (std::sqrt(rs) <= stop) break;
            std::vector<double> ap = applyNormal(p);
            project(ap);
            const double alpha = rs / detail_slice::dot(p, ap);
            for (std::size_t i = 0; i < dof; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            const double rs_new = detail_slice::dot(r, r);
            for (std::size_t i = 0; i < dof; ++i) p[i] = r[i] + (rs_new / rs) * p[i];
            rs = rs_new;
        }
        if (std::sqrt(rs) > stop * 10.0)
            throw SolverNonconvergence("slice_decompose: CG did not reach tolerance");
        project(x);
    }

    TensorField X(chart, 1, 0, x);
    TensorField lxg = lie_derivative_metric(X, g, scheme);
    TensorField k = TensorField(h) - lxg;
    TensorField ksym(chart, 0, 2, k.data(), true);

    const double nl = l2_norm(g, lxg), nk = l2_norm(g, ksym);
    const double ortho =
        std::abs(l2_pairing(g, lxg, ksym).value) / std::max(nl * nk, 1e-300);
    const double divd = metric_divergence(g, ksym, scheme).sup_norm();
    const double resid = (TensorField(h) - lxg - ksym).sup_norm();
    return SliceDecomposition{std::move(X), std::move(ksym), resid, ortho, divd, iter};
}

// Componentwise product slice: one shared X against every component pair
// (g_i, h_i); the normal operator is the sum of the component forms.
struct PolySliceDecomposition {
    TensorField vector_part;
    std::vector<TensorField> divfree_parts;
    // normalized sum of component pairings <L_X g_i, k_i>_{g_i}; the joint
    // least-squares optimality makes the sum vanish, not each term
    double orthogonality_defect;
    int iterations;
};

inline PolySliceDecomposition slice_decompose_poly(const Polymetric& G,
                                                   const std::vector<TensorField>& hs,
                                                   DiffScheme scheme = DiffScheme::Spectral,
                                                   double rel_tol = 1e-10) {
    if (!G.chart().fully_periodic())
        throw NonPeriodicChart("slice_decompose_poly needs a fully periodic chart");
    if (hs.size() != G.size()) throw InvalidArgument("slice_decompose_poly: count mismatch");
    const Chart& chart = G.chart();
    const int n = chart.dim();
    const std::size_t nodes = chart.node_count();
    const std::size_t dof = nodes * static_cast<std::size_t>(n);

    std::vector<TensorField> dgs, ginvs;
    std::vector<ScalarField> vols;
    for (std::size_t c = 0; c < G.size(); ++c) {
        dgs.push_back(gradient(G.component(c).components(), scheme));
        ginvs.push_back(inverse_metric(G.component(c)));
        vols.push_back(volume_density(G.component(c)));
    }
    const auto applyNormal = [&](const std::vector<double>& x) {
        std::vector<double> acc(dof, 0.0);
        for (std::size_t c = 0; c < G.size(); ++c) {
            const TensorField ax =
                lie_derivative_metric(TensorField(chart, 1, 0, x), G.component(c), scheme);
            const TensorField wax =
                detail_slice::apply_weight(G.component(c), ginvs[c], vols[c], ax);
            const auto at = detail_slice::lie_adjoint(G.component(c), dgs[c], wax, scheme).data();
            for (std::size_t i = 0; i < dof; ++i) acc[i] += at[i];
        }
        return acc;
    };

    std::vector<double> b(dof, 0.0);
    for (std::size_t c = 0; c < G.size(); ++c) {
        const TensorField wh =
            detail_slice::apply_weight(G.component(c), ginvs[c], vols[c], hs[c]);
        const auto at = detail_slice::lie_adjoint(G.component(c), dgs[c], wh, scheme).data();
        for (std::size_t i = 0; i < dof; ++i) b[i] += at[i];
    }

    std::vector<bool> kill(n, false);
    for (int k = 0; k < n; ++k) {
        std::vector<double> ck(dof, 0.0);
        for (std::size_t node = 0; node < nodes; ++node) ck[node * n + k] = 1.0;
        double worst = 0.0, scale = 0.0;
        for (std::size_t c = 0; c < G.size(); ++c) {
            worst = std::max(
                worst,
                lie_derivative_metric(TensorField(chart, 1, 0, ck), G.component(c), scheme)
                    .sup_norm());
            scale += dgs[c].sup_norm() + G.component(c).components().sup_norm();
        }
        kill[k] = worst < 1e-12 * scale;
    }
    const auto project = [&](std::vector<double>& x) {
        for (int k = 0; k < n; ++k) {
            if (!kill[k]) continue;
            double mean = 0.0;
            for (std::size_t node = 0; node < nodes; ++node) mean += x[node * n + k];
            mean /= static_cast<double>(nodes);
            for (std::size_t node = 0; node < nodes; ++node) x[node * n + k] -= mean;
        }
    };
    project(b);

    std::vector<double> x(dof, 0.0), r(b), p(b);
    double rs = detail_slice::dot(r, r);
    const double b_norm = std::sqrt(rs);
    int iter = 0;
    if (b_norm > 0.0) {
        const long max_iter = 10 * static_cast<long>(dof);
        for (; iter < max_iter; ++iter) {
            if (std::sqrt(rs) <= rel_tol * b_norm) break;
            std::vector<double> ap = applyNormal(p);
            project(ap);
            const double alpha = rs / detail_slice::dot(p, ap);
            for (std::size_t i = 0; i < dof; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            const double rs_new = detail_slice::dot(r, r);
            for (std::size_t i = 0; i < dof; ++i) p[i] = r[i] + (rs_new / rs) * p[i];
            rs = rs_new;
        }
        if (std::sqrt(rs) > rel_tol * b_norm * 10.0)
            throw SolverNonconvergence("slice_decompose_poly: CG did not reach tolerance");
        project(x);
    }

    TensorField X(chart, 1, 0, x);
    PolySliceDecomposition out{X, {}, 0.0, iter};
    double pairing_sum = 0.0, scale = 0.0;
    for (std::size_t c = 0; c < G.size(); ++c) {
        TensorField lxg = lie_derivative_metric(X, G.component(c), scheme);
        TensorField k = TensorField(hs[c]) - lxg;
        TensorField ksym(chart, 0, 2, k.data(), true);
        pairing_sum += l2_pairing(G.component(c), lxg, ksym).value;
        scale += l2_norm(G.component(c), lxg) * l2_norm(G.component(c), ksym);
        out.divfree_parts.push_back(std::move(ksym));
    }
    out.orthogonality_defect = std::abs(pairing_sum) / std::max(scale, 1e-300);
    return out;
}

}  // namespace polymet
