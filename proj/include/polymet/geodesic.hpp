#pragma once

#include <cmath>
#include <vector>

#include "polymet/connection.hpp"

namespace polymet {

struct GeodesicState {
    std::vector<double> position;
    std::vector<double> velocity;
    double time = 0.0;
};

// Exception payload for trajectories leaving a bounded chart: carries the
// last state strictly inside the chart.
class OutsideChart : public Error {
public:
    OutsideChart(const std::string& msg, GeodesicState last)
        : Error("OutsideChart: " + msg), last_state(std::move(last)) {}
    GeodesicState last_state;
};

namespace detail_geo {

inline bool inside(const Chart& chart, const std::vector<double>& x) {
    for (int a = 0; a < chart.dim(); ++a) {
        if (chart.periodic(a)) continue;
        if (x[a] < chart.lo(a) || x[a] > chart.hi(a)) return false;
    }
    return true;
}

inline void wrap(const Chart& chart, std::vector<double>& x) {
    for (int a = 0; a < chart.dim(); ++a) {
        if (!chart.periodic(a)) continue;
        const double len = chart.length(a);
        x[a] -= std::floor((x[a] - chart.lo(a)) / len) * len;
    }
}

}  // namespace detail_geo

// Geodesic spray with connection coefficients interpolated multilinearly from
// the precomputed grid: a^k = -Gamma^k_{ij}(x) v^i v^j.
inline std::vector<double> spray(const ConnectionCoeffs& conn, const GeodesicState& state) {
    const Chart& chart = conn.chart();
    const int n = chart.dim();
    std::vector<double> x = state.position;
    detail_geo::wrap(chart, x);
    if (!detail_geo::inside(chart, x))
        throw OutsideChart("spray evaluated outside the chart", state);
    const std::size_t n3 = detail::ipow(static_cast<std::size_t>(n), 3);
    std::vector<double> gam(n3);
    interpolate_components(chart, conn.data(), n3, x, gam.data());
    std::vector<double> a(n, 0.0);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                acc -= gam[(static_cast<std::size_t>(k) * n + i) * n + j] *
                       state.velocity[i] * state.velocity[j];
        a[k] = acc;
    }
    return a;
}

inline std::vector<double> spray(const MetricField& g, const GeodesicState& state,
                                 DiffScheme scheme = DiffScheme::Central4) {
    return spray(christoffel(g, scheme), state);
}

// g-speed at a point (metric interpolated multilinearly).
inline double speed(const MetricField& g, const GeodesicState& state) {
    const Chart& chart = g.chart();
    const int n = chart.dim();
    std::vector<double> x = state.position;
    detail_geo::wrap(chart, x);
    std::vector<double> gm(static_cast<std::size_t>(n) * n);
    interpolate_components(chart, g.components().data(), gm.size(), x, gm.data());
    double q = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q += gm[i * n + j] * state.velocity[i] * state.velocity[j];
    return std::sqrt(std::max(q, 0.0));
}

struct GeodesicResult {
    GeodesicState state;
    double speed_drift;  // max |speed(t) - speed(0)| along the trajectory
    std::vector<GeodesicState> trajectory;  // filled when requested
};

// Classic fixed-step RK4 on the first-order system (x, v). Fixed step keeps
// test values reproducible across implementations.
inline GeodesicResult exp_map(const MetricField& g, const ConnectionCoeffs& conn,
                              std::vector<double> x0, std::vector<double> v0, double t_end,
                              double dt, bool record_trajectory = false,
                              double drift_tolerance = 1e-5) {
    const Chart& chart = g.chart();
    const int n = chart.dim();
    if (static_cast<int>(x0.size()) != n || static_cast<int>(v0.size()) != n)
        throw InvalidArgument("exp_map: state dimension mismatch");
    if (dt <= 0.0) throw InvalidArgument("exp_map: dt must be positive");

    GeodesicState s{x0, v0, 0.0};
    detail_geo::wrap(chart, s.position);
    if (!detail_geo::inside(chart, s.position))
        throw OutsideChart("initial position outside chart", s);
    const double v_ref = speed(g, s);
    double drift = 0.0;
    GeodesicResult out{s, 0.0, {}};
    if (record_trajectory) out.trajectory.push_back(s);

    const auto rhs = [&](const GeodesicState& st, std::vector<double>& dx,
                         std::vector<double>& dv) {
        dx = st.velocity;
        dv = spray(conn, st);
    };

    const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
    GeodesicState cur = s;
    for (long step = 0; step < steps; ++step) {
        const double h = std::min(dt, t_end - cur.time);
        GeodesicState tmp = cur;
        std::vector<double> k1x(n), k1v(n), k2x(n), k2v(n), k3x(n), k3v(n), k4x(n), k4v(n);
        try {
            rhs(cur, k1x, k1v);
            for (int i = 0; i < n; ++i) {
                tmp.position[i] = cur.position[i] + 0.5 * h * k1x[i];
                tmp.velocity[i] = cur.velocity[i] + 0.5 * h * k1v[i];
            }
            rhs(tmp, k2x, k2v);
            for (int i = 0; i < n; ++i) {
                tmp.position[i] = cur.position[i] + 0.5 * h * k2x[i];
                tmp.velocity[i] = cur.velocity[i] + 0.5 * h * k2v[i];
            }
            rhs(tmp, k3x, k3v);
            for (int i = 0; i < n; ++i) {
                tmp.position[i] = cur.position[i] + h * k3x[i];
                tmp.velocity[i] = cur.velocity[i] + h * k3v[i];
            }
            rhs(tmp, k4x, k4v);
        } catch (const OutsideChart&) {
            throw OutsideChart("trajectory left the chart", cur);
        }
        for (int i = 0; i < n; ++i) {
            cur.position[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            cur.velocity[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        cur.time += h;
        detail_geo::wrap(chart, cur.position);
        if (!detail_geo::inside(chart, cur.position))
            throw OutsideChart("trajectory left the chart", out.state);
        out.state = cur;
        if (record_trajectory) out.trajectory.push_back(cur);
        if (v_ref > 0.0) {
            drift = std::max(drift, std::abs(speed(g, cur) - v_ref));
            if (drift / v_ref > drift_tolerance)
                throw StepTooLarge("geodesic energy drift exceeded tolerance; reduce dt");
        }
    }
    out.speed_drift = drift;
    return out;
}

inline GeodesicResult exp_map(const MetricField& g, std::vector<double> x0,
                              std::vector<double> v0, double t_end, double dt,
                              DiffScheme scheme = DiffScheme::Central4,
                              bool record_trajectory = false) {
    return exp_map(g, christoffel(g, scheme), std::move(x0), std::move(v0), t_end, dt,
                   record_trajectory);
}

struct ExpDependenceRecord {
    std::vector<double> parameters;
    std::vector<std::vector<double>> endpoints;
    double max_successive_displacement;
    double lipschitz_estimate;  // max displacement / parameter increment
};

// Endpoint of exp^{g_s}(x, t v) sampled along the convex path g_s between two
// metrics; reports the largest successive displacement and the empirical
// Lipschitz constant in s.
inline ExpDependenceRecord exp_dependence(const MetricField& g0, const MetricField& g1,
                                          std::vector<double> x, std::vector<double> v,
                                          double t_end, int samples, double dt = 1e-3,
                                          DiffScheme scheme = DiffScheme::Central4) {
    if (samples < 1) throw InvalidArgument("exp_dependence: need at least one sample");
    ExpDependenceRecord rec{{}, {}, 0.0, 0.0};
    const Chart& chart = g0.chart();
    const int n = chart.dim();
    for (int k = 0; k <= samples; ++k) {
        const double s = static_cast<double>(k) / samples;
        const MetricField gs = convex_path(g0, g1, s);
        auto res = exp_map(gs, x, v, t_end, dt, scheme);
        rec.parameters.push_back(s);
        rec.endpoints.push_back(res.state.position);
    }
    for (std::size_t k = 1; k < rec.endpoints.size(); ++k) {
        double d2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double di = rec.endpoints[k][i] - rec.endpoints[k - 1][i];
            if (chart.periodic(i)) {
                const double len = chart.length(i);
                di -= std::round(di / len) * len;
            }
            d2 += di * di;
        }
        rec.max_successive_displacement = std::max(rec.max_successive_displacement, std::sqrt(d2));
    }
    rec.lipschitz_estimate = rec.max_successive_displacement * samples;
    return rec;
}

}  // namespace polymet
