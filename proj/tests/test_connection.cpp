#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "polymet/connection.hpp"
#include "polymet/gauge.hpp"

using namespace polymet;

TEST_CASE("christoffel symbols vanish for the Euclidean metric") {
    Chart c = torus_chart(16, 16);
    auto conn = christoffel(euclidean_metric(c));
    double m = 0.0;
    for (double x : conn.data()) m = std::max(m, std::abs(x));
    CHECK(m < 1e-13);
}

TEST_CASE("christoffel closed forms on the polar plane") {
    // g = dr^2 + r^2 dtheta^2: Gamma^r_tt = -r, Gamma^t_rt = 1/r
    Chart c = make_chart(2, {{0.5, 2.5}, {0.0, 2.0 * M_PI}}, {64, 64}, {false, true});
    auto g = polar_plane_metric(c);
    auto conn = christoffel(g);
    double err = 0.0;
    for (std::size_t node = 0; node < c.node_count(); ++node) {
        const double r = c.node_coords(node)[0];
        err = std::max(err, std::abs(conn.gamma(node, 0, 1, 1) + r));
        err = std::max(err, std::abs(conn.gamma(node, 1, 0, 1) - 1.0 / r));
        err = std::max(err, std::abs(conn.gamma(node, 0, 0, 0)));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("christoffel closed form on the truncated sphere chart") {
    // boundary stencils act on cot-type functions, so the pole cut is kept
    // a fixed distance from the singularity for pointwise closed-form checks
    Chart c = sphere_chart(513, 64, 0.4);
    auto g = sphere_metric(c);
    auto conn = christoffel(g);
    double err = 0.0;
    for (std::size_t node = 0; node < c.node_count(); ++node) {
        const double th = c.node_coords(node)[0];
        err = std::max(err,
                       std::abs(conn.gamma(node, 0, 1, 1) + std::sin(th) * std::cos(th)));
        err = std::max(err, std::abs(conn.gamma(node, 1, 0, 1) - std::cos(th) / std::sin(th)));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("torsion-free symmetry is exact") {
    Chart c = torus_chart(16, 16);
    CounterRng rng(11);
    auto g = random_pd_metric(c, rng);
    auto conn = christoffel(g, DiffScheme::Spectral);
    const int n = 2;
    for (std::size_t node = 0; node < c.node_count(); ++node)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    REQUIRE(conn.gamma(node, k, i, j) == conn.gamma(node, k, j, i));
}

TEST_CASE("scalar curvature golden values") {
    SECTION("flat torus is exactly flat") {
        auto cd = curvature(euclidean_metric(torus_chart(32, 32)));
        CHECK(cd.scalar.sup_norm() < 1e-10);
        for (std::size_t i = 0; i < cd.volume_density.size(); ++i)
            CHECK(cd.volume_density[i] == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("unit sphere has Scal = 2") {
        Chart c = sphere_chart(513, 64, 0.4);
        auto cd = curvature(sphere_metric(c));
        double err = 0.0;
        for (std::size_t i = 0; i < c.node_count(); ++i)
            err = std::max(err, std::abs(cd.scalar[i] - 2.0));
        CHECK(err < 1e-4);
    }
    SECTION("hyperbolic half-plane has Scal = -2") {
        Chart c = box_chart({{0.0, 1.0}, {1.0, 2.0}}, {9, 385});
        auto cd = curvature(hyperbolic_halfplane_metric(c));
        double err = 0.0;
        for (std::size_t i = 0; i < c.node_count(); ++i)
            err = std::max(err, std::abs(cd.scalar[i] + 2.0));
        CHECK(err < 1e-5);
    }
}

TEST_CASE("curvature tensor identities hold on suite metrics") {
    SECTION("sphere") {
        Chart c = sphere_chart(513, 64, 0.4);
        auto g = sphere_metric(c);
        auto res = curvature_residuals(g, curvature(g));
        CHECK(res.antisym_first_pair < 1e-6);
        CHECK(res.antisym_second_pair < 1e-6);
        CHECK(res.pair_swap < 1e-6);
        CHECK(res.first_bianchi < 1e-6);
        CHECK(res.ricci_contraction < 1e-10);
    }
    SECTION("bumpy torus") {
        Chart c = torus_chart(32, 32);
        auto g = bumpy_torus_metric(c, 0.3);
        auto res = curvature_residuals(g, curvature(g, DiffScheme::Spectral));
        CHECK(res.antisym_first_pair < 1e-6);
        CHECK(res.antisym_second_pair < 1e-6);
        CHECK(res.pair_swap < 1e-6);
        CHECK(res.first_bianchi < 1e-6);
        CHECK(res.ricci_contraction < 1e-10);
    }
}

TEST_CASE("metric compatibility: covariant derivative of g vanishes") {
    Chart c = torus_chart(32, 32);
    auto g = bumpy_torus_metric(c, 0.3);
    auto conn = christoffel(g, DiffScheme::Spectral);
    auto nabla_g = covariant_derivative(g.components(), conn, DiffScheme::Spectral);
    CHECK(nabla_g.sup_norm() < 1e-6 * g.components().sup_norm());
}

TEST_CASE("contracted second Bianchi identity") {
    // |div_g Ric - 1/2 d Scal| small in sup norm
    Chart c = torus_chart(32, 32);
    auto g = bumpy_torus_metric(c, 0.3);
    auto cd = curvature(g, DiffScheme::Spectral);
    auto div_ric = metric_divergence(g, cd.ricci, DiffScheme::Spectral);
    double err = 0.0;
    const int n = 2;
    for (int j = 0; j < n; ++j) {
        auto ds = differentiate(cd.scalar, j, DiffScheme::Spectral);
        for (std::size_t node = 0; node < c.node_count(); ++node)
            err = std::max(err, std::abs(div_ric.data()[node * n + j] - 0.5 * ds[node]));
    }
    CHECK(err < 1e-4);
}

TEST_CASE("pullback by the identity returns the metric") {
    Chart c = torus_chart(16, 16);
    auto g = bumpy_torus_metric(c, 0.2);
    auto id = sample_map(
        c, c, [](const std::vector<double>& x) { return x; },
        [](const std::vector<double>&) { return std::vector<double>{1, 0, 0, 1}; });
    auto back = pullback_metric(g, id);
    CHECK((back.components() - g.components()).sup_norm() < 1e-12);
}

TEST_CASE("pullback of the Euclidean metric by a dilation") {
    Chart src = box_chart({{0.0, 1.0}, {0.0, 1.0}}, {17, 17});
    Chart dst = box_chart({{0.0, 3.0}, {0.0, 3.0}}, {17, 17});
    auto g = euclidean_metric(dst);
    const double lam = 3.0;
    auto phi = sample_map(
        src, dst,
        [lam](const std::vector<double>& x) {
            return std::vector<double>{lam * x[0], lam * x[1]};
        },
        [lam](const std::vector<double>&) {
            return std::vector<double>{lam, 0, 0, lam};
        });
    auto back = pullback_metric(g, phi);
    for (std::size_t node = 0; node < src.node_count(); ++node) {
        CHECK(back.node_matrix(node)[0] == Catch::Approx(9.0).margin(1e-12));
        CHECK(back.node_matrix(node)[3] == Catch::Approx(9.0).margin(1e-12));
        CHECK(std::abs(back.node_matrix(node)[1]) < 1e-12);
    }
}

TEST_CASE("curvature is natural under torus translations") {
    // Scal(phi^* g)(x) = Scal(g)(phi(x)) for a node-aligned translation
    Chart c = torus_chart(32, 32);
    auto g = bumpy_torus_metric(c, 0.3);
    const double shift = 5.0 * c.spacing(0);
    auto phi = sample_map(
        c, c,
        [&](const std::vector<double>& x) {
            return std::vector<double>{x[0] + shift, x[1]};
        },
        [](const std::vector<double>&) { return std::vector<double>{1, 0, 0, 1}; });
    auto back = pullback_metric(g, phi);
    auto scal_back = curvature(back, DiffScheme::Spectral).scalar;
    auto scal = curvature(g, DiffScheme::Spectral).scalar;
    double err = 0.0;
    for (std::size_t node = 0; node < c.node_count(); ++node) {
        auto m = c.multi_index(node);
        m[0] = (m[0] + 5) % c.resolution(0);
        err = std::max(err, std::abs(scal_back[node] - scal[c.flat_index(m)]));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("pullback rejects singular Jacobians and exterior images") {
    Chart c = box_chart({{0.0, 1.0}, {0.0, 1.0}}, {9, 9});
    auto g = euclidean_metric(c);
    auto collapse = sample_map(
        c, c, [](const std::vector<double>& x) { return std::vector<double>{x[0], x[0]}; },
        [](const std::vector<double>&) { return std::vector<double>{1, 0, 1, 0}; });
    CHECK_THROWS_AS(pullback_metric(g, collapse), SingularJacobian);
    auto escape = sample_map(
        c, c,
        [](const std::vector<double>& x) { return std::vector<double>{x[0] + 2.0, x[1]}; },
        [](const std::vector<double>&) { return std::vector<double>{1, 0, 0, 1}; });
    CHECK_THROWS_AS(pullback_metric(g, escape), MapsOutsideChart);
}

TEST_CASE("bounded geometry report") {
    SECTION("flat torus: everything vanishes") {
        auto rep = bounded_geometry_report(euclidean_metric(torus_chart(16, 16)), 2);
        REQUIRE(rep.sup_norms.size() == 3);
        for (double v : rep.sup_norms) CHECK(v < 1e-10);
    }
    SECTION("unit sphere: |Riem| = 2 for constant curvature 1 in 2d") {
        // closed form: |Riem|^2 = 4 K^2 with K = 1; nabla Riem vanishes for
        // constant curvature, with boundary stencil noise shrinking ~ h^3
        auto coarse = bounded_geometry_report(sphere_metric(sphere_chart(257, 64, 0.4)), 1);
        CHECK(coarse.sup_norms[0] == Catch::Approx(2.0).margin(1e-3));
        auto fine = bounded_geometry_report(sphere_metric(sphere_chart(513, 64, 0.4)), 1);
        CHECK(fine.sup_norms[1] < 0.3 * coarse.sup_norms[1]);
        CHECK(fine.sup_norms[1] < 5e-3);
    }
    SECTION("warped half-cylinder: |Riem| = 2a^2 for K = -a^2") {
        // closed form: K = -f''/f = -a^2 for f = e^{at}, so |Riem| = 2a^2
        const double a = 0.5;
        Chart c = make_chart(2, {{0.0, 4.0}, {0.0, 2.0 * M_PI}}, {129, 16}, {false, true});
        auto rep = bounded_geometry_report(warped_cylinder_metric(c, a), 0);
        CHECK(rep.sup_norms[0] == Catch::Approx(2.0 * a * a).margin(1e-4));
    }
    CHECK_THROWS_AS(bounded_geometry_report(euclidean_metric(torus_chart(16, 16)), 3),
                    InvalidArgument);
}

TEST_CASE("laplace-beltrami on the flat torus") {
    Chart c = torus_chart(32, 32);
    auto g = euclidean_metric(c);
    auto u = ScalarField::sample(c, [](const std::vector<double>& x) {
        return std::sin(x[0]) * std::cos(2.0 * x[1]);
    });
    auto lap = laplace_beltrami(g, u, DiffScheme::Spectral);
    // eigenfunction: Lap u = -(1 + 4) u
    double err = 0.0;
    for (std::size_t i = 0; i < c.node_count(); ++i)
        err = std::max(err, std::abs(lap[i] + 5.0 * u[i]));
    CHECK(err < 1e-10);
}
