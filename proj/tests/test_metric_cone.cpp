#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "polymet/generators.hpp"
#include "polymet/john.hpp"
#include "polymet/metric.hpp"

using namespace polymet;

namespace {

// Oracle: leading-principal-minor sign rule. When every leading minor is
// nonzero, the number of negative eigenvalues equals the number of sign
// changes in the sequence 1, D1, ..., Dn.
bool minor_inertia(const std::vector<double>& a, int n, Inertia* out) {
    std::vector<double> signs{1.0};
    for (int k = 1; k <= n; ++k) {
        std::vector<double> sub(static_cast<std::size_t>(k) * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub[i * k + j] = a[i * n + j];
        const double d = smallmat::det(sub.data(), k);
        if (std::abs(d) < 1e-10) return false;  // rule inapplicable
        signs.push_back(d);
    }
    int changes = 0;
    for (int k = 1; k <= n; ++k)
        if (signs[k - 1] * signs[k] < 0.0) ++changes;
    *out = Inertia{n - changes, changes, false};
    return true;
}

std::vector<double> random_sym(CounterRng& rng, int n, double amp = 1.0) {
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = amp * rng.uniform(-1.0, 1.0);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    return a;
}

std::vector<double> random_invertible(CounterRng& rng, int n) {
    for (;;) {
        std::vector<double> s(static_cast<std::size_t>(n) * n);
        for (auto& x : s) x = rng.uniform(-1.0, 1.0);
        if (std::abs(smallmat::det(s.data(), n)) > 0.05) return s;
    }
}

}  // namespace

TEST_CASE("inertia_of on explicit forms") {
    CHECK(inertia_of({1, 0, 0, 0, 1, 0, 0, 0, 1}, 3, 1e-9) == Inertia{3, 0, false});
    CHECK(inertia_of({-1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1}, 4, 1e-9) ==
          Inertia{3, 1, false});
    const Inertia deg = inertia_of({1, 0, 0, 0, 0, 0, 0, 0, -1}, 3, 1e-9);
    CHECK(deg.degenerate);
    CHECK(deg.positive == 1);
    CHECK(deg.negative == 1);
    CHECK_THROWS_AS(inertia_of({1, 2, 0, 1}, 2, 1e-9), NotSymmetric);
    CHECK_THROWS_AS(inertia_of({1, 0, 0, 1}, 2, 0.0), InvalidArgument);
}

TEST_CASE("eigenvalue inertia matches the principal-minor rule") {
    CounterRng rng(101);
    for (int n = 2; n <= 4; ++n) {
        int tested = 0;
        while (tested < 100) {
            auto a = random_sym(rng, n);
            Inertia oracle;
            if (!minor_inertia(a, n, &oracle)) continue;
            ++tested;
            CHECK(inertia_of(a, n, 1e-9) == oracle);
        }
    }
}

TEST_CASE("inertia is a congruence invariant (Sylvester)") {
    CounterRng rng(202);
    for (int n = 2; n <= 4; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            auto a = random_sym(rng, n);
            auto s = random_invertible(rng, n);
            // b = S^T A S
            std::vector<double> b(static_cast<std::size_t>(n) * n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            acc += s[k * n + i] * a[k * n + l] * s[l * n + j];
                    b[i * n + j] = acc;
                }
            const Inertia ia = inertia_of(a, n, 1e-9);
            if (ia.degenerate) continue;
            CHECK(inertia_of(b, n, 1e-9) == ia);
        }
    }
}

TEST_CASE("metric field validates nodewise inertia") {
    Chart c = torus_chart(8, 8);
    CHECK_NOTHROW(euclidean_metric(c));
    CHECK_NOTHROW(diagonal_metric(c, {1.0, -1.0}));
    // declared Riemannian but Lorentzian data
    auto lorentz = sample_sym2(c, [](const std::vector<double>&) {
        return std::vector<double>{1, 0, 0, -1};
    });
    CHECK_THROWS_AS(MetricField(lorentz, riemannian_inertia(2)), InertiaMismatch);
}

TEST_CASE("stability radius closed forms") {
    Chart c = torus_chart(8, 8);
    CHECK(stability_radius(euclidean_metric(c)) == Catch::Approx(0.5).margin(1e-12));
    CHECK(stability_radius(diagonal_metric(c, {4.0, 9.0})) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("perturbations below the stability radius preserve inertia") {
    Chart c = torus_chart(12, 12);
    CounterRng rng(303);
    auto g = random_pd_metric(c, rng, 2, 0.4, 0.5);
    const double eps = stability_radius(g);
    const int n = 2;

    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto h = random_bandlimited_sym2(c, rng, 2, 1.0);
        double op = 0.0;
        for (std::size_t node = 0; node < c.node_count(); ++node)
            op = std::max(op, smallmat::sym_op_norm(h.data().data() + node * n * n, n));
        const double scale = 0.99 * eps / op;
        // oracle: direct nodewise eigen-check of g + scaled h
        for (std::size_t node = 0; node < c.node_count(); ++node) {
            std::vector<double> m(n * n);
            for (int k = 0; k < n * n; ++k)
                m[k] = g.components().data()[node * n * n + k] +
                       scale * h.data()[node * n * n + k];
            const Inertia in = inertia_of(m, n, 1e-12);
            REQUIRE(in == riemannian_inertia(n));
            ++checked;
        }
    }
    CHECK(checked > 0);

    // constructive break: subtract (lambda_min + delta) * projector at the
    // minimizing node; sup operator norm is ~2.01 * radius
    std::size_t worst_node = 0;
    double lmin = 1e300;
    for (std::size_t node = 0; node < c.node_count(); ++node) {
        JacobiEigen eig(g.components().data().data() + node * n * n, n);
        for (int i = 0; i < n; ++i)
            if (eig.eigenvalue(i) < lmin) {
                lmin = eig.eigenvalue(i);
                worst_node = node;
            }
    }
    JacobiEigen eig(g.components().data().data() + worst_node * n * n, n, true);
    int which = 0;
    for (int i = 0; i < n; ++i)
        if (eig.eigenvalue(i) == lmin) which = i;
    std::vector<double> broken(g.components().data().begin() + worst_node * n * n,
                               g.components().data().begin() + (worst_node + 1) * n * n);
    const double coef = 2.01 * stability_radius(g);  // = 1.005 * lambda_min
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            broken[i * n + j] -= coef * eig.vector(i, which) * eig.vector(j, which);
    CHECK(inertia_of(broken, n, 1e-12) != riemannian_inertia(n));
}

TEST_CASE("convex path endpoints and Riemannian closure") {
    Chart c = torus_chart(8, 8);
    CounterRng rng(404);
    auto g0 = random_pd_metric(c, rng);
    auto g1 = random_pd_metric(c, rng);
    auto at0 = convex_path(g0, g1, 0.0);
    CHECK((at0.components() - g0.components()).sup_norm() == 0.0);

    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_pd_metric(c, rng);
        auto b = random_pd_metric(c, rng);
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9})
            CHECK_NOTHROW(convex_path(a, b, t));
    }
}

TEST_CASE("convexity fails off the Riemannian cone") {
    Chart c = torus_chart(8, 8);
    auto g0 = diagonal_metric(c, {1.0, -1.0});
    auto g1 = diagonal_metric(c, {-1.0, 1.0});
    CHECK_THROWS_AS(convex_path(g0, g1, 0.5), SignatureLost);
}

TEST_CASE("validate_polymetric reports per-component failures") {
    Chart c = torus_chart(8, 8);
    auto eucl = euclidean_metric(c).components();
    auto lorentz = sample_sym2(c, [](const std::vector<double>&) {
        return std::vector<double>{1, 0, 0, -1};
    });

    auto ok = validate_polymetric({eucl, eucl}, {Inertia{2, 0, false}, Inertia{2, 0, false}});
    CHECK(ok.ok());
    CHECK(ok.polymetric->size() == 2);

    auto bad = validate_polymetric({eucl, lorentz}, {Inertia{2, 0, false}, Inertia{2, 0, false}});
    CHECK_FALSE(bad.ok());
    REQUIRE(bad.failures.size() == 1);
    CHECK(bad.failures[0].component == 1);
    CHECK(bad.failures[0].failure.coords.size() == 2);

    // conformal scaling preserves positivity
    Chart s = sphere_chart(33, 64);
    auto g = sphere_metric(s);
    auto u = ScalarField::sample(s, [](const std::vector<double>& x) {
        return 0.3 * std::sin(x[0]) * std::cos(x[1]);
    });
    auto scaled = conformal_scale(g, u);
    auto both = validate_polymetric({g.components(), scaled.components()},
                                    {Inertia{2, 0, false}, Inertia{2, 0, false}});
    CHECK(both.ok());
}

TEST_CASE("polymetric construction requires one shared chart") {
    auto g1 = euclidean_metric(torus_chart(8, 8));
    auto g2 = euclidean_metric(torus_chart(16, 16));
    CHECK_THROWS_AS(Polymetric({g1, g2}), ChartMismatch);
}

TEST_CASE("john ellipsoid of the circle is the identity") {
    std::vector<std::vector<double>> pts;
    const int m = 256;
    for (int i = 0; i < m; ++i) {
        const double t = 2.0 * M_PI * i / m;
        pts.push_back({std::cos(t), std::sin(t)});
    }
    auto cert = john_metric(pts);
    CHECK(cert.matrix[0] == Catch::Approx(1.0).margin(2e-6));
    CHECK(cert.matrix[3] == Catch::Approx(1.0).margin(2e-6));
    CHECK(std::abs(cert.matrix[1]) < 2e-6);
    CHECK(cert.bilipschitz_factor == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("john ellipsoid of the square attains the sqrt(n) factor") {
    std::vector<std::vector<double>> pts{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    auto cert = john_metric(pts);
    // enclosing circle of radius sqrt(2): Q = I/2
    CHECK(cert.matrix[0] == Catch::Approx(0.5).margin(1e-6));
    CHECK(cert.matrix[3] == Catch::Approx(0.5).margin(1e-6));
    CHECK(std::abs(cert.matrix[1]) < 1e-6);
    CHECK(cert.bilipschitz_factor == Catch::Approx(std::sqrt(2.0)).margin(1e-6));
}

TEST_CASE("john ellipsoid recovers an axis-aligned ellipse") {
    std::vector<std::vector<double>> pts;
    const int m = 8192;
    for (int i = 0; i < m; ++i) {
        const double t = 2.0 * M_PI * i / m;
        pts.push_back({2.0 * std::cos(t), std::sin(t)});
    }
    auto cert = john_metric(pts);
    CHECK(cert.matrix[0] == Catch::Approx(0.25).margin(1e-6));
    CHECK(cert.matrix[3] == Catch::Approx(1.0).margin(1e-6));
    CHECK(std::abs(cert.matrix[1]) < 1e-6);
    CHECK(cert.bilipschitz_factor == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("john ellipsoid is affine equivariant") {
    CounterRng rng(505);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 64; ++i) {
        const double t = 2.0 * M_PI * i / 64;
        pts.push_back({std::cos(t) + 0.2 * std::cos(3 * t), std::sin(t)});
    }
    auto base = john_metric(pts);

    const double T[4] = {1.3, 0.4, -0.2, 0.9};  // invertible
    std::vector<std::vector<double>> mapped;
    for (const auto& p : pts)
        mapped.push_back({T[0] * p[0] + T[1] * p[1], T[2] * p[0] + T[3] * p[1]});
    auto cert = john_metric(mapped);

    // expected: Q' = T^{-T} Q T^{-1}
    const double det = T[0] * T[3] - T[1] * T[2];
    const double Ti[4] = {T[3] / det, -T[1] / det, -T[2] / det, T[0] / det};
    double expected[4] = {0, 0, 0, 0};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    acc += Ti[k * 2 + i] * base.matrix[k * 2 + l] * Ti[l * 2 + j];
            expected[i * 2 + j] = acc;
        }
    for (int k = 0; k < 4; ++k)
        CHECK(cert.matrix[k] == Catch::Approx(expected[k]).margin(1e-5));
}

TEST_CASE("john ellipsoid rejects degenerate sample clouds") {
    std::vector<std::vector<double>> flat{{1, 0}, {2, 0}, {-1, 0}, {-2, 0}};
    CHECK_THROWS_AS(john_metric(flat), DegenerateBody);
}
