#include <doctest.h>

#include <cmath>
#include <random>

#include "hyperlin/maps.hpp"
#include "hyperlin/numerics.hpp"

using namespace hyperlin;
using namespace hyperlin::maps;

namespace {
const BumpProfile kProfile{0.1, 0.2, 0.0};

// independent adaptive-quadrature oracle for the kernel integrals
double kernel_oracle(double upper) {
    return num::integrate([](double t) { return SmoothingKernel::q(t); }, 0.0, upper,
                          1e-13);
}
}  // namespace

TEST_CASE("p_alpha values and one-sided structure") {
    CHECK(p_alpha(2.0, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(p_alpha(0.0, 0.5) == 0.0);
    CHECK(p_alpha(-1.0, 0.5) == 0.0);
    // derivative at 0 vanishes: central difference oracle
    const double h = 1e-8;
    const double d0 = (p_alpha(h, 1.0) - p_alpha(-h, 1.0)) / (2 * h);
    CHECK(std::abs(d0) < 1e-8);
    const double d7 = (p_alpha(h, 0.7) - p_alpha(-h, 0.7)) / (2 * h);
    CHECK(std::abs(d7) < std::pow(h, 0.7));  // one-sided h^alpha/2 truncation
    for (double s : {0.3, 1.7})
        CHECK(p_alpha_deriv(s, 0.6) ==
              doctest::Approx((p_alpha(s + 1e-6, 0.6) - p_alpha(s - 1e-6, 0.6)) / 2e-6)
                  .epsilon(1e-6));
}

TEST_CASE("kernel normalization is stable and matches the oracle") {
    const SmoothingKernel& k = shared_kernel();
    // frozen value from the adaptive-quadrature oracle
    CHECK(k.normalization() == doctest::Approx(0.007029858406609657).epsilon(1e-10));
    CHECK(k.normalization() == doctest::Approx(kernel_oracle(1.0)).epsilon(1e-12));
    const SmoothingKernel finer(1e-13);
    CHECK(std::abs(finer.normalization() - k.normalization()) < 1e-12);
}

TEST_CASE("transition function endpoint and interior values") {
    CHECK(u_transition(1.0, 0.5) == 1.0);   // x1 >= |x2|
    CHECK(u_transition(-0.1, 1.0) == 0.0);  // x1 <= 0
    CHECK(u_transition(0.3, -1.0) == u_transition(0.3, 1.0));
    CHECK(u_transition(2.0, 0.0) == 1.0);
    CHECK(u_transition(-2.0, 0.0) == 0.0);
    // interior value pinned by the quadrature oracle (and symmetry at 1/2)
    CHECK(u_transition(0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(u_transition(0.3, 1.0) ==
          doctest::Approx(kernel_oracle(0.3) / kernel_oracle(1.0)).epsilon(1e-11));
    CHECK(u_transition(0.3, 1.0) == doctest::Approx(0.079064906498123).epsilon(1e-9));
    CHECK_THROWS_AS(u_transition(0.0, 0.0), std::domain_error);
}

TEST_CASE("transition gradient matches finite differences") {
    for (const auto& [x1, x2] : {std::pair{0.3, 1.0}, {0.7, 1.3}, {0.2, -0.9}}) {
        const Vec2 g = u_transition_grad(x1, x2);
        const double h = 1e-6;
        CHECK(g.x1 == doctest::Approx((u_transition(x1 + h, x2) - u_transition(x1 - h, x2)) /
                                      (2 * h)).epsilon(1e-5));
        CHECK(g.x2 == doctest::Approx((u_transition(x1, x2 + h) - u_transition(x1, x2 - h)) /
                                      (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("transition derivative bound (U3 sample)") {
    // |D^r u| |x|^r stays bounded over a log-radial sample, r = 0,1,2
    double k0 = 0, k1 = 0, k2 = 0;
    for (double r = 1e-4; r <= 10.0; r *= 3.1) {
        for (int a = 1; a < 24; ++a) {
            const double th = 2 * M_PI * a / 24.0;
            const double x1 = r * std::cos(th), x2 = r * std::sin(th);
            if (x2 == 0) continue;
            const double n = std::max(std::abs(x1), std::abs(x2));
            k0 = std::max(k0, std::abs(u_transition(x1, x2)));
            const Vec2 g = u_transition_grad(x1, x2);
            k1 = std::max(k1, max_norm(g) * n);
            const double h = 1e-5 * n;
            const Vec2 gp = u_transition_grad(x1 + h, x2);
            const Vec2 gm = u_transition_grad(x1 - h, x2);
            const Vec2 gq = u_transition_grad(x1, x2 + h);
            const Vec2 gr = u_transition_grad(x1, x2 - h);
            const double d2 =
                std::max(max_norm(Vec2{(gp.x1 - gm.x1) / (2 * h), (gp.x2 - gm.x2) / (2 * h)}),
                         max_norm(Vec2{(gq.x1 - gr.x1) / (2 * h), (gq.x2 - gr.x2) / (2 * h)}));
            k2 = std::max(k2, d2 * n * n);
        }
    }
    CHECK(k0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k1 < 10.0);
    CHECK(k2 < 60.0);
}

TEST_CASE("bump is a cutoff between the two disks") {
    CHECK(bump({0.0, 0.0}, kProfile) == 1.0);
    CHECK(bump({0.09, -0.05}, kProfile) == 1.0);
    CHECK(bump({0.4, 0.0}, kProfile) == 0.0);
    CHECK(bump({0.0, 0.25}, kProfile) == 0.0);
    const double mid = bump({0.15, 0.0}, kProfile);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    const Vec2 g = bump_grad({0.15, 0.03}, kProfile);
    const double h = 1e-7;
    CHECK(g.x1 == doctest::Approx((bump({0.15 + h, 0.03}, kProfile) -
                                   bump({0.15 - h, 0.03}, kProfile)) /
                                  (2 * h)).epsilon(1e-4));
    CHECK(max_norm(g) < 60.0);
    CHECK_THROWS_AS(bump({0, 0}, BumpProfile{0.2, 0.1, 0}), std::invalid_argument);
}

TEST_CASE("counterexample map is linear off the first quadrant and on axes") {
    const spectral::SpectralParams p{0.25, 0.5, 0.4};
    const PlanarMap F = make_poincare_counterexample(p, kProfile);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-0.18, 0.18);
    for (int k = 0; k < 2000; ++k) {
        const Vec2 x{U(rng), U(rng)};
        if (x.x1 > 0 && x.x2 > 0) continue;
        const Vec2 im = F.eval(x);
        CHECK(im.x1 == 0.25 * x.x1);
        CHECK(im.x2 == 0.5 * x.x2);
    }
    // axis images stay on the axes exactly
    for (double s : {-0.15, -0.02, 0.03, 0.12}) {
        CHECK(F.eval({s, 0.0}).x1 == 0.25 * s);
        CHECK(F.eval({s, 0.0}).x2 == 0.0);
        CHECK(F.eval({0.0, s}).x1 == 0.0);
    }
    CHECK(F.eval({0, 0}).x1 == 0.0);
    CHECK(op_norm(F.jacobian({0, 0}) - Mat2::diag(0.25, 0.5)) == 0.0);
}

TEST_CASE("counterexample projections iterate exactly") {
    const spectral::SpectralParams p{0.25, 0.5, 0.4};
    const PlanarMap F = make_poincare_counterexample(p, kProfile);
    const double xi = 0.05, x2 = 0.01;
    Vec2 z{xi, x2};
    for (int n = 1; n <= 12; ++n) {
        z = F.eval(z);
        CHECK(z.x2 == doctest::Approx(std::pow(0.5, n) * x2).epsilon(1e-14));
    }
    Vec2 a{xi, 0.0};
    for (int n = 1; n <= 12; ++n) {
        a = F.eval(a);
        CHECK(a.x1 == doctest::Approx(std::pow(0.25, n) * xi).epsilon(1e-13));
        CHECK(a.x2 == 0.0);
    }
}

TEST_CASE("analytic Jacobian agrees with the finite-difference oracle") {
    const spectral::SpectralParams p{0.2, 0.5, 0.9};
    const PlanarMap F = make_axis_bump_map(p, kProfile);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.005, 0.09);
    int checked = 0;
    for (int k = 0; k < 200; ++k) {
        const Vec2 x{U(rng), U(rng)};
        const Mat2 J = F.jacobian(x);
        const Mat2 Jfd = finite_difference_jacobian(F, x, 1e-5);
        // the u-transition cone has third-derivative blowup; flag those points
        const double t = 0.2 * x.x1 / (0.5 * x.x2);
        const bool near_cone_edge = std::abs(t) < 0.02 || std::abs(t - 1.0) < 0.02;
        if (near_cone_edge) continue;
        ++checked;
        CHECK(op_norm(J - Jfd) < 1e-6);
    }
    CHECK(checked > 150);
    const PlanarMap L = linear_map(0.3, 0.7);
    CHECK(op_norm(finite_difference_jacobian(L, {0.01, 0.02}, 1e-6) -
                  Mat2::diag(0.3, 0.7)) < 1e-9);
}

TEST_CASE("derivative Holder quotient stays bounded over pair samples") {
    const spectral::SpectralParams p{0.25, 0.5, 0.4};
    const PlanarMap F = make_poincare_counterexample(p, kProfile);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-0.09, 0.09);
    std::uniform_real_distribution<double> S(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const Vec2 x{U(rng), U(rng)};
        const double scale = std::pow(2.0, -8.0 * S(rng));
        const Vec2 y{x.x1 + U(rng) * scale, x.x2 + U(rng) * scale};
        const double d = max_norm(x - y);
        if (d == 0.0) continue;
        const double q = op_norm(F.jacobian(x) - F.jacobian(y)) / std::pow(d, 0.4);
        worst = std::max(worst, q);
    }
    CHECK(worst < 25.0);
    CHECK(worst > 0.0);
}

TEST_CASE("first-order smallness |F(x)-Lx| = o(|x|) along shrinking radii") {
    const spectral::SpectralParams p{0.25, 0.5, 0.4};
    const PlanarMap F = make_poincare_counterexample(p, kProfile);
    const Mat2 L = Mat2::diag(0.25, 0.5);
    double prev = 1.0;
    for (int k = 3; k <= 14; ++k) {
        const double r = std::pow(2.0, -k);
        double worst = 0.0;
        for (int a = 0; a < 64; ++a) {
            const double th = 2 * M_PI * a / 64.0;
            const Vec2 x{r * std::cos(th), r * std::sin(th)};
            worst = std::max(worst, max_norm(F.eval(x) - L * x) / r);
        }
        CHECK(worst < prev + 1e-12);
        prev = worst;
    }
    CHECK(prev < 5e-3);
}

TEST_CASE("eta measurement is positive and small enough downstream") {
    const spectral::SpectralParams p{0.2, 0.5, 0.9};
    const PlanarMap F = make_axis_bump_map(p, kProfile);
    const double eta = measure_eta(F, kProfile);
    CHECK(eta > 0.0);
    CHECK(std::abs(p.lambda1) + eta < 1.0);
}

TEST_CASE("siegel counterexample fixes the origin and inverts exactly") {
    const spectral::SpectralParams p{0.5, 2.0, 1.0};
    const PlanarMap G = make_siegel_counterexample(p, kProfile);
    CHECK(max_norm(G.eval({0, 0})) == 0.0);
    CHECK(op_norm(G.jacobian({0, 0}) - Mat2::diag(0.5, 2.0)) < 1e-12);
    // axis behavior: (x1,0) -> (l1 x1, 0)
    for (double s : {-0.1, 0.02, 0.08}) {
        const Vec2 im = G.eval({s, 0.0});
        CHECK(im.x1 == doctest::Approx(0.5 * s).epsilon(1e-14));
        CHECK(im.x2 == 0.0);
        const Vec2 im2 = G.eval({0.0, s});
        CHECK(im2.x1 == 0.0);
        CHECK(im2.x2 == doctest::Approx(2.0 * s).epsilon(1e-13));
    }
    // round trip through the closed-form forward map
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-0.12, 0.12);
    double worst = 0.0;
    for (int k = 0; k < 400; ++k) {
        const Vec2 y{U(rng), U(rng)};
        const Vec2 z = G.inverse(G.eval(y));
        worst = std::max(worst, max_norm(z - y));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("iterate composes and respects the trust region") {
    const PlanarMap L = linear_map(0.5, 0.25);
    const Vec2 x{0.3, -0.2};
    CHECK(max_norm(iterate(L, x, 0) - x) == 0.0);
    CHECK(op_norm(jacobian_of_iterate(L, x, 0) - Mat2::identity()) == 0.0);
    const Vec2 y = iterate(L, x, 3);
    CHECK(y.x1 == doctest::Approx(0.125 * 0.3).epsilon(1e-15));
    CHECK(y.x2 == doctest::Approx(0.015625 * -0.2).epsilon(1e-15));
    const Vec2 back = iterate(L, y, -3);
    CHECK(max_norm(back - x) < 1e-15);

    const spectral::SpectralParams p{0.25, 0.5, 0.4};
    const PlanarMap F = make_poincare_counterexample(p, kProfile);
    const Mat2 Jn = jacobian_of_iterate(F, {0, 0}, 5);
    CHECK(Jn.a11 == doctest::Approx(std::pow(0.25, 5)).epsilon(1e-13));
    CHECK(Jn.a22 == doctest::Approx(std::pow(0.5, 5)).epsilon(1e-13));
    CHECK(Jn.a12 == 0.0);

    PlanarMap E = linear_map(2.0, 4.0);
    E.trust_radius = 1.0;
    CHECK_THROWS_WITH_AS(iterate(E, {0.3, 0.3}, 4), doctest::Contains("step 1"),
                         NumericError);
}
