#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hyperlin/spectral.hpp"

using namespace hyperlin::spectral;

TEST_CASE("domain classification") {
    CHECK(classify_domain({0.25, 0.5, 1.0}) == DomainKind::PoincareContraction);
    CHECK(classify_domain({0.5, 2.0, 1.0}) == DomainKind::Siegel);
    CHECK(classify_domain({1.0, 2.0, 1.0}) == DomainKind::Invalid);
    CHECK(classify_domain({2.0, 4.0, 1.0}) == DomainKind::PoincareExpansion);
    CHECK(classify_domain({-0.25, 0.5, 1.0}) == DomainKind::PoincareContraction);
    CHECK(classify_domain({0.0, 0.5, 1.0}) == DomainKind::Invalid);
}

TEST_CASE("expansion normalizes to contraction") {
    const Normalized n = normalize_to_contraction({2.0, 4.0, 0.7});
    CHECK(n.flipped);
    CHECK(n.params.lambda1 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(n.params.lambda2 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_FALSE(normalize_to_contraction({0.25, 0.5, 0.7}).flipped);
}

TEST_CASE("derived exponents match the closed forms") {
    const DerivedExponents d = derived_exponents({0.25, 0.5, 1.0});
    CHECK(d.alpha0 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d.alpha1 == doctest::Approx(1.0).epsilon(1e-14));

    const DerivedExponents s1 = derived_exponents({0.5, 2.0, 1.0});
    CHECK(s1.sigma == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(s1.beta.value() == doctest::Approx(0.5).epsilon(1e-14));

    const DerivedExponents s2 = derived_exponents({0.5, 4.0, 0.9});
    CHECK(s2.sigma == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(s2.beta.value() == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("siegel beta rejects contraction parameters") {
    CHECK_THROWS_AS(siegel_beta({0.25, 0.5, 1.0}), std::domain_error);
}

TEST_CASE("alpha0 < alpha1 over a contraction sweep") {
    for (double l1 = 0.02; l1 < 0.9; l1 += 0.07) {
        for (double l2 = l1 + 0.05; l2 < 0.95; l2 += 0.07) {
            const DerivedExponents d = derived_exponents({l1, l2, 0.5});
            CAPTURE(l1);
            CAPTURE(l2);
            CHECK(d.alpha0 < d.alpha1);
            CHECK(d.alpha0 > 0.0);
            CHECK(d.alpha0 < 1.0);
        }
    }
}

TEST_CASE("siegel beta is positively homogeneous in alpha and below alpha") {
    for (const auto& [l1, l2] : {std::pair{0.5, 2.0}, {0.5, 4.0}, {0.3, 1.5}}) {
        for (double a = 0.1; a <= 1.0; a += 0.1) {
            const double b = siegel_beta({l1, l2, a});
            CHECK(b <= a + 1e-14);
            for (double c = 0.25; c <= std::min(2.0, 1.0 / a); c += 0.25) {
                const double bc = siegel_beta({l1, l2, c * a});
                CHECK(bc / b == doctest::Approx(c).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("figure 3 and 4 curves are the stated lines") {
    const std::vector<double> grid{0.2, 0.6, 1.0};
    const auto f3 = sharpness_curve(3, {0.5, 2.0, 1.0}, grid);
    CHECK(f3[2].beta == doctest::Approx(0.5).epsilon(1e-14));  // slope -sigma/(1-sigma)
    const auto f4 = sharpness_curve(4, {0.5, 4.0, 1.0}, {0.6});
    CHECK(f4[0].beta == doctest::Approx(0.2).epsilon(1e-14));  // slope 1/(1-sigma)
}

TEST_CASE("figure 1 endpoint value and dashed region") {
    // alpha1 = 1 for (0.25, 0.5); item (iii) continuity gives beta = 1 at alpha = 1
    const auto rows = sharpness_curve(1, {0.25, 0.5, 1.0}, {0.3, 0.5, 0.75, 1.0});
    CHECK(rows[0].differentiable_only);
    CHECK(std::isnan(rows[0].beta));
    CHECK(rows[1].differentiable_only);  // alpha == alpha0 keeps the dashed flag
    CHECK(rows[2].beta == doctest::Approx(0.5).epsilon(1e-14));  // alpha/alpha0 - 1
    CHECK(rows[3].beta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(rows[3].open_endpoint);
}

TEST_CASE("figure 2 open endpoint at alpha1") {
    // (0.1, 0.3): alpha1 = log(0.1)/log(0.3) - 1 < 1
    const DerivedExponents d = derived_exponents({0.1, 0.3, 1.0});
    REQUIRE(d.alpha1 < 1.0);
    const auto rows = sharpness_curve(2, {0.1, 0.3, 1.0}, {d.alpha1, 1.0});
    CHECK(rows[0].open_endpoint);
    CHECK(rows[0].beta == doctest::Approx(d.alpha1).epsilon(1e-14));
    CHECK(rows[1].beta == doctest::Approx(1.0).epsilon(1e-14));  // item (i)
}

TEST_CASE("curve evaluation is exact on recomputation") {
    const std::vector<double> grid{0.11, 0.37, 0.73, 0.99};
    const auto a = sharpness_curve(3, {0.5, 2.0, 1.0}, grid);
    const auto b = sharpness_curve(3, {0.5, 2.0, 1.0}, grid);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].beta == b[i].beta);
}

TEST_CASE("curve rejects grid points outside (0,1] and mismatched figures") {
    CHECK_THROWS_AS(sharpness_curve(3, {0.5, 2.0, 1.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(sharpness_curve(3, {0.5, 2.0, 1.0}, {1.5}), std::invalid_argument);
    CHECK_THROWS_AS(sharpness_curve(4, {0.5, 2.0, 1.0}, {0.5}), std::domain_error);
    CHECK_THROWS_AS(sharpness_curve(1, {0.1, 0.3, 1.0}, {0.5}), std::domain_error);
}
