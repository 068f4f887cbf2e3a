#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "loewner_lab/carath.hpp"

using namespace loewner_lab;
using Catch::Matchers::WithinAbs;

namespace {

const std::vector<DiscFunction>& sample_functions() {
    static const std::vector<DiscFunction> fs{DiscFunction::moebius(), DiscFunction::starlike_order(0.75),
                                              DiscFunction::almost_starlike(0.3), DiscFunction::strongly_starlike(0.5)};
    return fs;
}

// Fourth-order central difference of t -> f_i(t e_j), halved.
cplx fd_pure(const HolMap& f, std::size_t i, std::size_t j) {
    const std::size_t n = f.domain().dim();
    const double h = 1e-2;
    auto at = [&](double t) { return evaluate(f, t * CVec::unit(n, j))[i]; };
    const cplx d2 = (-at(2 * h) + 16.0 * at(h) - 30.0 * at(0.0) + 16.0 * at(-h) - at(-2 * h)) / (12.0 * h * h);
    return 0.5 * d2;
}

// Richardson-extrapolated cross difference along the real (z_i, z_j) plane.
cplx fd_mixed(const HolMap& f, std::size_t i, std::size_t j) {
    const std::size_t n = f.domain().dim();
    auto cross = [&](double h) {
        auto at = [&](double a, double b) { return evaluate(f, a * CVec::unit(n, i) + b * CVec::unit(n, j))[i]; };
        return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
    };
    return (4.0 * cross(5e-3) - cross(1e-2)) / 3.0;
}

}  // namespace

TEST_CASE("evaluation examples", "[carath]") {
    const auto dom = BallGeometry::polydisc(2);
    const auto g = DiscFunction::moebius();
    const CVec z{0.3, cplx(0.1, -0.2)};
    CHECK(evaluate(identity_map(dom), z) == z);
    const CVec f = evaluate(canonical_field(g, dom, 0, 1, 1), CVec{0.1, 0.5});
    CHECK(sup_norm(f - CVec{0.35, 0.5}) < 1e-15);
    const HolMap H = g_profile_map(dom, g, LinearFunctional::coordinate(2, 1));
    CHECK(sup_norm(evaluate(H, CVec{0.2, 0.5}) - CVec{1.0 / 15.0, 1.0 / 6.0}) < 1e-15);
    CHECK_THROWS_AS(evaluate(H, CVec{0.2, 1.0}), DomainError);
}

TEST_CASE("second coefficient examples", "[carath]") {
    const auto dom = BallGeometry::polydisc(2);
    for (const auto& g : sample_functions()) {
        INFO(g.label());
        CHECK(std::abs(second_coeff(canonical_field(g, dom, 0, 1, 1), 0, 1, CoeffKind::pure) - d1(g)) < 1e-12);
        const HolMap H = g_profile_map(dom, g, LinearFunctional::coordinate(2, 1));
        CHECK(std::abs(second_coeff(H, 0, 1, CoeffKind::mixed) - g_prime0(g)) < 1e-10);
        CHECK(std::abs(second_coeff(H, 1, 1, CoeffKind::pure) - g_prime0(g)) < 1e-10);
    }
    CHECK(std::abs(second_coeff(identity_map(dom), 0, 1, CoeffKind::pure)) < 1e-15);
}

TEST_CASE("second coefficient of polynomials is exact", "[carath][property]") {
    Rng rng(201);
    const auto dom = BallGeometry::polydisc(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Monomial> terms;
        for (std::size_t k = 0; k < 3; ++k) terms.push_back(linear_monomial(k, k, 1.0));
        for (int t = 0; t < 8; ++t) {
            Monomial m;
            m.component = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
            const int deg = std::uniform_int_distribution<int>(2, 5)(rng);
            for (int d = 0; d < deg; ++d) m.exponents[std::uniform_int_distribution<std::size_t>(0, 2)(rng)]++;
            m.coeff = 0.3 * complex_gaussian(rng);
            terms.push_back(m);
        }
        const HolMap f = polynomial_map(dom, terms, true);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                std::array<int, kMaxDim> pure{};
                pure[j] = 2;
                REQUIRE(std::abs(second_coeff(f, i, j, CoeffKind::pure) - polynomial_coefficient(f, i, pure)) < 1e-10);
                if (i == j) continue;
                std::array<int, kMaxDim> mixed{};
                mixed[i] = 1;
                mixed[j] = 1;
                REQUIRE(std::abs(second_coeff(f, i, j, CoeffKind::mixed) - polynomial_coefficient(f, i, mixed)) < 1e-10);
            }
        }
    }
}

TEST_CASE("second coefficient of composites matches finite differences", "[carath][property]") {
    Rng rng(203);
    const auto dom = BallGeometry::polydisc(2);
    for (const auto& g : sample_functions()) {
        for (int trial = 0; trial < 10; ++trial) {
            const HolMap h = random_Mg_member(g, dom, rng, 3);
            for (std::size_t i = 0; i < 2; ++i) {
                CHECK(std::abs(second_coeff(h, i, 1 - i, CoeffKind::pure) - fd_pure(h, i, 1 - i)) < 1e-6);
                CHECK(std::abs(second_coeff(h, i, i, CoeffKind::pure) - fd_pure(h, i, i)) < 1e-6);
                CHECK(std::abs(second_coeff(h, i, 1 - i, CoeffKind::mixed) - fd_mixed(h, i, 1 - i)) < 1e-6);
            }
        }
    }
}

TEST_CASE("coefficient extraction reports its cross-check", "[carath]") {
    const auto dom = BallGeometry::polydisc(2);
    const auto est = second_coeff_estimate(identity_plus_square(dom, 0, 1, 0.5), 0, 1, CoeffKind::pure);
    CHECK_FALSE(est.reduced_precision);
    CHECK(est.discrepancy < 1e-12);
    // a pole just outside radius 0.4 aliases the transform badly
    const HolMap bad = black_box_map(
        dom, [](const CVec& z) { return CVec{z[0] + 1.0 / (0.41 - z[1]) - 1.0 / 0.41 - z[1] / (0.41 * 0.41), z[1]}; },
        "pole", true);
    CHECK_THROWS_AS(second_coeff(bad, 0, 1, CoeffKind::pure), NumericalInstability);
}

TEST_CASE("shear examples", "[carath]") {
    const auto dom = BallGeometry::polydisc(2);
    Rng rng(205);
    for (const auto& g : sample_functions()) {
        const HolMap id_sheared = shear(identity_map(dom), 0, 1);
        const HolMap canon = canonical_field(g, dom, 0, 1, 1);
        const HolMap canon_sheared = shear(canon, 0, 1);
        const HolMap H = g_profile_map(dom, g, LinearFunctional::coordinate(2, 1));
        const HolMap H_sheared = shear(H, 0, 1);
        for (int k = 0; k < 20; ++k) {
            const CVec z = 0.9 * sample_sphere(dom, rng);
            CHECK(sup_norm(evaluate(id_sheared, z) - z) < 1e-14);
            CHECK(sup_norm(evaluate(canon_sheared, z) - evaluate(canon, z)) < 1e-12);
            CHECK(sup_norm(evaluate(H_sheared, z) - z) < 1e-12);
        }
    }
    CHECK_THROWS_AS(shear(identity_map(dom), 0, 0), DomainError);
}

TEST_CASE("canonical field examples", "[carath]") {
    const auto poly = BallGeometry::polydisc(2);
    const auto m = DiscFunction::moebius();
    std::array<int, kMaxDim> z2sq{};
    z2sq[1] = 2;
    CHECK(polynomial_coefficient(canonical_field(m, poly, 0, 1, 1), 0, z2sq) == cplx(1.0));
    const auto spec = BallGeometry::spectral2();
    const auto ss = DiscFunction::strongly_starlike(0.4);
    CHECK(std::abs(polynomial_coefficient(canonical_field(ss, spec, 0, 1, 1), 0, z2sq) - std::sin(0.2 * kPi)) < 1e-15);
    CHECK(std::abs(polynomial_coefficient(canonical_field(m, BallGeometry::euclidean(2), 0, 1, 1), 0, z2sq) -
                   3.0 * std::sqrt(3.0) / 2.0) < 1e-15);
    CHECK_THROWS_AS(canonical_field(m, spec, 0, 2, 1), DomainError);
}

TEST_CASE("certify examples", "[carath]") {
    const auto dom = BallGeometry::polydisc(2);
    for (const auto& g : sample_functions()) {
        INFO(g.label());
        Rng rng(207);
        const auto id = certify_Mg(identity_map(dom), g, dom, 2000, 1e-9, rng);
        CHECK(id.pass);
        CHECK_THAT(id.worst_margin, WithinAbs(d1(g), 1e-9));
        const auto canon = certify_Mg(canonical_field(g, dom, 0, 1, 1), g, dom, 2000, 1e-9, rng);
        CHECK(canon.pass);
        CHECK(canon.worst_margin >= -1e-9);
        CHECK(canon.worst_margin < 0.01);
        const auto over = certify_Mg(identity_plus_square(dom, 0, 1, 1.1 * d1(g)), g, dom, 2000, 1e-9, rng);
        CHECK_FALSE(over.pass);
        REQUIRE(over.witness.has_value());
        CHECK(std::abs(std::abs(over.witness->z[0]) - std::abs(over.witness->z[1])) < 1e-12);
        CHECK(over.worst_margin < 0.0);
    }
}

TEST_CASE("certify requires normalized maps on the same domain", "[carath]") {
    Rng rng(1);
    const auto dom = BallGeometry::polydisc(2);
    const HolMap half = polynomial_map(dom, {linear_monomial(0, 0, 0.5), linear_monomial(1, 1, 0.5)}, false);
    CHECK_THROWS_AS(certify_Mg(half, DiscFunction::moebius(), dom, 10, 1e-9, rng), PreconditionError);
    CHECK_THROWS_AS(certify_Mg(identity_map(BallGeometry::polydisc(3)), DiscFunction::moebius(), dom, 10, 1e-9, rng),
                    DomainError);
}

TEST_CASE("random members: bounds, shear closure, convex closure", "[carath][property]") {
    Rng rng(211);
    for (const auto& dom : {BallGeometry::polydisc(2), BallGeometry::spectral2(), BallGeometry::euclidean(2)}) {
        for (const auto& g : sample_functions()) {
            INFO(dom.label() << " " << g.label());
            const double bound = d1(g) * dom.shear_factor() + 1e-6;
            const double gp = std::abs(g_prime0(g)) + 1e-6;
            for (int trial = 0; trial < 4; ++trial) {
                const HolMap h = random_Mg_member(g, dom, rng, 3);
                const auto cert = certify_Mg(h, g, dom, 2000, 1e-9, rng);
                REQUIRE(cert.pass);
                REQUIRE(cert.worst_margin >= -1e-9);
                for (std::size_t i = 0; i < dom.dim(); ++i) {
                    for (std::size_t j = 0; j < dom.dim(); ++j) {
                        if (!dom.admissible_pair(i, j)) continue;
                        CHECK(std::abs(second_coeff(h, i, j, CoeffKind::pure)) <= bound);
                        if (dom.kind() != BallKind::euclidean) {
                            CHECK(std::abs(second_coeff(h, i, j, CoeffKind::mixed)) <= gp);
                            CHECK(std::abs(second_coeff(h, i, i, CoeffKind::pure)) <= gp);
                        }
                    }
                }
                CHECK(certify_Mg(shear(h, 0, 1), g, dom, 2000, 1e-9, rng).pass);
                const HolMap h2 = random_Mg_member(g, dom, rng, 2);
                const double lam = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                CHECK(certify_Mg(convex_combination({lam, 1.0 - lam}, {h, h2}), g, dom, 2000, 1e-9, rng).pass);
            }
        }
    }
}

TEST_CASE("random member building blocks", "[carath]") {
    Rng rng(213);
    const auto dom = BallGeometry::polydisc(2);
    const auto g = DiscFunction::moebius();
    const HolMap id = random_Mg_member(g, dom, rng, 1, {BlockKind::identity});
    const CVec z{0.3, -0.4};
    CHECK(evaluate(id, z) == z);
    const HolMap prof = random_Mg_member(g, dom, rng, 1, {BlockKind::profile});
    const auto cert = certify_Mg(prof, g, dom, 2000, 1e-9, rng);
    CHECK(cert.pass);
}

TEST_CASE("boundary distance matches the polyline distance on bounded images", "[carath][property]") {
    Rng rng(217);
    for (double a : {0.3, 0.5, 0.75, 0.95}) {
        const auto g = DiscFunction::starlike_order(a);
        const DiscFunction b = g.boundary_only();
        for (int k = 0; k < 200; ++k) {
            const cplx w = eval(g, uniform_disc(rng, 0.9)) + 0.3 * complex_gaussian(rng);
            INFO(g.label() << " w=" << w);
            // the 4096-point polyline is coarsest near g(1) = 0, where chords sag by ~1e-4
            CHECK(std::abs(boundary_distance(g, w) - boundary_distance(b, w)) < 2e-4);
        }
    }
}
