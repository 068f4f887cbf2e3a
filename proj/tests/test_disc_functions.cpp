#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "loewner_lab/disc_function.hpp"

using namespace loewner_lab;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<DiscFunction> catalog_grid() {
    std::vector<DiscFunction> out{DiscFunction::moebius()};
    for (int k = 1; k <= 19; ++k) {
        const double a = k / 20.0;
        out.push_back(DiscFunction::starlike_order(a));
        out.push_back(DiscFunction::almost_starlike(a));
        out.push_back(DiscFunction::strongly_starlike(a));
    }
    return out;
}

// Independent grid oracle: min over both real directions of |1 - g(+-r)| / r.
double a0_brute(const DiscFunction& g, int grid) {
    double best = std::abs(g_prime0(g));
    for (int k = 1; k < grid; ++k) {
        const double r = static_cast<double>(k) / grid;
        best = std::min(best, std::abs(1.0 - g.value(r)) / r);
        best = std::min(best, std::abs(1.0 - g.value(-r)) / r);
    }
    return best;
}

}  // namespace

TEST_CASE("catalog values", "[disc]") {
    const auto m = DiscFunction::moebius();
    CHECK(std::abs(eval(m, 0.0) - 1.0) < 1e-15);
    CHECK(std::abs(eval(m, 0.5) - 1.0 / 3.0) < 1e-15);
    const auto s = DiscFunction::starlike_order(0.75);
    CHECK(std::abs(eval(s, -1.0 + 1e-12) - 4.0 / 3.0) < 1e-9);
    CHECK_THROWS_AS(eval(m, 1.0), DomainError);
    CHECK_THROWS_AS(eval(m, cplx(0.8, 0.6)), DomainError);
}

TEST_CASE("derivative at the origin", "[disc]") {
    CHECK(std::abs(g_prime0(DiscFunction::moebius()) + 2.0) < 1e-14);
    for (double a : {0.1, 0.25, 0.5, 0.8}) {
        CHECK(std::abs(g_prime0(DiscFunction::starlike_order(a)) + 2.0 * (1.0 - a)) < 1e-13);
        CHECK(std::abs(g_prime0(DiscFunction::strongly_starlike(a)) + 2.0 * a) < 1e-13);
        // (1 - beta z)/(1 + z): derivative -beta - 1 = -2(1 - alpha)
        CHECK(std::abs(g_prime0(DiscFunction::almost_starlike(a)) + 2.0 * (1.0 - a)) < 1e-13);
    }
}

TEST_CASE("custom hooks reproduce catalog derivative by Cauchy transform", "[disc]") {
    CustomHooks h;
    h.name = "moebius-copy";
    h.value = [](cplx z) { return (1.0 - z) / (1.0 + z); };
    const auto g = DiscFunction::custom(h);
    CHECK(std::abs(g_prime0(g) + 2.0) < 1e-10);
}

TEST_CASE("d1 closed forms", "[disc]") {
    CHECK_THAT(d1(DiscFunction::moebius()), WithinAbs(1.0, 1e-15));
    CHECK_THAT(d1(DiscFunction::starlike_order(0.75)), WithinAbs(1.0 / 3.0, 1e-15));
    CHECK_THAT(d1(DiscFunction::starlike_order(0.25)), WithinAbs(1.0, 1e-15));
    CHECK_THAT(d1(DiscFunction::almost_starlike(0.3)), WithinAbs(0.7, 1e-15));
    CHECK_THAT(d1(DiscFunction::strongly_starlike(0.5)), WithinAbs(std::sqrt(2.0) / 2.0, 1e-15));
}

TEST_CASE("d1 boundary-grid path agrees with closed forms", "[disc][property]") {
    for (const auto& g : catalog_grid()) {
        INFO(g.label());
        CHECK_THAT(d1_boundary_grid(g.boundary_only()), WithinAbs(d1(g), 1e-9));
    }
}

TEST_CASE("d1 without boundary parametrization is unsupported", "[disc]") {
    CustomHooks h;
    h.name = "no-boundary";
    h.value = [](cplx z) { return 1.0 / (1.0 + z); };
    CHECK_THROWS_AS(d1(DiscFunction::custom(h)), Unsupported);
}

TEST_CASE("a0 dominates d1 on the catalog grid", "[disc][property]") {
    for (const auto& g : catalog_grid()) {
        INFO(g.label());
        CHECK(a0(g) >= d1(g) - 1e-9);
    }
}

TEST_CASE("a0 against brute-force radial oracle", "[disc]") {
    CHECK_THAT(a0(DiscFunction::moebius()), WithinAbs(1.0, 1e-8));
    const auto s = DiscFunction::starlike_order(0.75);
    // the oracle grid misses the infimum by at most the sampling resolution
    CHECK_THAT(a0(s), WithinAbs(a0_brute(s, 1'000'000), 1e-5));
    CHECK(a0(s) <= a0_brute(s, 1'000'000) + 1e-12);
}

TEST_CASE("starlike order zero coincides with moebius", "[disc]") {
    const auto s = DiscFunction::starlike_order(0.0);
    const auto m = DiscFunction::moebius();
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
        const cplx z = uniform_disc(rng, 0.95);
        CHECK(std::abs(s.value(z) - m.value(z)) < 1e-15);
    }
    CHECK(d1(s) == d1(m));
}

TEST_CASE("real symmetry", "[disc][property]") {
    std::mt19937_64 rng(11);
    for (const auto& g : catalog_grid()) {
        for (int k = 0; k < 100; ++k) {
            const cplx z = uniform_disc(rng, 0.99);
            CHECK(std::abs(eval(g, std::conj(z)) - std::conj(eval(g, z))) < 1e-12 * std::max(1.0, std::abs(eval(g, z))));
        }
    }
}

TEST_CASE("membership examples", "[disc]") {
    const double eps = 1e-9;
    for (const auto& g : catalog_grid()) CHECK(contains(g, 1.0, eps) == Membership::inside);
    CHECK(contains(DiscFunction::moebius(), -0.1, eps) == Membership::outside);
    CHECK(contains(DiscFunction::starlike_order(0.75), 1.5, eps) == Membership::outside);
    CHECK(contains(DiscFunction::starlike_order(0.75), 1.3, eps) == Membership::inside);
}

TEST_CASE("images are inside and convex", "[disc][property]") {
    std::mt19937_64 rng(13);
    const double eps = 1e-9;
    for (const auto& g : catalog_grid()) {
        INFO(g.label());
        for (int k = 0; k < 200; ++k) {
            const cplx z = uniform_disc(rng, 1.0 - 10 * eps);
            if (std::abs(z) > 1.0 - 10 * eps) continue;
            REQUIRE(contains(g, eval(g, z), eps) == Membership::inside);
        }
    }
    for (const auto& g : {DiscFunction::moebius(), DiscFunction::starlike_order(0.8), DiscFunction::almost_starlike(0.4),
                          DiscFunction::strongly_starlike(0.3)}) {
        INFO(g.label());
        for (int k = 0; k < 10'000; ++k) {
            const cplx a = eval(g, uniform_disc(rng, 0.999));
            const cplx b = eval(g, uniform_disc(rng, 0.999));
            REQUIRE(contains(g, 0.5 * (a + b), eps) != Membership::outside);
        }
    }
}

TEST_CASE("closed-form inverses", "[disc]") {
    std::mt19937_64 rng(17);
    for (const auto& g : catalog_grid()) {
        for (int k = 0; k < 50; ++k) {
            const cplx z = uniform_disc(rng, 0.95);
            const auto back = g.inverse(eval(g, z));
            REQUIRE(back.has_value());
            CHECK(std::abs(*back - z) < 1e-9);
        }
    }
}

TEST_CASE("invalid parameters", "[disc]") {
    CHECK_THROWS_AS(DiscFunction::starlike_order(1.0), DomainError);
    CHECK_THROWS_AS(DiscFunction::strongly_starlike(0.0), DomainError);
    CHECK_THROWS_AS(family_from_name("koebe"), UsageError);
    CHECK_THROWS(contains(DiscFunction::moebius(), 1.0, 0.0));
}
