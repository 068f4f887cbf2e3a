#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "loewner_lab/extremal_lab.hpp"

using namespace loewner_lab;
using Catch::Matchers::WithinAbs;

TEST_CASE("coefficient functional", "[extremal]") {
    const auto dom = BallGeometry::polydisc(3);
    CHECK(std::abs(functional_L(2, 0, identity_plus_square(dom, 2, 0, cplx(0.3, -0.1))) - cplx(0.3, -0.1)) < 1e-13);
    CHECK(std::abs(functional_L(0, 1, identity_map(dom))) < 1e-15);
    CHECK_THROWS_AS(functional_L(1, 1, identity_map(dom)), DomainError);
}

TEST_CASE("S_g0 sampler", "[extremal]") {
    const auto dom = BallGeometry::polydisc(2);
    const auto g = DiscFunction::moebius();
    Sg0Options only_identity;
    only_identity.blocks = {BlockKind::identity};
    Rng rng(401);
    const Sg0Sample id = sample_Sg0(g, dom, rng, 1, only_identity);
    const CVec z{0.3, cplx(-0.2, 0.4)};
    CHECK(sup_norm(evaluate(id.map, z) - z) < 1e-9);

    Rng a(77), b(77);
    const Sg0Sample s1 = sample_Sg0(g, dom, a, 3);
    const Sg0Sample s2 = sample_Sg0(g, dom, b, 3);
    CHECK(s1.id == s2.id);
    CHECK(s1.field.segments().size() == 3);
    for (const auto& seg : s1.field.segments()) {
        REQUIRE(seg.certificate.has_value());
        CHECK(seg.certificate->pass);
    }
    CHECK(sup_norm(evaluate(s1.map, z) - evaluate(s2.map, z)) < 1e-10);
    CHECK_THROWS_AS(sample_Sg0(g, dom, a, 0), DomainError);
}

TEST_CASE("support scans stay below the bound and attain it", "[extremal]") {
    Rng rng(403);
    struct Case {
        BallGeometry dom;
        DiscFunction g;
    };
    for (const auto& c : {Case{BallGeometry::polydisc(2), DiscFunction::moebius()},
                          Case{BallGeometry::euclidean(2), DiscFunction::moebius()},
                          Case{BallGeometry::spectral2(), DiscFunction::strongly_starlike(0.5)}}) {
        INFO(c.dom.label() << " " << c.g.label());
        const BoundReport rep = scan_support(c.g, c.dom, 0, 1, 6, rng);
        CHECK(rep.violations.empty());
        CHECK(rep.attained);
        CHECK(rep.pass());
        CHECK_THAT(rep.theoretical_bound, WithinAbs(c.dom.shear_factor() * d1(c.g), 1e-15));
        CHECK(rep.empirical_max <= rep.theoretical_bound + 1e-6);
        CHECK_THAT(rep.empirical_max, WithinAbs(rep.theoretical_bound, 1e-8));
        CHECK(rep.note == "no counterexample among 6 samples");
        // both signs of the canonical map give the same modulus
        REQUIRE(rep.candidates.size() >= 2);
        CHECK_THAT(std::abs(rep.candidates[0].value), WithinAbs(std::abs(rep.candidates[1].value), 1e-12));
    }
}

TEST_CASE("scan bound follows d1 across the alpha grid", "[extremal][property]") {
    const auto dom = BallGeometry::polydisc(2);
    for (int k = 1; k <= 19; ++k) {
        const double a = k / 20.0;
        Rng rng(405);
        const BoundReport rep = scan_support(DiscFunction::starlike_order(a), dom, 0, 1, 0, rng);
        const double expect = a <= 0.5 ? 1.0 : (1.0 - a) / a;
        CHECK_THAT(rep.theoretical_bound, WithinAbs(expect, 1e-15));
        CHECK(rep.attained);
        CHECK(rep.violations.empty());
    }
}

TEST_CASE("g'(0) bounds and their sharpness", "[extremal]") {
    Rng rng(407);
    for (const auto& g : {DiscFunction::moebius(), DiscFunction::starlike_order(0.75)}) {
        const BoundReport rep = verify_gprime_bounds(g, BallGeometry::polydisc(2), 4, rng);
        CHECK(rep.violations.empty());
        CHECK(rep.attained);
        CHECK_THAT(rep.theoretical_bound, WithinAbs(std::abs(g_prime0(g)), 1e-15));
        CHECK_THAT(rep.empirical_max, WithinAbs(rep.theoretical_bound, 1e-6));
    }
    // identity map candidate contributes zeros
    Rng r2(409);
    const BoundReport rep = verify_gprime_bounds(DiscFunction::moebius(), BallGeometry::polydisc(2), 0, r2);
    bool saw_identity = false;
    for (const auto& c : rep.candidates) {
        if (c.map_id != "identity") continue;
        saw_identity = true;
        CHECK(std::abs(c.value) < 1e-14);
    }
    CHECK(saw_identity);
}

TEST_CASE("shearing commutes with the parametric limit", "[extremal]") {
    const auto dom = BallGeometry::polydisc(2);
    const auto g = DiscFunction::moebius();
    CHECK(verify_shear_commutes(g, dom, HerglotzField::autonomous(identity_map(dom)), 8) < 1e-9);
    CHECK(verify_shear_commutes(g, dom, HerglotzField::autonomous(canonical_field(g, dom, 0, 1, 1)), 8) < 1e-6);
    Rng rng(411);
    const HerglotzField field = random_certified_field(g, dom, rng, 3);
    CHECK(verify_shear_commutes(g, dom, field, 8) < 1e-5);
    const HerglotzField sheared = sheared_field(field, 0, 1);
    REQUIRE(sheared.segments().size() == field.segments().size());
    for (std::size_t k = 0; k < field.segments().size(); ++k) {
        CHECK(sheared.segments()[k].t_start == field.segments()[k].t_start);
        CHECK(sheared.segments()[k].h.representation() == Representation::polynomial);
    }
}
