#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "loewner_lab/loewner_flow.hpp"

using namespace loewner_lab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Exact flow of dv/dt = -(v + c v_j^2 e_i).
CVec shear_flow(const CVec& z, std::size_t i, std::size_t j, cplx c, double t) {
    CVec v = std::exp(-t) * z;
    v[i] += c * z[j] * z[j] * (std::exp(-2.0 * t) - std::exp(-t));
    return v;
}

HerglotzField three_piece_field(const DiscFunction& g, const BallGeometry& dom, Rng& rng) {
    return certified_field({{0.0, random_Mg_member(g, dom, rng, 2)},
                            {0.5, random_Mg_member(g, dom, rng, 3)},
                            {1.0, random_Mg_member(g, dom, rng, 2)}},
                           g, 2000, rng);
}

}  // namespace

TEST_CASE("field schedules are validated", "[flow]") {
    const auto dom = BallGeometry::polydisc(2);
    const HolMap id = identity_map(dom);
    CHECK_THROWS_AS(HerglotzField({{0.5, id, std::nullopt}}), DomainError);
    CHECK_THROWS_AS(HerglotzField({{0.0, id, std::nullopt}, {0.0, id, std::nullopt}}), DomainError);
    CHECK_THROWS_AS(HerglotzField({{0.0, id, std::nullopt}, {1.0, identity_map(BallGeometry::polydisc(3)), std::nullopt}}),
                    DomainError);
    const HerglotzField f({{0.0, id, std::nullopt}, {1.0, canonical_field(DiscFunction::moebius(), dom, 0, 1, 1), std::nullopt}});
    CHECK(f.segment_index(0.3) == 0);
    CHECK(f.segment_index(1.0) == 1);
    CHECK(f.segment_index(7.0) == 1);
    Rng rng(3);
    CHECK_THROWS_AS(certified_field({{0.0, identity_plus_square(dom, 0, 1, 1.5)}}, DiscFunction::moebius(), 1000, rng),
                    PreconditionError);
}

TEST_CASE("flow of the identity field is e^{s-t} z", "[flow]") {
    const auto dom = BallGeometry::polydisc(2);
    const auto field = HerglotzField::autonomous(identity_map(dom));
    const CVec z{0.5, cplx(0.1, 0.7)};
    const auto r = flow(field, z, 1.0, 4.0);
    CHECK(sup_norm(r.endpoint - std::exp(-3.0) * z) < 1e-10);
    CHECK_THROWS_AS(flow(field, z, 2.0, 1.0), DomainError);
    CHECK_THROWS_AS(flow(field, CVec{1.0, 0.0}, 0.0, 1.0), DomainError);
}

TEST_CASE("shear field flow matches the closed form", "[flow]") {
    Rng rng(301);
    for (const auto& dom : {BallGeometry::polydisc(2), BallGeometry::euclidean(2), BallGeometry::spectral2()}) {
        const auto g = DiscFunction::starlike_order(0.75);
        const cplx c = dom.shear_factor() * d1(g);
        const auto field = HerglotzField::autonomous(canonical_field(g, dom, 0, 1, 1));
        for (int k = 0; k < 20; ++k) {
            const CVec z = 0.95 * sample_sphere(dom, rng);
            for (double t : {0.5, 2.0, 10.0}) {
                CHECK(norm(dom, flow(field, z, 0.0, t).endpoint - shear_flow(z, 0, 1, c, t)) < 1e-8);
            }
        }
    }
}

TEST_CASE("integrator error scales with the tolerance", "[flow]") {
    const auto dom = BallGeometry::polydisc(2);
    const auto field = HerglotzField::autonomous(canonical_field(DiscFunction::moebius(), dom, 0, 1, 1));
    const CVec z{cplx(0.3, 0.5), cplx(-0.6, 0.7)};
    const CVec exact = shear_flow(z, 0, 1, 1.0, 3.0);
    const double loose = norm(dom, flow(field, z, 0.0, 3.0, 1e-6).endpoint - exact);
    const double tight = norm(dom, flow(field, z, 0.0, 3.0, 1e-9).endpoint - exact);
    CHECK(loose < 1e-5);
    CHECK(tight < loose / 50.0);
}

TEST_CASE("semigroup, monotone decay and linearization", "[flow][property]") {
    Rng rng(303);
    const auto dom = BallGeometry::polydisc(2);
    const auto g = DiscFunction::moebius();
    const HerglotzField field = three_piece_field(g, dom, rng);
    FlowOptions rec;
    rec.record_trajectory = true;
    for (int k = 0; k < 20; ++k) {
        const CVec z = 0.9 * sample_sphere(dom, rng);
        const CVec direct = flow(field, z, 0.2, 3.0).endpoint;
        const CVec split = flow(field, flow(field, z, 0.2, 0.8).endpoint, 0.8, 3.0).endpoint;
        CHECK(norm(dom, direct - split) < 1e-8);
        const auto traj = flow(field, z, 0.0, 3.0, rec).trajectory;
        REQUIRE(traj.size() > 2);
        for (std::size_t m = 1; m < traj.size(); ++m) REQUIRE(norm(dom, traj[m].second) < norm(dom, traj[m - 1].second));
    }
    // Dv(0, s, t) = e^{s - t} I by central differences at the origin
    const double h = 1e-4;
    for (const auto& [s, t] : {std::pair{0.0, 1.0}, std::pair{0.3, 2.5}}) {
        for (std::size_t k = 0; k < 2; ++k) {
            const CVec e = CVec::unit(2, k);
            const CVec d = (1.0 / (2.0 * h)) * (flow(field, h * e, s, t).endpoint - flow(field, -h * e, s, t).endpoint);
            CHECK(sup_norm(d - std::exp(s - t) * e) < 1e-8);
        }
    }
}

TEST_CASE("parametric map examples", "[flow]") {
    Rng rng(305);
    const auto dom = BallGeometry::polydisc(2);
    const CVec z{0.4, cplx(0.2, -0.3)};
    const auto id = parametric_map(HerglotzField::autonomous(identity_map(dom)), z);
    CHECK(id.converged);
    CHECK(sup_norm(id.endpoint - z) < 1e-9);
    for (const auto& g : {DiscFunction::moebius(), DiscFunction::strongly_starlike(0.5)}) {
        const auto field = HerglotzField::autonomous(canonical_field(g, dom, 0, 1, 1));
        for (int k = 0; k < 20; ++k) {
            const CVec w = 0.7 * sample_sphere(dom, rng);
            const auto r = parametric_map(field, w);
            REQUIRE(r.converged);
            CVec expect = w;
            expect[0] -= d1(g) * w[1] * w[1];
            CHECK(sup_norm(r.endpoint - expect) < 1e-6);
        }
    }
}

TEST_CASE("parametric map of g(z1) z is the Koebe map", "[flow]") {
    Rng rng(307);
    const auto dom = BallGeometry::polydisc(2);
    for (const auto& g : {DiscFunction::moebius(), DiscFunction::starlike_order(0.75)}) {
        const auto field = HerglotzField::autonomous(g_profile_map(dom, g, LinearFunctional::coordinate(2, 0)));
        for (int k = 0; k < 10; ++k) {
            const CVec z = 0.7 * sample_sphere(dom, rng);
            const auto r = parametric_map(field, z);
            REQUIRE(r.converged);
            const CVec expect = (koebe_transform(g, z[0]) / z[0]) * z;
            CHECK(sup_norm(r.endpoint - expect) < 1e-6);
        }
    }
}

TEST_CASE("parametric maps are normalized", "[flow][property]") {
    Rng rng(309);
    const auto dom = BallGeometry::polydisc(2);
    const auto field = three_piece_field(DiscFunction::strongly_starlike(0.6), dom, rng);
    const HolMap f = parametric_holmap(field, "p");
    CHECK(sup_norm(evaluate(f, CVec(2))) < 1e-12);
    CHECK((jacobian(f, CVec(2)) - CMat::identity(2)).max_abs() < 1e-7);
}

TEST_CASE("parametric map reports non-convergence", "[flow]") {
    const auto dom = BallGeometry::polydisc(2);
    const auto field = HerglotzField::autonomous(canonical_field(DiscFunction::moebius(), dom, 0, 1, 1));
    ParametricOptions opt;
    opt.horizon = 5.0;
    const auto r = parametric_map(field, CVec{0.3, 0.6}, opt);
    CHECK_FALSE(r.converged);
    CHECK(r.horizon_used == 5.0);
}

TEST_CASE("starlike chain checks", "[flow]") {
    Rng rng(311);
    const auto dom = BallGeometry::polydisc(2);
    for (const auto& g : {DiscFunction::moebius(), DiscFunction::almost_starlike(0.4)}) {
        CHECK(check_starlike_chain(identity_map(dom), g, dom, 2000, rng).pass);
        CHECK(check_starlike_chain(identity_plus_square(dom, 0, 1, d1(g)), g, dom, 2000, rng).pass);
        CHECK_FALSE(check_starlike_chain(identity_plus_square(dom, 0, 1, 2.0 * d1(g)), g, dom, 2000, rng).pass);
    }
}

TEST_CASE("Loewner PDE residual", "[flow]") {
    Rng rng(313);
    const auto dom = BallGeometry::polydisc(2);
    const double c = 0.8;
    const HolMap F = identity_plus_square(dom, 0, 1, -c);
    CHECK(check_pde(identity_map(dom), HerglotzField::autonomous(identity_map(dom)), 50, rng) < 1e-15);
    CHECK(check_pde(F, HerglotzField::autonomous(identity_plus_square(dom, 0, 1, c)), 50, rng) < 1e-10);
    // mismatched field: residual e^t c z_2^2, bounded below away from zero
    const double mismatch = check_pde(F, HerglotzField::autonomous(identity_map(dom)), 200, rng);
    CHECK(mismatch > 0.1);
    CHECK(mismatch <= c * 0.81 * std::exp(1.0) + 1e-12);
}

TEST_CASE("Koebe transform", "[flow]") {
    Rng rng(315);
    const auto m = DiscFunction::moebius();
    for (int k = 0; k < 200; ++k) {
        const cplx z = uniform_disc(rng, 0.95);
        CHECK(std::abs(koebe_transform(m, z) - z / ((1.0 - z) * (1.0 - z))) < 1e-9);
    }
    CHECK_THAT(std::real(koebe_transform(m, 0.99)), WithinRel(9900.0, 1e-10));
    // residual of zeta b'/b = 1/g on a ray grid, b' by a Cauchy transform
    for (const auto& g : {DiscFunction::starlike_order(0.3), DiscFunction::strongly_starlike(0.7),
                          DiscFunction::almost_starlike(0.2)}) {
        for (double r : {0.2, 0.5, 0.8, 0.9}) {
            for (int a = 0; a < 8; ++a) {
                const cplx zeta = std::polar(r, 2.0 * kPi * a / 8.0);
                const double rad = 0.5 * (1.0 - r);
                cplx db = 0.0;
                const int M = 64;
                for (int m2 = 0; m2 < M; ++m2) {
                    const cplx e = std::polar(1.0, 2.0 * kPi * m2 / M);
                    db += koebe_transform(g, zeta + rad * e) / (rad * e);
                }
                db /= static_cast<double>(M);
                const cplx res = zeta * db / koebe_transform(g, zeta) - 1.0 / g.value(zeta);
                CHECK(std::abs(res) < 1e-8);
            }
        }
    }
}

TEST_CASE("growth constant and growth inequality", "[flow]") {
    const auto m = DiscFunction::moebius();
    CHECK_THAT(growth_constant(m), WithinAbs(2.0, 1e-3));
    for (const auto& row : growth_check(m, {0.9, 0.99, 0.999}, growth_constant(m))) {
        CHECK(row.holds);
        CHECK_THAT(row.b, WithinRel(row.rho / ((1.0 - row.rho) * (1.0 - row.rho)), 1e-9));
    }
}

TEST_CASE("unbounded support map", "[flow]") {
    const auto dom = BallGeometry::euclidean(2);
    const HolMap f = unbounded_support_map(DiscFunction::moebius(), dom);
    CHECK_THAT(norm(dom, evaluate(f, 0.99 * CVec::unit(2, 0))), WithinRel(9900.0, 1e-4));
    CHECK(std::abs(second_coeff(f, 0, 0, CoeffKind::pure) - 2.0) < 1e-7);
    CHECK_NOTHROW(unbounded_support_map(DiscFunction::starlike_order(0.3), dom));
    CHECK_THROWS_AS(unbounded_support_map(DiscFunction::strongly_starlike(0.5), dom), PreconditionError);
    CHECK_THROWS_AS(unbounded_support_map(DiscFunction::almost_starlike(0.5), dom), PreconditionError);
    try {
        (void)unbounded_support_map(DiscFunction::strongly_starlike(0.5), dom);
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("g(rho) = O(1 - rho) as rho -> 1-0") != std::string::npos);
    }
}
