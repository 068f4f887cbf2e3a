#pragma once

// Second-order Taylor coefficients, the shearing operator, canonical members
// of the g-Caratheodory family and the sampling certifier for membership.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ball_geometry.hpp"
#include "core.hpp"
#include "disc_function.hpp"
#include "holmap.hpp"
#include "numerics.hpp"

namespace loewner_lab {

enum class CoeffKind { pure, mixed };

struct CoeffEstimate {
    cplx value;
    double discrepancy;       // |estimate(0.4) - estimate(0.2)|, relative to max(1, |value|)
    bool reduced_precision;   // discrepancy above 1e-8
};

namespace detail {

// Coefficient of zeta^2 in zeta -> fn(zeta) by an M-point DFT on |zeta| = rho.
template <typename Fn>
cplx circle_coefficient2(Fn&& fn, double rho, int m) {
    cplx acc = 0.0;
    for (int k = 0; k < m; ++k) {
        const double theta = 2.0 * kPi * k / m;
        acc += fn(std::polar(rho, theta)) * std::polar(1.0, -2.0 * theta);
    }
    return acc / (static_cast<double>(m) * rho * rho);
}

inline cplx pure_coeff_at(const HolMap& f, std::size_t i, std::size_t j, double rho, int m) {
    const std::size_t n = f.domain().dim();
    return circle_coefficient2([&](cplx zeta) { return evaluate_unchecked(f, zeta * CVec::unit(n, j))[i]; }, rho, m);
}

// Coefficient of z_i z_j in f_i. Along the line zeta (e_i + lambda e_j) the
// zeta^2 coefficient of f_i is a_ii + a_ij lambda + a_jj lambda^2, so a 4-point
// transform over lambda in {1, i, -1, -i} isolates a_ij exactly.
inline cplx mixed_coeff_at(const HolMap& f, std::size_t i, std::size_t j, double rho, int m) {
    const std::size_t n = f.domain().dim();
    cplx acc = 0.0;
    for (int k = 0; k < 4; ++k) {
        const cplx lambda = std::polar(1.0, kPi * k / 2.0);
        const CVec dir = CVec::unit(n, i) + lambda * CVec::unit(n, j);
        const cplx c = circle_coefficient2([&](cplx zeta) { return evaluate_unchecked(f, zeta * dir)[i]; }, rho, m);
        acc += c * std::conj(lambda);
    }
    return acc / 4.0;
}

}  // namespace detail

/// pure: coefficient of z_j^2 in f_i (i == j allowed); mixed: coefficient of
/// z_i z_j in f_i, i.e. the mixed second partial derivative at 0.
inline CoeffEstimate second_coeff_estimate(const HolMap& f, std::size_t i, std::size_t j, CoeffKind kind) {
    const std::size_t n = f.domain().dim();
    if (i >= n || j >= n) throw DomainError("second_coeff: index out of range");
    if (kind == CoeffKind::mixed && i == j) throw DomainError("second_coeff: mixed coefficient needs i != j");
    auto at = [&](double rho) {
        return kind == CoeffKind::pure ? detail::pure_coeff_at(f, i, j, rho, 64) : detail::mixed_coeff_at(f, i, j, rho, 32);
    };
    const cplx main = at(0.4);
    const cplx check = at(0.2);
    const double disc = std::abs(main - check) / std::max(1.0, std::abs(main));
    if (!(disc <= 1e-4)) {
        std::ostringstream os;
        os << "second_coeff: estimates at radii 0.4 and 0.2 disagree by " << disc;
        throw NumericalInstability(os.str());
    }
    return {main, disc, disc > 1e-8};
}

inline cplx second_coeff(const HolMap& f, std::size_t i, std::size_t j, CoeffKind kind) {
    return second_coeff_estimate(f, i, j, kind).value;
}

/// Dh(0) z + q z_j^2 e_i with q the pure z_j^2 coefficient of h_i.
inline HolMap shear(const HolMap& h, std::size_t i, std::size_t j) {
    const BallGeometry& dom = h.domain();
    dom.require_pair(i, j, "shear");
    const std::size_t n = dom.dim();
    if (sup_norm(evaluate_unchecked(h, CVec(n))) > 1e-10) throw DomainError("shear: h(0) must vanish");
    std::vector<Monomial> terms;
    if (h.normalized()) {
        for (std::size_t k = 0; k < n; ++k) terms.push_back(linear_monomial(k, k, 1.0));
    } else {
        const CMat d = jacobian(h, CVec(n));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (d(a, b) != cplx(0.0)) terms.push_back(linear_monomial(a, b, d(a, b)));
    }
    const cplx q = second_coeff(h, i, j, CoeffKind::pure);
    if (q != cplx(0.0)) terms.push_back(square_monomial(i, j, q));
    return polynomial_map(dom, std::move(terms), h.normalized());
}

/// z + sign * shear_factor * d1(g) * z_j^2 e_i.
inline HolMap canonical_field(const DiscFunction& g, const BallGeometry& dom, std::size_t i, std::size_t j, int sign) {
    dom.require_pair(i, j, "canonical_field");
    if (sign != 1 && sign != -1) throw DomainError("canonical_field: sign must be +1 or -1");
    return identity_plus_square(dom, i, j, static_cast<double>(sign) * dom.shear_factor() * d1(g));
}

/// Signed Euclidean distance from w to the boundary of g(U), positive inside.
/// Exact for the catalog; custom functions fall back to the boundary polyline
/// or, lacking one, to the scaled inverse-modulus margin.
inline double boundary_distance(const DiscFunction& g, cplx w) {
    const double a = g.alpha();
    switch (g.family()) {
        case Family::moebius: return w.real();
        case Family::starlike_order: {
            if (a == 0.0) return w.real();
            const double c = 1.0 / (2.0 * a);
            return c - std::abs(w - c);
        }
        case Family::almost_starlike: return w.real() - a;
        case Family::strongly_starlike: {
            const double half = a * kPi / 2.0;
            auto ray_distance = [&](double ang) {
                const cplx dir = std::polar(1.0, ang);
                const double t = std::max(0.0, std::real(w * std::conj(dir)));
                return std::abs(w - t * dir);
            };
            const double d = std::min(ray_distance(half), ray_distance(-half));
            const bool inside = w != cplx(0.0) && std::abs(std::arg(w)) < half;
            return inside ? d : -d;
        }
        case Family::custom:
            if (g.has_boundary()) return detail::winding_membership(g, w, 0.0).distance * std::max(1.0, std::abs(w));
            return membership_margin(g, w);
    }
    return 0.0;
}

struct MgWitness {
    CVec z;
    LinearFunctional l;
    cplx w;             // l(h(z)) / ||z||
    double margin;
    bool singular = false;  // value map undefined at z (e.g. singular Jacobian)
};

struct MgCertificate {
    bool pass = true;
    std::size_t samples_used = 0;
    std::size_t evaluations = 0;
    std::size_t indeterminate = 0;
    double eps = 1e-9;
    double worst_margin = kInf;
    std::optional<MgWitness> worst;    // sample attaining worst_margin
    std::optional<MgWitness> witness;  // worst violating sample when pass is false
};

struct CertifyOptions {
    double eps = 1e-9;
    bool structured = true;  // frame tori and polydisc edge samples
    int torus_phases = 64;
};

namespace detail {

inline constexpr std::array<double, 11> kCertifyRadii{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.999};

inline std::vector<CVec> certification_points(const BallGeometry& dom, std::size_t n_random, Rng& rng,
                                              const CertifyOptions& opt) {
    std::vector<CVec> pts;
    const std::size_t radii = kCertifyRadii.size();
    for (std::size_t k = 0; k < n_random; ++k) {
        const double r = kCertifyRadii[k % radii];
        CVec u = sample_sphere(dom, rng);
        if (dom.kind() == BallKind::spectral2) {
            while (support_functionals(dom, u).degenerate) u = sample_sphere(dom, rng);
        }
        pts.push_back(r * u);
    }
    if (!opt.structured) return pts;
    if (dom.kind() == BallKind::polydisc) {
        const std::size_t edges = std::max<std::size_t>(16, n_random / 10);
        for (std::size_t k = 0; k < edges; ++k) pts.push_back(kCertifyRadii[k % radii] * sample_polydisc_edge(dom, rng));
    }
    const int m = opt.torus_phases;
    const std::size_t n = dom.dim();
    auto add_torus = [&](std::size_t a, std::size_t b, double ma, double mb) {
        for (const double r : {0.9, 0.99, 0.999}) {
            for (int p = 0; p < m; ++p) {
                for (int q = 0; q < m; ++q) {
                    CVec z(n);
                    z[a] = std::polar(r * ma, 2.0 * kPi * p / m);
                    z[b] = std::polar(r * mb, 2.0 * kPi * q / m);
                    pts.push_back(z);
                }
            }
        }
    };
    if (dom.kind() == BallKind::euclidean) {
        // Moduli maximizing |z_a| |z_b|^2 on the sphere, plus the balanced torus.
        const double s = 1.0 / std::sqrt(3.0);
        const double t = std::sqrt(2.0 / 3.0);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (a != b) add_torus(a, b, s, t);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) add_torus(a, b, std::sqrt(0.5), std::sqrt(0.5));
    } else {
        const auto frame = dom.frame_coords();
        for (std::size_t a = 0; a < frame.size(); ++a)
            for (std::size_t b = a + 1; b < frame.size(); ++b) add_torus(frame[a], frame[b], 1.0, 1.0);
    }
    return pts;
}

struct PointOutcome {
    double margin = kInf;
    std::optional<MgWitness> worst;
    std::optional<MgWitness> violation;
    std::size_t evaluations = 0;
    std::size_t indeterminate = 0;
};

template <typename ValueFn>
PointOutcome certify_point(const ValueFn& value, const DiscFunction& g, const BallGeometry& dom, const CVec& z,
                           double eps) {
    PointOutcome out;
    const std::optional<CVec> hz = value(z);
    if (!hz) {
        MgWitness w{z, LinearFunctional{CVec(dom.dim())}, cplx(kInf, 0.0), -kInf, true};
        out.margin = -kInf;
        out.worst = w;
        out.violation = w;
        return out;
    }
    const double nz = norm(dom, z);
    const SupportSet support = support_functionals(dom, z);
    for (const auto& l : support.functionals) {
        const cplx w = l(*hz) / nz;
        const double margin = boundary_distance(g, w);
        const Membership verdict = contains(g, w, eps);
        ++out.evaluations;
        if (verdict == Membership::indeterminate) ++out.indeterminate;
        const bool violated = verdict == Membership::outside || margin < -eps * std::max(1.0, std::abs(w));
        MgWitness wit{z, l, w, margin, false};
        if (margin < out.margin || !out.worst) {
            out.margin = margin;
            out.worst = wit;
        }
        if (violated && (!out.violation || margin < out.violation->margin)) out.violation = wit;
    }
    return out;
}

}  // namespace detail

/// Sampling certificate for z -> value(z) taking values in M_g: value returns
/// h(z), or nullopt where h is undefined (recorded as a singular witness).
template <typename ValueFn>
MgCertificate certify_values(const ValueFn& value, const DiscFunction& g, const BallGeometry& dom, std::size_t n,
                             Rng& rng, const CertifyOptions& opt = {}) {
    const std::vector<CVec> pts = detail::certification_points(dom, n, rng, opt);
    const auto outcomes = parallel_map<detail::PointOutcome>(
        pts.size(), [&](std::size_t k) { return detail::certify_point(value, g, dom, pts[k], opt.eps); });
    MgCertificate cert;
    cert.eps = opt.eps;
    cert.samples_used = pts.size();
    for (const auto& o : outcomes) {
        cert.evaluations += o.evaluations;
        cert.indeterminate += o.indeterminate;
        if (o.worst && (!cert.worst || o.margin < cert.worst_margin)) {
            cert.worst_margin = o.margin;
            cert.worst = o.worst;
        }
        if (o.violation && (!cert.witness || o.violation->margin < cert.witness->margin)) cert.witness = o.violation;
    }
    cert.pass = !cert.witness.has_value();
    return cert;
}

inline MgCertificate certify_Mg(const HolMap& h, const DiscFunction& g, const BallGeometry& dom, std::size_t n,
                                double eps, Rng& rng, CertifyOptions opt = {}) {
    if (!(h.domain() == dom)) throw DomainError("certify_Mg: map lives on a different domain");
    if (!h.normalized()) throw PreconditionError("certify_Mg: h must be normalized");
    opt.eps = eps;
    return certify_values([&](const CVec& z) -> std::optional<CVec> { return evaluate_unchecked(h, z); }, g, dom, n,
                          rng, opt);
}

enum class BlockKind { identity, profile, canonical };

/// Convex combination (Dirichlet weights) of k blocks drawn uniformly from the
/// allowed kinds. Canonical blocks are skipped on domains without admissible
/// pairs.
inline HolMap random_Mg_member(const DiscFunction& g, const BallGeometry& dom, Rng& rng, int k,
                               std::vector<BlockKind> allowed = {BlockKind::identity, BlockKind::profile,
                                                                 BlockKind::canonical}) {
    if (k < 1) throw DomainError("random_Mg_member: k must be >= 1");
    const std::size_t n = dom.dim();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (dom.admissible_pair(i, j)) pairs.emplace_back(i, j);
    if (pairs.empty()) std::erase(allowed, BlockKind::canonical);
    if (allowed.empty()) throw DomainError("random_Mg_member: no block kinds available");

    std::uniform_int_distribution<std::size_t> pick_kind(0, allowed.size() - 1);
    std::exponential_distribution<double> expo(1.0);
    std::vector<HolMap> blocks;
    std::vector<double> weights;
    for (int b = 0; b < k; ++b) {
        switch (allowed[pick_kind(rng)]) {
            case BlockKind::identity: blocks.push_back(identity_map(dom)); break;
            case BlockKind::profile: {
                SupportSet s;
                do {
                    s = support_functionals(dom, sample_sphere(dom, rng));
                } while (s.degenerate || s.functionals.empty());
                blocks.push_back(g_profile_map(dom, g, s.functionals.front()));
                break;
            }
            case BlockKind::canonical: {
                std::uniform_int_distribution<std::size_t> pick_pair(0, pairs.size() - 1);
                const auto [i, j] = pairs[pick_pair(rng)];
                const int sign = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
                blocks.push_back(canonical_field(g, dom, i, j, sign));
                break;
            }
        }
        weights.push_back(expo(rng));
    }
    if (k == 1) return blocks.front();
    double total = 0.0;
    for (double w : weights) total += w;
    for (double& w : weights) w /= total;
    return convex_combination(weights, blocks);
}

}  // namespace loewner_lab
