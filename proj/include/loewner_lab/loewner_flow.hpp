#pragma once

// Loewner ODE dv/dt = -h(v, t) for piecewise-constant Herglotz fields,
// parametric limits e^t v(z, t), starlikeness and PDE checks, and the radial
// Koebe-type transform b with the unbounded support map built from it.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ball_geometry.hpp"
#include "carath.hpp"
#include "core.hpp"
#include "disc_function.hpp"
#include "holmap.hpp"
#include "numerics.hpp"

namespace loewner_lab {

struct FieldSegment {
    double t_start = 0.0;
    HolMap h;
    std::optional<MgCertificate> certificate;
};

/// h(z, t) = h_k(z) for t in [t_k, t_{k+1}); the last segment extends to
/// infinity.
class HerglotzField {
public:
    explicit HerglotzField(std::vector<FieldSegment> segments) : segs_(std::move(segments)) {
        if (segs_.empty()) throw DomainError("HerglotzField: empty schedule");
        if (segs_.front().t_start != 0.0) throw DomainError("HerglotzField: schedule must start at t = 0");
        for (std::size_t k = 0; k < segs_.size(); ++k) {
            if (!(segs_[k].h.domain() == segs_.front().h.domain())) {
                throw DomainError("HerglotzField: segments live on different domains");
            }
            if (!segs_[k].h.normalized()) throw PreconditionError("HerglotzField: segment maps must be normalized");
            if (k > 0 && !(segs_[k].t_start > segs_[k - 1].t_start)) {
                throw DomainError("HerglotzField: breakpoints must be strictly increasing");
            }
        }
    }

    static HerglotzField autonomous(HolMap h, std::optional<MgCertificate> cert = std::nullopt) {
        return HerglotzField({FieldSegment{0.0, std::move(h), std::move(cert)}});
    }

    [[nodiscard]] const std::vector<FieldSegment>& segments() const noexcept { return segs_; }
    [[nodiscard]] const BallGeometry& domain() const noexcept { return segs_.front().h.domain(); }

    /// Last breakpoint; beyond it the field is autonomous.
    [[nodiscard]] double horizon() const noexcept { return segs_.back().t_start; }

    [[nodiscard]] std::size_t segment_index(double t) const noexcept {
        std::size_t k = 0;
        while (k + 1 < segs_.size() && segs_[k + 1].t_start <= t) ++k;
        return k;
    }

    [[nodiscard]] const HolMap& at(double t) const noexcept { return segs_[segment_index(t)].h; }

    [[nodiscard]] CVec evaluate(const CVec& z, double t) const { return evaluate_unchecked(at(t), z); }

private:
    std::vector<FieldSegment> segs_;
};

/// Certifies every segment map and attaches the certificates; throws
/// PreconditionError if any segment fails.
inline HerglotzField certified_field(const std::vector<std::pair<double, HolMap>>& schedule, const DiscFunction& g,
                                     std::size_t n_samples, Rng& rng, double eps = 1e-9) {
    std::vector<FieldSegment> segs;
    for (const auto& [t, h] : schedule) {
        MgCertificate cert = certify_Mg(h, g, h.domain(), n_samples, eps, rng);
        if (!cert.pass) {
            std::ostringstream os;
            os << "certified_field: segment starting at t = " << t << " is not in M_g (margin " << cert.worst_margin
               << ")";
            throw PreconditionError(os.str());
        }
        segs.push_back({t, h, std::move(cert)});
    }
    return HerglotzField(std::move(segs));
}

struct FlowResult {
    CVec endpoint;
    std::vector<std::pair<double, CVec>> trajectory;
    double error_estimate = 0.0;
    double horizon_used = 0.0;
    bool converged = true;
    std::size_t steps = 0;
};

struct FlowOptions {
    double tol = 1e-10;
    bool record_trajectory = false;
    std::size_t max_steps = 2'000'000;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DP54 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b* (fifth minus fourth order weights)
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
};

// Integrates v' = -h(v) over [t0, t1] for a fixed map h.
inline void integrate_segment(const HolMap& h, const BallGeometry& dom, CVec& y, double t0, double t1,
                              const FlowOptions& opt, FlowResult& res, double& step) {
    using T = DP54;
    auto rhs = [&](const CVec& v) { return cplx(-1.0) * evaluate_unchecked(h, v); };
    double t = t0;
    CVec k1 = rhs(y);
    double ny = norm(dom, y);
    while (t < t1) {
        if (res.steps >= opt.max_steps) throw NumericalInstability("flow: step budget exhausted");
        double hstep = std::min(step, t1 - t);
        const bool last = hstep >= t1 - t;
        const CVec k2 = rhs(y + (hstep * T::a21) * k1);
        const CVec k3 = rhs(y + hstep * (T::a31 * k1 + T::a32 * k2));
        const CVec k4 = rhs(y + hstep * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3));
        const CVec k5 = rhs(y + hstep * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4));
        const CVec k6 = rhs(y + hstep * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5));
        const CVec ynew = y + hstep * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
        const CVec k7 = rhs(ynew);
        const CVec err = hstep * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);
        const double scale = opt.tol * std::max(sup_norm(y), sup_norm(ynew));
        const double err_abs = sup_norm(err);
        double ratio = scale > 0.0 ? err_abs / scale : (err_abs > 0.0 ? kInf : 0.0);
        if (!std::isfinite(err_abs) || !std::isfinite(sup_norm(ynew))) ratio = kInf;
        if (ratio <= 1.0) {
            const double nnew = norm(dom, ynew);
            if (!(nnew < 1.0) || nnew > ny + 1e-9) {
                std::ostringstream os;
                os << "flow: trajectory norm increased from " << ny << " to " << nnew << " at t = " << t + hstep;
                throw NumericalInstability(os.str());
            }
            t = last ? t1 : t + hstep;
            y = ynew;
            ny = nnew;
            k1 = k7;
            res.error_estimate += err_abs;
            ++res.steps;
            if (opt.record_trajectory) res.trajectory.emplace_back(t, y);
        }
        const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
        if (!(ratio <= 1.0) || !last) step = hstep * factor;
        if (step < 1e-14) throw NumericalInstability("flow: step size underflow");
    }
}

}  // namespace detail

/// v(z, s, t): solution of dv/dt = -h(v, t), v(s) = z. Schedule breakpoints are
/// step boundaries; the trajectory norm is monitored for monotonic decay.
inline FlowResult flow(const HerglotzField& field, const CVec& z, double s, double t, const FlowOptions& opt = {}) {
    const BallGeometry& dom = field.domain();
    if (z.size() != dom.dim()) throw DomainError("flow: dimension mismatch");
    if (t < s) throw DomainError("flow: t must not precede s");
    if (s < 0.0) throw DomainError("flow: s must be nonnegative");
    if (!(norm(dom, z) < 1.0)) throw DomainError("flow: starting point outside the open ball");
    FlowResult res;
    res.endpoint = z;
    res.horizon_used = t;
    if (opt.record_trajectory) res.trajectory.emplace_back(s, z);
    double step = 0.01;
    const auto& segs = field.segments();
    double cur = s;
    for (std::size_t k = field.segment_index(s); k < segs.size() && cur < t; ++k) {
        const double end = k + 1 < segs.size() ? std::min(t, segs[k + 1].t_start) : t;
        if (end > cur) detail::integrate_segment(segs[k].h, dom, res.endpoint, cur, end, opt, res, step);
        cur = end;
    }
    return res;
}

inline FlowResult flow(const HerglotzField& field, const CVec& z, double s, double t, double tol) {
    FlowOptions opt;
    opt.tol = tol;
    return flow(field, z, s, t, opt);
}

struct ParametricOptions {
    double tol = 1e-8;        // convergence of successive e^t v values
    double flow_tol = 1e-10;  // integrator tolerance
    double t_step = 5.0;
    double horizon = 40.0;
};

/// lim e^t v(z, 0, t), probed at t = 5, 10, ..., 40.
inline FlowResult parametric_map(const HerglotzField& field, const CVec& z, const ParametricOptions& opt = {}) {
    const BallGeometry& dom = field.domain();
    if (!(norm(dom, z) < 1.0)) throw DomainError("parametric_map: point outside the open ball");
    FlowOptions fo;
    fo.tol = opt.flow_tol;
    FlowResult out;
    out.converged = false;
    CVec v = z;
    double t = 0.0;
    std::optional<CVec> prev;
    while (t < opt.horizon - 1e-12) {
        const double next = std::min(opt.horizon, t + opt.t_step);
        const FlowResult piece = flow(field, v, t, next, fo);
        v = piece.endpoint;
        out.steps += piece.steps;
        out.error_estimate += std::exp(next) * piece.error_estimate;
        t = next;
        const CVec scaled = std::exp(t) * v;
        out.endpoint = scaled;
        out.horizon_used = t;
        if (prev) {
            const double diff = norm(dom, scaled - *prev);
            if (diff < opt.tol) {
                out.converged = true;
                break;
            }
        }
        prev = scaled;
    }
    return out;
}

inline FlowResult parametric_map(const HerglotzField& field, const CVec& z, double tol) {
    ParametricOptions opt;
    opt.tol = tol;
    return parametric_map(field, z, opt);
}

/// The parametric limit as a black-box map (non-converged points throw).
inline HolMap parametric_holmap(const HerglotzField& field, std::string tag, ParametricOptions opt = {}) {
    auto fn = [field, opt](const CVec& z) {
        const FlowResult r = parametric_map(field, z, opt);
        if (!r.converged) throw NumericalInstability("parametric map did not converge by the horizon");
        return r.endpoint;
    };
    return black_box_map(field.domain(), std::move(fn), std::move(tag), true);
}

/// Certifies z -> [DF(z)]^{-1} F(z) in M_g; singular Jacobians become witnesses.
inline MgCertificate check_starlike_chain(const HolMap& F, const DiscFunction& g, const BallGeometry& dom,
                                          std::size_t n, Rng& rng, CertifyOptions opt = {}) {
    if (!(F.domain() == dom)) throw DomainError("check_starlike_chain: domain mismatch");
    if (!F.normalized()) throw PreconditionError("check_starlike_chain: F must be normalized");
    auto value = [&](const CVec& z) -> std::optional<CVec> {
        CVec h;
        if (!solve_linear(jacobian(F, z), evaluate_unchecked(F, z), h)) return std::nullopt;
        return h;
    };
    return certify_values(value, g, dom, n, rng, opt);
}

/// max over sampled (z, t) of ||df/dt - Df h|| for the chain f(z, t) = e^t F(z),
/// z with norm <= 0.9 and t in [0, horizon].
inline double check_pde(const HolMap& F, const HerglotzField& field, std::size_t samples, Rng& rng,
                        double horizon = 1.0) {
    const BallGeometry& dom = F.domain();
    std::uniform_real_distribution<double> ur(0.0, 0.9);
    std::uniform_real_distribution<double> ut(0.0, horizon);
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const CVec z = ur(rng) * sample_sphere(dom, rng);
        const double t = ut(rng);
        const CVec h = field.evaluate(z, t);
        const CVec res = std::exp(t) * (evaluate_unchecked(F, z) - jacobian(F, z) * h);
        worst = std::max(worst, norm(dom, res));
    }
    return worst;
}

// Radial transform b -------------------------------------------------------------

namespace detail {

// Integrand (1/g(s zeta) - 1)/s of the log-transform, with the s -> 0 limit.
inline cplx koebe_integrand(const DiscFunction& g, cplx zeta, double s, cplx gp0) {
    const cplx u = s * zeta;
    if (std::abs(u) < 1e-7) return -gp0 * zeta;
    return (1.0 / g.value(u) - 1.0) / s;
}

// Integral of the log-transform over [0, 1], graded toward s = 1 when the
// radial segment approaches the unit circle.
inline cplx koebe_log_integral(const DiscFunction& g, cplx zeta, int quad_points) {
    const QuadratureRule& rule = gauss_legendre(quad_points);
    const cplx gp0 = g_prime0(g);
    auto panel = [&](double a, double b) {
        cplx acc = 0.0;
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (b + a);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            acc += rule.weights[k] * koebe_integrand(g, zeta, mid + half * rule.nodes[k], gp0);
        }
        return half * acc;
    };
    const double r = std::abs(zeta);
    if (r <= 0.9) return panel(0.0, 1.0);
    const double gap = 1.0 / r - 1.0;  // distance from s = 1 to the singular radius
    cplx acc = 0.0;
    double a = 0.0;
    double len = 0.5;
    while (len > gap && len > 1e-15) {
        acc += panel(a, a + len);
        a += len;
        len *= 0.5;
    }
    acc += panel(a, 1.0);
    return acc;
}

}  // namespace detail

/// b(zeta) = zeta exp(int_0^1 (1/g(s zeta) - 1)/s ds), the solution of
/// zeta b'/b = 1/g with b(0) = 0, b'(0) = 1.
inline cplx koebe_transform(const DiscFunction& g, cplx zeta, int quad_points = 64) {
    if (!(std::abs(zeta) < 1.0)) throw DomainError("koebe_transform: |zeta| must be < 1");
    if (zeta == cplx(0.0)) return 0.0;
    return zeta * std::exp(detail::koebe_log_integral(g, zeta, quad_points));
}

/// phi(s) = b(s)/s, so that z -> phi(z_1) z is the unbounded support map.
class KoebeProfile final : public ScalarProfile {
public:
    explicit KoebeProfile(DiscFunction g, int quad_points = 64)
        : g_(std::move(g)), quad_(quad_points), gp0_(g_prime0(g_)) {}

    [[nodiscard]] cplx value(cplx s) const override {
        if (s == cplx(0.0)) return 1.0;
        return std::exp(detail::koebe_log_integral(g_, s, quad_));
    }

    [[nodiscard]] cplx derivative(cplx s) const override {
        if (std::abs(s) < 1e-8) return -gp0_;
        return value(s) * (1.0 / g_.value(s) - 1.0) / s;
    }

    [[nodiscard]] std::string label() const override { return "b/zeta[" + g_.label() + "]"; }
    [[nodiscard]] const DiscFunction& disc() const noexcept { return g_; }
    [[nodiscard]] int quad_points() const noexcept { return quad_; }

private:
    DiscFunction g_;
    int quad_;
    cplx gp0_;
};

/// Inf over rho in (1/2, 1) of (1 - rho) / (rho g(rho)), sampled on a grid
/// that is geometric in 1 - rho down to 1e-12.
inline double growth_constant(const DiscFunction& g) {
    double best = kInf;
    for (int k = 0; k <= 4000; ++k) {
        const double gap = 0.5 * std::pow(1e-12 / 0.5, k / 4000.0);
        const double rho = 1.0 - gap;
        const double v = gap / (rho * std::real(g.value(rho)));
        best = std::min(best, v);
    }
    return best;
}

struct GrowthRow {
    double rho;
    double b;       // b(rho)
    double bound;   // b(1/2) (2 (1 - rho))^{-C}
    bool holds;
};

inline std::vector<GrowthRow> growth_check(const DiscFunction& g, const std::vector<double>& rhos, double c) {
    const double b_half = std::real(koebe_transform(g, 0.5));
    std::vector<GrowthRow> rows;
    for (double rho : rhos) {
        const double b = std::real(koebe_transform(g, rho));
        const double bound = b_half * std::pow(2.0 * (1.0 - rho), -c);
        rows.push_back({rho, b, bound, b >= bound});
    }
    return rows;
}

namespace detail {

inline void require_linear_decay(const DiscFunction& g) {
    const char* hypothesis = "g(rho) = O(1 - rho) as rho -> 1-0";
    auto fail = [&](const std::string& why) {
        throw PreconditionError("unbounded_support_map: " + g.label() + " violates the hypothesis \"" + hypothesis +
                                "\" (" + why + ")");
    };
    switch (g.family()) {
        case Family::moebius:
        case Family::starlike_order: return;
        case Family::almost_starlike:
            if (g.alpha() == 0.0) return;
            fail("g(1) = alpha > 0");
            break;
        case Family::strongly_starlike:
            if (g.alpha() == 1.0) return;
            fail("g(rho) ~ (1 - rho)^alpha with alpha < 1");
            break;
        case Family::custom: {
            for (const cplx z : {cplx(0.3, 0.2), cplx(-0.5, 0.4), cplx(0.7, -0.1)}) {
                if (std::abs(g.value(std::conj(z)) - std::conj(g.value(z))) > 1e-10) fail("g is not real-symmetric");
            }
            const double first = std::abs(g.value(1.0 - 1e-3)) / 1e-3;
            for (int k = 4; k <= 7; ++k) {
                const double h = std::pow(10.0, -k);
                const double ratio = std::abs(g.value(1.0 - h)) / h;
                if (!(ratio <= 10.0 * first + 1.0)) fail("|g(1 - h)| / h grows as h -> 0");
            }
            return;
        }
    }
}

}  // namespace detail

/// z -> (b(z_1)/z_1) z.
inline HolMap unbounded_support_map(const DiscFunction& g, const BallGeometry& dom, int quad_points = 64) {
    detail::require_linear_decay(g);
    return profile_map(dom, std::make_shared<const KoebeProfile>(g, quad_points),
                       LinearFunctional::coordinate(dom.dim(), 0));
}

}  // namespace loewner_lab
