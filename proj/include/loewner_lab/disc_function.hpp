#pragma once

// Convex univalent functions g on the unit disc with g(0) = 1 and Re g > 0,
// together with the two distance functionals d1 and a0 and the image
// membership test.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "numerics.hpp"

namespace loewner_lab {

enum class Family { moebius, starlike_order, almost_starlike, strongly_starlike, custom };

inline const char* family_name(Family f) noexcept {
    switch (f) {
        case Family::moebius: return "moebius";
        case Family::starlike_order: return "starlike_order";
        case Family::almost_starlike: return "almost_starlike";
        case Family::strongly_starlike: return "strongly_starlike";
        case Family::custom: return "custom";
    }
    return "?";
}

inline Family family_from_name(const std::string& s) {
    if (s == "moebius") return Family::moebius;
    if (s == "starlike_order") return Family::starlike_order;
    if (s == "almost_starlike") return Family::almost_starlike;
    if (s == "strongly_starlike") return Family::strongly_starlike;
    if (s == "custom") return Family::custom;
    throw UsageError("unknown disc function family '" + s + "'");
}

/// User-supplied description of a disc function outside the catalog.
/// `value` is mandatory; the other hooks unlock exact membership and d1.
struct CustomHooks {
    std::string name = "custom";
    std::function<cplx(cplx)> value;
    /// Preimage of w, or nullopt when w has no preimage in the closed disc.
    std::function<std::optional<cplx>(cplx)> inverse;
    /// theta -> g(e^{i theta}); may return non-finite values at poles.
    std::function<cplx(double)> boundary;
};

enum class Membership { inside, outside, indeterminate };

inline const char* membership_name(Membership m) noexcept {
    switch (m) {
        case Membership::inside: return "inside";
        case Membership::outside: return "outside";
        case Membership::indeterminate: return "indeterminate";
    }
    return "?";
}

class DiscFunction {
public:
    static DiscFunction moebius() { return DiscFunction(Family::moebius, 0.0); }

    static DiscFunction starlike_order(double alpha) {
        require_alpha(alpha, 0.0, 1.0, false, "starlike_order");
        return DiscFunction(Family::starlike_order, alpha);
    }

    static DiscFunction almost_starlike(double alpha) {
        require_alpha(alpha, 0.0, 1.0, false, "almost_starlike");
        return DiscFunction(Family::almost_starlike, alpha);
    }

    static DiscFunction strongly_starlike(double alpha) {
        require_alpha(alpha, 0.0, 1.0, true, "strongly_starlike");
        if (alpha == 0.0) throw DomainError("strongly_starlike: alpha must lie in (0, 1]");
        return DiscFunction(Family::strongly_starlike, alpha);
    }

    static DiscFunction custom(CustomHooks hooks) {
        if (!hooks.value) throw DomainError("custom disc function needs a value hook");
        DiscFunction g(Family::custom, 0.0);
        g.hooks_ = std::make_shared<const CustomHooks>(std::move(hooks));
        return g;
    }

    /// Catalog factory keyed by family name; alpha is ignored for moebius.
    static DiscFunction from_family(Family f, double alpha) {
        switch (f) {
            case Family::moebius: return moebius();
            case Family::starlike_order: return starlike_order(alpha);
            case Family::almost_starlike: return almost_starlike(alpha);
            case Family::strongly_starlike: return strongly_starlike(alpha);
            case Family::custom: break;
        }
        throw UsageError("custom disc functions cannot be built from a family name");
    }

    /// Same function, re-wrapped as a custom g that only exposes its value and
    /// boundary hooks. Forces the numerical d1 and winding-number routes.
    [[nodiscard]] DiscFunction boundary_only() const {
        const DiscFunction self = *this;
        CustomHooks h;
        h.name = std::string(family_name(family_)) + "(boundary only)";
        h.value = [self](cplx z) { return self.value(z); };
        if (self.has_boundary()) h.boundary = [self](double t) { return *self.boundary(t); };
        return custom(std::move(h));
    }

    [[nodiscard]] Family family() const noexcept { return family_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] bool has_alpha() const noexcept {
        return family_ != Family::moebius && family_ != Family::custom;
    }
    [[nodiscard]] const CustomHooks* hooks() const noexcept { return hooks_.get(); }

    [[nodiscard]] std::string label() const {
        if (family_ == Family::custom) return hooks_->name;
        if (!has_alpha()) return family_name(family_);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s(%.17g)", family_name(family_), alpha_);
        return buf;
    }

    /// g(zeta) without the |zeta| < 1 check.
    [[nodiscard]] cplx value(cplx z) const {
        switch (family_) {
            case Family::moebius: return (1.0 - z) / (1.0 + z);
            case Family::starlike_order: return (1.0 - z) / (1.0 + beta() * z);
            case Family::almost_starlike: return (1.0 - beta() * z) / (1.0 + z);
            case Family::strongly_starlike: {
                const cplx m = (1.0 - z) / (1.0 + z);
                if (m == cplx(0.0)) return 0.0;
                return std::pow(m, alpha_);
            }
            case Family::custom: return hooks_->value(z);
        }
        return 0.0;
    }

    /// g'(zeta); custom functions use a Cauchy integral on a small circle.
    [[nodiscard]] cplx derivative(cplx z) const {
        switch (family_) {
            case Family::moebius: return -2.0 / ((1.0 + z) * (1.0 + z));
            case Family::starlike_order: {
                const cplx d = 1.0 + beta() * z;
                return -(1.0 + beta()) / (d * d);
            }
            case Family::almost_starlike: return -(1.0 + beta()) / ((1.0 + z) * (1.0 + z));
            case Family::strongly_starlike: return -2.0 * alpha_ * value(z) / (1.0 - z * z);
            case Family::custom: {
                const double r = std::min(0.25, 0.5 * (1.0 - std::abs(z)));
                return cauchy_derivative(z, r, 64);
            }
        }
        return 0.0;
    }

    [[nodiscard]] bool has_inverse() const noexcept {
        return family_ != Family::custom || static_cast<bool>(hooks_->inverse);
    }

    [[nodiscard]] bool has_boundary() const noexcept {
        return family_ != Family::custom || static_cast<bool>(hooks_->boundary);
    }

    /// Preimage g^{-1}(w) continued analytically past the unit circle where a
    /// closed form allows it; an infinite value means "far outside the image".
    [[nodiscard]] std::optional<cplx> inverse(cplx w) const {
        auto safe_div = [](cplx a, cplx b) -> cplx {
            if (b == cplx(0.0)) return {kInf, 0.0};
            return a / b;
        };
        switch (family_) {
            case Family::moebius: return safe_div(1.0 - w, 1.0 + w);
            case Family::starlike_order: return safe_div(1.0 - w, 1.0 + beta() * w);
            case Family::almost_starlike: return safe_div(1.0 - w, w + beta());
            case Family::strongly_starlike: {
                if (w == cplx(0.0)) return cplx(1.0);
                const double arg = std::arg(w);
                if (std::abs(arg) >= alpha_ * kPi) return cplx(kInf, 0.0);
                const cplx m = std::polar(std::pow(std::abs(w), 1.0 / alpha_), arg / alpha_);
                return safe_div(1.0 - m, 1.0 + m);
            }
            case Family::custom:
                if (hooks_->inverse) return hooks_->inverse(w);
                return std::nullopt;
        }
        return std::nullopt;
    }

    /// g(e^{i theta}); non-finite at boundary poles.
    [[nodiscard]] std::optional<cplx> boundary(double theta) const {
        switch (family_) {
            case Family::strongly_starlike: {
                // (1 - e^{it})/(1 + e^{it}) = -i tan(t/2), raised to alpha on the principal branch.
                const double t = std::tan(0.5 * theta);
                if (!std::isfinite(t) || std::abs(t) > 1e300) return cplx(kInf, kInf);
                if (t == 0.0) return cplx(0.0);
                return std::polar(std::pow(std::abs(t), alpha_), (t > 0 ? -1.0 : 1.0) * alpha_ * kPi / 2.0);
            }
            case Family::custom:
                if (hooks_->boundary) return hooks_->boundary(theta);
                return std::nullopt;
            default: {
                const cplx z = std::polar(1.0, theta);
                const cplx v = value(z);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) > 1e15) {
                    return cplx(kInf, kInf);
                }
                return v;
            }
        }
    }

    friend bool operator==(const DiscFunction& a, const DiscFunction& b) noexcept {
        return a.family_ == b.family_ && a.alpha_ == b.alpha_ && a.hooks_ == b.hooks_;
    }

private:
    DiscFunction(Family f, double alpha) : family_(f), alpha_(alpha) {}

    static void require_alpha(double a, double lo, double hi, bool hi_closed, const char* what) {
        const bool ok = std::isfinite(a) && a >= lo && (hi_closed ? a <= hi : a < hi);
        if (!ok) throw DomainError(std::string(what) + ": alpha out of range");
    }

    // 1 - 2 alpha, the pole parameter shared by the two rational families.
    [[nodiscard]] double beta() const noexcept { return 1.0 - 2.0 * alpha_; }

    [[nodiscard]] cplx cauchy_derivative(cplx center, double r, int m) const {
        cplx acc = 0.0;
        for (int k = 0; k < m; ++k) {
            const cplx e = std::polar(1.0, 2.0 * kPi * k / m);
            acc += value(center + r * e) / e;
        }
        return acc / (static_cast<double>(m) * r);
    }

    Family family_;
    double alpha_;
    std::shared_ptr<const CustomHooks> hooks_;
};

/// g(zeta) for |zeta| < 1.
inline cplx eval(const DiscFunction& g, cplx z) {
    if (!(std::abs(z) < 1.0)) throw DomainError("eval: |zeta| must be < 1");
    return g.value(z);
}

inline cplx g_prime0(const DiscFunction& g) {
    switch (g.family()) {
        case Family::moebius: return -2.0;
        case Family::starlike_order:
        case Family::almost_starlike: return -2.0 * (1.0 - g.alpha());
        case Family::strongly_starlike: return -2.0 * g.alpha();
        case Family::custom: return g.derivative(0.0);
    }
    return 0.0;
}

/// d1 by minimizing |g(e^{i theta}) - 1| on a boundary grid with golden-section
/// refinement around the three best grid points.
inline double d1_boundary_grid(const DiscFunction& g, int grid = 4096) {
    if (!g.has_boundary()) throw Unsupported("d1: custom disc function has no boundary parametrization");
    auto dist = [&](double theta) {
        const cplx v = *g.boundary(theta);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return kInf;
        return std::abs(v - 1.0);
    };
    const double h = 2.0 * kPi / grid;
    std::vector<std::pair<double, int>> vals;
    vals.reserve(static_cast<std::size_t>(grid));
    for (int k = 0; k < grid; ++k) {
        const double d = dist(h * k);
        if (std::isfinite(d)) vals.emplace_back(d, k);
    }
    if (vals.empty()) throw NumericalInstability("d1: boundary has no finite samples");
    const std::size_t keep = std::min<std::size_t>(3, vals.size());
    std::partial_sort(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(keep), vals.end());
    double best = vals.front().first;
    for (std::size_t s = 0; s < keep; ++s) {
        const double c = h * vals[s].second;
        const Minimum m = golden_section_minimize(dist, c - h, c + h, 1e-15);
        best = std::min(best, m.value);
    }
    return best;
}

/// d1(g) = dist(1, boundary of g(U)).
inline double d1(const DiscFunction& g) {
    const double a = g.alpha();
    switch (g.family()) {
        case Family::moebius: return 1.0;
        case Family::starlike_order: return a <= 0.5 ? 1.0 : (1.0 - a) / a;
        case Family::almost_starlike: return 1.0 - a;
        case Family::strongly_starlike: return std::sin(a * kPi / 2.0);
        case Family::custom: return d1_boundary_grid(g);
    }
    return 0.0;
}

namespace detail {

inline double a0_ratio(const DiscFunction& g, double rho) {
    const double left = std::abs(1.0 - g.value(rho));
    const double right = std::abs(g.value(-rho) - 1.0);
    return std::min(left, right) / rho;
}

// Limit of the a0 ratio as rho -> 1. Uses exact boundary values when a boundary
// parametrization exists, otherwise linear Richardson extrapolation from
// rho = 1 - 10^{-k}.
inline std::optional<double> a0_endpoint_limit(const DiscFunction& g) {
    if (g.has_boundary()) {
        double best = kInf;
        for (const double theta : {0.0, kPi}) {
            const cplx v = *g.boundary(theta);
            if (std::isfinite(v.real()) && std::isfinite(v.imag())) best = std::min(best, std::abs(v - 1.0));
        }
        return best;
    }
    std::array<double, 5> phi{};
    for (int k = 2; k <= 6; ++k) phi[static_cast<std::size_t>(k - 2)] = a0_ratio(g, 1.0 - std::pow(10.0, -k));
    // phi(rho) ~ phi(1) + c (1 - rho): eliminate c between consecutive decades.
    const double e5 = phi[4] + (phi[4] - phi[3]) / 9.0;
    const double e4 = phi[3] + (phi[3] - phi[2]) / 9.0;
    if (!std::isfinite(e5) || std::abs(e5 - e4) > 1e-4 * std::max(1.0, std::abs(e5))) return std::nullopt;
    return e5;
}

}  // namespace detail

/// a0(g) = inf over rho in (0,1) of min{|1 - g(rho)|, |g(-rho) - 1|} / rho,
/// including both endpoint limits.
inline double a0(const DiscFunction& g, int grid = 4096) {
    const double lo = 1e-6;
    const double hi = 1.0 - 1e-6;
    const double h = (hi - lo) / (grid - 1);
    std::vector<std::pair<double, int>> vals;
    vals.reserve(static_cast<std::size_t>(grid));
    for (int k = 0; k < grid; ++k) vals.emplace_back(detail::a0_ratio(g, lo + h * k), k);
    const std::size_t keep = 3;
    std::partial_sort(vals.begin(), vals.begin() + keep, vals.end());
    double best = std::min(vals.front().first, std::abs(g_prime0(g)));
    for (std::size_t s = 0; s < keep; ++s) {
        const double c = lo + h * vals[s].second;
        const double a = std::max(lo, c - h);
        const double b = std::min(hi, c + h);
        const Minimum m = golden_section_minimize([&](double r) { return detail::a0_ratio(g, r); }, a, b, 1e-15);
        best = std::min(best, m.value);
    }
    if (const auto lim = detail::a0_endpoint_limit(g)) best = std::min(best, *lim);
    return best;
}

namespace detail {

inline constexpr int kWindingGrid = 4096;

// Distance from w to the segment [a, b].
inline double segment_distance(cplx w, cplx a, cplx b) {
    const cplx d = b - a;
    const double len2 = std::norm(d);
    double t = len2 > 0.0 ? std::real((w - a) * std::conj(d)) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(w - (a + t * d));
}

struct WindingVerdict {
    Membership verdict;
    double distance;  // distance from w to the polyline, signed positive inside
};

// Winding number of the closed boundary polyline around w. Non-finite samples
// are dropped and the gap is bridged by a chord, so this is reliable for
// bounded images only.
inline WindingVerdict winding_membership(const DiscFunction& g, cplx w, double eps) {
    std::vector<cplx> pts;
    pts.reserve(kWindingGrid);
    for (int k = 0; k < kWindingGrid; ++k) {
        const cplx v = *g.boundary(2.0 * kPi * k / kWindingGrid);
        if (std::isfinite(v.real()) && std::isfinite(v.imag())) pts.push_back(v);
    }
    if (pts.size() < 3) throw NumericalInstability("contains: boundary polyline is degenerate");
    double turn = 0.0;
    double dmin = kInf;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const cplx a = pts[k];
        const cplx b = pts[(k + 1) % pts.size()];
        dmin = std::min(dmin, segment_distance(w, a, b));
        turn += std::arg((b - w) / (a - w));
    }
    const double scale = std::max(1.0, std::abs(w));
    const long winding = std::lround(turn / (2.0 * kPi));
    const double signed_d = (winding != 0 ? dmin : -dmin) / scale;
    if (dmin < eps * scale) return {Membership::indeterminate, signed_d};
    return {winding != 0 ? Membership::inside : Membership::outside, signed_d};
}

}  // namespace detail

/// Signed margin of w with respect to g(U): positive inside, negative outside,
/// measured as (1 - |g^{-1}(w)|) / max(1, |w|) when an inverse exists and as
/// the scaled polyline distance otherwise.
inline double membership_margin(const DiscFunction& g, cplx w) {
    const double scale = std::max(1.0, std::abs(w));
    if (const auto pre = g.inverse(w)) {
        const double m = std::abs(*pre);
        if (!std::isfinite(m)) return -kInf;
        return (1.0 - m) / scale;
    }
    return detail::winding_membership(g, w, 0.0).distance;
}

/// Decides whether w lies in g(U) with a relative safety band eps.
inline Membership contains(const DiscFunction& g, cplx w, double eps) {
    if (!(eps > 0.0)) throw DomainError("contains: eps must be positive");
    const double scale = std::max(1.0, std::abs(w));
    if (const auto pre = g.inverse(w)) {
        const double m = std::abs(*pre);
        if (m < 1.0 - eps * scale) return Membership::inside;
        if (m > 1.0 + eps * scale || !std::isfinite(m)) return Membership::outside;
        return Membership::indeterminate;
    }
    if (!g.has_boundary()) throw Unsupported("contains: custom disc function has neither inverse nor boundary");
    return detail::winding_membership(g, w, eps).verdict;
}

}  // namespace loewner_lab
