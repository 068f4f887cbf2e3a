#pragma once

// Holomorphic self-maps of a ball: sparse polynomials, expression trees built
// from identity / profile / shear / linear-combination nodes, and opaque
// evaluator closures. Values are immutable and cheap to copy.

#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ball_geometry.hpp"
#include "core.hpp"
#include "disc_function.hpp"

namespace loewner_lab {

/// coeff * z^exponents placed in `component`.
struct Monomial {
    std::size_t component = 0;
    std::array<int, kMaxDim> exponents{};
    cplx coeff = 0.0;

    [[nodiscard]] int degree() const noexcept {
        int d = 0;
        for (int e : exponents) d += e;
        return d;
    }
};

/// Scalar factor phi in maps of the form z -> phi(l(z)) z.
class ScalarProfile {
public:
    virtual ~ScalarProfile() = default;
    [[nodiscard]] virtual cplx value(cplx s) const = 0;
    [[nodiscard]] virtual cplx derivative(cplx s) const = 0;
    [[nodiscard]] virtual std::string label() const = 0;
};

/// phi = g.
class DiscProfile final : public ScalarProfile {
public:
    explicit DiscProfile(DiscFunction g) : g_(std::move(g)) {}
    [[nodiscard]] cplx value(cplx s) const override { return g_.value(s); }
    [[nodiscard]] cplx derivative(cplx s) const override { return g_.derivative(s); }
    [[nodiscard]] std::string label() const override { return g_.label(); }
    [[nodiscard]] const DiscFunction& disc() const noexcept { return g_; }

private:
    DiscFunction g_;
};

struct MapNode;
using NodePtr = std::shared_ptr<const MapNode>;

namespace node {

struct Identity {};

struct Polynomial {
    std::vector<Monomial> terms;
};

/// z -> phi(l(z)) z
struct Profile {
    std::shared_ptr<const ScalarProfile> phi;
    LinearFunctional l;
};

/// z -> c z_j^2 e_i
struct Shear {
    std::size_t i;
    std::size_t j;
    cplx c;
};

/// z -> sum_k w_k f_k(z)
struct Combination {
    std::vector<std::pair<cplx, NodePtr>> terms;
};

struct BlackBox {
    std::function<CVec(const CVec&)> fn;
    std::string tag;
};

}  // namespace node

struct MapNode {
    std::variant<node::Identity, node::Polynomial, node::Profile, node::Shear, node::Combination, node::BlackBox> v;
};

enum class Representation { polynomial, composite, black_box };

class HolMap {
public:
    HolMap(BallGeometry dom, NodePtr root, bool normalized)
        : dom_(dom), root_(std::move(root)), normalized_(normalized) {}

    [[nodiscard]] const BallGeometry& domain() const noexcept { return dom_; }
    [[nodiscard]] const MapNode& root() const noexcept { return *root_; }
    [[nodiscard]] const NodePtr& root_ptr() const noexcept { return root_; }
    [[nodiscard]] bool normalized() const noexcept { return normalized_; }

    [[nodiscard]] Representation representation() const noexcept {
        if (std::holds_alternative<node::Polynomial>(root_->v)) return Representation::polynomial;
        if (std::holds_alternative<node::BlackBox>(root_->v)) return Representation::black_box;
        return Representation::composite;
    }

    [[nodiscard]] const std::vector<Monomial>* polynomial_terms() const noexcept {
        if (const auto* p = std::get_if<node::Polynomial>(&root_->v)) return &p->terms;
        return nullptr;
    }

private:
    BallGeometry dom_;
    NodePtr root_;
    bool normalized_;
};

namespace detail {

inline NodePtr make_node(auto&& payload) {
    return std::make_shared<const MapNode>(MapNode{std::forward<decltype(payload)>(payload)});
}

inline cplx monomial_value(const Monomial& m, const CVec& z) {
    cplx v = m.coeff;
    for (std::size_t k = 0; k < z.size(); ++k) {
        for (int e = 0; e < m.exponents[k]; ++e) v *= z[k];
    }
    return v;
}

inline CVec eval_node(const MapNode& n, const CVec& z);

struct EvalVisitor {
    const CVec& z;

    CVec operator()(const node::Identity&) const { return z; }

    CVec operator()(const node::Polynomial& p) const {
        CVec out(z.size());
        for (const auto& m : p.terms) out[m.component] += monomial_value(m, z);
        return out;
    }

    CVec operator()(const node::Profile& p) const { return p.phi->value(p.l(z)) * z; }

    CVec operator()(const node::Shear& s) const {
        CVec out(z.size());
        out[s.i] = s.c * z[s.j] * z[s.j];
        return out;
    }

    CVec operator()(const node::Combination& c) const {
        CVec out(z.size());
        for (const auto& [w, child] : c.terms) out += w * eval_node(*child, z);
        return out;
    }

    CVec operator()(const node::BlackBox& b) const { return b.fn(z); }
};

inline CVec eval_node(const MapNode& n, const CVec& z) { return std::visit(EvalVisitor{z}, n.v); }

/// Fourth-order central differences along real coordinate directions; for a
/// holomorphic map these are the complex partial derivatives.
inline CMat numeric_jacobian(const std::function<CVec(const CVec&)>& f, const CVec& z, double h = 1e-5) {
    const std::size_t n = z.size();
    CMat jac(n);
    for (std::size_t b = 0; b < n; ++b) {
        auto shifted = [&](double t) {
            CVec y = z;
            y[b] += t;
            return f(y);
        };
        const CVec d = (8.0 * (shifted(h) - shifted(-h)) - (shifted(2 * h) - shifted(-2 * h))) * cplx(1.0 / (12.0 * h));
        for (std::size_t a = 0; a < n; ++a) jac(a, b) = d[a];
    }
    return jac;
}

inline CMat jac_node(const MapNode& n, const CVec& z);

struct JacobianVisitor {
    const CVec& z;

    CMat operator()(const node::Identity&) const { return CMat::identity(z.size()); }

    CMat operator()(const node::Polynomial& p) const {
        CMat jac(z.size());
        for (const auto& m : p.terms) {
            for (std::size_t b = 0; b < z.size(); ++b) {
                const int e = m.exponents[b];
                if (e == 0) continue;
                Monomial d = m;
                d.exponents[b] = e - 1;
                d.coeff *= static_cast<double>(e);
                jac(m.component, b) += monomial_value(d, z);
            }
        }
        return jac;
    }

    CMat operator()(const node::Profile& p) const {
        const cplx s = p.l(z);
        const cplx phi = p.phi->value(s);
        const cplx dphi = p.phi->derivative(s);
        CMat jac(z.size());
        for (std::size_t a = 0; a < z.size(); ++a) {
            for (std::size_t b = 0; b < z.size(); ++b) jac(a, b) = dphi * p.l.coeffs[b] * z[a];
            jac(a, a) += phi;
        }
        return jac;
    }

    CMat operator()(const node::Shear& s) const {
        CMat jac(z.size());
        jac(s.i, s.j) = 2.0 * s.c * z[s.j];
        return jac;
    }

    CMat operator()(const node::Combination& c) const {
        CMat jac(z.size());
        for (const auto& [w, child] : c.terms) jac += (jac_node(*child, z) *= w);
        return jac;
    }

    CMat operator()(const node::BlackBox& b) const { return numeric_jacobian(b.fn, z); }
};

inline CMat jac_node(const MapNode& n, const CVec& z) { return std::visit(JacobianVisitor{z}, n.v); }

}  // namespace detail

/// Value at z without the ball check (used by integrators and quadrature that
/// already control their sample points).
inline CVec evaluate_unchecked(const HolMap& f, const CVec& z) { return detail::eval_node(f.root(), z); }

inline CVec evaluate(const HolMap& f, const CVec& z) {
    if (z.size() != f.domain().dim()) throw DomainError("evaluate: dimension mismatch");
    if (!(norm(f.domain(), z) < 1.0)) throw DomainError("evaluate: point outside the open unit ball");
    return evaluate_unchecked(f, z);
}

/// Df(z): analytic for polynomial and composite nodes, finite differences for
/// black-box nodes.
inline CMat jacobian(const HolMap& f, const CVec& z) { return detail::jac_node(f.root(), z); }

// Constructors --------------------------------------------------------------

inline HolMap identity_map(const BallGeometry& dom) {
    return HolMap(dom, detail::make_node(node::Identity{}), true);
}

inline HolMap polynomial_map(const BallGeometry& dom, std::vector<Monomial> terms, bool normalized) {
    for (const auto& m : terms) {
        if (m.component >= dom.dim()) throw DomainError("polynomial_map: component out of range");
        for (std::size_t k = dom.dim(); k < kMaxDim; ++k) {
            if (m.exponents[k] != 0) throw DomainError("polynomial_map: exponent beyond dimension");
        }
        for (int e : m.exponents) {
            if (e < 0) throw DomainError("polynomial_map: negative exponent");
        }
    }
    return HolMap(dom, detail::make_node(node::Polynomial{std::move(terms)}), normalized);
}

inline Monomial linear_monomial(std::size_t component, std::size_t var, cplx c) {
    Monomial m;
    m.component = component;
    m.exponents[var] = 1;
    m.coeff = c;
    return m;
}

inline Monomial square_monomial(std::size_t component, std::size_t var, cplx c) {
    Monomial m;
    m.component = component;
    m.exponents[var] = 2;
    m.coeff = c;
    return m;
}

/// z + c z_j^2 e_i as a polynomial map.
inline HolMap identity_plus_square(const BallGeometry& dom, std::size_t i, std::size_t j, cplx c) {
    std::vector<Monomial> terms;
    for (std::size_t k = 0; k < dom.dim(); ++k) terms.push_back(linear_monomial(k, k, 1.0));
    terms.push_back(square_monomial(i, j, c));
    return polynomial_map(dom, std::move(terms), true);
}

/// z -> phi(l(z)) z. Normalized when phi(0) = 1.
inline HolMap profile_map(const BallGeometry& dom, std::shared_ptr<const ScalarProfile> phi, LinearFunctional l) {
    if (l.coeffs.size() != dom.dim()) throw DomainError("profile_map: functional dimension mismatch");
    const bool normalized = std::abs(phi->value(0.0) - 1.0) < 1e-12;
    return HolMap(dom, detail::make_node(node::Profile{std::move(phi), std::move(l)}), normalized);
}

/// z -> g(l(z)) z.
inline HolMap g_profile_map(const BallGeometry& dom, const DiscFunction& g, LinearFunctional l) {
    return profile_map(dom, std::make_shared<const DiscProfile>(g), std::move(l));
}

/// z -> c z_j^2 e_i as a composite node (not normalized on its own).
inline HolMap shear_term(const BallGeometry& dom, std::size_t i, std::size_t j, cplx c) {
    if (i >= dom.dim() || j >= dom.dim()) throw DomainError("shear_term: index out of range");
    return HolMap(dom, detail::make_node(node::Shear{i, j, c}), false);
}

/// sum_k w_k f_k. Normalized when every f_k is and the weights sum to one.
inline HolMap linear_combination(const std::vector<std::pair<cplx, HolMap>>& terms) {
    if (terms.empty()) throw DomainError("linear_combination: no terms");
    const BallGeometry dom = terms.front().second.domain();
    node::Combination c;
    cplx total = 0.0;
    bool all_normalized = true;
    for (const auto& [w, f] : terms) {
        if (!(f.domain() == dom)) throw DomainError("linear_combination: domain mismatch");
        c.terms.emplace_back(w, f.root_ptr());
        total += w;
        all_normalized = all_normalized && f.normalized();
    }
    const bool normalized = all_normalized && std::abs(total - 1.0) < 1e-12;
    return HolMap(dom, detail::make_node(std::move(c)), normalized);
}

inline HolMap convex_combination(const std::vector<double>& weights, const std::vector<HolMap>& maps) {
    if (weights.size() != maps.size()) throw DomainError("convex_combination: size mismatch");
    std::vector<std::pair<cplx, HolMap>> terms;
    for (std::size_t k = 0; k < maps.size(); ++k) {
        if (weights[k] < 0.0) throw DomainError("convex_combination: negative weight");
        terms.emplace_back(weights[k], maps[k]);
    }
    return linear_combination(terms);
}

inline HolMap operator+(const HolMap& a, const HolMap& b) { return linear_combination({{1.0, a}, {1.0, b}}); }

inline HolMap operator*(cplx s, const HolMap& f) { return linear_combination({{s, f}}); }

inline HolMap black_box_map(const BallGeometry& dom, std::function<CVec(const CVec&)> fn, std::string tag,
                            bool normalized) {
    return HolMap(dom, detail::make_node(node::BlackBox{std::move(fn), std::move(tag)}), normalized);
}

/// Coefficient of z^exponents in component i of a polynomial map, summing
/// duplicate entries.
inline cplx polynomial_coefficient(const HolMap& f, std::size_t component, const std::array<int, kMaxDim>& exponents) {
    const auto* terms = f.polynomial_terms();
    if (terms == nullptr) throw Unsupported("polynomial_coefficient: map is not polynomial");
    cplx s = 0.0;
    for (const auto& m : *terms) {
        if (m.component == component && m.exponents == exponents) s += m.coeff;
    }
    return s;
}

namespace detail {

inline std::string format_cplx(cplx c) {
    char buf[96];
    if (c.imag() == 0.0) std::snprintf(buf, sizeof buf, "%.6g", c.real());
    else std::snprintf(buf, sizeof buf, "(%.6g%+.6gi)", c.real(), c.imag());
    return buf;
}

inline std::string describe_node(const MapNode& n) {
    struct V {
        std::string operator()(const node::Identity&) const { return "id"; }
        std::string operator()(const node::Polynomial& p) const {
            std::string s;
            bool has_identity = false;
            for (const auto& m : p.terms) {
                if (m.degree() == 1 && m.coeff == cplx(1.0) && m.exponents[m.component] == 1) {
                    has_identity = true;
                    continue;
                }
                s += s.empty() ? "" : " + ";
                s += format_cplx(m.coeff);
                for (std::size_t k = 0; k < kMaxDim; ++k) {
                    if (m.exponents[k] == 0) continue;
                    s += "*z" + std::to_string(k + 1);
                    if (m.exponents[k] > 1) s += "^" + std::to_string(m.exponents[k]);
                }
                s += "*e" + std::to_string(m.component + 1);
            }
            if (has_identity) s = s.empty() ? "z" : "z + " + s;
            return "poly[" + s + "]";
        }
        std::string operator()(const node::Profile& p) const {
            return p.phi->label() + "(l(z))*z";
        }
        std::string operator()(const node::Shear& sh) const {
            return format_cplx(sh.c) + "*z" + std::to_string(sh.j + 1) + "^2*e" + std::to_string(sh.i + 1);
        }
        std::string operator()(const node::Combination& c) const {
            std::string s = "sum(";
            for (std::size_t k = 0; k < c.terms.size(); ++k) {
                if (k) s += ", ";
                s += format_cplx(c.terms[k].first) + "*" + describe_node(*c.terms[k].second);
            }
            return s + ")";
        }
        std::string operator()(const node::BlackBox& b) const { return b.tag; }
    };
    return std::visit(V{}, n.v);
}

}  // namespace detail

/// Short human-readable descriptor used in reports.
inline std::string describe(const HolMap& f) { return detail::describe_node(f.root()); }

}  // namespace loewner_lab
