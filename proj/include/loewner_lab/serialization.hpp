#pragma once

// JSON and CSV encodings of the lab's value types. Indices are 1-based in all
// external formats and 0-based in the C++ API.

#include <array>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ball_geometry.hpp"
#include "carath.hpp"
#include "core.hpp"
#include "disc_function.hpp"
#include "extremal_lab.hpp"
#include "holmap.hpp"
#include "loewner_flow.hpp"

namespace loewner_lab {

using json = nlohmann::ordered_json;

// Scalars and vectors ----------------------------------------------------------

/// Non-finite doubles become null (JSON has no infinities).
inline json number_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(cplx c) { return json{{"re", number_json(c.real())}, {"im", number_json(c.imag())}}; }

inline cplx cplx_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    return {j.at("re").get<double>(), j.at("im").get<double>()};
}

inline json to_json(const CVec& v) {
    json a = json::array();
    for (const auto& c : v) a.push_back(to_json(c));
    return a;
}

inline CVec cvec_from_json(const json& j) {
    CVec v(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) v[k] = cplx_from_json(j[k]);
    return v;
}

// Disc functions and domains ----------------------------------------------------

inline json to_json(const DiscFunction& g) {
    json j{{"family", family_name(g.family())}};
    if (g.has_alpha()) j["alpha"] = g.alpha();
    if (g.family() == Family::custom) j["name"] = g.hooks()->name;
    return j;
}

inline DiscFunction disc_function_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family")) throw UsageError("g: expected an object with field 'family'");
    const Family f = family_from_name(j.at("family").get<std::string>());
    if (f == Family::custom) throw UsageError("g.family: custom disc functions cannot be loaded from JSON");
    if (f != Family::moebius && !j.contains("alpha")) throw UsageError("g.alpha: required for family " + std::string(family_name(f)));
    try {
        return DiscFunction::from_family(f, f == Family::moebius ? 0.0 : j.at("alpha").get<double>());
    } catch (const DomainError& e) {
        throw UsageError(std::string("g.alpha: ") + e.what());
    }
}

inline json to_json(const BallGeometry& d) { return json{{"kind", ball_kind_name(d.kind())}, {"n", d.dim()}}; }

inline BallGeometry ball_geometry_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw UsageError("domain: expected an object with field 'kind'");
    const BallKind k = ball_kind_from_name(j.at("kind").get<std::string>());
    const std::size_t n = j.contains("n") ? j.at("n").get<std::size_t>() : (k == BallKind::spectral2 ? 4 : 2);
    try {
        return BallGeometry::from_kind(k, n);
    } catch (const DomainError& e) {
        throw UsageError(std::string("domain.n: ") + e.what());
    }
}

inline json to_json(const LinearFunctional& l) { return to_json(l.coeffs); }

// Maps ---------------------------------------------------------------------------

inline json monomials_to_json(const std::vector<Monomial>& terms, std::size_t n) {
    json a = json::array();
    for (const auto& m : terms) {
        json ex = json::array();
        for (std::size_t k = 0; k < n; ++k) ex.push_back(m.exponents[k]);
        a.push_back({{"component", m.component + 1}, {"exponents", ex}, {"re", m.coeff.real()}, {"im", m.coeff.imag()}});
    }
    return a;
}

inline std::vector<Monomial> monomials_from_json(const json& a, std::size_t n) {
    std::vector<Monomial> terms;
    for (const auto& t : a) {
        Monomial m;
        const auto comp = t.at("component").get<std::size_t>();
        if (comp < 1 || comp > n) throw UsageError("polynomial term: component out of range");
        m.component = comp - 1;
        const auto& ex = t.at("exponents");
        if (ex.size() != n) throw UsageError("polynomial term: exponents must have one entry per coordinate");
        for (std::size_t k = 0; k < n; ++k) m.exponents[k] = ex[k].get<int>();
        m.coeff = {t.at("re").get<double>(), t.value("im", 0.0)};
        terms.push_back(m);
    }
    return terms;
}

namespace detail {

inline json node_to_json(const MapNode& n, std::size_t dim) {
    struct V {
        std::size_t dim;
        json operator()(const node::Identity&) const { return json{{"node", "identity"}}; }
        json operator()(const node::Polynomial& p) const {
            return json{{"node", "polynomial"}, {"terms", monomials_to_json(p.terms, dim)}};
        }
        json operator()(const node::Profile& p) const {
            json j{{"node", "profile"}};
            if (const auto* d = dynamic_cast<const DiscProfile*>(p.phi.get())) {
                j["profile"] = "g";
                j["g"] = to_json(d->disc());
            } else if (const auto* k = dynamic_cast<const KoebeProfile*>(p.phi.get())) {
                j["profile"] = "koebe";
                j["g"] = to_json(k->disc());
                j["quad_points"] = k->quad_points();
            } else {
                j["profile"] = p.phi->label();
            }
            j["functional"] = to_json(p.l);
            return j;
        }
        json operator()(const node::Shear& s) const {
            return json{{"node", "shear"}, {"i", s.i + 1}, {"j", s.j + 1}, {"re", s.c.real()}, {"im", s.c.imag()}};
        }
        json operator()(const node::Combination& c) const {
            json terms = json::array();
            for (const auto& [w, child] : c.terms) terms.push_back({{"weight", to_json(w)}, {"map", node_to_json(*child, dim)}});
            return json{{"node", "combination"}, {"terms", terms}};
        }
        json operator()(const node::BlackBox& b) const { return json{{"node", "black_box"}, {"tag", b.tag}}; }
    };
    return std::visit(V{dim}, n.v);
}

inline NodePtr node_from_json(const json& j, const BallGeometry& dom) {
    const std::string kind = j.at("node").get<std::string>();
    if (kind == "identity") return make_node(node::Identity{});
    if (kind == "polynomial") return make_node(node::Polynomial{monomials_from_json(j.at("terms"), dom.dim())});
    if (kind == "shear") {
        return make_node(node::Shear{j.at("i").get<std::size_t>() - 1, j.at("j").get<std::size_t>() - 1,
                                     cplx(j.at("re").get<double>(), j.value("im", 0.0))});
    }
    if (kind == "profile") {
        const std::string prof = j.at("profile").get<std::string>();
        const DiscFunction g = disc_function_from_json(j.at("g"));
        LinearFunctional l{cvec_from_json(j.at("functional"))};
        std::shared_ptr<const ScalarProfile> phi;
        if (prof == "g") phi = std::make_shared<const DiscProfile>(g);
        else if (prof == "koebe") phi = std::make_shared<const KoebeProfile>(g, j.value("quad_points", 64));
        else throw UsageError("map: unknown profile '" + prof + "'");
        return make_node(node::Profile{std::move(phi), std::move(l)});
    }
    if (kind == "combination") {
        node::Combination c;
        for (const auto& t : j.at("terms")) c.terms.emplace_back(cplx_from_json(t.at("weight")), node_from_json(t.at("map"), dom));
        return make_node(std::move(c));
    }
    throw UsageError("map: cannot reconstruct node kind '" + kind + "'");
}

}  // namespace detail

inline json to_json(const HolMap& f) {
    return json{{"domain", to_json(f.domain())},
                {"normalized", f.normalized()},
                {"description", describe(f)},
                {"map", detail::node_to_json(f.root(), f.domain().dim())}};
}

inline HolMap holmap_from_json(const json& j) {
    const BallGeometry dom = ball_geometry_from_json(j.at("domain"));
    return HolMap(dom, detail::node_from_json(j.at("map"), dom), j.value("normalized", false));
}

// Results --------------------------------------------------------------------------

inline json to_json(const MgWitness& w) {
    return json{{"z", to_json(w.z)},
                {"functional", to_json(w.l)},
                {"w", to_json(w.w)},
                {"margin", number_json(w.margin)},
                {"singular", w.singular}};
}

inline json to_json(const MgCertificate& c) {
    json j{{"pass", c.pass},
           {"samples_used", c.samples_used},
           {"evaluations", c.evaluations},
           {"indeterminate", c.indeterminate},
           {"eps", c.eps},
           {"worst_margin", number_json(c.worst_margin)}};
    j["worst"] = c.worst ? to_json(*c.worst) : json(nullptr);
    j["witness"] = c.witness ? to_json(*c.witness) : json(nullptr);
    return j;
}

inline json to_json(const BoundReport& r) {
    json viol = json::array();
    for (const auto& v : r.violations) viol.push_back({{"map", v.map_id}, {"coefficient", v.coefficient}, {"value", to_json(v.value)}});
    json cands = json::array();
    for (const auto& c : r.candidates) cands.push_back({{"map", c.map_id}, {"coefficient", c.coefficient}, {"value", to_json(c.value)}});
    return json{{"functional", r.functional},
                {"i", r.i + 1},
                {"j", r.j + 1},
                {"kind", r.kind},
                {"theoretical_bound", r.theoretical_bound},
                {"empirical_max", number_json(r.empirical_max)},
                {"max_modulus", r.max_modulus},
                {"attaining_map_id", r.attaining_map_id},
                {"attained", r.attained},
                {"attainment_error", number_json(r.attainment_error)},
                {"n_samples", r.n_samples},
                {"tolerance", r.tolerance},
                {"attainment_tolerance", r.attainment_tolerance},
                {"violations", viol},
                {"candidates", cands},
                {"note", r.note}};
}

inline json to_json(const HerglotzField& field) {
    json segs = json::array();
    for (const auto& s : field.segments()) {
        json seg{{"t_start", s.t_start}, {"map", to_json(s.h)}};
        seg["certificate"] = s.certificate ? to_json(*s.certificate) : json(nullptr);
        segs.push_back(seg);
    }
    return json{{"domain", to_json(field.domain())}, {"segments", segs}};
}

inline HerglotzField herglotz_field_from_json(const json& j) {
    std::vector<FieldSegment> segs;
    for (const auto& s : j.at("segments")) segs.push_back({s.at("t_start").get<double>(), holmap_from_json(s.at("map")), std::nullopt});
    return HerglotzField(std::move(segs));
}

// CSV --------------------------------------------------------------------------------

/// Shortest representation that round-trips, as in the JSON reports.
inline std::string csv_number(double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

/// t, Re z_1, Im z_1, ... per trajectory sample.
inline std::string trajectory_csv(const std::vector<std::pair<double, CVec>>& traj) {
    std::ostringstream os;
    if (traj.empty()) return "t\n";
    os << "t";
    for (std::size_t k = 0; k < traj.front().second.size(); ++k) os << ",re_z" << k + 1 << ",im_z" << k + 1;
    os << "\n";
    for (const auto& [t, v] : traj) {
        os << csv_number(t);
        for (const auto& c : v) os << "," << csv_number(c.real()) << "," << csv_number(c.imag());
        os << "\n";
    }
    return os.str();
}

}  // namespace loewner_lab
