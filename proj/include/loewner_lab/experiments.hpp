#pragma once

// Experiment configuration, dispatch and report emission behind the CLI.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "serialization.hpp"

namespace loewner_lab {

enum class ExperimentKind { d1_table, a0_table, certify, flow_check, scan, gprime, unbounded_growth, shear_commute };

inline const char* experiment_name(ExperimentKind k) noexcept {
    switch (k) {
        case ExperimentKind::d1_table: return "d1_table";
        case ExperimentKind::a0_table: return "a0_table";
        case ExperimentKind::certify: return "certify";
        case ExperimentKind::flow_check: return "flow_check";
        case ExperimentKind::scan: return "scan";
        case ExperimentKind::gprime: return "gprime";
        case ExperimentKind::unbounded_growth: return "unbounded_growth";
        case ExperimentKind::shear_commute: return "shear_commute";
    }
    return "?";
}

inline ExperimentKind experiment_from_name(const std::string& s) {
    for (auto k : {ExperimentKind::d1_table, ExperimentKind::a0_table, ExperimentKind::certify,
                   ExperimentKind::flow_check, ExperimentKind::scan, ExperimentKind::gprime,
                   ExperimentKind::unbounded_growth, ExperimentKind::shear_commute}) {
        if (s == experiment_name(k)) return k;
    }
    throw UsageError("experiment: unknown kind '" + s + "'");
}

struct Tolerances {
    double eps = 1e-9;         // membership band
    double bound = 1e-6;       // coefficient bounds
    double flow = 1e-10;       // integrator tolerance
    double parametric = 1e-8;  // convergence of parametric limits
    double commute = 1e-5;     // shear commutation residual
    double closed_form = 1e-8; // flow vs closed form
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::d1_table;
    std::optional<std::string> family;  // d1/a0 tables: all catalog families when absent
    double alpha = 0.5;
    std::vector<double> alphas;
    std::string domain_kind = "polydisc";
    std::size_t n = 2;
    std::size_t i = 0;  // 0-based
    std::size_t j = 1;
    std::size_t N = 1000;
    int pieces = 3;
    int sign = 1;
    double inflate = 1.0;
    std::size_t fields = 20;
    std::size_t samples = 16;
    std::vector<double> rhos{0.9, 0.99, 0.999};
    Tolerances tol{};
    std::optional<std::uint64_t> seed;
    std::string output_path;

    [[nodiscard]] DiscFunction g() const {
        return disc_function_from_json(family ? json{{"family", *family}, {"alpha", alpha}} : json{{"family", "moebius"}});
    }
    [[nodiscard]] BallGeometry domain() const {
        return ball_geometry_from_json(json{{"kind", domain_kind}, {"n", n}});
    }
};

inline std::vector<double> default_alpha_grid() {
    std::vector<double> a;
    for (int k = 1; k <= 19; ++k) a.push_back(k / 20.0);
    return a;
}

inline json config_to_json(const ExperimentConfig& c) {
    json j{{"experiment", experiment_name(c.experiment)}};
    if (c.family) j["g"] = *c.family == "moebius" ? json{{"family", *c.family}} : json{{"family", *c.family}, {"alpha", c.alpha}};
    j["domain"] = json{{"kind", c.domain_kind}, {"n", c.n}};
    j["i"] = c.i + 1;
    j["j"] = c.j + 1;
    j["N"] = c.N;
    j["pieces"] = c.pieces;
    j["sign"] = c.sign;
    j["inflate"] = c.inflate;
    j["alphas"] = c.alphas;
    j["fields"] = c.fields;
    j["samples"] = c.samples;
    j["rhos"] = c.rhos;
    j["tolerances"] = json{{"eps", c.tol.eps},
                           {"bound", c.tol.bound},
                           {"flow", c.tol.flow},
                           {"parametric", c.tol.parametric},
                           {"commute", c.tol.commute},
                           {"closed_form", c.tol.closed_form}};
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    j["output_path"] = c.output_path;
    return j;
}

namespace detail {

template <typename T>
T field_as(const json& j, const char* name) {
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw UsageError(std::string("config field '") + name + "' has the wrong type");
    }
}

}  // namespace detail

/// Fills `c` from a JSON object; unknown fields are rejected by name.
inline void apply_config_json(ExperimentConfig& c, const json& j) {
    if (!j.is_object()) throw UsageError("config: top level must be a JSON object");
    static const std::vector<std::string> known{"experiment", "g", "domain", "i", "j", "N", "pieces", "sign",
                                                "inflate", "alphas", "fields", "samples", "rhos", "tolerances",
                                                "seed", "output_path"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) throw UsageError("config: unknown field '" + key + "'");
    }
    if (j.contains("experiment")) c.experiment = experiment_from_name(detail::field_as<std::string>(j, "experiment"));
    if (j.contains("g")) {
        const auto& g = j.at("g");
        if (!g.is_object() || !g.contains("family")) throw UsageError("config field 'g' needs 'family'");
        c.family = detail::field_as<std::string>(g, "family");
        if (g.contains("alpha")) c.alpha = detail::field_as<double>(g, "alpha");
    }
    if (j.contains("domain")) {
        const auto& d = j.at("domain");
        if (!d.is_object() || !d.contains("kind")) throw UsageError("config field 'domain' needs 'kind'");
        c.domain_kind = detail::field_as<std::string>(d, "kind");
        if (d.contains("n")) c.n = detail::field_as<std::size_t>(d, "n");
        else if (c.domain_kind == "spectral2") c.n = 4;
    }
    auto index = [&](const char* name, std::size_t& out) {
        if (!j.contains(name)) return;
        const auto v = detail::field_as<long long>(j, name);
        if (v < 1) throw UsageError(std::string("config field '") + name + "' must be a 1-based index");
        out = static_cast<std::size_t>(v - 1);
    };
    index("i", c.i);
    index("j", c.j);
    if (j.contains("N")) c.N = detail::field_as<std::size_t>(j, "N");
    if (j.contains("pieces")) c.pieces = detail::field_as<int>(j, "pieces");
    if (j.contains("sign")) c.sign = detail::field_as<int>(j, "sign");
    if (j.contains("inflate")) c.inflate = detail::field_as<double>(j, "inflate");
    if (j.contains("alphas")) c.alphas = detail::field_as<std::vector<double>>(j, "alphas");
    if (j.contains("fields")) c.fields = detail::field_as<std::size_t>(j, "fields");
    if (j.contains("samples")) c.samples = detail::field_as<std::size_t>(j, "samples");
    if (j.contains("rhos")) c.rhos = detail::field_as<std::vector<double>>(j, "rhos");
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        for (const auto& [key, value] : t.items()) {
            if (!value.is_number()) throw UsageError("config field 'tolerances." + key + "' must be a number");
            const double v = value.get<double>();
            if (key == "eps") c.tol.eps = v;
            else if (key == "bound") c.tol.bound = v;
            else if (key == "flow") c.tol.flow = v;
            else if (key == "parametric") c.tol.parametric = v;
            else if (key == "commute") c.tol.commute = v;
            else if (key == "closed_form") c.tol.closed_form = v;
            else throw UsageError("config: unknown field 'tolerances." + key + "'");
        }
    }
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = detail::field_as<std::uint64_t>(j, "seed");
    if (j.contains("output_path")) c.output_path = detail::field_as<std::string>(j, "output_path");
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    ExperimentConfig c;
    apply_config_json(c, j);
    return c;
}

/// Checks cross-field invariants and names the offending field.
inline void validate(const ExperimentConfig& c) {
    if (!c.seed) throw UsageError("config field 'seed' is required");
    if (c.family) (void)c.g();
    const BallGeometry dom = c.domain();
    const bool uses_pair = c.experiment == ExperimentKind::certify || c.experiment == ExperimentKind::flow_check ||
                           c.experiment == ExperimentKind::scan || c.experiment == ExperimentKind::shear_commute;
    if (uses_pair && !dom.admissible_pair(c.i, c.j)) {
        throw UsageError("config fields 'i'/'j': pair (" + std::to_string(c.i + 1) + ", " + std::to_string(c.j + 1) +
                         ") is not admissible for " + dom.label());
    }
    if (c.sign != 1 && c.sign != -1) throw UsageError("config field 'sign' must be +1 or -1");
    if (c.pieces < 1) throw UsageError("config field 'pieces' must be >= 1");
    if (!(c.inflate > 0.0)) throw UsageError("config field 'inflate' must be positive");
    for (double r : c.rhos) {
        if (!(r > 0.5 && r < 1.0)) throw UsageError("config field 'rhos' entries must lie in (1/2, 1)");
    }
    if (!(c.tol.eps > 0.0)) throw UsageError("config field 'tolerances.eps' must be positive");
}

struct ReportEnvelope {
    json config;
    std::string software = std::string("loewner_lab ") + kVersion;
    double wall_time_seconds = 0.0;
    json result;
    bool pass = false;
    std::string status;  // pass | fail | numerical_instability
    int exit_code = 1;
    std::string message;
    std::optional<std::string> csv;  // companion table
};

inline json envelope_to_json(const ReportEnvelope& e) {
    return json{{"config", e.config},
                {"software", e.software},
                {"result", e.result},
                {"summary", json{{"pass", e.pass}, {"status", e.status}, {"exit_code", e.exit_code}, {"message", e.message}}}};
}

inline ReportEnvelope envelope_from_json(const json& j) {
    ReportEnvelope e;
    e.config = j.at("config");
    e.software = j.at("software").get<std::string>();
    e.result = j.at("result");
    const auto& s = j.at("summary");
    e.pass = s.at("pass").get<bool>();
    e.status = s.at("status").get<std::string>();
    e.exit_code = s.at("exit_code").get<int>();
    e.message = s.at("message").get<std::string>();
    return e;
}

namespace detail {

struct Outcome {
    json result;
    bool pass;
    std::string message;
    std::optional<std::string> csv;
};

inline std::vector<DiscFunction> table_functions(const ExperimentConfig& c, const std::vector<double>& alphas) {
    std::vector<Family> fams;
    if (c.family) fams.push_back(family_from_name(*c.family));
    else fams = {Family::moebius, Family::starlike_order, Family::almost_starlike, Family::strongly_starlike};
    std::vector<DiscFunction> out;
    for (Family f : fams) {
        if (f == Family::moebius) {
            out.push_back(DiscFunction::moebius());
            continue;
        }
        for (double a : alphas) out.push_back(DiscFunction::from_family(f, a));
    }
    return out;
}

inline Outcome run_d1_table(const ExperimentConfig& c) {
    const auto alphas = c.alphas.empty() ? default_alpha_grid() : c.alphas;
    json rows = json::array();
    std::ostringstream csv;
    csv << "family,alpha,d1_closed_form,d1_boundary_grid,abs_error,pass\n";
    bool pass = true;
    double worst = 0.0;
    for (const auto& g : table_functions(c, alphas)) {
        const double closed = d1(g);
        const double numeric = d1_boundary_grid(g.boundary_only());
        const double err = std::abs(closed - numeric);
        const bool ok = err <= c.tol.eps;
        pass = pass && ok;
        worst = std::max(worst, err);
        rows.push_back({{"family", family_name(g.family())},
                        {"alpha", g.has_alpha() ? json(g.alpha()) : json(nullptr)},
                        {"d1_closed_form", closed},
                        {"d1_boundary_grid", numeric},
                        {"abs_error", err},
                        {"pass", ok}});
        csv << family_name(g.family()) << "," << (g.has_alpha() ? csv_number(g.alpha()) : "") << "," << csv_number(closed)
            << "," << csv_number(numeric) << "," << csv_number(err) << "," << (ok ? "true" : "false") << "\n";
    }
    std::ostringstream msg;
    msg << rows.size() << " rows, max |closed - numeric| = " << worst;
    return {json{{"rows", rows}, {"max_abs_error", worst}}, pass, msg.str(), csv.str()};
}

inline Outcome run_a0_table(const ExperimentConfig& c) {
    const auto alphas = c.alphas.empty() ? default_alpha_grid() : c.alphas;
    json rows = json::array();
    std::ostringstream csv;
    csv << "family,alpha,a0,d1,a0_minus_d1,pass\n";
    bool pass = true;
    for (const auto& g : table_functions(c, alphas)) {
        const double a = a0(g);
        const double d = d1(g);
        const bool ok = a >= d - c.tol.eps;
        pass = pass && ok;
        rows.push_back({{"family", family_name(g.family())},
                        {"alpha", g.has_alpha() ? json(g.alpha()) : json(nullptr)},
                        {"a0", a},
                        {"d1", d},
                        {"a0_minus_d1", a - d},
                        {"pass", ok}});
        csv << family_name(g.family()) << "," << (g.has_alpha() ? csv_number(g.alpha()) : "") << "," << csv_number(a)
            << "," << csv_number(d) << "," << csv_number(a - d) << "," << (ok ? "true" : "false") << "\n";
    }
    return {json{{"rows", rows}}, pass, pass ? "a0 >= d1 on every row" : "a0 < d1 on some row", csv.str()};
}

inline Outcome run_certify(const ExperimentConfig& c, Rng& rng) {
    const DiscFunction g = c.g();
    const BallGeometry dom = c.domain();
    const double coeff = c.sign * c.inflate * dom.shear_factor() * d1(g);
    const HolMap h = identity_plus_square(dom, c.i, c.j, coeff);
    const MgCertificate cert = certify_Mg(h, g, dom, c.N, c.tol.eps, rng);
    std::ostringstream msg;
    msg << (cert.pass ? "certified" : "violation found") << ", worst margin " << cert.worst_margin << " over "
        << cert.samples_used << " samples";
    return {json{{"map", to_json(h)}, {"certificate", to_json(cert)}}, cert.pass, msg.str(), std::nullopt};
}

// Closed-form flow of the field z + c z_j^2 e_i.
inline CVec shear_flow_closed_form(const CVec& z, std::size_t i, std::size_t j, cplx c, double t) {
    CVec v = std::exp(-t) * z;
    v[i] += c * z[j] * z[j] * (std::exp(-2.0 * t) - std::exp(-t));
    return v;
}

inline Outcome run_flow_check(const ExperimentConfig& c, Rng& rng) {
    const DiscFunction g = c.g();
    const BallGeometry dom = c.domain();
    const HolMap field_map = canonical_field(g, dom, c.i, c.j, c.sign);
    const cplx coeff = c.sign * dom.shear_factor() * d1(g);
    const HerglotzField field = HerglotzField::autonomous(field_map);
    std::uniform_real_distribution<double> ur(0.0, 0.9);
    std::uniform_real_distribution<double> ur7(0.0, 0.7);
    std::vector<CVec> pts;
    std::vector<CVec> pts_small;
    for (std::size_t k = 0; k < c.samples; ++k) pts.push_back(ur(rng) * sample_sphere(dom, rng));
    for (std::size_t k = 0; k < c.samples; ++k) pts_small.push_back(ur7(rng) * sample_sphere(dom, rng));

    FlowOptions fo;
    fo.tol = c.tol.flow;
    struct PointErr {
        double closed = 0.0;
        double semigroup = 0.0;
        double parametric = 0.0;
    };
    const auto errs = parallel_map<PointErr>(pts.size(), [&](std::size_t k) {
        PointErr e;
        const CVec& z = pts[k];
        CVec v = z;
        for (int step = 1; step <= 10; ++step) {
            v = flow(field, v, step - 1.0, step, fo).endpoint;
            e.closed = std::max(e.closed, norm(dom, v - shear_flow_closed_form(z, c.i, c.j, coeff, step)));
        }
        const CVec direct = flow(field, z, 0.0, 7.0, fo).endpoint;
        const CVec split = flow(field, flow(field, z, 0.0, 3.0, fo).endpoint, 3.0, 7.0, fo).endpoint;
        e.semigroup = norm(dom, direct - split);
        ParametricOptions po;
        po.tol = c.tol.parametric;
        po.flow_tol = c.tol.flow;
        const CVec& zs = pts_small[k];
        const FlowResult pm = parametric_map(field, zs, po);
        CVec expect = zs;
        expect[c.i] -= coeff * zs[c.j] * zs[c.j];
        e.parametric = pm.converged ? norm(dom, pm.endpoint - expect) : kInf;
        return e;
    });
    double closed = 0.0, semi = 0.0, param = 0.0;
    for (const auto& e : errs) {
        closed = std::max(closed, e.closed);
        semi = std::max(semi, e.semigroup);
        param = std::max(param, e.parametric);
    }
    const bool pass = closed <= c.tol.closed_form && semi <= c.tol.closed_form && param <= 1e-6;
    std::ostringstream msg;
    msg << "closed-form error " << closed << ", semigroup residual " << semi << ", parametric error " << param;
    return {json{{"field", to_json(field)},
                 {"points", c.samples},
                 {"closed_form_max_error", number_json(closed)},
                 {"semigroup_max_residual", number_json(semi)},
                 {"parametric_max_error", number_json(param)},
                 {"closed_form_tolerance", c.tol.closed_form},
                 {"parametric_tolerance", 1e-6}},
            pass, msg.str(), std::nullopt};
}

inline ScanOptions scan_options(const ExperimentConfig& c) {
    ScanOptions o;
    o.pieces = c.pieces;
    o.tolerance = c.tol.bound;
    o.sampler.parametric.tol = c.tol.parametric;
    o.sampler.parametric.flow_tol = c.tol.flow;
    return o;
}

inline Outcome run_scan(const ExperimentConfig& c, Rng& rng) {
    const BallGeometry dom = c.domain();
    if (c.alphas.empty()) {
        const BoundReport rep = scan_support(c.g(), dom, c.i, c.j, c.N, rng, scan_options(c));
        std::ostringstream msg;
        msg << rep.note << "; bound " << rep.theoretical_bound << ", empirical max " << rep.empirical_max
            << (rep.attained ? ", attained" : ", NOT attained");
        return {to_json(rep), rep.pass(), msg.str(), std::nullopt};
    }
    if (!c.family || *c.family == "moebius") throw UsageError("config field 'alphas' needs a family with a parameter");
    json reports = json::array();
    std::ostringstream csv;
    csv << "alpha,bound,empirical_max,attained\n";
    bool pass = true;
    for (double a : c.alphas) {
        const DiscFunction g = DiscFunction::from_family(family_from_name(*c.family), a);
        const BoundReport rep = scan_support(g, dom, c.i, c.j, c.N, rng, scan_options(c));
        pass = pass && rep.pass();
        json r = to_json(rep);
        r["alpha"] = a;
        reports.push_back(r);
        csv << csv_number(a) << "," << csv_number(rep.theoretical_bound) << "," << csv_number(rep.empirical_max) << ","
            << (rep.attained ? "true" : "false") << "\n";
    }
    return {json{{"reports", reports}}, pass, pass ? "all scans within bounds" : "some scan failed", csv.str()};
}

inline Outcome run_gprime(const ExperimentConfig& c, Rng& rng) {
    const BoundReport rep = verify_gprime_bounds(c.g(), c.domain(), c.N, rng, scan_options(c));
    std::ostringstream msg;
    msg << rep.note << "; bound " << rep.theoretical_bound << ", empirical max " << rep.empirical_max
        << ", sharpness error " << rep.attainment_error;
    return {to_json(rep), rep.pass(), msg.str(), std::nullopt};
}

inline Outcome run_unbounded_growth(const ExperimentConfig& c) {
    const DiscFunction g = c.g();
    const BallGeometry dom = c.domain();
    const HolMap f = unbounded_support_map(g, dom);
    const double cst = growth_constant(g);
    const auto rows = growth_check(g, c.rhos, cst);
    json jrows = json::array();
    std::ostringstream csv;
    csv << "rho,b_rho,norm_f_rho_e1,lower_bound,holds\n";
    bool pass = true;
    for (const auto& r : rows) {
        const double nf = norm(dom, evaluate(f, r.rho * CVec::unit(dom.dim(), 0)));
        pass = pass && r.holds;
        jrows.push_back({{"rho", r.rho}, {"b_rho", r.b}, {"norm_f_rho_e1", nf}, {"lower_bound", r.bound}, {"holds", r.holds}});
        csv << csv_number(r.rho) << "," << csv_number(r.b) << "," << csv_number(nf) << "," << csv_number(r.bound) << ","
            << (r.holds ? "true" : "false") << "\n";
    }
    const cplx diag = second_coeff(f, 0, 0, CoeffKind::pure);
    const cplx expect = -g_prime0(g);
    const bool diag_ok = std::abs(diag - expect) <= 1e-7;
    pass = pass && diag_ok;
    std::ostringstream msg;
    msg << "growth constant C = " << cst << ", diagonal coefficient " << diag.real() << " (expected " << expect.real()
        << ")";
    return {json{{"map", to_json(f)},
                 {"growth_constant", cst},
                 {"rows", jrows},
                 {"diagonal_coefficient", to_json(diag)},
                 {"expected_diagonal_coefficient", to_json(expect)},
                 {"diagonal_ok", diag_ok}},
            pass, msg.str(), csv.str()};
}

inline Outcome run_shear_commute(const ExperimentConfig& c, Rng& rng) {
    const DiscFunction g = c.g();
    const BallGeometry dom = c.domain();
    Sg0Options so;
    so.parametric.tol = c.tol.parametric;
    so.parametric.flow_tol = c.tol.flow;
    std::vector<std::uint64_t> seeds(c.fields);
    for (auto& s : seeds) s = rng();
    json rows = json::array();
    std::ostringstream csv;
    csv << "field,residual,pass\n";
    bool pass = true;
    double worst = 0.0;
    for (std::size_t k = 0; k < c.fields; ++k) {
        Rng local(seeds[k]);
        const HerglotzField field = random_certified_field(g, dom, local, c.pieces, so);
        const double res = verify_shear_commutes(g, dom, field, c.samples, c.i, c.j, so.parametric);
        const bool ok = res < c.tol.commute;
        pass = pass && ok;
        worst = std::max(worst, res);
        rows.push_back({{"field", describe_field(field)}, {"residual", res}, {"pass", ok}});
        csv << k + 1 << "," << csv_number(res) << "," << (ok ? "true" : "false") << "\n";
    }
    std::ostringstream msg;
    msg << c.fields << " fields, max residual " << worst;
    return {json{{"rows", rows}, {"max_residual", worst}, {"tolerance", c.tol.commute}}, pass, msg.str(), csv.str()};
}

}  // namespace detail

/// Runs the configured experiment. Usage errors propagate; numerical
/// instabilities and unmet preconditions become failed envelopes.
inline ReportEnvelope run_experiment(const ExperimentConfig& config) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    ReportEnvelope env;
    env.config = config_to_json(config);
    Rng rng(*config.seed);
    try {
        detail::Outcome out;
        switch (config.experiment) {
            case ExperimentKind::d1_table: out = detail::run_d1_table(config); break;
            case ExperimentKind::a0_table: out = detail::run_a0_table(config); break;
            case ExperimentKind::certify: out = detail::run_certify(config, rng); break;
            case ExperimentKind::flow_check: out = detail::run_flow_check(config, rng); break;
            case ExperimentKind::scan: out = detail::run_scan(config, rng); break;
            case ExperimentKind::gprime: out = detail::run_gprime(config, rng); break;
            case ExperimentKind::unbounded_growth: out = detail::run_unbounded_growth(config); break;
            case ExperimentKind::shear_commute: out = detail::run_shear_commute(config, rng); break;
        }
        env.result = std::move(out.result);
        env.pass = out.pass;
        env.status = out.pass ? "pass" : "fail";
        env.exit_code = out.pass ? 0 : 1;
        env.message = std::move(out.message);
        env.csv = std::move(out.csv);
    } catch (const NumericalInstability& e) {
        env.result = nullptr;
        env.pass = false;
        env.status = "numerical_instability";
        env.exit_code = 3;
        env.message = e.what();
    } catch (const PreconditionError& e) {
        env.result = nullptr;
        env.pass = false;
        env.status = "precondition_failed";
        env.exit_code = 2;
        env.message = e.what();
    }
    env.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return env;
}

inline std::string csv_path_for(const std::string& path) {
    std::filesystem::path p(path);
    if (p.extension() == ".json") return p.replace_extension(".csv").string();
    return path + ".csv";
}

/// Writes the JSON envelope, a CSV companion for tabular payloads and a
/// `.meta.json` sidecar with the wall time (kept out of the main report so
/// that reruns are byte-identical). Returns the process exit code.
inline int emit_report(const ReportEnvelope& env, const std::string& path) {
    auto write = [](const std::string& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw LabError("cannot write report file '" + p + "'");
        out << text;
        if (!out) throw LabError("error while writing report file '" + p + "'");
    };
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    write(path, envelope_to_json(env).dump(2) + "\n");
    if (env.csv) write(csv_path_for(path), *env.csv);
    const json meta{{"report", std::filesystem::path(path).filename().string()},
                    {"wall_time_seconds", env.wall_time_seconds},
                    {"software", env.software}};
    write(path + ".meta.json", meta.dump(2) + "\n");
    return env.exit_code;
}

}  // namespace loewner_lab
