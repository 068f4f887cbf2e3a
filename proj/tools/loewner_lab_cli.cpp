// loewner_lab command-line front end. One experiment per invocation.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "loewner_lab/loewner_lab.hpp"

namespace {

using namespace loewner_lab;

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::string> family;
    std::optional<double> alpha;
    std::optional<std::string> domain;
    std::optional<std::size_t> n;
    std::optional<long long> i;
    std::optional<long long> j;
    std::optional<std::size_t> N;
    std::optional<int> pieces;
    std::optional<int> sign;
    std::optional<double> inflate;
    std::vector<double> alphas;
    std::optional<std::size_t> fields;
    std::optional<std::size_t> samples;
    std::optional<double> eps;
    std::optional<double> bound_tol;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "64-bit master seed (overrides config)");
    sub->add_option("--out", o.out, "report path (JSON; CSV and .meta.json companions alongside)");
    sub->add_option("--family", o.family, "disc function family");
    sub->add_option("--alpha", o.alpha, "family parameter");
    sub->add_option("--domain", o.domain, "ball kind: euclidean | polydisc | spectral2");
    sub->add_option("--n", o.n, "dimension");
    sub->add_option("-i", o.i, "first index (1-based)");
    sub->add_option("-j", o.j, "second index (1-based)");
    sub->add_option("-N", o.N, "sample count");
    sub->add_option("--pieces", o.pieces, "segments per random field");
    sub->add_option("--sign", o.sign, "+1 or -1");
    sub->add_option("--inflate", o.inflate, "multiplier on the canonical coefficient (certify)");
    sub->add_option("--alphas", o.alphas, "alpha grid for tables and batch scans");
    sub->add_option("--fields", o.fields, "number of random fields (shear-commute)");
    sub->add_option("--samples", o.samples, "points per check");
    sub->add_option("--eps", o.eps, "membership tolerance");
    sub->add_option("--bound-tol", o.bound_tol, "coefficient bound tolerance");
}

ExperimentConfig build_config(ExperimentKind kind, const Overrides& o) {
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (!o.config_path.empty() && c.experiment != kind) {
        throw UsageError(std::string("config field 'experiment' is '") + experiment_name(c.experiment) +
                         "' but the subcommand runs '" + experiment_name(kind) + "'");
    }
    c.experiment = kind;
    json patch = json::object();
    if (o.family || o.alpha) {
        json g{{"family", o.family ? *o.family : c.family.value_or("moebius")}};
        g["alpha"] = o.alpha ? *o.alpha : c.alpha;
        patch["g"] = g;
    }
    if (o.domain || o.n) {
        json d{{"kind", o.domain ? *o.domain : c.domain_kind}};
        if (o.n) d["n"] = *o.n;
        else if (!o.domain) d["n"] = c.n;
        patch["domain"] = d;
    }
    if (o.i) patch["i"] = *o.i;
    if (o.j) patch["j"] = *o.j;
    if (o.N) patch["N"] = *o.N;
    if (o.pieces) patch["pieces"] = *o.pieces;
    if (o.sign) patch["sign"] = *o.sign;
    if (o.inflate) patch["inflate"] = *o.inflate;
    if (!o.alphas.empty()) patch["alphas"] = o.alphas;
    if (o.fields) patch["fields"] = *o.fields;
    if (o.samples) patch["samples"] = *o.samples;
    if (o.eps || o.bound_tol) {
        json t = json::object();
        if (o.eps) t["eps"] = *o.eps;
        if (o.bound_tol) t["bound"] = *o.bound_tol;
        patch["tolerances"] = t;
    }
    if (o.seed) patch["seed"] = *o.seed;
    if (!o.out.empty()) patch["output_path"] = o.out;
    apply_config_json(c, patch);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for Loewner chains and support points on bounded symmetric domains"};
    app.set_version_flag("--version", std::string("loewner_lab ") + kVersion);
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, ExperimentKind>> commands{
        {"d1", ExperimentKind::d1_table},
        {"a0", ExperimentKind::a0_table},
        {"certify", ExperimentKind::certify},
        {"flow-check", ExperimentKind::flow_check},
        {"scan", ExperimentKind::scan},
        {"gprime", ExperimentKind::gprime},
        {"unbounded-growth", ExperimentKind::unbounded_growth},
        {"shear-commute", ExperimentKind::shear_commute},
    };
    const std::vector<std::string> help{
        "distance from 1 to the boundary image, closed form vs boundary grid",
        "a0 table against d1",
        "sample-based certificate for the canonical shear field",
        "closed-form, semigroup and parametric-limit checks of the flow",
        "support-point scan of the coefficient functional",
        "diagonal and mixed coefficient bounds by |g'(0)|",
        "unbounded support map: growth and diagonal coefficient",
        "shearing commutes with the parametric limit",
    };
    Overrides o;
    std::vector<CLI::App*> subs;
    for (std::size_t k = 0; k < commands.size(); ++k) {
        auto* sub = app.add_subcommand(commands[k].first, help[k]);
        add_common(sub, o);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Error& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ExperimentKind kind = ExperimentKind::d1_table;
        for (std::size_t k = 0; k < subs.size(); ++k) {
            if (subs[k]->parsed()) kind = commands[k].second;
        }
        const ExperimentConfig config = build_config(kind, o);
        const ReportEnvelope env = run_experiment(config);
        int rc = env.exit_code;
        if (config.output_path.empty()) {
            std::cout << envelope_to_json(env).dump(2) << "\n";
        } else {
            rc = emit_report(env, config.output_path);
        }
        std::cerr << experiment_name(kind) << ": " << env.status << " (" << env.message << ")\n";
        return rc;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalInstability& e) {
        std::cerr << "numerical instability: " << e.what() << "\n";
        return 3;
    } catch (const LabError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
