#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dgl/decompose.hpp"
#include "dgl/experiments.hpp"
#include "dgl/incidence.hpp"
#include "dgl/io.hpp"
#include "dgl/regularity.hpp"
#include "dgl/setgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dgl;

namespace {

enum Exit { kOk = 0, kVerdictFailure = 1, kUsage = 2 };

struct Options {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    bool oracle = false;
    std::string heavy;
};

struct Loaded {
    json doc;
    fs::path base;
};

Loaded load_config(const Options& opt) {
    json doc;
    try {
        doc = json::parse(io::read_text(opt.config));
    } catch (const json::exception& e) {
        throw InvalidArgument(opt.config + ": " + e.what());
    }
    if (!doc.is_object()) throw InvalidArgument(opt.config + ": config must be a JSON object");
    if (opt.seed) doc["seed"] = *opt.seed;
    return {doc, fs::path(opt.config).parent_path()};
}

fs::path resolve(const Loaded& cfg, const std::string& key) {
    const fs::path p = lab::detail::get<std::string>(cfg.doc, key, "config");
    return p.is_absolute() ? p : cfg.base / p;
}

int finish(const lab::ExperimentReport& rep, const fs::path& out) {
    lab::write_report(out, rep);
    for (const auto& v : rep.verdicts)
        std::cout << (v.pass ? "PASS" : "FAIL") << "  acceptance-" << v.criterion << "  " << v.name << "  value "
                  << io::real(v.value) << "  threshold " << io::real(v.threshold) << "\n";
    std::cout << "report: " << (out / "report.json").string() << "\n";
    return rep.pass() ? kOk : kVerdictFailure;
}

int run_experiment(const Loaded& cfg, const fs::path& out, std::initializer_list<lab::Experiment> allowed) {
    const auto ec = lab::ExperimentConfig::from_json(cfg.doc);
    bool ok = false;
    for (auto e : allowed) ok = ok || e == ec.experiment;
    if (!ok) throw InvalidArgument("experiment '" + lab::to_string(ec.experiment) + "' is not handled by this subcommand");
    return finish(lab::run_experiment(ec), out);
}

// gen: {"points": <set spec>, "k": 8, "seed": 1} or {"tubes": {...}}
int cmd_gen(const Options& opt) {
    const auto cfg = load_config(opt);
    const std::uint64_t seed = lab::detail::get_or<std::uint64_t>(cfg.doc, "seed", 0, "config");
    const fs::path out(opt.out);
    json manifest = json::object();
    if (cfg.doc.contains("points")) {
        const Scale d(lab::detail::get<int>(cfg.doc, "k", "config"));
        const auto spec = lab::SetSpec::from_json(cfg.doc["points"], "config.points");
        const auto P = spec.build(d, seed);
        io::write_points(out / "points.csv", P);
        manifest["points"] = {{"file", "points.csv"}, {"size", P.size()}, {"k", d.k()}, {"nominal_dimension", spec.nominal_dimension()}};
    }
    if (cfg.doc.contains("tubes")) {
        const auto& t = cfg.doc["tubes"];
        const auto kind = lab::detail::get<std::string>(t, "kind", "config.tubes");
        std::optional<TubeSet> T;
        if (kind == "net") {
            T = gen_tube_net(lab::detail::get<double>(t, "r", "config.tubes"));
        } else if (kind == "bush") {
            const auto apex = lab::detail::get<std::vector<double>>(t, "apex", "config.tubes");
            require(apex.size() == 2, "config.tubes: apex must be [x, y]");
            T = gen_tube_bush({{apex[0], apex[1]}, lab::detail::get<double>(t, "s", "config.tubes"),
                               Scale(lab::detail::get<int>(t, "k", "config.tubes")), seed});
        } else if (kind == "frostman") {
            T = gen_random_tube_family(Scale(lab::detail::get<int>(t, "k", "config.tubes")),
                                       lab::detail::get<double>(t, "t", "config.tubes"), seed);
        } else {
            throw InvalidArgument("config.tubes: unknown kind '" + kind + "'");
        }
        io::write_tubes(out / "tubes.csv", *T);
        manifest["tubes"] = {{"file", "tubes.csv"}, {"size", T->size()}, {"k", T->delta().k()}, {"width", T->width()}};
    }
    if (manifest.empty()) throw InvalidArgument("config: gen needs a 'points' or 'tubes' section");
    io::write_text(out / "manifest.json", manifest.dump(2) + "\n");
    std::cout << manifest.dump() << "\n";
    return kOk;
}

// check: {"points": file, "s": 1.0, "kind": "covering"|"katz-tao", "C": optional}
//     or {"tubes": file, "k": 8, "t": 1.0, ...}
int cmd_check(const Options& opt) {
    const auto cfg = load_config(opt);
    const auto kind = lab::detail::get_or<std::string>(cfg.doc, "kind", "covering", "config");
    require(kind == "covering" || kind == "katz-tao", "config: kind must be covering or katz-tao");
    const bool kt = kind == "katz-tao";
    ConcentrationProfile prof;
    if (cfg.doc.contains("points")) {
        const auto P = io::read_points(resolve(cfg, "points"));
        require(!P.empty(), "check: empty point set");
        const double s = lab::detail::get<double>(cfg.doc, "s", "config");
        prof = kt ? katz_tao_profile(P, s) : concentration_profile(P, s);
    } else if (cfg.doc.contains("tubes")) {
        const auto T = io::read_tubes(resolve(cfg, "tubes"), cfg.doc.contains("k") ? std::optional(cfg.doc["k"].get<int>()) : std::nullopt);
        require(!T.empty(), "check: empty tube set");
        const double t = lab::detail::get<double>(cfg.doc, "t", "config");
        prof = kt ? tube_katz_tao_profile(T, t) : tube_concentration_profile(T, t);
    } else {
        throw InvalidArgument("config: check needs 'points' or 'tubes'");
    }
    json rep = {{"profile", io::to_json(prof)}};
    int code = kOk;
    if (cfg.doc.contains("C")) {
        const double C = lab::detail::get<double>(cfg.doc, "C", "config");
        const bool pass = prof.C_star <= C;
        rep["declared_C"] = C;
        rep["pass"] = pass;
        code = pass ? kOk : kVerdictFailure;
    }
    io::write_text(fs::path(opt.out) / "profile.json", rep.dump(2) + "\n");
    std::cout << "C_star " << io::real(prof.C_star) << "\n";
    return code;
}

// decompose: decompose-bench experiment, or {"points": file, "t": 1, "C": optional, "eps": 0.1}
int cmd_decompose(const Options& opt) {
    const auto cfg = load_config(opt);
    const fs::path out(opt.out);
    if (cfg.doc.contains("experiment")) return run_experiment(cfg, out, {lab::Experiment::DecomposeBench});
    const auto P = io::read_points(resolve(cfg, "points"));
    const double t = lab::detail::get<double>(cfg.doc, "t", "config");
    const double eps = lab::detail::get_or<double>(cfg.doc, "eps", 0.1, "config");
    const double C = cfg.doc.contains("C") ? lab::detail::get<double>(cfg.doc, "C", "config") : concentration_profile(P, t).C_star;
    const auto D = katz_tao_decompose(P, t, C);
    const auto v = verify_decomposition(D, P, t, eps);
    json parts = json::array();
    for (std::size_t j = 0; j < D.N(); ++j) {
        char name[32];
        std::snprintf(name, sizeof name, "part_%04zu.csv", j);
        io::write_points(out / name, D.parts[j]);
        parts.push_back({{"file", name}, {"size", D.parts[j].size()}, {"katz_tao_C", D.part_katz_tao[j]}});
    }
    json manifest = {{"t", t},           {"C", C},          {"eps", eps},
                     {"H_exact", D.core.H_exact}, {"H", D.H()}, {"N", D.N()},
                     {"max_degree", D.core.max_degree}, {"edges", D.core.edge_count},
                     {"parts", parts},
                     {"verification", {{"disjoint", v.disjoint}, {"exhaustive", v.exhaustive}, {"katz_tao", v.katz_tao},
                                       {"c0", v.c0}, {"count_bound", v.count_bound}, {"count_ceiling", v.count_ceiling},
                                       {"failures", v.failures}, {"pass", v.pass()}}}};
    io::write_text(out / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "H " << D.H() << "  N " << D.N() << "  " << (v.pass() ? "PASS" : "FAIL") << "\n";
    for (const auto& f : v.failures) std::cout << "  " << f << "\n";
    return v.pass() ? kOk : kVerdictFailure;
}

std::optional<std::pair<double, double>> parse_heavy(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw InvalidArgument("--heavy expects sigma,eps");
    try {
        return std::pair{std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw InvalidArgument("--heavy expects two numbers sigma,eps");
    }
}

// incidences: incidence-bound experiment, or {"points": file, "tubes": file, "s", "t", "eps", "heavy": [sigma, eps]}
int cmd_incidences(const Options& opt) {
    const auto cfg = load_config(opt);
    const fs::path out(opt.out);
    if (cfg.doc.contains("experiment")) {
        try {
            return run_experiment(cfg, out, {lab::Experiment::IncidenceBound});
        } catch (const lab::CertificationAbort& e) {
            io::write_text(out / "certification_failure.json",
                           json{{"error", e.what()}, {"profile", e.profile}}.dump(2) + "\n");
            throw;
        }
    }
    const auto P = io::read_points(resolve(cfg, "points"));
    const auto T = io::read_tubes(resolve(cfg, "tubes"), P.delta().k());
    IncidenceReport rep;
    json doc;
    if (opt.oracle) {
        rep = count_bruteforce(P, T);
    } else if (cfg.doc.contains("s") && cfg.doc.contains("t")) {
        const double s = lab::detail::get<double>(cfg.doc, "s", "config");
        const double t = lab::detail::get<double>(cfg.doc, "t", "config");
        const double eps = lab::detail::get_or<double>(cfg.doc, "eps", 0.0, "config");
        rep = fu_ren_check(P, T, s, t, eps, eps, lab::kStageBudget);
    } else {
        rep = count_indexed(P, T, lab::kStageBudget);
    }
    doc = {{"total", rep.total}, {"per_tube", rep.per_tube}, {"oracle", rep.oracle}};
    int code = kOk;
    if (rep.fu_ren) {
        const auto& f = *rep.fu_ren;
        doc["fu_ren"] = {{"s", f.s}, {"t", f.t}, {"kappa", f.kappa}, {"eps", f.eps}, {"ceiling", f.ceiling},
                         {"margin", io::finite_or_null(f.margin)}, {"violation", f.violation},
                         {"C_points", f.C_points}, {"C_tubes", f.C_tubes}};
        if (f.violation) code = kVerdictFailure;
    }
    auto heavy = parse_heavy(opt.heavy);
    if (!heavy && cfg.doc.contains("heavy")) {
        const auto h = lab::detail::get<std::vector<double>>(cfg.doc, "heavy", "config");
        require(h.size() == 2, "config: heavy must be [sigma, eps]");
        heavy = std::pair{h[0], h[1]};
    }
    if (heavy) {
        const auto H = heavy_tubes(P, T, heavy->first, heavy->second);
        io::write_tubes(out / "heavy_tubes.csv", H);
        doc["heavy"] = {{"sigma", heavy->first}, {"eps", heavy->second},
                        {"threshold", heavy_threshold(P.size(), P.delta(), heavy->first, heavy->second)},
                        {"count", H.size()}, {"file", "heavy_tubes.csv"}};
    }
    io::write_text(out / "incidences.json", doc.dump(2) + "\n");
    std::cout << "incidences " << rep.total << "\n";
    return code;
}

// fit: {"samples": [{"k_r": 6, "N": 40}, ...]} or {"csv": "scales.csv"}
int cmd_fit(const Options& opt) {
    const auto cfg = load_config(opt);
    std::vector<ScaleCount> samples;
    if (cfg.doc.contains("csv")) {
        const auto text = io::read_text(resolve(cfg, "csv"));
        for (const auto& row : io::detail::parse_csv(text, {"k_r", "N"}, "fit csv"))
            samples.push_back({static_cast<int>(row[0]), row[1]});
    } else {
        for (const auto& s : lab::detail::field(cfg.doc, "samples", "config"))
            samples.push_back({lab::detail::get<int>(s, "k_r", "config.samples"), lab::detail::get<double>(s, "N", "config.samples")});
    }
    const auto fit = fit_exponent(samples);
    io::write_text(fs::path(opt.out) / "fit.json", io::to_json(fit).dump(2) + "\n");
    std::cout << "slope " << io::real(fit.slope) << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dgl: discretized incidence-geometry laboratory"};
    app.require_subcommand(1);
    Options opt;
    auto add = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "JSON config file")->required();
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_flag("--oracle", opt.oracle, "use the brute-force incidence oracle");
        return sub;
    };
    auto* gen = add("gen", "generate point or tube sets");
    auto* check = add("check", "certify a point or tube set");
    auto* decompose = add("decompose", "Katz-Tao decomposition");
    auto* incidences = add("incidences", "incidence counts and the incidence ceiling");
    incidences->add_option("--heavy", opt.heavy, "emit heavy tubes for sigma,eps");
    auto* radial = add("radial", "radial projection exponent sweep");
    auto* beck = add("beck", "spanned-line exponent sweep");
    auto* furstenberg = add("furstenberg", "Furstenberg union sweep");
    auto* fit = add("fit", "fit a covering exponent");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    try {
        const fs::path out(opt.out);
        if (*gen) return cmd_gen(opt);
        if (*check) return cmd_check(opt);
        if (*decompose) return cmd_decompose(opt);
        if (*incidences) return cmd_incidences(opt);
        if (*radial) return run_experiment(load_config(opt), out, {lab::Experiment::RadialExponent});
        if (*beck) return run_experiment(load_config(opt), out, {lab::Experiment::Beck});
        if (*furstenberg) return run_experiment(load_config(opt), out, {lab::Experiment::Furstenberg});
        if (*fit) return cmd_fit(opt);
    } catch (const dgl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
