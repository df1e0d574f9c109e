#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fraccrit/catalog.hpp"
#include "fraccrit/coloring.hpp"
#include "fraccrit/polytope.hpp"
#include "fraccrit/reducibility.hpp"

using namespace fraccrit;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<EGraph> read_graphs(const std::string& path) {
    auto gs = parse_egraphs(read_file(path));
    if (gs.empty()) throw UsageError("'" + path + "' contains no e-graph");
    return gs;
}

// The record with the input's own vertex names, so witnesses stay readable against it.
std::string as_named(const EGraph& g) {
    std::string out;
    for (int v = 0; v < g.size(); ++v) {
        std::string later;
        for (int u : g.neighbors(v))
            if (u > v) later += g.name(u);
        if (!later.empty()) out += g.name(v) + ":" + later + ";";
    }
    std::string nails;
    for (int v = 0; v < g.size(); ++v)
        for (int k = g.degree(v); k < g.ext(v); ++k) nails += g.name(v) + "1";
    if (!nails.empty()) out += " " + nails;
    return out;
}

json rationals(const std::vector<Rational>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(to_string(x));
    return a;
}

json witness_json(const EGraph& g, const ColoringWitness& w) {
    json a = json::array();
    for (size_t i = 0; i < w.sets.size(); ++i) a.push_back({{"set", set_name(g, w.sets[i])}, {"weight", to_string(w.weights[i])}});
    return a;
}

json entry_json(const CheckEntry& e) {
    return {{"check", e.check}, {"member", e.member}, {"site", e.site}, {"verdict", e.verdict ? "pass" : "fail"},
            {"witness", e.witness}};
}

struct Ctx {
    bool as_json = false;
    int jobs = 1;
    json doc = json::array();
    void emit(const json& j) { doc.push_back(j); }
    void finish() const {
        if (as_json) std::cout << doc.dump(2) << "\n";
    }
};

int cmd_color(Ctx& ctx, const std::string& file, bool show_witness) {
    int code = 0;
    for (const auto& g : read_graphs(file)) {
        Colorability c = colorability(g);
        std::string rec = as_named(g);
        json j = {{"command", "color"}, {"graph", rec}, {"colorable", c.witness.has_value()}};
        if (c.witness) {
            if (!ctx.as_json) std::cout << rec << ": 11/4-colorable\n";
            if (show_witness) {
                j["witness"] = witness_json(g, *c.witness);
                if (!ctx.as_json) std::cout << dump_witness(g, *c.witness);
            }
        } else {
            code = 1;
            json mult = {{"total", to_string(c.certificate.eq[0])}};
            for (int v = 0; v < g.size(); ++v) mult[g.name(v)] = to_string(c.certificate.eq[v + 1]);
            j["certificate"] = mult;
            if (!ctx.as_json) {
                std::cout << rec << ": not 11/4-colorable\n";
                std::cout << "certificate: multipliers total=" << to_string(c.certificate.eq[0]);
                for (int v = 0; v < g.size(); ++v) std::cout << " " << g.name(v) << "=" << to_string(c.certificate.eq[v + 1]);
                std::cout << " (nonnegative on every independent set, negative right-hand side)\n";
            }
        }
        ctx.emit(j);
    }
    return code;
}

int cmd_chif(Ctx& ctx, const std::string& file) {
    for (const auto& g : read_graphs(file)) {
        FractionalChromatic f = fractional_chromatic_certified(g);
        ctx.emit({{"command", "chif"}, {"graph", as_named(g)}, {"value", to_string(f.value)}, {"weights", rationals(f.weights)}});
        if (!ctx.as_json) std::cout << to_string(f.value) << "\n";
    }
    return 0;
}

int cmd_critical(Ctx& ctx, const std::string& file) {
    int code = 0;
    for (const auto& g : read_graphs(file)) {
        bool c = is_critical(g);
        if (!c) code = 1;
        ctx.emit({{"command", "critical"}, {"graph", as_named(g)}, {"critical", c}});
        if (!ctx.as_json) std::cout << as_named(g) << ": " << (c ? "critical" : "not critical") << "\n";
    }
    return code;
}

int cmd_verify_c0(Ctx& ctx, const std::string& file, size_t expect) {
    Catalog cat = Catalog::parse(read_file(file));
    CatalogReport rep = verify_catalog(cat, expect, ctx.jobs);
    for (const auto& e : rep.entries) {
        ctx.emit(entry_json(e));
        if (ctx.as_json) continue;
        if (e.member < 0) std::cout << e.check << ": " << (e.verdict ? "pass" : "FAIL") << " (" << e.witness << ")\n";
        else std::cout << "  " << e.check << " member " << e.member << ": " << e.witness << "\n";
    }
    if (!ctx.as_json) {
        if (rep.all_pass()) std::cout << cat.size() << " members, all checks pass\n";
        else std::cout << cat.size() << " members, some checks fail\n";
    }
    return rep.all_pass() ? 0 : 1;
}

int cmd_closure(Ctx& ctx, const std::string& rule_text, const std::string& file) {
    auto rule = parse_rule(rule_text);
    if (!rule) {
        std::string names;
        for (ClosureRule r : kAllClosureRules) names += " " + std::string(rule_name(r));
        throw UsageError("unknown rule '" + rule_text + "'; rules:" + names);
    }
    Catalog cat = Catalog::parse(read_file(file));
    auto on_violation = [&](const ClosureViolation& v) {
        if (!ctx.as_json)
            std::cout << "violation: member " << v.member << " site " << describe(cat[v.member], v.site) << " -> "
                      << serialize(v.result) << std::endl;
    };
    ClosureReport rep = verify_closure(cat, *rule, ctx.jobs, on_violation);
    for (const auto& v : rep.violations)
        ctx.emit({{"check", "closure " + std::string(rule_name(*rule))}, {"member", v.member},
                  {"site", describe(cat[v.member], v.site)}, {"verdict", "fail"}, {"witness", serialize(v.result)}});
    json summary = {{"check", "closure " + std::string(rule_name(*rule))}, {"member", -1}, {"site", ""},
                    {"verdict", rep.violations.empty() ? "pass" : "fail"},
                    {"witness", std::to_string(rep.sites) + " sites, " + std::to_string(rep.results) + " results, " +
                                    std::to_string(rep.coincident) + " coincident tuples skipped"}};
    ctx.emit(summary);
    if (!ctx.as_json)
        std::cout << "rule " << rule_name(*rule) << ": " << rep.members << " members, " << rep.sites << " sites, "
                  << rep.results << " results, " << rep.coincident << " coincident tuples skipped, "
                  << rep.violations.size() << " violations\n";
    return rep.violations.empty() ? 0 : 1;
}

std::string profile_text(const EGraph& g, const BoundaryProfile& p) {
    std::string s;
    for (size_t i = 0; i < p.sets.size(); ++i)
        if (sgn(p.y[i]) != 0) s += (s.empty() ? "" : " ") + ("y" + set_name(g, p.sets[i]) + "=" + to_string(p.y[i]));
    return s;
}

int cmd_reduce(Ctx& ctx, const std::string& file, bool trivial) {
    StandardArgument arg = parse_config(read_file(file));
    const Configuration& cfg = arg.config;
    ReducibilityReport r;
    std::vector<BoundaryConstraint> used = cfg.constraints;
    if (trivial) {
        used = trivial_constraints(cfg.g1, cfg.boundary);
        r = check_excludable(cfg.g1, cfg.boundary, ctx.jobs);
    } else {
        r = is_reducible(cfg, ctx.jobs);
    }
    json j = {{"command", "reduce"}, {"reducible", r.reducible}, {"vertices", r.vertices}};
    json cons = json::array();
    for (const auto& c : used) cons.push_back(describe(c));
    j["constraints"] = cons;
    json fails = json::array();
    for (const auto& f : r.failures) fails.push_back(profile_text(cfg.g1, f.profile));
    j["failures"] = fails;
    ctx.emit(j);
    if (!ctx.as_json) {
        for (const auto& c : used) std::cout << "constraint " << describe(c) << "\n";
        for (const auto& f : r.failures) std::cout << "does not extend: " << profile_text(cfg.g1, f.profile) << "\n";
        std::cout << (r.reducible ? "reducible" : "not reducible") << " (" << r.vertices << " polytope vertices, "
                  << r.failures.size() << " fail)\n";
    }
    return r.reducible ? 0 : 1;
}

int cmd_argcheck(Ctx& ctx, const std::string& file, const std::string& catalog_file, bool exhaustive) {
    StandardArgument arg = parse_config(read_file(file));
    if (arg.h.size() == 0) throw UsageError("config has no [h] section");
    std::vector<EGraph> catalog;
    if (!catalog_file.empty()) catalog = parse_egraphs(read_file(catalog_file));
    StandardArgumentOptions opt;
    opt.jobs = ctx.jobs;
    opt.exhaustive_variants = exhaustive;
    opt.check_catalog = !catalog_file.empty();
    StandardArgumentReport rep = check_standard_argument(arg, catalog, opt);
    const std::pair<const char*, const ConditionResult*> conds[] = {
        {"(i) substitute", &rep.substitute},
        {"(ii) reducible", &rep.reducible},
        {"(iii) enforced", &rep.enforced},
        {"(iv) catalog", &rep.catalog}};
    for (auto [name, c] : conds) {
        ctx.emit({{"check", name}, {"member", -1}, {"site", ""}, {"verdict", c->pass ? "pass" : "fail"}, {"witness", c->notes}});
        if (ctx.as_json) continue;
        std::cout << name << ": " << (c->pass ? "pass" : "FAIL") << "\n";
        for (const auto& n : c->notes) std::cout << "  " << n << "\n";
    }
    return rep.all_pass() ? 0 : 1;
}

int cmd_enumerate(Ctx& ctx, int max_n) {
    auto gs = enumerate_critical(max_n, ctx.jobs);
    json a = json::array();
    for (const auto& g : gs) {
        a.push_back(serialize(g));
        if (!ctx.as_json) std::cout << serialize(g) << "\n\n";
    }
    ctx.emit({{"command", "enumerate"}, {"max_n", max_n}, {"count", gs.size()}, {"graphs", a}});
    if (!ctx.as_json) std::cout << "# " << gs.size() << " critical e-graphs with at most " << max_n << " vertices\n";
    return 0;
}

int cmd_vertices(Ctx& ctx, const std::string& file) {
    LinearSystem sys = parse_system(read_file(file));
    try {
        auto pts = enumerate_vertices(sys);
        json a = json::array();
        for (const auto& p : pts) {
            a.push_back(rationals(p));
            if (ctx.as_json) continue;
            for (size_t i = 0; i < p.size(); ++i) std::cout << (i ? " " : "") << to_string(p[i]);
            std::cout << "\n";
        }
        ctx.emit({{"command", "vertices"}, {"count", pts.size()}, {"vertices", a}});
        if (!ctx.as_json) std::cout << "# " << pts.size() << " vertices\n";
        return 0;
    } catch (const UnboundedPolyhedron& u) {
        ctx.emit({{"command", "vertices"}, {"unbounded", true}, {"ray", rationals(u.ray())}});
        if (!ctx.as_json) {
            std::cout << "unbounded; recession direction:";
            for (const auto& x : u.ray()) std::cout << " " << to_string(x);
            std::cout << "\n";
        }
        return 1;
    }
}

int cmd_combine(Ctx& ctx, const std::string& file) {
    int code = 0;
    for (const auto& g : read_graphs(file)) {
        CombineResult r = combine_vertex_deleted(g, {}, ctx.jobs);
        bool ok = r.witness && check_witness(g, *r.witness);
        json j = {{"command", "combine"}, {"graph", as_named(g)}, {"ok", ok}};
        json failed = json::array();
        for (int v : r.failed) failed.push_back(g.name(v));
        j["failed"] = failed;
        if (r.witness) j["sets"] = r.witness->sets.size();
        ctx.emit(j);
        if (!ok) code = 1;
        if (ctx.as_json) continue;
        if (ok) {
            std::cout << as_named(g) << ": averaged coloring over " << g.size() << " deletions, "
                      << r.witness->sets.size() << " independent sets, witness verified\n";
        } else {
            std::cout << as_named(g) << ": combination failed";
            for (int v : r.failed) std::cout << " " << g.name(v);
            std::cout << "\n";
        }
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact 11/4-coloring, criticality and reducibility checks for subcubic e-graphs"};
    app.require_subcommand(1);
    Ctx ctx;
    app.add_flag("--json", ctx.as_json, "Emit a JSON document instead of text");
    app.add_option("--jobs,-j", ctx.jobs, "Worker threads")->check(CLI::PositiveNumber);

    std::string file, catalog_file, rule;
    bool witness = false, trivial = false, exhaustive = false;
    size_t expect = 176;
    int max_n = 0;

    auto* color = app.add_subcommand("color", "Decide 11/4-colorability");
    color->add_option("file", file)->required();
    color->add_flag("--witness", witness, "Print the coloring as weighted independent sets");
    auto* chif = app.add_subcommand("chif", "Exact fractional chromatic number");
    chif->add_option("file", file)->required();
    auto* critical = app.add_subcommand("critical", "Decide criticality");
    critical->add_option("file", file)->required();
    auto* verify = app.add_subcommand("verify-c0", "Check a catalog of critical e-graphs");
    verify->add_option("catalog", file)->required();
    verify->add_option("--expect", expect, "Expected number of members");
    auto* closure = app.add_subcommand("closure", "Check a closure rule over a catalog");
    closure->add_option("rule", rule)->required();
    closure->add_option("catalog", file)->required();
    auto* reduce = app.add_subcommand("reduce", "Reducibility of a configuration");
    reduce->add_option("config", file)->required();
    reduce->add_flag("--trivial", trivial, "Use the trivial constraints of g1 instead of [constraints]");
    auto* argcheck = app.add_subcommand("argcheck", "Conditions (i)-(iv) of a replacement argument");
    argcheck->add_option("config", file)->required();
    argcheck->add_option("--catalog", catalog_file, "Catalog for condition (iv)");
    argcheck->add_flag("--exhaustive", exhaustive, "Also check raised and identified boundary variants");
    auto* enumerate = app.add_subcommand("enumerate", "Enumerate critical e-graphs");
    enumerate->add_option("--max-n", max_n)->required();
    auto* vertices = app.add_subcommand("vertices", "Vertices of a polytope in system text form");
    vertices->add_option("file", file)->required();
    auto* combine = app.add_subcommand("combine", "Average colorings of vertex-deleted subgraphs");
    combine->add_option("file", file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        int code = 0;
        if (*color) code = cmd_color(ctx, file, witness);
        else if (*chif) code = cmd_chif(ctx, file);
        else if (*critical) code = cmd_critical(ctx, file);
        else if (*verify) code = cmd_verify_c0(ctx, file, expect);
        else if (*closure) code = cmd_closure(ctx, rule, file);
        else if (*reduce) code = cmd_reduce(ctx, file, trivial);
        else if (*argcheck) code = cmd_argcheck(ctx, file, catalog_file, exhaustive);
        else if (*enumerate) code = cmd_enumerate(ctx, max_n);
        else if (*vertices) code = cmd_vertices(ctx, file);
        else if (*combine) code = cmd_combine(ctx, file);
        ctx.finish();
        return code;
    } catch (const UsageError& e) {
        std::cerr << "fraccrit: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
        std::cerr << "fraccrit: " << e.what() << "\n";
    } catch (const std::out_of_range& e) {
        std::cerr << "fraccrit: " << e.what() << "\n";
    } catch (const std::length_error& e) {
        std::cerr << "fraccrit: " << e.what() << "\n";
    }
    return 2;
}
