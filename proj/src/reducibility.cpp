#include "fraccrit/reducibility.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fraccrit/catalog.hpp"
#include "fraccrit/parallel.hpp"

namespace fraccrit {

namespace {

std::string brace(const std::vector<std::string>& names) {
    std::string out = "{";
    for (size_t i = 0; i < names.size(); ++i) out += (i ? " " : "") + names[i];
    return out + "}";
}

std::vector<std::string> mask_names(const EGraph& g, Mask m) {
    std::vector<std::string> out;
    for (; m; m &= m - 1) out.push_back(g.name(std::countr_zero(m)));
    return out;
}

// Largest value the left-hand side can take given only the measures 7 - d(v) on S.
Rational structural_cap(const EGraph& h, const std::vector<std::string>& names) {
    int sum = 0;
    for (const auto& n : names) sum += 7 - h.ext(h.find(n));
    return std::min(sum, 11);
}

}  // namespace

std::string describe(const BoundaryConstraint& c) {
    if (c.kind == ConstraintKind::CapLE)
        return "cap " + brace(c.first) + " " + brace(c.second) + " <= " + to_string(c.bound);
    return "cup " + brace(c.first) + " <= " + to_string(c.bound);
}

Mask names_to_mask(const EGraph& g, const std::vector<std::string>& names) {
    Mask m = 0;
    for (const auto& n : names) {
        int v = g.find(n);
        if (v < 0) throw std::invalid_argument("unknown vertex '" + n + "'");
        m |= Mask{1} << v;
    }
    return m;
}

// ---------------------------------------------------------------------------------------------
// Trivial constraints

std::vector<BoundaryConstraint> trivial_constraints(const EGraph& h, const std::vector<std::string>& s) {
    const Mask sm = names_to_mask(h, s);
    struct Cup {
        Mask a;
        int bound;
    };
    struct Cap {
        Mask b, c;
        int bound;
    };
    std::vector<Cup> cups;
    std::vector<Cap> caps;
    for (int z = 0; z < h.size(); ++z) {
        if ((sm >> z) & 1u) continue;
        Mask a = h.neighbor_mask(z) & sm;
        if (a) cups.push_back({a, h.ext(z) + 4});
        for (int z2 : h.neighbors(z)) {
            if (z2 < z || ((sm >> z2) & 1u)) continue;
            Mask b = a, c = h.neighbor_mask(z2) & sm;
            if (!b || !c) continue;
            if (c < b) std::swap(b, c);
            caps.push_back({b, c, h.ext(z) + h.ext(z2) - 3});
        }
    }
    // Only the maximal sets matter: subsets of the same neighborhood give weaker bounds.
    auto sub = [](Mask x, Mask y) { return (x & ~y) == 0; };
    std::vector<BoundaryConstraint> out;
    for (size_t i = 0; i < cups.size(); ++i) {
        bool dominated = false;
        for (size_t j = 0; j < cups.size() && !dominated; ++j) {
            if (i == j) continue;
            bool weaker = sub(cups[i].a, cups[j].a) && cups[j].bound <= cups[i].bound;
            bool same = cups[i].a == cups[j].a && cups[i].bound == cups[j].bound;
            dominated = weaker && (!same || j < i);
        }
        if (dominated) continue;
        BoundaryConstraint c{ConstraintKind::CupLE, mask_names(h, cups[i].a), {}, cups[i].bound};
        if (c.bound < structural_cap(h, c.first)) out.push_back(std::move(c));
    }
    for (size_t i = 0; i < caps.size(); ++i) {
        bool dominated = false;
        for (size_t j = 0; j < caps.size() && !dominated; ++j) {
            if (i == j) continue;
            const auto &x = caps[i], &y = caps[j];
            bool inside = (sub(x.b, y.b) && sub(x.c, y.c)) || (sub(x.b, y.c) && sub(x.c, y.b));
            bool weaker = inside && y.bound <= x.bound;
            bool same = x.b == y.b && x.c == y.c && x.bound == y.bound;
            dominated = weaker && (!same || j < i);
        }
        if (dominated) continue;
        BoundaryConstraint c{ConstraintKind::CapLE, mask_names(h, caps[i].b), mask_names(h, caps[i].c),
                             caps[i].bound};
        Rational cap = std::min(structural_cap(h, c.first), structural_cap(h, c.second));
        if (c.bound < cap) out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const BoundaryConstraint& x, const BoundaryConstraint& y) {
        return std::tie(x.kind, x.first, x.second, x.bound) < std::tie(y.kind, y.first, y.second, y.bound);
    });
    return out;
}

bool participates_in_trivial_constraints(const EGraph& h, const std::vector<std::string>& s, int z) {
    const Mask sm = names_to_mask(h, s);
    if ((sm >> z) & 1u) throw std::invalid_argument("vertex lies in S");
    const Mask zn = h.neighbor_mask(z) & sm;
    if (std::popcount(zn) >= 2) return true;  // s - z - s'
    for (int w : h.neighbors(z)) {
        // s - z - w - s' with s, w, s' distinct
        Mask a = zn & ~(Mask{1} << w);
        Mask b = h.neighbor_mask(w) & sm;
        if (a && b && std::popcount(a | b) >= 2) return true;
    }
    return false;
}

bool constraint_counts(const EGraph& g, const BoundaryConstraint& c, Mask j) {
    if (c.kind == ConstraintKind::CupLE) return (j & names_to_mask(g, c.first)) != 0;
    return (j & names_to_mask(g, c.first)) && (j & names_to_mask(g, c.second));
}

// ---------------------------------------------------------------------------------------------
// Reducibility

namespace {

void check_constraint_scope(const EGraph& g, Mask s, const BoundaryConstraint& c) {
    if (c.first.empty() || (c.kind == ConstraintKind::CapLE && c.second.empty()))
        throw std::invalid_argument("empty vertex set in constraint " + describe(c));
    if (sgn(c.bound) < 0) throw std::invalid_argument("negative bound in constraint " + describe(c));
    Mask m = names_to_mask(g, c.first) | names_to_mask(g, c.second);
    if (m & ~s) throw std::invalid_argument("constraint " + describe(c) + " references a vertex off the boundary");
}

}  // namespace

CompiledConfiguration compile_constraints(const Configuration& cfg) {
    CompiledConfiguration out;
    const EGraph& g = cfg.g1;
    out.boundary = names_to_mask(g, cfg.boundary);
    for (const auto& c : cfg.constraints) check_constraint_scope(g, out.boundary, c);
    out.family = independent_sets(g, out.boundary);
    const auto& sets = out.family.sets;
    for (size_t i = 0; i < sets.size(); ++i) out.system.add_var(true, "y" + set_name(g, sets[i]));
    std::vector<Term> total;
    for (size_t i = 0; i < sets.size(); ++i) total.push_back({static_cast<int>(i), 1});
    out.system.add_equality(std::move(total), 11);
    for (Mask m = out.boundary; m; m &= m - 1) {
        int v = std::countr_zero(m);
        std::vector<Term> row;
        for (size_t i = 0; i < sets.size(); ++i)
            if ((sets[i] >> v) & 1u) row.push_back({static_cast<int>(i), 1});
        out.system.add_equality(std::move(row), 7 - g.ext(v));
    }
    for (const auto& c : cfg.constraints) {
        std::vector<Term> row;
        for (size_t i = 0; i < sets.size(); ++i)
            if (constraint_counts(g, c, sets[i])) row.push_back({static_cast<int>(i), 1});
        out.system.add_inequality(std::move(row), c.bound);
    }
    return out;
}

ReducibilityReport is_reducible(const Configuration& cfg, int jobs) {
    CompiledConfiguration cc = compile_constraints(cfg);
    std::vector<Point> vertices = enumerate_vertices(cc.system);
    ReducibilityReport report;
    report.vertices = vertices.size();
    std::vector<std::optional<FailedVertex>> fails(vertices.size());
    parallel_for(vertices.size(), jobs, [&](size_t i) {
        BoundaryProfile y{cc.boundary, cc.family.sets, vertices[i]};
        Extension e = extends(y, cfg.g1);
        if (!e.extends) fails[i] = FailedVertex{std::move(y), std::move(e.certificate)};
    });
    for (auto& f : fails)
        if (f) report.failures.push_back(std::move(*f));
    report.reducible = report.failures.empty();
    return report;
}

ReducibilityReport check_excludable(const EGraph& g1, const std::vector<std::string>& s, int jobs) {
    const Mask sm = names_to_mask(g1, s);
    bool free_vertex = false;
    for (int z = 0; z < g1.size() && !free_vertex; ++z)
        if (!((sm >> z) & 1u) && !participates_in_trivial_constraints(g1, s, z)) free_vertex = true;
    if (!free_vertex)
        throw std::invalid_argument("every vertex outside the boundary participates in trivial constraints");
    return is_reducible(Configuration{g1, s, trivial_constraints(g1, s)}, jobs);
}

std::vector<Configuration> boundary_variants(const Configuration& cfg) {
    const EGraph& g = cfg.g1;
    std::vector<int> sv;
    for (const auto& n : cfg.boundary) sv.push_back(g.find(n));
    std::vector<int> raisable;
    for (int v : sv)
        if (g.ext(v) < 3) raisable.push_back(v);

    // Identifications: nonadjacent S pairs without a common neighbor whose merged degree fits.
    std::vector<std::pair<int, int>> merges{{-1, -1}};
    for (size_t i = 0; i < sv.size(); ++i)
        for (size_t j = i + 1; j < sv.size(); ++j) {
            int a = sv[i], b = sv[j];
            if (g.has_edge(a, b) || (g.neighbor_mask(a) & g.neighbor_mask(b))) continue;
            if (g.degree(a) + g.degree(b) > 3) continue;
            merges.emplace_back(a, b);
        }

    std::map<std::string, Configuration> out;  // keyed for determinism and dedupe
    for (unsigned r = 0; r < (1u << raisable.size()); ++r)
        for (auto [a, b] : merges) {
            EGraph v = g;
            for (size_t k = 0; k < raisable.size(); ++k)
                if ((r >> k) & 1u) v.set_ext(raisable[k], 3);
            Configuration c{v, cfg.boundary, cfg.constraints};
            if (a >= 0) {
                // b's edges move to a; b disappears from S and from the constraints.
                int ext = std::max({v.ext(a), v.ext(b), v.degree(a) + v.degree(b)});
                if (ext > 3) continue;
                std::vector<int> keep;
                for (int x = 0; x < v.size(); ++x)
                    if (x != b) keep.push_back(x);
                EGraph m = induced_sub(v, keep);
                int na = m.find(v.name(a));
                for (int w : v.neighbors(b)) m.add_edge(na, m.find(v.name(w)));
                m.set_ext(na, ext);
                const std::string& bn = v.name(b);
                const std::string& an = v.name(a);
                c.g1 = m;
                c.boundary.erase(std::find(c.boundary.begin(), c.boundary.end(), bn));
                for (auto& con : c.constraints)
                    for (auto* side : {&con.first, &con.second}) {
                        for (auto& n : *side)
                            if (n == bn) n = an;
                        std::sort(side->begin(), side->end());
                        side->erase(std::unique(side->begin(), side->end()), side->end());
                    }
                if (!c.g1.triangle_free()) continue;
            }
            std::string key = std::to_string(r) + "/" + std::to_string(a) + "/" + std::to_string(b);
            out.emplace(key, std::move(c));
        }
    std::vector<Configuration> res;
    for (auto& [k, c] : out) res.push_back(std::move(c));
    return res;
}

// ---------------------------------------------------------------------------------------------
// Standard argument

std::optional<Rational> max_over_colorings(const EGraph& h, const BoundaryConstraint& c) {
    PolytopeSystem p = build_polytope(h);
    std::vector<Rational> objective(p.family.size());
    for (size_t i = 0; i < p.family.size(); ++i)
        if (constraint_counts(h, c, p.family.sets[i])) objective[i] = 1;
    LpResult lp = solve(p.system, objective, Sense::Maximize);
    if (lp.status == LpStatus::Infeasible) return std::nullopt;
    if (lp.status != LpStatus::Optimal) throw std::logic_error("bounded polytope reported unbounded");
    return lp.value;
}

namespace {

ConditionResult check_substitute(const StandardArgument& arg) {
    ConditionResult r;
    const EGraph &g1 = arg.config.g1, &h = arg.h;
    std::vector<std::string> fail, assume;
    if (auto p = h.validity_problem()) fail.push_back("replacement is not valid: " + *p);
    if (h.size() >= g1.size())
        fail.push_back("replacement has " + std::to_string(h.size()) + " vertices, configuration " +
                       std::to_string(g1.size()));
    const auto& s = arg.config.boundary;
    for (const auto& n : s) {
        int a = g1.find(n), b = h.find(n);
        if (h.degree(b) > g1.degree(a))
            fail.push_back("degree of " + n + " grows from " + std::to_string(g1.degree(a)) + " to " +
                           std::to_string(h.degree(b)));
    }
    const Mask hs = names_to_mask(h, s);
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = i + 1; j < s.size(); ++j) {
            int a = h.find(s[i]), b = h.find(s[j]);
            bool joined = h.has_edge(a, b) && !g1.has_edge(g1.find(s[i]), g1.find(s[j]));
            bool common = (h.neighbor_mask(a) & h.neighbor_mask(b) & ~hs) != 0;
            if (joined) assume.push_back(s[i] + " and " + s[j] + " have no common neighbor outside the configuration");
            else if (common) assume.push_back(s[i] + " and " + s[j] + " are not adjacent outside the configuration");
        }
    r.pass = fail.empty();
    r.notes = r.pass ? assume : fail;
    return r;
}

}  // namespace

StandardArgumentReport check_standard_argument(const StandardArgument& arg, const std::vector<EGraph>& catalog,
                                               const StandardArgumentOptions& options) {
    const Configuration& cfg = arg.config;
    const EGraph &g1 = cfg.g1, &h = arg.h;
    // Interface: same S names, same ext_degree on S, H[S] contains G1[S].
    for (const auto& n : cfg.boundary) {
        int a = g1.find(n), b = h.find(n);
        if (a < 0 || b < 0) throw std::invalid_argument("boundary vertex '" + n + "' missing from g1 or h");
        if (g1.ext(a) != h.ext(b)) throw std::invalid_argument("ext_degree of '" + n + "' differs between g1 and h");
    }
    for (const auto& x : cfg.boundary)
        for (const auto& y : cfg.boundary)
            if (g1.has_edge(g1.find(x), g1.find(y)) && !h.has_edge(h.find(x), h.find(y)))
                throw std::invalid_argument("edge " + x + y + " of g1[S] is missing from h");
    for (int v = 0; v < h.size(); ++v)
        if (g1.find(h.name(v)) >= 0 && std::find(cfg.boundary.begin(), cfg.boundary.end(), h.name(v)) == cfg.boundary.end())
            throw std::invalid_argument("vertex '" + h.name(v) + "' is shared by g1 and h but not in S");

    StandardArgumentReport rep;
    rep.substitute = check_substitute(arg);

    std::vector<Configuration> variants{cfg};
    if (options.exhaustive_variants) variants = boundary_variants(cfg);
    rep.reducible.pass = true;
    for (const auto& v : variants) {
        ReducibilityReport rr = is_reducible(v, options.jobs);
        std::string tag = variants.size() > 1 ? "variant " + serialize(v.g1) + ": " : "";
        if (!rr.reducible) {
            rep.reducible.pass = false;
            rep.reducible.notes.push_back(tag + std::to_string(rr.failures.size()) + " of " +
                                          std::to_string(rr.vertices) + " polytope vertices do not extend");
            for (const auto& f : rr.failures) {
                std::string prof;
                for (size_t i = 0; i < f.profile.sets.size(); ++i)
                    if (sgn(f.profile.y[i]) != 0)
                        prof += " y" + set_name(g1, f.profile.sets[i]) + "=" + to_string(f.profile.y[i]);
                rep.reducible.notes.push_back("  vertex" + prof);
            }
        } else {
            rep.reducible.notes.push_back(tag + "all " + std::to_string(rr.vertices) + " polytope vertices extend");
        }
    }

    rep.enforced.pass = true;
    for (const auto& c : cfg.constraints) {
        auto mx = max_over_colorings(h, c);
        if (!mx) {
            rep.enforced.notes.push_back("replacement has no coloring; " + describe(c) + " holds vacuously");
            continue;
        }
        bool ok = *mx <= c.bound;
        rep.enforced.pass = rep.enforced.pass && ok;
        rep.enforced.notes.push_back(describe(c) + ": maximum " + to_string(*mx) + (ok ? "" : " exceeds bound"));
    }

    rep.catalog.pass = true;
    if (!options.check_catalog) {
        rep.catalog.notes.push_back("skipped");
        return rep;
    }
    ReplacementRule rule = make_rule(h, g1);
    Catalog cat(catalog);
    std::vector<std::vector<std::string>> bad(catalog.size());
    std::vector<size_t> matches(catalog.size());
    parallel_for(catalog.size(), options.jobs, [&](size_t i) {
        for (const auto& emb : find_boundary_embeddings(catalog[i], h, cfg.boundary)) {
            ++matches[i];
            EGraph r;
            try {
                r = apply_replacement(catalog[i], rule, emb);
            } catch (const std::invalid_argument&) {
                continue;  // would need a parallel edge
            }
            if (!r.valid() || cat.contains(r) || !is_critical(r)) continue;
            bad[i].push_back("member " + std::to_string(i) + " yields critical non-member " + serialize(r));
        }
    });
    size_t total = 0;
    for (size_t i = 0; i < catalog.size(); ++i) {
        total += matches[i];
        for (auto& b : bad[i]) rep.catalog.notes.push_back(std::move(b));
    }
    rep.catalog.pass = rep.catalog.notes.empty();
    rep.catalog.notes.insert(rep.catalog.notes.begin(), std::to_string(total) + " matches in " +
                                                            std::to_string(catalog.size()) + " members");
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Config files

namespace {

std::string trim(std::string_view s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    size_t b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> read_set(std::istringstream& in, int line) {
    std::string tok;
    in >> std::ws;
    if (in.peek() != '{') throw std::invalid_argument("line " + std::to_string(line) + ": expected '{'");
    in.get();
    std::vector<std::string> names;
    while (in >> tok) {
        bool close = !tok.empty() && tok.back() == '}';
        if (close) tok.pop_back();
        if (!tok.empty()) names.push_back(tok);
        if (close) return names;
    }
    throw std::invalid_argument("line " + std::to_string(line) + ": missing '}'");
}

BoundaryConstraint parse_constraint(const std::string& text, int line) {
    std::istringstream in(text);
    std::string kind, op, bound;
    in >> kind;
    BoundaryConstraint c;
    if (kind == "cap") {
        c.kind = ConstraintKind::CapLE;
        c.first = read_set(in, line);
        c.second = read_set(in, line);
    } else if (kind == "cup") {
        c.first = read_set(in, line);
    } else {
        throw std::invalid_argument("line " + std::to_string(line) + ": expected 'cap' or 'cup'");
    }
    in >> op >> bound;
    std::string rest;
    if (op != "<=" || bound.empty() || (in >> rest))
        throw std::invalid_argument("line " + std::to_string(line) + ": expected '<= p/q'");
    c.bound = parse_rational(bound);
    return c;
}

}  // namespace

StandardArgument parse_config(std::string_view text) {
    std::map<std::string, std::string> body;
    std::map<std::string, int> start;
    std::string section;
    int lineno = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            if (section != "g1" && section != "boundary" && section != "constraints" && section != "h")
                throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
            if (start.count(section))
                throw std::invalid_argument("line " + std::to_string(lineno) + ": repeated section [" + section + "]");
            start[section] = lineno;
            body[section];
            continue;
        }
        if (section.empty()) throw std::invalid_argument("line " + std::to_string(lineno) + ": text before a section");
        if (section == "constraints") body[section] += std::to_string(lineno) + "\t";
        body[section] += line + "\n";
    }
    if (!body.count("g1") || !body.count("boundary"))
        throw std::invalid_argument("config needs [g1] and [boundary] sections");

    StandardArgument arg;
    arg.config.g1 = parse_egraph(body["g1"]);
    {
        std::istringstream b(body["boundary"]);
        for (std::string n; b >> n;) {
            if (arg.config.g1.find(n) < 0) throw std::invalid_argument("boundary vertex '" + n + "' not in g1");
            arg.config.boundary.push_back(n);
        }
    }
    {
        std::istringstream c(body["constraints"]);
        for (std::string l; std::getline(c, l);) {
            size_t tab = l.find('\t');
            arg.config.constraints.push_back(parse_constraint(l.substr(tab + 1), std::stoi(l.substr(0, tab))));
        }
    }
    const Mask s = names_to_mask(arg.config.g1, arg.config.boundary);
    for (const auto& c : arg.config.constraints) check_constraint_scope(arg.config.g1, s, c);
    if (body.count("h")) {
        arg.h = parse_egraph(body["h"]);
        // Boundary vertices without edges in h cannot be written in the record grammar.
        for (const auto& n : arg.config.boundary)
            if (arg.h.find(n) < 0) arg.h.add_vertex(n, arg.config.g1.ext(arg.config.g1.find(n)));
    }
    return arg;
}

}  // namespace fraccrit
