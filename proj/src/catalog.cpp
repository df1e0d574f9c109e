#include "fraccrit/catalog.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>

#include "fraccrit/coloring.hpp"
#include "fraccrit/parallel.hpp"

namespace fraccrit {

bool is_critical(const EGraph& g) {
    if (is_colorable(g)) return false;
    for (int v = 0; v < g.size(); ++v)
        if (!is_colorable(delete_vertex(g, v))) return false;
    return true;
}

// ---------------------------------------------------------------------------------------------
// Catalog

Catalog::Catalog(std::vector<EGraph> members) : members_(std::move(members)) {
    for (size_t i = 0; i < members_.size(); ++i) {
        auto [it, fresh] = index_.emplace(canonical_label(members_[i]), i);
        if (!fresh) duplicates_.emplace_back(it->second, i);
    }
}

Catalog Catalog::parse(std::string_view text) { return Catalog(parse_egraphs(text)); }

std::optional<size_t> Catalog::find(const EGraph& g) const {
    auto it = index_.find(canonical_label(g));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool CatalogReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.verdict; });
}

namespace {

EGraph underlying(const EGraph& g) {
    EGraph u = g;
    for (int v = 0; v < u.size(); ++v) u.set_ext(v, 3);
    return u;
}

EGraph k4plus() {
    EGraph g;
    for (const char* n : {"1", "2", "3", "4", "a", "b", "c", "d"}) g.add_vertex(n);
    for (auto [u, v] : {std::pair{0, 2}, {0, 3}, {1, 2}, {1, 3}, {0, 4}, {4, 5}, {5, 1}, {2, 6}, {6, 7}, {7, 3}})
        g.add_edge(u, v);
    return g;
}

int count_degree(const EGraph& g, int d) {
    int c = 0;
    for (int v = 0; v < g.size(); ++v) c += g.degree(v) == d;
    return c;
}

}  // namespace

bool is_c5_graph(const EGraph& g) {
    if (g.size() != 5) return false;
    for (int v = 0; v < 5; ++v)
        if (g.degree(v) != 2) return false;
    return true;  // the only 2-regular graph on five vertices
}

bool is_k4plus_graph(const EGraph& g) {
    static const std::string label = canonical_label(underlying(k4plus()));
    return g.size() == 8 && g.subcubic() && canonical_label(underlying(g)) == label;
}

CatalogReport verify_catalog(const Catalog& cat, size_t expected_count, int jobs) {
    CatalogReport report;
    const auto& m = cat.members();
    auto summary = [&](std::string check, bool ok, std::string witness) {
        report.entries.push_back({std::move(check), -1, "", ok, std::move(witness)});
    };

    summary("count", m.size() == expected_count,
            std::to_string(m.size()) + " members, expected " + std::to_string(expected_count));

    std::vector<CheckEntry> fails;
    auto per_member = [&](const std::string& check, auto&& problem) {
        fails.clear();
        for (size_t i = 0; i < m.size(); ++i)
            if (auto p = problem(m[i])) fails.push_back({check, static_cast<long>(i), "", false, *p});
        summary(check, fails.empty(), std::to_string(fails.size()) + " failures");
        report.entries.insert(report.entries.end(), fails.begin(), fails.end());
    };

    per_member("valid", [](const EGraph& g) { return g.validity_problem(); });

    summary("non-isomorphic", cat.duplicates().empty(), std::to_string(cat.duplicates().size()) + " duplicate pairs");
    for (auto [a, b] : cat.duplicates())
        report.entries.push_back({"non-isomorphic", static_cast<long>(b), "", false,
                                  "isomorphic to member " + std::to_string(a)});

    std::vector<char> critical(m.size());
    parallel_for(m.size(), jobs, [&](size_t i) { critical[i] = is_critical(m[i]); });
    fails.clear();
    for (size_t i = 0; i < m.size(); ++i)
        if (!critical[i]) fails.push_back({"critical", static_cast<long>(i), "", false, serialize(m[i])});
    summary("critical", fails.empty(), std::to_string(fails.size()) + " failures");
    report.entries.insert(report.entries.end(), fails.begin(), fails.end());

    std::vector<size_t> cubic;
    for (size_t i = 0; i < m.size(); ++i)
        if (m[i].cubic()) cubic.push_back(i);
    bool cubic_ok = cubic.size() == 2;
    std::string cubic_desc = std::to_string(cubic.size()) + " cubic members:";
    for (size_t i : cubic) {
        cubic_ok = cubic_ok && m[i].size() == 14 && m[i].three_regular();
        cubic_desc += " " + std::to_string(i) + "(" + std::to_string(m[i].size()) + " vertices" +
                      (m[i].three_regular() ? ", 3-regular)" : ")");
    }
    summary("cubic", cubic_ok, cubic_desc);

    per_member("a0", [](const EGraph& g) -> std::optional<std::string> {
        int k = g.num_nails();
        if (k > 2) return std::to_string(k) + " nails";
        if (k == 2 && !is_c5_graph(g) && !is_k4plus_graph(g)) return std::string("two nails on another graph");
        return std::nullopt;
    });
    per_member("b0", [](const EGraph& g) -> std::optional<std::string> {
        if (g.num_nails() != 1) return std::nullopt;
        int plain = 0;
        for (int v = 0; v < g.size(); ++v) plain += g.degree(v) == 2 && !g.nailed(v);
        if (plain >= 3) return std::nullopt;
        return std::to_string(plain) + " non-nailed degree-2 vertices";
    });
    per_member("c0", [](const EGraph& g) -> std::optional<std::string> {
        if (count_degree(g, 2) == 3) return std::string("exactly three degree-2 vertices");
        return std::nullopt;
    });
    return report;
}

// ---------------------------------------------------------------------------------------------
// Closure rules

std::string_view rule_name(ClosureRule r) {
    switch (r) {
        case ClosureRule::NailVertex: return "nail";
        case ClosureRule::SubdivideEdgeTwice: return "subdivide";
        case ClosureRule::AddPathBetweenNails: return "nail-path";
        case ClosureRule::UncontractEdgeToC4: return "uncontract";
        case ClosureRule::AddCommonNeighbor: return "common-neighbor";
        case ClosureRule::AddTwoJoinedApexes: return "joined-apexes";
        case ClosureRule::AttachC4: return "attach-c4";
        case ClosureRule::AttachK13: return "attach-k13";
    }
    return "?";
}

std::optional<ClosureRule> parse_rule(std::string_view s) {
    for (ClosureRule r : kAllClosureRules)
        if (rule_name(r) == s) return r;
    return std::nullopt;
}

std::string describe(const EGraph& g, const Site& s) {
    std::string out;
    for (int v : s.vertices) out += (out.empty() ? "" : ",") + g.name(v);
    if (s.param) out += " len=" + std::to_string(s.param);
    return out.empty() ? "-" : out;
}

namespace {

bool plain_deg2(const EGraph& g, int v) { return g.degree(v) == 2 && g.ext(v) == 2; }

std::vector<int> vertices_of_degree(const EGraph& g, int d) {
    std::vector<int> out;
    for (int v = 0; v < g.size(); ++v)
        if (g.degree(v) == d) out.push_back(v);
    return out;
}

int add_fresh(EGraph& g, int ext) {
    static constexpr std::string_view pool = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
    for (char c : pool)
        if (g.find(std::string(1, c)) < 0) return g.add_vertex(std::string(1, c), ext);
    for (int i = 0;; ++i)
        if (g.find("~" + std::to_string(i)) < 0) return g.add_vertex("~" + std::to_string(i), ext);
}

void add_path(EGraph& g, int from, int to, int interior) {
    int prev = from;
    for (int i = 0; i < interior; ++i) {
        int p = add_fresh(g, 2);
        g.add_edge(prev, p);
        prev = p;
    }
    g.add_edge(prev, to);
}

void raise_to_degree(EGraph& g, const std::vector<int>& vs) {
    for (int v : vs) g.set_ext(v, std::max(g.ext(v), g.degree(v)));
}

// Rebuilds g without the listed vertices; returns the map old -> new (-1 if removed).
EGraph without(const EGraph& g, Mask removed, std::vector<int>& map) {
    std::vector<int> keep;
    map.assign(g.size(), -1);
    for (int v = 0; v < g.size(); ++v)
        if (!((removed >> v) & 1u)) {
            map[v] = static_cast<int>(keep.size());
            keep.push_back(v);
        }
    return induced_sub(g, keep);
}

std::vector<EGraph> finish(std::vector<EGraph> raw) {
    std::map<std::string, EGraph> seen;
    for (auto& r : raw)
        if (r.valid()) seen.emplace(canonical_label(r), std::move(r));
    std::vector<EGraph> out;
    for (auto& [label, g] : seen) out.push_back(std::move(g));
    return out;
}

std::vector<EGraph> uncontract(const EGraph& g, int x, int y) {
    std::vector<int> map;
    EGraph base = without(g, (Mask{1} << x) | (Mask{1} << y), map);
    // Each end's other attachments: real neighbors, then -1 per nail.
    auto slots = [&](int a, int b) {
        std::vector<int> s;
        for (int w : g.neighbors(a))
            if (w != b) s.push_back(map[w]);
        for (int i = g.degree(a); i < g.ext(a); ++i) s.push_back(-1);
        return s;
    };
    std::vector<int> sx = slots(x, y), sy = slots(y, x);
    // Injective placements of the slots on two cycle positions.
    auto placements = [](const std::vector<int>& s) {
        std::vector<std::array<std::optional<int>, 2>> out;
        if (s.empty()) out.push_back({});
        else if (s.size() == 1) {
            out.push_back({s[0], std::nullopt});
            out.push_back({std::nullopt, s[0]});
        } else {
            out.push_back({s[0], s[1]});
            out.push_back({s[1], s[0]});
        }
        return out;
    };
    std::vector<EGraph> raw;
    for (const auto& px : placements(sx))
        for (const auto& py : placements(sy)) {
            EGraph r = base;
            int c[4];
            for (int& v : c) v = add_fresh(r, 2);
            for (int i = 0; i < 4; ++i) r.add_edge(c[i], c[(i + 1) % 4]);
            auto attach = [&](int v, const std::optional<int>& slot) {
                if (!slot) return;
                if (*slot < 0) r.set_ext(v, 3);
                else r.add_edge(v, *slot);
            };
            attach(c[0], px[0]);
            attach(c[2], px[1]);
            attach(c[1], py[0]);
            attach(c[3], py[1]);
            raw.push_back(std::move(r));
        }
    return raw;
}

void normalize_site(ClosureRule rule, Site& s) {
    auto& v = s.vertices;
    if (rule == ClosureRule::AddTwoJoinedApexes && v.size() == 4) {
        if (v[0] > v[1]) std::swap(v[0], v[1]);
        if (v[2] > v[3]) std::swap(v[2], v[3]);
        if (v[0] > v[2]) {
            std::swap(v[0], v[2]);
            std::swap(v[1], v[3]);
        }
    } else if (rule != ClosureRule::NailVertex) {
        std::sort(v.begin(), v.end());
    }
}

}  // namespace

std::vector<Site> closure_sites(ClosureRule rule, const EGraph& g, size_t* coincident) {
    std::vector<Site> sites;
    const int n = g.size();
    switch (rule) {
        case ClosureRule::NailVertex:
            for (int v = 0; v < n; ++v)
                if (plain_deg2(g, v)) sites.push_back({{v}, 0});
            break;
        case ClosureRule::SubdivideEdgeTwice:
        case ClosureRule::UncontractEdgeToC4:
            for (auto [u, v] : g.edges()) sites.push_back({{std::min(u, v), std::max(u, v)}, 0});
            break;
        case ClosureRule::AddPathBetweenNails: {
            if (g.num_nails() != 2) break;
            std::vector<int> nails;
            for (int v = 0; v < n; ++v)
                if (g.nailed(v)) nails.push_back(v);
            if (g.degree(nails[0]) != 2 || g.degree(nails[1]) != 2) break;
            for (int len = 0; len <= 2; ++len)
                if (len > 0 || !g.has_edge(nails[0], nails[1])) sites.push_back({nails, len});
            break;
        }
        case ClosureRule::AddCommonNeighbor:
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v)
                    if (plain_deg2(g, u) && plain_deg2(g, v) && !g.has_edge(u, v)) sites.push_back({{u, v}, 0});
            break;
        case ClosureRule::AddTwoJoinedApexes: {
            std::vector<std::pair<int, int>> pairs;
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v)
                    if (plain_deg2(g, u) && plain_deg2(g, v) && !g.has_edge(u, v)) pairs.emplace_back(u, v);
            size_t shared = 0;
            for (size_t i = 0; i < pairs.size(); ++i)
                for (size_t j = i + 1; j < pairs.size(); ++j) {
                    auto [a1, a2] = pairs[i];
                    auto [a3, a4] = pairs[j];
                    if (a1 == a3 || a1 == a4 || a2 == a3 || a2 == a4) ++shared;
                    else sites.push_back({{a1, a2, a3, a4}, 0});
                }
            if (coincident) *coincident = shared;
            break;
        }
        case ClosureRule::AttachC4:
            if (g.num_nails() == 0 && count_degree(g, 2) == 4 && count_degree(g, 2) + count_degree(g, 3) == n)
                sites.push_back({});
            break;
        case ClosureRule::AttachK13:
            if (count_degree(g, 2) == 6 && count_degree(g, 2) + count_degree(g, 3) == n) sites.push_back({});
            break;
    }
    return sites;
}

std::vector<EGraph> apply_closure(ClosureRule rule, const EGraph& g, const Site& site_in) {
    Site site = site_in;
    normalize_site(rule, site);
    auto sites = closure_sites(rule, g);
    if (std::find(sites.begin(), sites.end(), site) == sites.end())
        throw std::invalid_argument("site " + describe(g, site_in) + " is not admissible for rule " +
                                    std::string(rule_name(rule)));
    const auto& s = site.vertices;
    std::vector<EGraph> raw;
    switch (rule) {
        case ClosureRule::NailVertex: {
            EGraph r = g;
            r.set_ext(s[0], 3);
            raw.push_back(std::move(r));
            break;
        }
        case ClosureRule::SubdivideEdgeTwice: {
            EGraph r = g;
            r.remove_edge(s[0], s[1]);
            add_path(r, s[0], s[1], 2);
            raw.push_back(std::move(r));
            break;
        }
        case ClosureRule::AddPathBetweenNails: {
            EGraph r = g;
            add_path(r, s[0], s[1], site.param);
            raw.push_back(std::move(r));
            break;
        }
        case ClosureRule::UncontractEdgeToC4:
            raw = uncontract(g, s[0], s[1]);
            break;
        case ClosureRule::AddCommonNeighbor: {
            EGraph r = g;
            add_path(r, s[0], s[1], 1);
            raw.push_back(std::move(r));
            break;
        }
        case ClosureRule::AddTwoJoinedApexes: {
            EGraph r = g;
            int b1 = add_fresh(r, 2), b2 = add_fresh(r, 2);
            r.add_edge(b1, s[0]);
            r.add_edge(b1, s[1]);
            r.add_edge(b2, s[2]);
            r.add_edge(b2, s[3]);
            add_path(r, b1, b2, 1);
            raw.push_back(std::move(r));
            break;
        }
        case ClosureRule::AttachC4: {
            std::vector<int> d2 = vertices_of_degree(g, 2);
            do {
                EGraph r = g;
                int c[4];
                for (int& v : c) v = add_fresh(r, 3);
                for (int i = 0; i < 4; ++i) {
                    r.add_edge(c[i], c[(i + 1) % 4]);
                    r.add_edge(c[i], d2[i]);
                }
                raise_to_degree(r, d2);
                raw.push_back(std::move(r));
            } while (std::next_permutation(d2.begin(), d2.end()));
            break;
        }
        case ClosureRule::AttachK13: {
            std::vector<int> d2 = vertices_of_degree(g, 2);
            // Perfect matchings of the six vertices into the three leaves.
            std::vector<std::array<int, 6>> matchings;
            std::array<int, 6> cur{};
            std::function<void(int, unsigned)> rec = [&](int k, unsigned used) {
                if (k == 3) {
                    matchings.push_back(cur);
                    return;
                }
                int a = 0;
                while ((used >> a) & 1u) ++a;
                for (int b = a + 1; b < 6; ++b)
                    if (!((used >> b) & 1u)) {
                        cur[2 * k] = a;
                        cur[2 * k + 1] = b;
                        rec(k + 1, used | (1u << a) | (1u << b));
                    }
            };
            rec(0, 0);
            for (const auto& mt : matchings) {
                EGraph r = g;
                int c = add_fresh(r, 3);
                for (int k = 0; k < 3; ++k) {
                    int leaf = add_fresh(r, 3);
                    r.add_edge(c, leaf);
                    r.add_edge(leaf, d2[mt[2 * k]]);
                    r.add_edge(leaf, d2[mt[2 * k + 1]]);
                }
                for (int v : d2) r.set_ext(v, 3);
                int gi = girth(r);
                if (gi == 0 || gi >= 6) raw.push_back(std::move(r));
            }
            break;
        }
    }
    return finish(std::move(raw));
}

ClosureReport verify_closure(const Catalog& cat, ClosureRule rule, int jobs,
                             const std::function<void(const ClosureViolation&)>& on_violation) {
    ClosureReport report;
    report.rule = rule;
    report.members = cat.size();
    struct Task {
        size_t member;
        Site site;
    };
    std::vector<Task> tasks;
    for (size_t i = 0; i < cat.size(); ++i) {
        size_t shared = 0;
        for (auto& s : closure_sites(rule, cat[i], &shared)) tasks.push_back({i, std::move(s)});
        report.coincident += shared;
    }
    report.sites = tasks.size();

    std::vector<std::vector<ClosureViolation>> found(tasks.size());
    std::atomic<size_t> results{0};
    std::mutex stream;
    parallel_for(tasks.size(), jobs, [&](size_t t) {
        const auto& task = tasks[t];
        for (auto& r : apply_closure(rule, cat[task.member], task.site)) {
            ++results;
            if (cat.contains(r) || !is_critical(r)) continue;
            found[t].push_back({task.member, task.site, std::move(r)});
            if (on_violation) {
                std::lock_guard<std::mutex> lock(stream);
                on_violation(found[t].back());
            }
        }
    });
    report.results = results;
    for (auto& f : found)
        for (auto& v : f) report.violations.push_back(std::move(v));
    return report;
}

// ---------------------------------------------------------------------------------------------
// Enumeration

int enumeration_bound() {
    if (const char* env = std::getenv("FRACCRIT_MAX_N")) {
        try {
            int v = std::stoi(env);
            if (v > 0) return std::min(v, kMaxVertices);
        } catch (const std::exception&) {
        }
        throw std::invalid_argument(std::string("FRACCRIT_MAX_N is not a positive integer: ") + env);
    }
    return 12;
}

namespace {

// Connected triangle-free graphs of maximum degree 3 on n vertices, one per isomorphism class.
// Every connected graph has a vertex whose deletion leaves it connected, so growing by one
// vertex at a time from the previous level reaches all of them.
std::vector<EGraph> next_level(const std::vector<EGraph>& level) {
    std::map<std::string, EGraph> out;
    for (const EGraph& g : level) {
        const int n = g.size();
        std::vector<int> open;
        for (int v = 0; v < n; ++v)
            if (g.degree(v) < 3) open.push_back(v);
        const int k = static_cast<int>(open.size());
        for (unsigned sub = 1; sub < (1u << k); ++sub) {
            if (std::popcount(sub) > 3) continue;
            Mask t = 0;
            for (int i = 0; i < k; ++i)
                if ((sub >> i) & 1u) t |= Mask{1} << open[i];
            bool independent = true;
            for (int i = 0; i < k && independent; ++i)
                if ((sub >> i) & 1u) independent = !(g.neighbor_mask(open[i]) & t);
            if (!independent) continue;
            EGraph c = g;
            int v = c.add_vertex("~" + std::to_string(n));
            for (int i = 0; i < k; ++i)
                if ((sub >> i) & 1u) c.add_edge(v, open[i]);
            for (int u = 0; u <= n; ++u) c.set_ext(u, c.degree(u));
            out.emplace(canonical_label(c), std::move(c));
        }
    }
    std::vector<EGraph> next;
    for (auto& [label, g] : out) next.push_back(std::move(g));
    return next;
}

std::vector<EGraph> critical_on(const EGraph& base) {
    // A vertex of degree at most 1 always extends; lower ext makes coloring only harder.
    for (int v = 0; v < base.size(); ++v)
        if (base.degree(v) < 2) return {};
    EGraph plain = base;
    for (int v = 0; v < plain.size(); ++v) plain.set_ext(v, std::max(2, plain.degree(v)));
    if (is_colorable(plain)) return {};

    std::vector<int> d2 = vertices_of_degree(plain, 2);
    std::map<std::string, EGraph> out;
    std::set<std::string> seen;
    for (unsigned sub = 0; sub < (1u << d2.size()); ++sub) {
        EGraph g = plain;
        for (size_t i = 0; i < d2.size(); ++i)
            if ((sub >> i) & 1u) g.set_ext(d2[i], 3);
        std::string label = canonical_label(g);
        if (!seen.insert(label).second) continue;
        if (is_critical(g)) out.emplace(std::move(label), std::move(g));
    }
    std::vector<EGraph> res;
    for (auto& [label, g] : out) res.push_back(std::move(g));
    return res;
}

}  // namespace

std::vector<EGraph> enumerate_critical(int max_n, int jobs) {
    const int bound = enumeration_bound();
    if (max_n > bound)
        throw std::invalid_argument("max_n " + std::to_string(max_n) + " exceeds the enumeration bound " +
                                    std::to_string(bound) + " (set FRACCRIT_MAX_N to raise it)");
    std::vector<EGraph> result;
    if (max_n < 1) return result;
    std::vector<EGraph> level(1);
    level[0].add_vertex("~0");
    for (int n = 1; n <= max_n; ++n) {
        if (n > 1) level = next_level(level);
        std::vector<std::vector<EGraph>> found(level.size());
        parallel_for(level.size(), jobs, [&](size_t i) { found[i] = critical_on(level[i]); });
        std::map<std::string, EGraph> sorted;
        for (auto& f : found)
            for (auto& g : f) sorted.emplace(canonical_label(g), std::move(g));
        for (auto& [label, g] : sorted) {
            // Rename to the serialization alphabet.
            result.push_back(parse_egraph(serialize(g)));
        }
    }
    return result;
}

}  // namespace fraccrit
