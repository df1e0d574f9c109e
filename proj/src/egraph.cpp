#include "fraccrit/egraph.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace fraccrit {

int EGraph::add_vertex(std::string name, int ext) {
    if (size() >= kMaxVertices) throw std::length_error("e-graph exceeds 64 vertices");
    if (name.empty()) throw std::invalid_argument("empty vertex name");
    if (index_.count(name)) throw std::invalid_argument("duplicate vertex name '" + name + "'");
    if (ext < 0) throw std::invalid_argument("negative ext_degree");
    int id = size();
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    ext_.push_back(ext);
    adj_.emplace_back();
    masks_.push_back(0);
    return id;
}

void EGraph::add_edge(int u, int v) {
    if (u == v) throw std::invalid_argument("self-loop at '" + names_.at(u) + "'");
    if (has_edge(u, v))
        throw std::invalid_argument("parallel edge " + names_.at(u) + names_.at(v));
    adj_[u].insert(std::lower_bound(adj_[u].begin(), adj_[u].end(), v), v);
    adj_[v].insert(std::lower_bound(adj_[v].begin(), adj_[v].end(), u), u);
    masks_[u] |= Mask{1} << v;
    masks_[v] |= Mask{1} << u;
    ext_[u] = std::max(ext_[u], degree(u));
    ext_[v] = std::max(ext_[v], degree(v));
}

void EGraph::remove_edge(int u, int v) {
    if (!has_edge(u, v)) throw std::invalid_argument("no such edge");
    adj_[u].erase(std::find(adj_[u].begin(), adj_[u].end(), v));
    adj_[v].erase(std::find(adj_[v].begin(), adj_[v].end(), u));
    masks_[u] &= ~(Mask{1} << v);
    masks_[v] &= ~(Mask{1} << u);
}

void EGraph::set_ext(int v, int ext) {
    if (ext < degree(v))
        throw std::invalid_argument("ext_degree below degree at '" + names_.at(v) + "'");
    ext_.at(v) = ext;
}

int EGraph::num_edges() const {
    int twice = 0;
    for (const auto& a : adj_) twice += static_cast<int>(a.size());
    return twice / 2;
}

int EGraph::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? -1 : it->second;
}

int EGraph::num_nails() const {
    int c = 0;
    for (int v = 0; v < size(); ++v) c += nailed(v);
    return c;
}

std::vector<std::pair<int, int>> EGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < size(); ++u)
        for (int v : adj_[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

bool EGraph::subcubic() const {
    return std::all_of(ext_.begin(), ext_.end(), [](int d) { return d <= 3; });
}

bool EGraph::cubic() const {
    return std::all_of(ext_.begin(), ext_.end(), [](int d) { return d == 3; });
}

bool EGraph::three_regular() const {
    for (int v = 0; v < size(); ++v)
        if (degree(v) != 3) return false;
    return true;
}

bool EGraph::triangle_free() const {
    for (int u = 0; u < size(); ++u)
        for (int v : adj_[u])
            if (u < v && (masks_[u] & masks_[v])) return false;
    return true;
}

std::optional<std::string> EGraph::validity_problem() const {
    for (int v = 0; v < size(); ++v) {
        if (ext_[v] > 3) return "ext_degree of '" + names_[v] + "' exceeds 3";
        if (ext_[v] < 2) return "ext_degree of '" + names_[v] + "' below 2";
    }
    if (!triangle_free()) return std::string("contains a triangle");
    return std::nullopt;
}

bool EGraph::valid() const { return !validity_problem().has_value(); }

// ---------------------------------------------------------------------------------------------
// Text format

namespace {

bool is_ident(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

const std::string kAlphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ023456789_";

EGraph parse_record(const std::string& s, int first_line) {
    auto fail = [&](size_t pos, const std::string& msg) {
        throw std::invalid_argument("record at line " + std::to_string(first_line) + ", offset " +
                                    std::to_string(pos) + ": " + msg);
    };
    EGraph g;
    auto vertex = [&](char c) {
        std::string name(1, c);
        int v = g.find(name);
        return v >= 0 ? v : g.add_vertex(name);
    };
    std::vector<std::pair<int, int>> pending;
    size_t pos = 0;
    bool any_stmt = false;
    while (pos < s.size()) {
        if (!is_ident(s[pos])) fail(pos, std::string("unexpected character '") + s[pos] + "'");
        if (pos + 1 < s.size() && s[pos + 1] == ':') {
            int head = vertex(s[pos]);
            pos += 2;
            int count = 0;
            while (pos < s.size() && s[pos] != ';') {
                if (!is_ident(s[pos])) fail(pos, std::string("unexpected character '") + s[pos] + "'");
                int nb = vertex(s[pos]);
                if (nb == head) fail(pos, "self-loop at '" + g.name(head) + "'");
                if (!g.has_edge(head, nb)) g.add_edge(head, nb);
                ++count;
                ++pos;
            }
            if (pos == s.size()) fail(pos, "statement not terminated by ';'");
            if (count == 0) fail(pos, "statement lists no neighbors");
            ++pos;
            any_stmt = true;
            continue;
        }
        break;
    }
    if (!any_stmt) fail(0, "record has no statements");
    std::vector<int> extra(g.size(), 0);
    while (pos < s.size()) {
        if (!is_ident(s[pos]) || pos + 1 >= s.size() || s[pos + 1] != '1')
            fail(pos, "malformed nail clause");
        int v = g.find(std::string(1, s[pos]));
        if (v < 0) fail(pos, std::string("nail clause names unknown vertex '") + s[pos] + "'");
        ++extra[v];
        pos += 2;
    }
    for (int v = 0; v < g.size(); ++v) g.set_ext(v, g.degree(v) + extra[v]);
    return g;
}

}  // namespace

std::vector<EGraph> parse_egraphs(std::string_view text) {
    std::vector<EGraph> out;
    std::istringstream in{std::string(text)};
    std::string line, record;
    int lineno = 0, record_start = 0;
    auto flush = [&] {
        if (!record.empty()) out.push_back(parse_record(record, record_start));
        record.clear();
    };
    while (std::getline(in, line)) {
        ++lineno;
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            flush();
            continue;
        }
        if (line[first] == '#') continue;
        if (record.empty()) record_start = lineno;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) record += c;
    }
    flush();
    return out;
}

EGraph parse_egraph(std::string_view text) {
    auto all = parse_egraphs(text);
    if (all.size() != 1)
        throw std::invalid_argument("expected one e-graph, found " + std::to_string(all.size()));
    return std::move(all.front());
}

std::string serialize(const EGraph& g) {
    if (g.size() > static_cast<int>(kAlphabet.size()))
        throw std::invalid_argument("too many vertices to serialize");
    CanonicalForm cf = canonical_form(g);
    std::vector<int> pos(g.size());
    for (int i = 0; i < g.size(); ++i) pos[cf.order[i]] = i;
    std::string out;
    for (int i = 0; i < g.size(); ++i) {
        int v = cf.order[i];
        if (g.degree(v) == 0) throw std::invalid_argument("isolated vertex cannot be serialized");
        std::vector<int> later;
        for (int u : g.neighbors(v))
            if (pos[u] > i) later.push_back(pos[u]);
        if (later.empty()) continue;
        std::sort(later.begin(), later.end());
        out += kAlphabet[i];
        out += ':';
        for (int j : later) out += kAlphabet[j];
        out += ';';
    }
    std::string nails;
    for (int i = 0; i < g.size(); ++i) {
        int v = cf.order[i];
        for (int k = g.degree(v); k < g.ext(v); ++k) {
            nails += kAlphabet[i];
            nails += '1';
        }
    }
    if (!nails.empty()) out += " " + nails;
    return out;
}

// ---------------------------------------------------------------------------------------------
// Sub-e-graphs and relabeling

EGraph induced_sub(const EGraph& g, const std::vector<int>& vertices) {
    std::vector<int> map(g.size(), -1);
    EGraph h;
    for (int v : vertices) {
        if (v < 0 || v >= g.size()) throw std::out_of_range("induced_sub: unknown vertex");
        if (map[v] >= 0) continue;
        map[v] = h.add_vertex(g.name(v), g.ext(v));
    }
    for (auto [u, v] : g.edges())
        if (map[u] >= 0 && map[v] >= 0) h.add_edge(map[u], map[v]);
    return h;
}

EGraph induced_sub(const EGraph& g, Mask vertices) {
    std::vector<int> list;
    for (int v = 0; v < g.size(); ++v)
        if ((vertices >> v) & 1u) list.push_back(v);
    return induced_sub(g, list);
}

EGraph delete_vertex(const EGraph& g, int v) {
    Mask all = g.size() == 64 ? ~Mask{0} : (Mask{1} << g.size()) - 1;
    return induced_sub(g, all & ~(Mask{1} << v));
}

EGraph relabel(const EGraph& g, const std::vector<int>& perm) {
    std::vector<int> inv(g.size());
    for (int i = 0; i < g.size(); ++i) inv[perm[i]] = i;
    EGraph h;
    for (int p = 0; p < g.size(); ++p) h.add_vertex(g.name(inv[p]), g.ext(inv[p]));
    for (auto [u, v] : g.edges()) h.add_edge(perm[u], perm[v]);
    return h;
}

// ---------------------------------------------------------------------------------------------
// Canonical form: ordered color refinement plus individualization, keeping the smallest leaf.

namespace {

int rerank(std::vector<std::vector<int>>& keys, std::vector<int>& col) {
    std::vector<std::vector<int>> sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (size_t v = 0; v < keys.size(); ++v)
        col[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), keys[v]) - sorted.begin());
    return static_cast<int>(sorted.size());
}

void refine(const EGraph& g, std::vector<int>& col) {
    const int n = g.size();
    std::vector<std::vector<int>> keys(n);
    for (int v = 0; v < n; ++v) keys[v] = {col[v]};
    int classes = rerank(keys, col);
    for (;;) {
        for (int v = 0; v < n; ++v) {
            keys[v].assign(1, col[v]);
            for (int u : g.neighbors(v)) keys[v].push_back(col[u]);
            std::sort(keys[v].begin() + 1, keys[v].end());
        }
        int next = rerank(keys, col);
        if (next == classes) return;
        classes = next;
    }
}

std::string leaf_label(const EGraph& g, const std::vector<int>& col, std::vector<int>& order) {
    const int n = g.size();
    order.assign(n, 0);
    for (int v = 0; v < n; ++v) order[col[v]] = v;
    std::string label;
    label.reserve(1 + n + 8 * n);
    label += static_cast<char>(n);
    for (int i = 0; i < n; ++i) label += static_cast<char>(g.ext(order[i]));
    for (int i = 0; i < n; ++i) {
        Mask row = 0;
        for (int u : g.neighbors(order[i])) row |= Mask{1} << (63 - col[u]);
        for (int b = 7; b >= 0; --b) label += static_cast<char>((row >> (8 * b)) & 0xFF);
    }
    return label;
}

}  // namespace

CanonicalForm canonical_form(const EGraph& g) {
    const int n = g.size();
    CanonicalForm best;
    bool have = false;
    if (n == 0) {
        best.label = std::string(1, '\0');
        return best;
    }
    std::vector<int> col(n);
    {
        std::vector<std::vector<int>> keys(n);
        for (int v = 0; v < n; ++v) keys[v] = {g.degree(v), g.ext(v)};
        rerank(keys, col);
    }
    std::function<void(std::vector<int>)> search = [&](std::vector<int> c) {
        refine(g, c);
        std::vector<int> count(n, 0);
        for (int v = 0; v < n; ++v) ++count[c[v]];
        int target = -1;
        for (int k = 0; k < n; ++k)
            if (count[k] > 1 && (target < 0 || count[k] < count[target])) target = k;
        if (target < 0) {
            std::vector<int> order;
            std::string label = leaf_label(g, c, order);
            if (!have || label < best.label) {
                best.label = std::move(label);
                best.order = std::move(order);
                have = true;
            }
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (c[v] != target) continue;
            std::vector<int> next(n);
            for (int u = 0; u < n; ++u) next[u] = 2 * c[u] + (c[u] == target && u != v ? 1 : 0);
            search(std::move(next));
        }
    };
    search(col);
    return best;
}

bool isomorphic(const EGraph& a, const EGraph& b) {
    return a.size() == b.size() && canonical_label(a) == canonical_label(b);
}

// ---------------------------------------------------------------------------------------------
// Replacement

ReplacementRule make_rule(EGraph pattern, EGraph replacement) {
    ReplacementRule rule{std::move(pattern), std::move(replacement), {}};
    for (int v = 0; v < rule.pattern.size(); ++v) {
        int w = rule.replacement.find(rule.pattern.name(v));
        if (w < 0) continue;
        if (rule.pattern.ext(v) != rule.replacement.ext(w))
            throw std::invalid_argument("boundary vertex '" + rule.pattern.name(v) +
                                        "' has different ext_degree in pattern and replacement");
        rule.boundary.push_back(rule.pattern.name(v));
    }
    return rule;
}

std::vector<Embedding> find_boundary_embeddings(const EGraph& host, const EGraph& pattern,
                                                const std::vector<std::string>& boundary) {
    const int np = pattern.size();
    std::vector<Embedding> out;
    if (np > host.size()) return out;
    std::vector<bool> is_boundary(np, false);
    for (const auto& name : boundary) {
        int p = pattern.find(name);
        if (p < 0) throw std::invalid_argument("boundary vertex '" + name + "' not in pattern");
        is_boundary[p] = true;
    }
    // Visit order: connected growth from the lowest-index vertex of each component.
    std::vector<int> order;
    std::vector<bool> seen(np, false);
    for (int s = 0; s < np; ++s) {
        if (seen[s]) continue;
        seen[s] = true;
        size_t head = order.size();
        order.push_back(s);
        while (head < order.size()) {
            int p = order[head++];
            for (int q : pattern.neighbors(p))
                if (!seen[q]) {
                    seen[q] = true;
                    order.push_back(q);
                }
        }
    }
    Embedding emb(np, -1);
    Mask used = 0;
    std::function<void(int)> extend = [&](int k) {
        if (k == np) {
            out.push_back(emb);
            return;
        }
        int p = order[k];
        int anchor = -1;
        for (int q : pattern.neighbors(p))
            if (emb[q] >= 0) {
                anchor = q;
                break;
            }
        auto try_vertex = [&](int h) {
            if ((used >> h) & 1u) return;
            if (host.ext(h) != pattern.ext(p)) return;
            if (!is_boundary[p] && host.degree(h) != pattern.degree(p)) return;
            for (int j = 0; j < k; ++j) {
                int q = order[j];
                bool pe = pattern.has_edge(p, q);
                bool he = host.has_edge(h, emb[q]);
                if (pe && !he) return;
                if (!pe && he && (!is_boundary[p] || !is_boundary[q])) return;
            }
            emb[p] = h;
            used |= Mask{1} << h;
            extend(k + 1);
            used &= ~(Mask{1} << h);
            emb[p] = -1;
        };
        if (anchor >= 0) {
            for (int h : host.neighbors(emb[anchor])) try_vertex(h);
        } else {
            for (int h = 0; h < host.size(); ++h) try_vertex(h);
        }
    };
    extend(0);
    std::sort(out.begin(), out.end());
    return out;
}

EGraph apply_replacement(const EGraph& host, const ReplacementRule& rule, const Embedding& emb) {
    const EGraph& F = rule.pattern;
    const EGraph& R = rule.replacement;
    if (static_cast<int>(emb.size()) != F.size())
        throw std::invalid_argument("embedding size does not match pattern");
    std::vector<bool> f_boundary(F.size(), false);
    for (const auto& name : rule.boundary) f_boundary[F.find(name)] = true;
    Mask interior = 0;
    for (int p = 0; p < F.size(); ++p)
        if (!f_boundary[p]) interior |= Mask{1} << emb[p];

    EGraph out;
    std::vector<int> host_map(host.size(), -1);
    for (int v = 0; v < host.size(); ++v)
        if (!((interior >> v) & 1u)) host_map[v] = out.add_vertex(host.name(v), host.ext(v));
    std::vector<int> r_map(R.size(), -1);
    for (int r = 0; r < R.size(); ++r) {
        int p = F.find(R.name(r));
        if (p >= 0 && f_boundary[p]) {
            r_map[r] = host_map[emb[p]];
            continue;
        }
        std::string name = R.name(r);
        while (out.find(name) >= 0 || host.find(name) >= 0) name += '\'';
        r_map[r] = out.add_vertex(name, R.ext(r));
    }
    // Boundary edges of F that R drops.
    std::vector<std::pair<int, int>> dropped;
    for (auto [a, b] : F.edges()) {
        if (!f_boundary[a] || !f_boundary[b]) continue;
        int ra = R.find(F.name(a)), rb = R.find(F.name(b));
        if (!R.has_edge(ra, rb)) dropped.emplace_back(host_map[emb[a]], host_map[emb[b]]);
    }
    for (auto [u, v] : host.edges()) {
        if (host_map[u] < 0 || host_map[v] < 0) continue;
        int a = host_map[u], b = host_map[v];
        if (std::find(dropped.begin(), dropped.end(), std::make_pair(a, b)) != dropped.end() ||
            std::find(dropped.begin(), dropped.end(), std::make_pair(b, a)) != dropped.end())
            continue;
        out.add_edge(a, b);
    }
    for (auto [a, b] : R.edges()) {
        int pa = F.find(R.name(a)), pb = F.find(R.name(b));
        bool both_boundary = pa >= 0 && pb >= 0 && f_boundary[pa] && f_boundary[pb];
        if (both_boundary && F.has_edge(pa, pb)) continue;
        if (out.has_edge(r_map[a], r_map[b]))
            throw std::invalid_argument("replacement creates a parallel edge " + out.name(r_map[a]) +
                                        out.name(r_map[b]));
        out.add_edge(r_map[a], r_map[b]);
    }
    for (int v = 0; v < host.size(); ++v) {
        if (host_map[v] < 0) continue;
        if (out.degree(host_map[v]) > host.ext(v))
            throw std::invalid_argument("replacement exceeds ext_degree at '" + host.name(v) + "'");
        out.set_ext(host_map[v], host.ext(v));
    }
    for (int r = 0; r < R.size(); ++r) {
        int p = F.find(R.name(r));
        if (p >= 0 && f_boundary[p]) continue;
        out.set_ext(r_map[r], R.ext(r));
    }
    return out;
}

}  // namespace fraccrit
