#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fraccrit/egraph.hpp"
#include "support.hpp"

using namespace fraccrit;
using testing::g;

namespace {

EGraph shuffled(const EGraph& h, std::mt19937& rng) {
    std::vector<int> perm(h.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    return relabel(h, perm);
}

// Literal embedding oracle over all injective maps.
std::vector<Embedding> brute_embeddings(const EGraph& host, const EGraph& pat, const std::vector<std::string>& b) {
    std::vector<bool> bd(pat.size(), false);
    for (const auto& n : b) bd[pat.find(n)] = true;
    std::vector<Embedding> out;
    Embedding emb(pat.size());
    std::vector<bool> used(host.size(), false);
    std::function<void(int)> rec = [&](int p) {
        if (p == pat.size()) {
            for (int x = 0; x < pat.size(); ++x) {
                if (host.ext(emb[x]) != pat.ext(x)) return;
                for (int y = 0; y < pat.size(); ++y) {
                    if (x == y) continue;
                    if (pat.has_edge(x, y) && !host.has_edge(emb[x], emb[y])) return;
                    if (!pat.has_edge(x, y) && host.has_edge(emb[x], emb[y]) && !(bd[x] && bd[y])) return;
                }
                if (!bd[x] && host.degree(emb[x]) != pat.degree(x)) return;
            }
            out.push_back(emb);
            return;
        }
        for (int h = 0; h < host.size(); ++h) {
            if (used[h]) continue;
            used[h] = true;
            emb[p] = h;
            rec(p + 1);
            used[h] = false;
        }
    };
    rec(0);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("grammar: triangle record") {
    EGraph t = g("a:bc;b:c;");
    CHECK(t.size() == 3);
    CHECK(t.num_edges() == 3);
    for (int v = 0; v < 3; ++v) {
        CHECK(t.degree(v) == 2);
        CHECK(t.ext(v) == 2);
    }
    CHECK_FALSE(t.triangle_free());
    CHECK_FALSE(t.valid());
}

TEST_CASE("grammar: nail clause raises ext above degree") {
    EGraph e = g("a:b; a1b1");
    CHECK(e.num_edges() == 1);
    CHECK(e.ext(e.find("a")) == 2);
    CHECK(e.ext(e.find("b")) == 2);
    CHECK(e.nailed(0));
    CHECK(e.num_nails() == 2);
    EGraph twice = g("a:b; a1a1");
    CHECK(twice.ext(twice.find("a")) == 3);
}

TEST_CASE("grammar: empty input and multiple records") {
    CHECK(parse_egraphs("").empty());
    CHECK(parse_egraphs("# only a comment\n\n").empty());
    auto two = parse_egraphs("a:b;\n\n# second\nx:yz;\n");
    REQUIRE(two.size() == 2);
    CHECK(two[1].size() == 3);
    CHECK(g("a:b;b:a;").num_edges() == 1);
}

TEST_CASE("grammar: malformed input is rejected") {
    CHECK_THROWS_AS(parse_egraphs("a:b"), std::invalid_argument);
    CHECK_THROWS_AS(parse_egraphs("a:;"), std::invalid_argument);
    CHECK_THROWS_AS(parse_egraphs("a:a;"), std::invalid_argument);
    CHECK_THROWS_AS(parse_egraphs("a:b; c1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_egraphs("a:b$;"), std::invalid_argument);
    CHECK_THROWS_AS(parse_egraph("a:b;\n\nc:d;"), std::invalid_argument);
}

TEST_CASE("predicates") {
    EGraph c5 = g("a:be;b:c;c:d;d:e;");
    CHECK(c5.valid());
    CHECK(c5.subcubic());
    CHECK_FALSE(c5.cubic());
    CHECK_FALSE(c5.three_regular());
    EGraph nailed = g("a:be;b:c;c:d;d:e; a1b1c1d1e1");
    CHECK(nailed.cubic());
    CHECK_FALSE(nailed.three_regular());
    CHECK(testing::load_graph("graphs/petersen.eg").three_regular());
    EGraph k13 = g("a:bcd;");
    CHECK_FALSE(k13.valid());  // leaves have ext 1
    CHECK(k13.validity_problem().has_value());
    EGraph over = g("a:b; a1a1a1");
    CHECK_FALSE(over.subcubic());
}

TEST_CASE("induced sub-e-graphs keep ext_degree") {
    EGraph c5 = g("a:be;b:c;c:d;d:e;");
    EGraph all = induced_sub(c5, std::vector<int>{0, 1, 2, 3, 4});
    CHECK(isomorphic(all, c5));
    EGraph path = induced_sub(c5, std::vector<int>{c5.find("a"), c5.find("b"), c5.find("c")});
    CHECK(path.num_edges() == 2);
    CHECK(path.ext(path.find("a")) == 2);
    CHECK(path.nailed(path.find("a")));
    CHECK(path.nailed(path.find("c")));
    CHECK_FALSE(path.nailed(path.find("b")));
    EGraph e = g("a:b; a1b1");
    EGraph single = induced_sub(e, std::vector<int>{0});
    CHECK(single.size() == 1);
    CHECK(single.ext(0) == 2);
    CHECK_THROWS_AS(induced_sub(c5, std::vector<int>{7}), std::out_of_range);
    EGraph d = delete_vertex(c5, 0);
    CHECK(d.size() == 4);
    CHECK(d.num_nails() == 2);
}

TEST_CASE("induced sub-e-graphs of valid e-graphs stay valid") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        EGraph h = testing::random_subcubic(rng, 5 + trial % 10, 4);
        if (!h.valid()) continue;
        Mask keep = std::uniform_int_distribution<Mask>(1, (Mask(1) << h.size()) - 1)(rng);
        CHECK(induced_sub(h, keep).valid());
    }
}

TEST_CASE("canonical labels") {
    // Nails at positions 1,2 versus a rotated copy with nails at 3,4.
    CHECK(canonical_label(g("a:be;b:c;c:d;d:e; a1b1")) == canonical_label(g("a:be;b:c;c:d;d:e; c1d1")));
    CHECK(canonical_label(g("a:be;b:c;c:d;d:e; a1b1")) != canonical_label(g("a:be;b:c;c:d;d:e; a1c1")));
    CHECK(canonical_label(testing::load_graph("graphs/f14-1.eg")) !=
          canonical_label(testing::load_graph("graphs/f14-2.eg")));
    // Same underlying graph, different ext on one vertex.
    CHECK_FALSE(isomorphic(g("a:b;b:c;"), g("a:b;b:c; a1")));
}

TEST_CASE("canonical labels are invariant under random relabeling") {
    std::mt19937 rng(5);
    std::vector<EGraph> pool;
    for (const char* f : {"graphs/f14-1.eg", "graphs/f14-2.eg", "graphs/f11.eg", "graphs/f22.eg",
                          "graphs/f19-1.eg", "graphs/f19-2.eg", "graphs/heawood.eg", "graphs/petersen.eg"})
        pool.push_back(testing::load_graph(f));
    for (int i = 0; i < 30; ++i) pool.push_back(testing::random_subcubic(rng, 6 + i % 12, 5));
    for (const auto& h : pool) {
        std::string lab = canonical_label(h);
        for (int r = 0; r < 4; ++r) CHECK(canonical_label(shuffled(h, rng)) == lab);
    }
    // Distinct labels across the reference graphs.
    for (size_t i = 0; i < 8; ++i)
        for (size_t j = i + 1; j < 8; ++j) CHECK_FALSE(isomorphic(pool[i], pool[j]));
}

TEST_CASE("serialize then parse is the identity up to isomorphism") {
    std::mt19937 rng(17);
    for (int i = 0; i < 30; ++i) {
        EGraph h = testing::random_subcubic(rng, 4 + i % 14, 3);
        h.set_ext(0, 3);
        EGraph back = parse_egraph(serialize(h));
        CHECK(isomorphic(back, h));
        CHECK(serialize(back) == serialize(h));
    }
    CHECK(serialize(g("a:b; a1a1")) == serialize(g("q:p; q1q1")));
}

TEST_CASE("boundary embeddings: 5-cycle with two nails into itself") {
    for (const char* text : {"a:be;b:c;c:d;d:e; a1b1", "a:be;b:c;c:d;d:e; a1c1"}) {
        EGraph c5 = g(text);
        std::vector<std::string> nails;
        for (int v = 0; v < c5.size(); ++v)
            if (c5.nailed(v)) nails.push_back(c5.name(v));
        auto emb = find_boundary_embeddings(c5, c5, nails);
        CHECK(emb.size() == 2);
        CHECK(emb == brute_embeddings(c5, c5, nails));
    }
}

TEST_CASE("boundary embeddings: trivial cases") {
    EGraph f14 = testing::load_graph("graphs/f14-1.eg");
    EGraph one = g("a:b; a1a1b1b1");
    EGraph lone = induced_sub(one, std::vector<int>{0});
    CHECK(lone.ext(0) == 3);
    CHECK(find_boundary_embeddings(f14, lone, {"a"}).size() == 14);
    CHECK(find_boundary_embeddings(g("a:b;"), f14, {}).empty());
    CHECK_THROWS_AS(find_boundary_embeddings(f14, lone, {"z"}), std::invalid_argument);
}

TEST_CASE("boundary embeddings agree with the brute-force oracle") {
    EGraph host = g("a:bf;b:c;c:d;d:e;e:f;a:g;g:h;h:d; a1");
    std::vector<std::pair<EGraph, std::vector<std::string>>> cases = {
        {g("x:m;m:n;n:y; x1x1y1y1"), {"x", "y"}},
        {g("x:m;m:y; x1x1y1y1"), {"x", "y"}},
        {g("x:m;m:y;"), {"x", "y"}},
        {g("x:m;m:y; m1"), {"x", "y"}},
        {g("x:m; x1x1 m1"), {"x"}},
    };
    for (auto& [pat, b] : cases) CHECK(find_boundary_embeddings(host, pat, b) == brute_embeddings(host, pat, b));
}

TEST_CASE("replacement: identity rule leaves the host unchanged") {
    EGraph host = testing::load_graph("graphs/petersen.eg");
    EGraph pat = g("x:m;m:y;m:z; x1x1y1y1z1z1");
    auto rule = make_rule(pat, pat);
    auto emb = find_boundary_embeddings(host, pat, rule.boundary);
    REQUIRE_FALSE(emb.empty());
    for (const auto& e : emb) CHECK(isomorphic(apply_replacement(host, rule, e), host));
}

TEST_CASE("replacement: a 2-path replaced by an edge turns C6 into C5") {
    EGraph c6 = g("a:bf;b:c;c:d;d:e;e:f;");
    EGraph pat = g("x:m;m:y; x1y1");
    EGraph rep = g("x:y; x1y1");
    auto rule = make_rule(pat, rep);
    auto emb = find_boundary_embeddings(c6, pat, rule.boundary);
    CHECK(emb.size() == 12);
    EGraph out = apply_replacement(c6, rule, emb.front());
    CHECK(isomorphic(out, g("a:be;b:c;c:d;d:e;")));
    // The same rule on C5 produces a 4-cycle; no triangle appears.
    EGraph c5 = g("a:be;b:c;c:d;d:e;");
    EGraph c4 = apply_replacement(c5, rule, find_boundary_embeddings(c5, pat, rule.boundary).front());
    CHECK(c4.triangle_free());
    CHECK(c4.size() == 4);
}

TEST_CASE("replacement: uncontracting an edge into a 4-cycle") {
    // Edge xy with x's other neighbors u, v and y's other neighbors s, t; the 4-cycle p q w r
    // puts u, v on opposite positions and s, t on the other two.
    EGraph host = testing::load_graph("graphs/petersen.eg");
    EGraph pat = g("x:yuv;y:st; u1u1v1v1s1s1t1t1");
    EGraph rep = g("p:qru;q:ws;w:rv;r:t; u1u1v1v1s1s1t1t1");
    auto rule = make_rule(pat, rep);
    CHECK(rule.boundary.size() == 4);
    auto emb = find_boundary_embeddings(host, pat, rule.boundary);
    CHECK(emb.size() == 15 * 2 * 2 * 2);  // edge, orientation, order of u v, order of s t
    EGraph out = apply_replacement(host, rule, emb.front());
    CHECK(out.size() == host.size() + 2);
    CHECK(out.three_regular());
    CHECK(out.num_edges() == host.num_edges() + 3);
}

TEST_CASE("replacement then its reverse recovers the host") {
    EGraph host = g("a:bg;b:c;c:d;d:e;e:f;f:g;");
    EGraph pat = g("x:m;m:n;n:y; x1y1");
    EGraph rep = g("x:k;k:y; x1y1");
    auto fwd = make_rule(pat, rep);
    auto back = make_rule(rep, pat);
    auto emb = find_boundary_embeddings(host, pat, fwd.boundary);
    REQUIRE(emb.size() == 14);
    for (const auto& e : emb) {
        EGraph mid = apply_replacement(host, fwd, e);
        CHECK(mid.size() == 6);
        auto e2 = find_boundary_embeddings(mid, rep, back.boundary);
        REQUIRE_FALSE(e2.empty());
        CHECK(isomorphic(apply_replacement(mid, back, e2.front()), host));
    }
}

TEST_CASE("replacement rejects parallel edges and mismatched boundary ext") {
    EGraph tri = g("a:bc;b:c;");
    EGraph pat = g("x:m;m:y; x1y1");
    auto rule = make_rule(pat, g("x:y; x1y1"));
    auto emb = find_boundary_embeddings(tri, pat, rule.boundary);
    REQUIRE_FALSE(emb.empty());
    CHECK_THROWS_AS(apply_replacement(tri, rule, emb.front()), std::invalid_argument);
    CHECK_THROWS_AS(make_rule(g("x:m;m:y; x1x1y1"), g("x:y; x1y1")), std::invalid_argument);
}
