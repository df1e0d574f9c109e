#include <doctest.h>

#include <random>

#include "fraccrit/polytope.hpp"
#include "fraccrit/reducibility.hpp"
#include "support.hpp"

using namespace fraccrit;
using testing::g;

namespace {

StandardArgument load_config(const char* name) {
    return parse_config(testing::slurp(testing::data_path(std::string("configs/") + name)));
}

BoundaryConstraint cup(std::vector<std::string> a, Rational b) { return {ConstraintKind::CupLE, std::move(a), {}, b}; }
BoundaryConstraint cap(std::vector<std::string> a, std::vector<std::string> c, Rational b) {
    return {ConstraintKind::CapLE, std::move(a), std::move(c), b};
}

// Coefficient of each family member in an inequality row, in family order.
std::vector<Rational> row_coefficients(const Row& r, size_t n) {
    std::vector<Rational> c(n, 0);
    for (const auto& t : r.terms) c[t.var] += t.coef;
    return c;
}

}  // namespace

TEST_CASE("trivial constraints of short paths") {
    auto one = trivial_constraints(g("u:z;z:v; z1 u1u1v1v1"), {"u", "v"});
    REQUIRE(one.size() == 1);
    CHECK(one[0] == cup({"u", "v"}, 7));

    auto two = trivial_constraints(g("u:a;a:b;b:v; a1b1 u1u1v1v1"), {"u", "v"});
    REQUIRE(two.size() == 1);
    CHECK(two[0] == cap({"u"}, {"v"}, 3));

    auto low = trivial_constraints(g("u:a;a:b;b:v; b1 u1u1v1v1"), {"u", "v"});
    REQUIRE(low.size() == 1);
    CHECK(low[0] == cap({"u"}, {"v"}, 2));
    CHECK(describe(low[0]) == "cap {u} {v} <= 2");
}

TEST_CASE("dominated trivial constraints are pruned") {
    // z sees p, q, r: one union bound over all three; subsets are implied.
    auto c = trivial_constraints(g("z:pqr; p1p1q1q1r1r1"), {"p", "q", "r"});
    REQUIRE(c.size() == 1);
    CHECK(c[0] == cup({"p", "q", "r"}, 7));
}

TEST_CASE("participation in trivial constraints") {
    EGraph star = g("z:uv; z1 u1u1v1v1");
    CHECK(participates_in_trivial_constraints(star, {"u", "v"}, star.find("z")));
    EGraph far = g("u:a;a:b;b:c;c:w; u1u1 a1 b1 w1");
    CHECK_FALSE(participates_in_trivial_constraints(far, {"u"}, far.find("c")));
    EGraph path = g("u:a;a:b;b:v; a1b1 u1u1v1v1");
    CHECK(participates_in_trivial_constraints(path, {"u", "v"}, path.find("a")));
    CHECK(participates_in_trivial_constraints(path, {"u", "v"}, path.find("b")));
    // One S-neighbor only and nothing beyond: no path of length <= 3 between S vertices.
    EGraph lone = g("u:a;a:b; a1 b1b1 u1u1");
    CHECK_FALSE(participates_in_trivial_constraints(lone, {"u"}, lone.find("a")));
}

TEST_CASE("trivial constraints hold on every coloring of random e-graphs") {
    std::mt19937 rng(515);
    int checked = 0;
    for (int trial = 0; trial < 25 && checked < 40; ++trial) {
        EGraph h = testing::random_subcubic(rng, 6 + trial % 4, 2);
        for (int v = 0; v < h.size(); ++v)
            if (h.degree(v) < 3 && rng() % 3 == 0) h.set_ext(v, h.degree(v) + 1);
        for (int v = 0; v < h.size(); ++v) h.set_ext(v, std::max(h.ext(v), 2));
        if (!is_colorable(h)) continue;
        std::vector<std::string> s;
        for (int v = 0; v < h.size(); ++v)
            if (rng() % 2) s.push_back(h.name(v));
        if (s.size() < 2 || s.size() == static_cast<size_t>(h.size())) continue;
        for (const auto& c : trivial_constraints(h, s)) {
            auto mx = max_over_colorings(h, c);
            REQUIRE(mx);
            CHECK(*mx <= c.bound);
            ++checked;
        }
    }
    CHECK(checked > 10);
}

TEST_CASE("compiling constraints into the boundary polytope") {
    Configuration plain{g("u:z;z:v; u1u1v1v1"), {"u", "v"}, {}};
    CompiledConfiguration none = compile_constraints(plain);
    EGraph gs = induced_sub(plain.g1, names_to_mask(plain.g1, {"u", "v"}));
    PolytopeSystem base = build_polytope(gs);
    CHECK(none.system.num_vars() == base.system.num_vars());
    CHECK(none.system.inequalities().empty());
    CHECK(none.family.size() == 4);

    Configuration capped = plain;
    capped.constraints = {cap({"u"}, {"v"}, 1)};
    CompiledConfiguration c1 = compile_constraints(capped);
    REQUIRE(c1.system.inequalities().size() == 1);
    auto coef = row_coefficients(c1.system.inequalities()[0], c1.family.size());
    Mask u = names_to_mask(plain.g1, {"u"}), v = names_to_mask(plain.g1, {"v"});
    CHECK(coef[c1.family.index_of(u | v)] == 1);
    CHECK(coef[c1.family.index_of(u)] == 0);
    CHECK(coef[c1.family.index_of(0)] == 0);
    CHECK(c1.system.inequalities()[0].rhs == 1);

    Configuration cupped = plain;
    cupped.constraints = {cup({"u", "v"}, 6)};
    CompiledConfiguration c2 = compile_constraints(cupped);
    coef = row_coefficients(c2.system.inequalities()[0], c2.family.size());
    CHECK(coef[c2.family.index_of(u)] == 1);
    CHECK(coef[c2.family.index_of(v)] == 1);
    CHECK(coef[c2.family.index_of(u | v)] == 1);
    CHECK(coef[c2.family.index_of(0)] == 0);

    Configuration off = plain;
    off.constraints = {cup({"z"}, 6)};
    CHECK_THROWS_AS(compile_constraints(off), std::invalid_argument);
}

TEST_CASE("compiled bounds match interval realizations on a two-vertex boundary") {
    // phi(u) = [0,4), phi(v) = [4-t, 8-t): overlap t, union 8-t.
    Configuration cfg{g("u:a;a:b;b:v; u1u1v1v1"), {"u", "v"}, {}};
    for (Rational alpha : {Rational(0), Rational(1), Rational(5, 2), Rational(4)}) {
        cfg.constraints = {cap({"u"}, {"v"}, alpha)};
        CompiledConfiguration cc = compile_constraints(cfg);
        Mask both = names_to_mask(cfg.g1, {"u", "v"});
        Rational top = 0;
        for (const auto& p : enumerate_vertices(cc.system)) top = std::max(top, p[cc.family.index_of(both)]);
        IntervalSet pu = IntervalSet::interval(0, 4), pv = IntervalSet::interval(4 - top, 8 - top);
        CHECK(pu.intersect(pv).measure() == std::min(alpha, Rational(4)));
    }
    for (Rational beta : {Rational(4), Rational(6), Rational(15, 2), Rational(8)}) {
        cfg.constraints = {cup({"u", "v"}, beta)};
        CompiledConfiguration cc = compile_constraints(cfg);
        Mask both = names_to_mask(cfg.g1, {"u", "v"});
        Rational low = 4;
        for (const auto& p : enumerate_vertices(cc.system)) low = std::min(low, p[cc.family.index_of(both)]);
        IntervalSet pu = IntervalSet::interval(0, 4), pv = IntervalSet::interval(4 - low, 8 - low);
        CHECK(pu.unite(pv).measure() == beta);
    }
}

TEST_CASE("reducibility of small configurations") {
    EGraph g1 = g("u:w; u1u1");
    CHECK(is_reducible({g1, {"u"}, {}}).reducible);

    StandardArgument two = load_config("two-deg2.cfg");
    ReducibilityReport r = is_reducible(two.config, 2);
    CHECK(r.reducible);
    CHECK(r.vertices == 12);

    EGraph c5 = g("a:be;b:c;c:d;d:e; a1b1");
    ReducibilityReport bad = is_reducible({c5, {"a", "b"}, {}});
    CHECK_FALSE(bad.reducible);
    REQUIRE_FALSE(bad.failures.empty());
    CHECK(bad.failures.size() == bad.vertices);
}

TEST_CASE("dropping the intersection bound breaks the two-path configuration") {
    StandardArgument two = load_config("two-deg2.cfg");
    Configuration weak = two.config;
    weak.constraints.erase(std::remove_if(weak.constraints.begin(), weak.constraints.end(),
                                          [](const auto& c) { return c.kind == ConstraintKind::CapLE; }),
                           weak.constraints.end());
    REQUIRE(weak.constraints.size() == 1);
    ReducibilityReport r = is_reducible(weak);
    CHECK_FALSE(r.reducible);
    for (const auto& f : r.failures) {
        LinearSystem sys = build_polytope(weak.g1).system;
        CHECK_FALSE(f.certificate.eq.empty());
    }
}

TEST_CASE("adding constraints never breaks reducibility") {
    StandardArgument two = load_config("two-deg2.cfg");
    Configuration more = two.config;
    more.constraints.push_back(cap({"p"}, {"q"}, 3));
    more.constraints.push_back(cup({"z", "p"}, 7));
    CHECK(is_reducible(more).reducible);
}

TEST_CASE("excludable configurations") {
    StandardArgument c4 = load_config("c4-one-deg2.cfg");
    CHECK(check_excludable(c4.config.g1, c4.config.boundary).reducible);
    StandardArgument five = load_config("c5-common-neighbor.cfg");
    CHECK(check_excludable(five.config.g1, five.config.boundary, 2).reducible);
    // Nails two apart: every other vertex sits on an S-path of length at most 3.
    EGraph c5 = g("a:be;b:c;c:d;d:e; a1c1");
    CHECK_THROWS_AS(check_excludable(c5, {"a", "c"}), std::invalid_argument);
    // Adjacent nails leave c four steps from a along the cycle.
    EGraph adj = g("a:be;b:c;c:d;d:e; a1b1");
    CHECK_FALSE(participates_in_trivial_constraints(adj, {"a", "b"}, adj.find("c")));
    CHECK_FALSE(check_excludable(adj, {"a", "b"}).reducible);
}

TEST_CASE("boundary variants") {
    StandardArgument two = load_config("two-deg2.cfg");
    auto vars = boundary_variants(two.config);
    REQUIRE(vars.size() > 1);
    CHECK(isomorphic(vars.front().g1, two.config.g1));
    for (const auto& v : vars) CHECK(v.g1.triangle_free());
}

TEST_CASE("standard argument on the two-path configuration without the catalog") {
    StandardArgument two = load_config("two-deg2.cfg");
    StandardArgumentOptions opt;
    opt.check_catalog = false;
    StandardArgumentReport r = check_standard_argument(two, {}, opt);
    CHECK(r.substitute.pass);
    CHECK(r.reducible.pass);
    CHECK(r.enforced.pass);
    CHECK(r.catalog.pass);
}

TEST_CASE("a weakened replacement fails enforcement") {
    StandardArgument two = load_config("two-deg2.cfg");
    // Without the vertex a, z is no longer tied to b and the intersection bound is lost.
    two.h = g("b:pq; p1p1q1q1 b1");
    two.h.add_vertex("z", 3);
    StandardArgumentOptions opt;
    opt.check_catalog = false;
    StandardArgumentReport r = check_standard_argument(two, {}, opt);
    CHECK_FALSE(r.enforced.pass);
    CHECK(max_over_colorings(two.h, cap({"p", "q"}, {"z"}, 2)) == 4);
}

TEST_CASE("interface mismatches are rejected") {
    StandardArgument two = load_config("two-deg2.cfg");
    two.h.set_ext(two.h.find("z"), 2);
    CHECK_THROWS_AS(check_standard_argument(two, {}, {}), std::invalid_argument);
}

TEST_CASE("config parsing") {
    StandardArgument two = load_config("two-deg2.cfg");
    CHECK(two.config.boundary == std::vector<std::string>{"p", "q", "z"});
    REQUIRE(two.config.constraints.size() == 2);
    CHECK(two.config.constraints[0] == cup({"p", "q"}, 7));
    CHECK(two.config.constraints[1] == cap({"p", "q"}, {"z"}, 2));
    CHECK(two.h.size() == 5);

    auto bad = [](const char* text) { CHECK_THROWS_AS(parse_config(text), std::invalid_argument); };
    bad("[g1]\na:b;\n[bogus]\n");
    bad("[g1]\na:b;\n[g1]\nc:d;\n");
    bad("[g1]\nu:v;\n[boundary]\nu\n[constraints]\ncap {u} <= 1\n");
    bad("[g1]\nu:v;\n[boundary]\nu\n[constraints]\ncup {u} < 1\n");
    bad("[g1]\nu:v;\n[boundary]\nu\n[constraints]\ncup {u} <= x\n");
    bad("[g1]\nu:v;\n[boundary]\nw\n");
    StandardArgument frac = parse_config("[g1]\nu:v; u1u1\n[boundary]\nu\n[constraints]\ncup {u} <= 7/2\n");
    CHECK(frac.config.constraints[0].bound == Rational(7, 2));
}
