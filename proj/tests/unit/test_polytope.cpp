#include <doctest.h>

#include <algorithm>
#include <random>

#include "fraccrit/coloring.hpp"
#include "fraccrit/polytope.hpp"
#include "support.hpp"

using namespace fraccrit;

namespace {

// Brute-force vertex oracle: every choice of nv linearly independent constraints set tight,
// solved by Gaussian elimination, kept if feasible. Inequalities only, all variables nonneg.
std::vector<Point> brute_vertices(const LinearSystem& s) {
    const int n = s.num_vars();
    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> rhs;
    for (const auto& r : s.inequalities()) {
        std::vector<Rational> a(n, 0);
        for (const auto& t : r.terms) a[t.var] += t.coef;
        rows.push_back(a);
        rhs.push_back(r.rhs);
    }
    for (int i = 0; i < n; ++i) {
        std::vector<Rational> a(n, 0);
        a[i] = -1;
        rows.push_back(a);
        rhs.push_back(0);
    }
    const int m = static_cast<int>(rows.size());
    std::vector<Point> out;
    std::vector<int> pick(n);
    auto solve_pick = [&]() -> std::optional<Point> {
        std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a[i][j] = rows[pick[i]][j];
            a[i][n] = rhs[pick[i]];
        }
        for (int col = 0; col < n; ++col) {
            int p = -1;
            for (int r = col; r < n; ++r)
                if (a[r][col] != 0) {
                    p = r;
                    break;
                }
            if (p < 0) return std::nullopt;
            std::swap(a[p], a[col]);
            for (int r = 0; r < n; ++r) {
                if (r == col || a[r][col] == 0) continue;
                Rational f = a[r][col] / a[col][col];
                for (int j = col; j <= n; ++j) a[r][j] -= f * a[col][j];
            }
        }
        Point x(n);
        for (int i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
        return x;
    };
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == n) {
            auto x = solve_pick();
            if (x && s.satisfied_by(*x) && std::find(out.begin(), out.end(), *x) == out.end()) out.push_back(*x);
            return;
        }
        for (int i = start; i < m; ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Point> ints(std::vector<std::vector<int>> rows) {
    std::vector<Point> out;
    for (auto& r : rows) out.emplace_back(r.begin(), r.end());
    return out;
}

}  // namespace

TEST_CASE("polytope of an edge with both ends at ext 3 is a single point") {
    EGraph k2 = testing::g("u:v; u1u1v1v1");
    PolytopeSystem p = build_polytope(k2);
    auto v = enumerate_vertices(p.system);
    REQUIRE(v.size() == 1);
    // Family order: {}, {u}, {v}.
    CHECK(v[0] == Point{3, 4, 4});
    CHECK(is_vertex(p.system, v[0]));
}

TEST_CASE("empty polyhedron yields no vertices") {
    LinearSystem s;
    int x = s.add_var();
    s.add_inequality({{x, 1}}, -1);
    CHECK(enumerate_vertices(s).empty());
}

TEST_CASE("unbounded polyhedron raises with a recession direction") {
    LinearSystem s;
    int x = s.add_var(), y = s.add_var();
    s.add_inequality({{x, 1}, {y, -1}}, 2);
    try {
        enumerate_vertices(s);
        FAIL("expected UnboundedPolyhedron");
    } catch (const UnboundedPolyhedron& u) {
        REQUIRE(u.ray().size() == 2);
        CHECK(u.ray()[0] >= 0);
        CHECK(u.ray()[1] >= 0);
        CHECK(u.ray()[0] - u.ray()[1] <= 0);
        CHECK((u.ray()[0] != 0 || u.ray()[1] != 0));
    }
}

TEST_CASE("unit square and a triangle") {
    LinearSystem sq;
    int x = sq.add_var(), y = sq.add_var();
    sq.add_inequality({{x, 1}}, 1);
    sq.add_inequality({{y, 1}}, 1);
    CHECK(enumerate_vertices(sq) == ints({{0, 0}, {0, 1}, {1, 0}, {1, 1}}));

    LinearSystem tri;
    x = tri.add_var();
    y = tri.add_var();
    tri.add_inequality({{x, 2}, {y, 3}}, 6);
    CHECK(enumerate_vertices(tri) == ints({{0, 0}, {0, 2}, {3, 0}}));
}

TEST_CASE("equalities are projected out") {
    // x + y + z = 1 on the nonnegative orthant: the standard simplex.
    LinearSystem s;
    for (int i = 0; i < 3; ++i) s.add_var();
    s.add_equality({{0, 1}, {1, 1}, {2, 1}}, 1);
    CHECK(enumerate_vertices(s) == ints({{0, 0, 1}, {0, 1, 0}, {1, 0, 0}}));
}

TEST_CASE("hall polytope vertices with a1 <= a3 match the reference table") {
    LinearSystem s = parse_system(testing::slurp(testing::data_path("polytopes/hall-adj.sys")));
    std::vector<Point> kept;
    for (const auto& v : enumerate_vertices(s))
        if (v[0] <= v[2]) kept.push_back(v);
    auto expected = ints({{0, 0, 0, 0}, {0, 0, 0, 5}, {0, 0, 4, 0}, {0, 4, 0, 0},
                          {0, 0, 4, 1}, {0, 4, 0, 1}, {1, 0, 4, 0}, {1, 3, 1, 0}});
    std::sort(expected.begin(), expected.end());
    CHECK(kept == expected);
}

TEST_CASE("double description agrees with a brute-force basis oracle") {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<int> coef(-3, 3), rhs(0, 9);
    for (int trial = 0; trial < 60; ++trial) {
        int nv = 2 + trial % 4;
        int nr = 3 + trial % 7;
        LinearSystem s;
        for (int i = 0; i < nv; ++i) s.add_var();
        for (int i = 0; i < nv; ++i) s.add_inequality({{i, 1}}, 4);
        for (int r = 0; r < nr; ++r) {
            std::vector<Term> t;
            for (int i = 0; i < nv; ++i)
                if (int c = coef(rng)) t.push_back({i, c});
            if (!t.empty()) s.add_inequality(t, rhs(rng) - 1);
        }
        auto dd = enumerate_vertices(s);
        CHECK(dd == brute_vertices(s));
        for (const auto& v : dd) CHECK(is_vertex(s, v));
    }
}

TEST_CASE("random objectives peak at an enumerated vertex") {
    std::mt19937 rng(4242);
    std::uniform_int_distribution<int> coef(-6, 6);
    EGraph c6 = testing::g("a:bf;b:c;c:d;d:e;e:f; a1c1e1");
    PolytopeSystem p = build_polytope(c6);
    auto verts = enumerate_vertices(p.system);
    REQUIRE_FALSE(verts.empty());
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Rational> c(p.system.num_vars());
        for (auto& x : c) x = coef(rng);
        LpResult r = solve(p.system, c, Sense::Maximize);
        REQUIRE(r.status == LpStatus::Optimal);
        Rational best;
        bool first = true;
        for (const auto& v : verts) {
            Rational val = 0;
            for (size_t i = 0; i < c.size(); ++i) val += c[i] * v[i];
            if (first || val > best) best = val;
            first = false;
        }
        CHECK(best == r.value);
    }
}

TEST_CASE("midpoints are not vertices") {
    LinearSystem sq;
    int x = sq.add_var(), y = sq.add_var();
    sq.add_inequality({{x, 1}}, 1);
    sq.add_inequality({{y, 1}}, 1);
    CHECK(is_vertex(sq, {1, 1}));
    CHECK_FALSE(is_vertex(sq, {Rational(1, 2), 1}));
    CHECK_FALSE(is_vertex(sq, {2, 0}));
    CHECK(matrix_rank({{1, 2}, {2, 4}}) == 1);
    CHECK(matrix_rank({{1, 2}, {0, 1}, {1, 3}}) == 2);
}
