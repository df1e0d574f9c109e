#include "fraccrit/polytope.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>

#include "fraccrit/audit.hpp"

namespace fraccrit {

namespace {

using IntVec = std::vector<Integer>;

struct Bits {
    std::vector<std::uint64_t> w;
    explicit Bits(size_t n = 0) : w((n + 63) / 64, 0) {}
    void set(size_t i) { w[i / 64] |= std::uint64_t{1} << (i % 64); }
    Bits operator&(const Bits& o) const {
        Bits r;
        r.w.resize(w.size());
        for (size_t i = 0; i < w.size(); ++i) r.w[i] = w[i] & o.w[i];
        return r;
    }
    bool subset_of(const Bits& o) const {
        for (size_t i = 0; i < w.size(); ++i)
            if (w[i] & ~o.w[i]) return false;
        return true;
    }
    int count() const {
        int c = 0;
        for (auto x : w) c += std::popcount(x);
        return c;
    }
};

struct Generator {
    IntVec v;
    Bits tight;
};

Integer dot(const IntVec& a, const IntVec& b) {
    Integer s = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (sgn(a[i]) != 0 && sgn(b[i]) != 0) s += a[i] * b[i];
    return s;
}

void make_primitive(IntVec& v) {
    Integer g = 0;
    for (const auto& x : v) {
        if (sgn(x) == 0) continue;
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    }
    if (g > 1)
        for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

// Scales a rational vector by the lcm of its denominators.
IntVec integral(const std::vector<Rational>& r) {
    Integer l = 1;
    for (const auto& x : r) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    IntVec out(r.size());
    for (size_t i = 0; i < r.size(); ++i) {
        Rational s = r[i] * l;
        out[i] = s.get_num();
    }
    make_primitive(out);
    return out;
}

// x = base + basis * f parametrizes the affine hull of the equalities; nullopt if inconsistent.
struct AffinePatch {
    Point base;
    std::vector<std::vector<Rational>> basis;  // n rows, k columns
    int k = 0;
};

std::optional<AffinePatch> solve_equalities(const LinearSystem& sys) {
    const int n = sys.num_vars();
    std::vector<std::vector<Rational>> m;
    for (const auto& row : sys.equalities()) {
        std::vector<Rational> r(n + 1, 0);
        for (const auto& t : row.terms) r[t.var] = t.coef;
        r[n] = row.rhs;
        m.push_back(std::move(r));
    }
    std::vector<int> pivot_col;
    size_t rank = 0;
    for (int c = 0; c < n && rank < m.size(); ++c) {
        size_t p = rank;
        while (p < m.size() && sgn(m[p][c]) == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[rank]);
        Rational inv = 1 / m[rank][c];
        for (auto& x : m[rank]) x *= inv;
        for (size_t r = 0; r < m.size(); ++r) {
            if (r == rank || sgn(m[r][c]) == 0) continue;
            Rational f = m[r][c];
            for (int j = 0; j <= n; ++j)
                if (sgn(m[rank][j]) != 0) m[r][j] -= f * m[rank][j];
        }
        pivot_col.push_back(c);
        ++rank;
    }
    for (size_t r = rank; r < m.size(); ++r)
        if (sgn(m[r][n]) != 0) return std::nullopt;
    std::vector<bool> is_pivot(n, false);
    for (int c : pivot_col) is_pivot[c] = true;
    std::vector<int> free_cols;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    AffinePatch patch;
    patch.k = static_cast<int>(free_cols.size());
    patch.base.assign(n, 0);
    patch.basis.assign(n, std::vector<Rational>(patch.k, 0));
    for (size_t r = 0; r < rank; ++r) {
        int c = pivot_col[r];
        patch.base[c] = m[r][n];
        for (int f = 0; f < patch.k; ++f) patch.basis[c][f] = -m[r][free_cols[f]];
    }
    for (int f = 0; f < patch.k; ++f) patch.basis[free_cols[f]][f] = 1;
    return patch;
}

Point lift(const AffinePatch& patch, const std::vector<Rational>& f, bool direction) {
    const int n = static_cast<int>(patch.base.size());
    Point x(n);
    for (int i = 0; i < n; ++i) {
        Rational s = direction ? Rational(0) : patch.base[i];
        for (int j = 0; j < patch.k; ++j)
            if (sgn(patch.basis[i][j]) != 0 && sgn(f[j]) != 0) s += patch.basis[i][j] * f[j];
        x[i] = s;
    }
    return x;
}

}  // namespace

int matrix_rank(std::vector<std::vector<Rational>> rows) {
    if (rows.empty()) return 0;
    const size_t cols = rows[0].size();
    size_t rank = 0;
    for (size_t c = 0; c < cols && rank < rows.size(); ++c) {
        size_t p = rank;
        while (p < rows.size() && sgn(rows[p][c]) == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[rank]);
        for (size_t r = rank + 1; r < rows.size(); ++r) {
            if (sgn(rows[r][c]) == 0) continue;
            Rational f = rows[r][c] / rows[rank][c];
            for (size_t j = c; j < cols; ++j) rows[r][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    return static_cast<int>(rank);
}

bool is_vertex(const LinearSystem& sys, const Point& x) {
    if (!sys.satisfied_by(x)) return false;
    const int n = sys.num_vars();
    std::vector<std::vector<Rational>> tight;
    auto dense = [&](const Row& row) {
        std::vector<Rational> r(n, 0);
        for (const auto& t : row.terms) r[t.var] = t.coef;
        return r;
    };
    for (const auto& row : sys.equalities()) tight.push_back(dense(row));
    for (const auto& row : sys.inequalities()) {
        Rational s = 0;
        for (const auto& t : row.terms) s += t.coef * x[t.var];
        if (s == row.rhs) tight.push_back(dense(row));
    }
    for (int v = 0; v < n; ++v) {
        if (!sys.is_nonneg(v) || sgn(x[v]) != 0) continue;
        std::vector<Rational> r(n, 0);
        r[v] = 1;
        tight.push_back(std::move(r));
    }
    return matrix_rank(std::move(tight)) == n;
}

std::vector<Point> enumerate_vertices(const LinearSystem& sys) {
    auto patch_opt = solve_equalities(sys);
    if (!patch_opt) return {};
    const AffinePatch& patch = *patch_opt;
    const int k = patch.k;
    const int dim = k + 1;  // homogenizing coordinate t first

    // Rows a.x <= b in original coordinates, nonnegativity first, then explicit inequalities.
    std::vector<std::pair<std::vector<Rational>, Rational>> rows;
    const int n = sys.num_vars();
    for (int v = 0; v < n; ++v) {
        if (!sys.is_nonneg(v)) continue;
        std::vector<Rational> a(n, 0);
        a[v] = -1;
        rows.emplace_back(std::move(a), Rational(0));
    }
    for (const auto& row : sys.inequalities()) {
        std::vector<Rational> a(n, 0);
        for (const auto& t : row.terms) a[t.var] = t.coef;
        rows.emplace_back(std::move(a), row.rhs);
    }
    // Cone constraints c.(t, f) >= 0.
    std::vector<IntVec> cons;
    {
        IntVec t_nonneg(dim, 0);
        t_nonneg[0] = 1;
        cons.push_back(std::move(t_nonneg));
    }
    for (const auto& [a, b] : rows) {
        std::vector<Rational> c(dim, 0);
        Rational ax0 = 0;
        for (int i = 0; i < n; ++i)
            if (sgn(a[i]) != 0) ax0 += a[i] * patch.base[i];
        c[0] = b - ax0;
        for (int j = 0; j < k; ++j) {
            Rational g = 0;
            for (int i = 0; i < n; ++i)
                if (sgn(a[i]) != 0 && sgn(patch.basis[i][j]) != 0) g += a[i] * patch.basis[i][j];
            c[j + 1] = -g;
        }
        cons.push_back(integral(c));
    }
    const size_t m = cons.size();

    std::vector<IntVec> lines;
    for (int i = 0; i < dim; ++i) {
        IntVec e(dim, 0);
        e[i] = 1;
        lines.push_back(std::move(e));
    }
    std::vector<Generator> rays;
    for (size_t ci = 0; ci < m; ++ci) {
        const IntVec& a = cons[ci];
        size_t li = 0;
        while (li < lines.size() && sgn(dot(a, lines[li])) == 0) ++li;
        if (li < lines.size()) {
            IntVec l = lines[li];
            Integer s = dot(a, l);
            if (sgn(s) < 0) {
                for (auto& x : l) x = -x;
                s = -s;
            }
            lines.erase(lines.begin() + static_cast<long>(li));
            for (auto& other : lines) {
                Integer d = dot(a, other);
                if (sgn(d) == 0) continue;
                for (int j = 0; j < dim; ++j) other[j] = s * other[j] - d * l[j];
                make_primitive(other);
            }
            for (auto& r : rays) {
                Integer d = dot(a, r.v);
                if (sgn(d) != 0) {
                    for (int j = 0; j < dim; ++j) r.v[j] = s * r.v[j] - d * l[j];
                    make_primitive(r.v);
                }
                r.tight.set(ci);
            }
            Generator g{l, Bits(m)};
            for (size_t p = 0; p < ci; ++p) g.tight.set(p);
            rays.push_back(std::move(g));
            continue;
        }
        std::vector<Integer> val(rays.size());
        std::vector<size_t> pos, neg;
        std::vector<Generator> next;
        for (size_t r = 0; r < rays.size(); ++r) {
            val[r] = dot(a, rays[r].v);
            if (sgn(val[r]) > 0) pos.push_back(r);
            if (sgn(val[r]) < 0) neg.push_back(r);
        }
        const int need = dim - static_cast<int>(lines.size()) - 2;
        for (size_t p : pos) {
            for (size_t q : neg) {
                Bits z = rays[p].tight & rays[q].tight;
                if (z.count() < need) continue;
                bool adjacent = true;
                for (size_t r = 0; r < rays.size() && adjacent; ++r)
                    if (r != p && r != q && z.subset_of(rays[r].tight)) adjacent = false;
                if (!adjacent) continue;
                Generator g{IntVec(dim), z};
                for (int j = 0; j < dim; ++j) g.v[j] = val[p] * rays[q].v[j] - val[q] * rays[p].v[j];
                make_primitive(g.v);
                g.tight.set(ci);
                next.push_back(std::move(g));
            }
        }
        std::vector<Generator> kept;
        for (size_t r = 0; r < rays.size(); ++r) {
            if (sgn(val[r]) < 0) continue;
            if (sgn(val[r]) == 0) rays[r].tight.set(ci);
            kept.push_back(std::move(rays[r]));
        }
        for (auto& g : next) kept.push_back(std::move(g));
        rays = std::move(kept);
    }

    std::vector<Point> vertices;
    const IntVec* recession = nullptr;
    for (const auto& r : rays) {
        if (sgn(r.v[0]) > 0) {
            std::vector<Rational> f(k);
            for (int j = 0; j < k; ++j) f[j] = Rational(r.v[j + 1], r.v[0]);
            for (auto& x : f) x.canonicalize();
            vertices.push_back(lift(patch, f, false));
        } else if (!recession) {
            recession = &r.v;
        }
    }
    if (vertices.empty()) return {};
    if (!recession && !lines.empty()) recession = &lines.front();
    if (recession) {
        std::vector<Rational> f(k);
        for (int j = 0; j < k; ++j) f[j] = Rational((*recession)[j + 1]);
        throw UnboundedPolyhedron(lift(patch, f, true));
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    for (const auto& x : vertices) {
        bool ok = is_vertex(sys, x);
        audit::record_point(ok);
        if (!ok) throw std::logic_error("exact verification failed: enumerated point is not a vertex");
    }
    return vertices;
}

}  // namespace fraccrit
