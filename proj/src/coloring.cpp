#include "fraccrit/coloring.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fraccrit/audit.hpp"
#include "fraccrit/parallel.hpp"

namespace fraccrit {

namespace {

Mask bit(int v) { return Mask{1} << v; }

template <class Fn>
void for_each_independent(const EGraph& g, Mask within, Fn&& fn) {
    std::vector<int> order;
    for (int v = 0; v < g.size(); ++v)
        if ((within >> v) & 1u) order.push_back(v);
    std::function<void(size_t, Mask, Mask)> rec = [&](size_t i, Mask cur, Mask blocked) {
        if (i == order.size()) {
            fn(cur);
            return;
        }
        rec(i + 1, cur, blocked);
        int v = order[i];
        if (!((blocked >> v) & 1u)) rec(i + 1, cur | bit(v), blocked | g.neighbor_mask(v));
    };
    rec(0, 0, 0);
}

Mask greedy_maximal(const EGraph& g, Mask start) {
    Mask cur = start;
    Mask blocked = 0;
    for (int v = 0; v < g.size(); ++v)
        if ((cur >> v) & 1u) blocked |= g.neighbor_mask(v) | bit(v);
    for (int v = 0; v < g.size(); ++v) {
        if ((blocked >> v) & 1u) continue;
        cur |= bit(v);
        blocked |= g.neighbor_mask(v) | bit(v);
    }
    return cur;
}

std::vector<Mask> initial_columns(const EGraph& g) {
    std::vector<Mask> cols;
    for (int v = 0; v < g.size(); ++v) cols.push_back(greedy_maximal(g, bit(v)));
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    return cols;
}

Integer lcm_of_denominators(const std::vector<Rational>& w) {
    Integer l = 1;
    for (const auto& x : w) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    return l;
}

}  // namespace

Mask all_vertices(const EGraph& g) { return g.size() == 64 ? ~Mask{0} : bit(g.size()) - 1; }

int IndSetFamily::index_of(Mask s) const {
    auto it = std::lower_bound(sets.begin(), sets.end(), s);
    return it != sets.end() && *it == s ? static_cast<int>(it - sets.begin()) : -1;
}

IndSetFamily independent_sets(const EGraph& g, Mask within) {
    IndSetFamily fam;
    for_each_independent(g, within, [&](Mask s) { fam.sets.push_back(s); });
    std::sort(fam.sets.begin(), fam.sets.end());
    return fam;
}

IndSetFamily independent_sets(const EGraph& g) { return independent_sets(g, all_vertices(g)); }

std::vector<Mask> maximal_independent_sets(const EGraph& g) {
    std::vector<Mask> out;
    const Mask all = all_vertices(g);
    for_each_independent(g, all, [&](Mask s) {
        Mask covered = s;
        for (int v = 0; v < g.size(); ++v)
            if ((s >> v) & 1u) covered |= g.neighbor_mask(v);
        if (covered == all) out.push_back(s);
    });
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<Rational, Mask> max_weight_independent_set(const EGraph& g, const std::vector<Rational>& w) {
    const int n = g.size();
    Integer scale = lcm_of_denominators(w);
    std::vector<Integer> iw(n);
    Mask cand = 0;
    for (int v = 0; v < n; ++v) {
        if (sgn(w[v]) < 0) throw std::invalid_argument("negative weight in independent set search");
        Rational s = w[v] * scale;
        iw[v] = s.get_num();
        if (sgn(iw[v]) > 0) cand |= bit(v);
    }
    Integer best = -1;
    Mask best_set = 0;
    std::function<void(Mask, const Integer&, Mask)> rec = [&](Mask c, const Integer& cur, Mask chosen) {
        Integer ub = cur;
        for (Mask m = c; m; m &= m - 1) ub += iw[std::countr_zero(m)];
        if (ub <= best) return;
        int pick = -1, pick_deg = -1;
        for (Mask m = c; m; m &= m - 1) {
            int v = std::countr_zero(m);
            int d = std::popcount(g.neighbor_mask(v) & c);
            if (d > pick_deg) {
                pick = v;
                pick_deg = d;
            }
        }
        if (pick_deg <= 0) {
            best = ub;
            best_set = chosen | c;
            return;
        }
        rec(c & ~(g.neighbor_mask(pick) | bit(pick)), cur + iw[pick], chosen | bit(pick));
        rec(c & ~bit(pick), cur, chosen);
    };
    rec(cand, Integer(0), 0);
    Rational value(best, scale);
    value.canonicalize();
    return {value, best_set};
}

// ---------------------------------------------------------------------------------------------
// Witnesses

Rational ColoringWitness::weight_of(Mask s) const {
    auto it = std::lower_bound(sets.begin(), sets.end(), s);
    return it != sets.end() && *it == s ? weights[it - sets.begin()] : Rational(0);
}

ColoringWitness normalize(std::vector<std::pair<Mask, Rational>> pieces) {
    std::sort(pieces.begin(), pieces.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    ColoringWitness w;
    for (auto& [m, x] : pieces) {
        if (!w.sets.empty() && w.sets.back() == m)
            w.weights.back() += x;
        else {
            w.sets.push_back(m);
            w.weights.push_back(std::move(x));
        }
    }
    ColoringWitness out;
    for (size_t i = 0; i < w.sets.size(); ++i) {
        if (sgn(w.weights[i]) == 0) continue;
        out.sets.push_back(w.sets[i]);
        out.weights.push_back(w.weights[i]);
    }
    return out;
}

bool check_witness(const EGraph& g, const ColoringWitness& w) {
    bool ok = w.sets.size() == w.weights.size();
    const Mask all = all_vertices(g);
    Rational total = 0;
    std::vector<Rational> cover(g.size(), 0);
    for (size_t i = 0; ok && i < w.sets.size(); ++i) {
        Mask s = w.sets[i];
        if (i > 0 && w.sets[i - 1] >= s) ok = false;
        if ((s & ~all) != 0 || sgn(w.weights[i]) < 0) ok = false;
        for (Mask m = s; ok && m; m &= m - 1) {
            int v = std::countr_zero(m);
            if (g.neighbor_mask(v) & s) ok = false;
            cover[v] += w.weights[i];
        }
        total += w.weights[i];
    }
    if (ok && total != 11) ok = false;
    for (int v = 0; ok && v < g.size(); ++v)
        if (cover[v] != 7 - g.ext(v)) ok = false;
    audit::record_point(ok);
    return ok;
}

std::string set_name(const EGraph& g, Mask s) {
    std::string out = "{";
    bool first = true;
    for (Mask m = s; m; m &= m - 1) {
        if (!first) out += ',';
        out += g.name(std::countr_zero(m));
        first = false;
    }
    return out + "}";
}

std::string dump_witness(const EGraph& g, const ColoringWitness& w) {
    std::ostringstream out;
    for (size_t i = 0; i < w.sets.size(); ++i)
        out << "I=" << set_name(g, w.sets[i]) << " w=" << to_string(w.weights[i]) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------------------------
// Polytope and colorability

PolytopeSystem build_polytope(const EGraph& g) {
    PolytopeSystem p;
    p.family = independent_sets(g);
    for (size_t i = 0; i < p.family.size(); ++i) p.system.add_var(true, "x" + set_name(g, p.family.sets[i]));
    std::vector<Term> total;
    std::vector<std::vector<Term>> per_vertex(g.size());
    for (size_t i = 0; i < p.family.size(); ++i) {
        int var = static_cast<int>(i);
        total.push_back({var, 1});
        for (Mask m = p.family.sets[i]; m; m &= m - 1) per_vertex[std::countr_zero(m)].push_back({var, 1});
    }
    p.system.add_equality(std::move(total), 11);
    for (int v = 0; v < g.size(); ++v) p.system.add_equality(std::move(per_vertex[v]), 7 - g.ext(v));
    return p;
}

bool verify_polytope_certificate(const EGraph& g, const Certificate& cert) {
    if (cert.eq.size() != static_cast<size_t>(g.size()) + 1 || !cert.ineq.empty()) return false;
    Rational rhs = 11 * cert.eq[0];
    for (int v = 0; v < g.size(); ++v) rhs += (7 - g.ext(v)) * cert.eq[v + 1];
    if (sgn(rhs) >= 0) return false;
    // Every independent set must have nonnegative combined coefficient.
    bool ok = true;
    std::function<void(int, Rational, Mask)> rec = [&](int v, Rational acc, Mask blocked) {
        if (!ok) return;
        if (v == g.size()) {
            if (sgn(acc) < 0) ok = false;
            return;
        }
        rec(v + 1, acc, blocked);
        if (!((blocked >> v) & 1u)) rec(v + 1, acc + cert.eq[v + 1], blocked | g.neighbor_mask(v));
    };
    rec(0, cert.eq[0], 0);
    return ok;
}

Colorability colorability(const EGraph& g) {
    const int n = g.size();
    Colorability result;
    std::vector<Mask> cols = initial_columns(g);
    for (;;) {
        ++result.rounds;
        LinearSystem sys;
        const int k = static_cast<int>(cols.size());
        for (int j = 0; j < k; ++j) sys.add_var();
        const int slack = sys.add_var();
        const int excess0 = sys.num_vars();
        for (int v = 0; v < n; ++v) sys.add_var();
        std::vector<Term> total;
        std::vector<std::vector<Term>> per_vertex(n);
        for (int j = 0; j < k; ++j) {
            total.push_back({j, 1});
            for (Mask m = cols[j]; m; m &= m - 1) per_vertex[std::countr_zero(m)].push_back({j, 1});
        }
        total.push_back({slack, 1});
        sys.add_equality(std::move(total), 11);
        for (int v = 0; v < n; ++v) {
            per_vertex[v].push_back({excess0 + v, -1});
            sys.add_equality(std::move(per_vertex[v]), 7 - g.ext(v));
        }
        LpResult lp = solve_feasibility(sys);
        if (lp.status == LpStatus::Optimal) {
            std::vector<std::pair<Mask, Rational>> pieces;
            for (int j = 0; j < k; ++j)
                if (sgn(lp.point[j]) > 0) pieces.emplace_back(cols[j], lp.point[j]);
            if (sgn(lp.point[slack]) > 0) pieces.emplace_back(Mask{0}, lp.point[slack]);
            for (int v = 0; v < n; ++v) {
                Rational excess = lp.point[excess0 + v];
                for (size_t p = 0; sgn(excess) > 0 && p < pieces.size(); ++p) {
                    if (!((pieces[p].first >> v) & 1u) || sgn(pieces[p].second) == 0) continue;
                    Rational take = std::min(excess, pieces[p].second);
                    pieces[p].second -= take;
                    excess -= take;
                    pieces.emplace_back(pieces[p].first & ~bit(v), take);
                }
            }
            result.witness = normalize(std::move(pieces));
            if (!check_witness(g, *result.witness))
                throw std::logic_error("exact verification failed: coloring witness");
            return result;
        }
        const auto& lambda = lp.certificate.eq;
        std::vector<Rational> mu(n);
        for (int v = 0; v < n; ++v) mu[v] = -lambda[v + 1];
        auto [best, set] = max_weight_independent_set(g, mu);
        if (best <= lambda[0]) {
            result.certificate = lp.certificate;
            bool ok = verify_polytope_certificate(g, result.certificate);
            audit::record_certificate(ok);
            if (!ok) throw std::logic_error("exact verification failed: non-colorability certificate");
            return result;
        }
        Mask col = greedy_maximal(g, set);
        if (std::find(cols.begin(), cols.end(), col) != cols.end())
            throw std::logic_error("column generation stalled");
        cols.push_back(col);
    }
}

bool is_colorable(const EGraph& g) { return colorability(g).witness.has_value(); }

FractionalChromatic fractional_chromatic_certified(const EGraph& g) {
    const int n = g.size();
    FractionalChromatic fc;
    if (n == 0) return fc;
    std::vector<Mask> cols = initial_columns(g);
    for (;;) {
        LinearSystem sys;
        const int k = static_cast<int>(cols.size());
        for (int j = 0; j < k; ++j) sys.add_var();
        std::vector<std::vector<Term>> per_vertex(n);
        for (int j = 0; j < k; ++j)
            for (Mask m = cols[j]; m; m &= m - 1) per_vertex[std::countr_zero(m)].push_back({j, 1});
        for (int v = 0; v < n; ++v) sys.add_lower_bound(std::move(per_vertex[v]), 1);
        LpResult lp = solve(sys, std::vector<Rational>(k, 1), Sense::Minimize);
        if (lp.status != LpStatus::Optimal) throw std::logic_error("covering LP not optimal");
        std::vector<Rational> w(n);
        for (int v = 0; v < n; ++v) w[v] = -lp.dual.ineq[v];
        auto [best, set] = max_weight_independent_set(g, w);
        if (best <= 1) {
            fc.value = lp.value;
            fc.weights = w;
            std::vector<std::pair<Mask, Rational>> pieces;
            for (int j = 0; j < k; ++j)
                if (sgn(lp.point[j]) > 0) pieces.emplace_back(cols[j], lp.point[j]);
            fc.cover = normalize(std::move(pieces));
            // Lower bound: the weights are a fractional clique of value fc.value.
            Rational sum = 0;
            for (const auto& x : w) sum += x;
            bool ok = sum == fc.value;
            for (const auto& x : w) ok = ok && sgn(x) >= 0;
            for_each_independent(g, all_vertices(g), [&](Mask s) {
                Rational t = 0;
                for (Mask m = s; m; m &= m - 1) t += w[std::countr_zero(m)];
                if (t > 1) ok = false;
            });
            audit::record_certificate(ok);
            if (!ok) throw std::logic_error("exact verification failed: fractional clique");
            return fc;
        }
        Mask col = greedy_maximal(g, set);
        if (std::find(cols.begin(), cols.end(), col) != cols.end())
            throw std::logic_error("column generation stalled");
        cols.push_back(col);
    }
}

Rational fractional_chromatic(const EGraph& g) { return fractional_chromatic_certified(g).value; }

// ---------------------------------------------------------------------------------------------
// Restriction, extension, gluing

Rational BoundaryProfile::value_of(Mask j) const {
    auto it = std::lower_bound(sets.begin(), sets.end(), j);
    return it != sets.end() && *it == j ? y[it - sets.begin()] : Rational(0);
}

BoundaryProfile restrict_witness(const EGraph& g, const ColoringWitness& x, Mask s) {
    if (s & ~all_vertices(g)) throw std::out_of_range("restrict: unknown vertex");
    BoundaryProfile p;
    p.boundary = s;
    p.sets = independent_sets(g, s).sets;
    p.y.assign(p.sets.size(), 0);
    for (size_t i = 0; i < x.sets.size(); ++i) {
        auto it = std::lower_bound(p.sets.begin(), p.sets.end(), x.sets[i] & s);
        p.y[it - p.sets.begin()] += x.weights[i];
    }
    return p;
}

namespace {
Mask compress(Mask m, Mask s) {
    Mask out = 0;
    int k = 0;
    for (Mask t = s; t; t &= t - 1, ++k)
        if ((m >> std::countr_zero(t)) & 1u) out |= bit(k);
    return out;
}
}  // namespace

ColoringWitness profile_as_witness(const BoundaryProfile& y) {
    std::vector<std::pair<Mask, Rational>> pieces;
    for (size_t i = 0; i < y.sets.size(); ++i) pieces.emplace_back(compress(y.sets[i], y.boundary), y.y[i]);
    return normalize(std::move(pieces));
}

Extension extends(const BoundaryProfile& y, const EGraph& g) {
    PolytopeSystem p = build_polytope(g);
    std::map<Mask, std::vector<Term>> rows;
    for (const auto& j : y.sets) rows[j];
    for (size_t i = 0; i < p.family.size(); ++i) {
        auto it = rows.find(p.family.sets[i] & y.boundary);
        if (it == rows.end()) throw std::invalid_argument("profile is not indexed by independent sets of G[S]");
        it->second.push_back({static_cast<int>(i), 1});
    }
    for (size_t i = 0; i < y.sets.size(); ++i) p.system.add_equality(rows[y.sets[i]], y.y[i]);
    LpResult lp = solve_feasibility(p.system);
    Extension e;
    if (lp.status == LpStatus::Optimal) {
        std::vector<std::pair<Mask, Rational>> pieces;
        for (size_t i = 0; i < p.family.size(); ++i)
            if (sgn(lp.point[i]) > 0) pieces.emplace_back(p.family.sets[i], lp.point[i]);
        e.extends = true;
        e.witness = normalize(std::move(pieces));
    } else {
        e.certificate = lp.certificate;
    }
    return e;
}

Glued glue(const EGraph& g1, const ColoringWitness& x1, const EGraph& g2, const ColoringWitness& x2) {
    Glued out;
    EGraph& u = out.graph;
    for (int v = 0; v < g1.size(); ++v) u.add_vertex(g1.name(v), g1.ext(v));
    std::vector<int> map2(g2.size());
    Mask shared = 0;
    for (int v = 0; v < g2.size(); ++v) {
        int w = u.find(g2.name(v));
        if (w >= 0) {
            if (g1.ext(w) != g2.ext(v))
                throw std::invalid_argument("shared vertex '" + g2.name(v) + "' has different ext_degree");
            shared |= bit(w);
            map2[v] = w;
        } else {
            map2[v] = u.add_vertex(g2.name(v), g2.ext(v));
        }
    }
    for (auto [a, b] : g1.edges()) u.add_edge(a, b);
    for (auto [a, b] : g2.edges())
        if (!u.has_edge(map2[a], map2[b])) u.add_edge(map2[a], map2[b]);
    for (int v = 0; v < u.size(); ++v) {
        int e = v < g1.size() ? g1.ext(v) : -1;
        if (e < 0) {
            for (int w = 0; w < g2.size(); ++w)
                if (map2[w] == v) e = g2.ext(w);
        }
        if (u.degree(v) > e) throw std::invalid_argument("union exceeds ext_degree at '" + u.name(v) + "'");
        u.set_ext(v, e);
    }
    auto lift2 = [&](Mask m) {
        Mask r = 0;
        for (Mask t = m; t; t &= t - 1) r |= bit(map2[std::countr_zero(t)]);
        return r;
    };
    std::map<Mask, Rational> y1, y2;
    for (size_t i = 0; i < x1.sets.size(); ++i) y1[x1.sets[i] & shared] += x1.weights[i];
    for (size_t i = 0; i < x2.sets.size(); ++i) y2[lift2(x2.sets[i]) & shared] += x2.weights[i];
    auto strip = [](std::map<Mask, Rational>& m) {
        for (auto it = m.begin(); it != m.end();) it = sgn(it->second) == 0 ? m.erase(it) : std::next(it);
    };
    strip(y1);
    strip(y2);
    if (y1 != y2) throw std::invalid_argument("restrictions to the shared vertices differ");
    std::map<Mask, std::vector<std::pair<Mask, Rational>>> by_trace;
    for (size_t i = 0; i < x2.sets.size(); ++i) {
        Mask m = lift2(x2.sets[i]);
        by_trace[m & shared].emplace_back(m, x2.weights[i]);
    }
    std::vector<std::pair<Mask, Rational>> pieces;
    for (size_t i = 0; i < x1.sets.size(); ++i) {
        Mask j = x1.sets[i] & shared;
        auto it = by_trace.find(j);
        if (it == by_trace.end()) continue;
        const Rational& yj = y1.at(j);
        for (const auto& [m, w] : it->second) pieces.emplace_back(x1.sets[i] | m, x1.weights[i] * w / yj);
    }
    out.witness = normalize(std::move(pieces));
    if (!check_witness(u, out.witness)) throw std::logic_error("exact verification failed: glued witness");
    return out;
}

PathBound path_extension_bound(int k, const std::vector<int>& inner_ext) {
    if (k < 1 || static_cast<int>(inner_ext.size()) != k - 1)
        throw std::invalid_argument("path_extension_bound: need k >= 1 and k-1 inner degrees");
    Rational sum = 0;
    for (int d : inner_ext) {
        if (d != 2 && d != 3) throw std::invalid_argument("inner ext_degree must be 2 or 3");
        sum += d;
    }
    PathBound b;
    b.bounds_union = k % 2 == 0;
    b.bound = b.bounds_union ? sum - Rational(3 * k - 14, 2) : sum - Rational(3 * (k - 1), 2);
    b.bound.canonicalize();
    return b;
}

ColoringWitness convex_combine(const std::vector<ColoringWitness>& witnesses,
                               const std::vector<Rational>& lambdas) {
    if (witnesses.size() != lambdas.size() || witnesses.empty())
        throw std::invalid_argument("convex_combine: one coefficient per witness required");
    Rational sum = 0;
    for (const auto& l : lambdas) {
        if (sgn(l) < 0) throw std::invalid_argument("convex_combine: negative coefficient");
        sum += l;
    }
    if (sum != 1) throw std::invalid_argument("convex_combine: coefficients must sum to 1");
    std::vector<std::pair<Mask, Rational>> pieces;
    for (size_t i = 0; i < witnesses.size(); ++i)
        for (size_t j = 0; j < witnesses[i].sets.size(); ++j)
            pieces.emplace_back(witnesses[i].sets[j], lambdas[i] * witnesses[i].weights[j]);
    return normalize(std::move(pieces));
}

// ---------------------------------------------------------------------------------------------
// Interval unions

IntervalSet IntervalSet::interval(Rational a, Rational b) {
    IntervalSet s;
    s.add(std::move(a), std::move(b));
    return s;
}

void IntervalSet::add(Rational a, Rational b) {
    if (!(a < b)) return;
    std::vector<std::pair<Rational, Rational>> out;
    bool placed = false;
    for (auto& [l, r] : parts_) {
        if (r < a) {
            out.emplace_back(l, r);
        } else if (b < l) {
            if (!placed) {
                out.emplace_back(a, b);
                placed = true;
            }
            out.emplace_back(l, r);
        } else {
            a = std::min(a, l);
            b = std::max(b, r);
        }
    }
    if (!placed) out.emplace_back(a, b);
    std::sort(out.begin(), out.end());
    parts_ = std::move(out);
}

IntervalSet IntervalSet::parse(std::string_view text) {
    IntervalSet s;
    size_t pos = 0;
    while (true) {
        size_t open = text.find('[', pos);
        if (open == std::string_view::npos) break;
        size_t comma = text.find(',', open);
        size_t close = text.find(')', open);
        if (comma == std::string_view::npos || close == std::string_view::npos || comma > close)
            throw std::invalid_argument("malformed interval union");
        Rational a = parse_rational(text.substr(open + 1, comma - open - 1));
        Rational b = parse_rational(text.substr(comma + 1, close - comma - 1));
        if (!(a < b)) throw std::invalid_argument("empty or reversed interval");
        s.add(a, b);
        pos = close + 1;
    }
    for (char c : text.substr(pos))
        if (!std::isspace(static_cast<unsigned char>(c))) throw std::invalid_argument("malformed interval union");
    return s;
}

Rational IntervalSet::measure() const {
    Rational m = 0;
    for (const auto& [a, b] : parts_) m += b - a;
    return m;
}

IntervalSet IntervalSet::unite(const IntervalSet& o) const {
    IntervalSet r = *this;
    for (const auto& [a, b] : o.parts_) r.add(a, b);
    return r;
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const {
    IntervalSet r;
    for (const auto& [a, b] : parts_)
        for (const auto& [c, d] : o.parts_) {
            Rational lo = std::max(a, c), hi = std::min(b, d);
            if (lo < hi) r.add(lo, hi);
        }
    return r;
}

IntervalSet IntervalSet::minus(const IntervalSet& o) const {
    IntervalSet r;
    for (const auto& [a, b] : parts_) {
        Rational cur = a;
        for (const auto& [c, d] : o.parts_) {
            if (d <= cur || c >= b) continue;
            if (c > cur) r.add(cur, c);
            cur = std::max(cur, d);
            if (cur >= b) break;
        }
        if (cur < b) r.add(cur, b);
    }
    return r;
}

IntervalSet IntervalSet::earliest(const Rational& m) const {
    if (sgn(m) < 0 || m > measure()) throw std::invalid_argument("earliest: measure out of range");
    IntervalSet r;
    Rational left = m;
    for (const auto& [a, b] : parts_) {
        if (sgn(left) == 0) break;
        Rational len = b - a;
        Rational take = std::min(len, left);
        r.add(a, a + take);
        left -= take;
    }
    return r;
}

std::string IntervalSet::str() const {
    std::string out;
    for (const auto& [a, b] : parts_) {
        if (!out.empty()) out += ' ';
        out += "[" + to_string(a) + "," + to_string(b) + ")";
    }
    return out;
}

namespace {

bool inside_range(const IntervalSet& s) { return s.subset_of(IntervalSet::full()); }

bool five_cycle_ok(const Triple& phi) {
    for (const auto& p : phi)
        if (p.measure() != 4 || !inside_range(p)) return false;
    return phi[0].intersect(phi[1]).empty() && phi[1].intersect(phi[2]).empty() &&
           phi[0].intersect(phi[2]).measure() <= 1;
}

}  // namespace

std::optional<Triple> hall_five_cycle(const IntervalSet& s1, const IntervalSet& s2, const IntervalSet& s3) {
    for (const auto* s : {&s1, &s2, &s3}) {
        if (!inside_range(*s)) throw std::invalid_argument("set leaves [0,11)");
        if (s->measure() < 7) throw std::invalid_argument("each set needs measure at least 7");
    }
    // Blocks X1 = S1, X2 = S1 ∩ S3, X3 = S3, X4 = S2 with demands 3, 1, 3, 4.
    const std::array<Rational, 4> demand = {3, 1, 3, 4};
    const IntervalSet full = IntervalSet::full();
    std::vector<IntervalSet> atoms;
    std::vector<std::array<bool, 4>> allowed;
    for (int pattern = 0; pattern < 8; ++pattern) {
        IntervalSet a = full;
        const IntervalSet* s[3] = {&s1, &s2, &s3};
        for (int i = 0; i < 3; ++i) a = (pattern >> i) & 1 ? a.intersect(*s[i]) : a.minus(*s[i]);
        if (a.empty()) continue;
        bool in1 = pattern & 1, in2 = pattern & 2, in3 = pattern & 4;
        atoms.push_back(a);
        allowed.push_back({in1, in1 && in3, in3, in2});
    }
    LinearSystem sys;
    std::vector<std::array<int, 4>> var(atoms.size());
    for (size_t a = 0; a < atoms.size(); ++a)
        for (int i = 0; i < 4; ++i) var[a][i] = allowed[a][i] ? sys.add_var() : -1;
    for (int i = 0; i < 4; ++i) {
        std::vector<Term> row;
        for (size_t a = 0; a < atoms.size(); ++a)
            if (var[a][i] >= 0) row.push_back({var[a][i], 1});
        sys.add_equality(std::move(row), demand[i]);
    }
    for (size_t a = 0; a < atoms.size(); ++a) {
        std::vector<Term> row;
        for (int i = 0; i < 4; ++i)
            if (var[a][i] >= 0) row.push_back({var[a][i], 1});
        if (!row.empty()) sys.add_inequality(std::move(row), atoms[a].measure());
    }
    LpResult lp = solve_feasibility(sys);
    if (lp.status != LpStatus::Optimal) return std::nullopt;
    std::array<IntervalSet, 4> blocks;
    for (size_t a = 0; a < atoms.size(); ++a) {
        IntervalSet rest = atoms[a];
        for (int i = 0; i < 4; ++i) {
            if (var[a][i] < 0 || sgn(lp.point[var[a][i]]) == 0) continue;
            IntervalSet piece = rest.earliest(lp.point[var[a][i]]);
            blocks[i] = blocks[i].unite(piece);
            rest = rest.minus(piece);
        }
    }
    Triple phi = {blocks[0].unite(blocks[1]), blocks[3], blocks[1].unite(blocks[2])};
    if (!five_cycle_ok(phi) || !phi[0].subset_of(s1) || !phi[1].subset_of(s2) || !phi[2].subset_of(s3))
        throw std::logic_error("five-cycle construction produced an invalid coloring");
    return phi;
}

namespace {

struct SlackRow {
    std::array<int, 4> a;
    std::array<int, 4> m;
};

// Vertices of the polytope with a1 <= a3 and the matching measures m.
const SlackRow kSlackTable[] = {
    {{0, 0, 0, 0}, {0, 0, 0, 0}}, {{0, 0, 0, 5}, {0, 0, 0, 1}}, {{0, 0, 4, 0}, {0, 0, 1, 0}},
    {{0, 4, 0, 0}, {0, 1, 0, 0}}, {{0, 0, 4, 1}, {0, 0, 1, 0}}, {{0, 4, 0, 1}, {0, 1, 0, 0}},
    {{1, 0, 4, 0}, {0, 0, 1, 0}}, {{1, 3, 1, 0}, {0, 1, 0, 0}},
};

}  // namespace

std::array<Rational, 4> slack_allowance(const std::array<Rational, 4>& a) {
    std::vector<SlackRow> rows;
    for (const auto& r : kSlackTable) {
        rows.push_back(r);
        if (r.a[0] != r.a[2]) {
            SlackRow mirror = r;
            std::swap(mirror.a[0], mirror.a[2]);
            std::swap(mirror.m[0], mirror.m[2]);
            rows.push_back(mirror);
        }
    }
    LinearSystem sys;
    for (size_t j = 0; j < rows.size(); ++j) sys.add_var();
    std::vector<Term> total;
    for (size_t j = 0; j < rows.size(); ++j) total.push_back({static_cast<int>(j), 1});
    sys.add_equality(std::move(total), 1);
    for (int i = 0; i < 4; ++i) {
        std::vector<Term> row;
        for (size_t j = 0; j < rows.size(); ++j) row.push_back({static_cast<int>(j), rows[j].a[i]});
        sys.add_equality(std::move(row), a[i]);
    }
    LpResult lp = solve_feasibility(sys);
    if (lp.status != LpStatus::Optimal) throw std::invalid_argument("measures violate the slack polytope");
    std::array<Rational, 4> m = {0, 0, 0, 0};
    for (size_t j = 0; j < rows.size(); ++j)
        for (int i = 0; i < 4; ++i) m[i] += lp.point[j] * rows[j].m[i];
    return m;
}

std::optional<Triple> hall_five_cycle_slack(const IntervalSet& s1, const IntervalSet& s2,
                                            const IntervalSet& s3, const std::array<int, 3>& f) {
    if (f[0] + f[1] + f[2] != 1 || std::any_of(f.begin(), f.end(), [](int x) { return x != 0 && x != 1; }))
        throw std::invalid_argument("slack vector must have exactly one entry equal to 1");
    const std::array<const IntervalSet*, 3> s = {&s1, &s2, &s3};
    for (int i = 0; i < 3; ++i) {
        if (!inside_range(*s[i])) throw std::invalid_argument("set leaves [0,11)");
        if (s[i]->measure() < 7 - f[i]) throw std::invalid_argument("set too small for its slack");
    }
    const IntervalSet full = IntervalSet::full();
    std::array<IntervalSet, 3> t = {s1, s2, s3};
    if (f[1] == 1) {
        const IntervalSet u = s1.unite(s2).unite(s3);
        std::array<IntervalSet, 4> parts = {s1.minus(s2.unite(s3)), full.minus(u), s3.minus(s1.unite(s2)),
                                            s1.intersect(s3).minus(s2)};
        std::array<Rational, 4> a;
        for (int i = 0; i < 4; ++i) a[i] = parts[i].measure();
        std::array<Rational, 4> m;
        try {
            m = slack_allowance(a);
        } catch (const std::invalid_argument&) {
            m = {0, 0, 0, 0};
        }
        for (int i = 0; i < 4; ++i) t[1] = t[1].unite(parts[i].earliest(m[i]));
    } else {
        const int i = f[0] == 1 ? 0 : 2;
        const IntervalSet& own = *s[i];
        IntervalSet outside = full.minus(own.unite(s2));
        IntervalSet m = outside.earliest(std::min(Rational(1), outside.measure()));
        Rational need = Rational(7) - own.unite(m).measure();
        if (sgn(need) > 0) {
            IntervalSet from2 = s2.minus(own);
            m = m.unite(from2.earliest(std::min(need, from2.measure())));
        }
        t[i] = own.unite(m);
    }
    for (const auto& x : t)
        if (x.measure() < 7) return std::nullopt;
    auto phi = hall_five_cycle(t[0], t[1], t[2]);
    if (!phi) return std::nullopt;
    for (int i = 0; i < 3; ++i)
        if ((*phi)[i].minus(*s[i]).measure() > f[i])
            throw std::logic_error("five-cycle slack construction exceeded its allowance");
    return phi;
}

IntervalSet sset_select(const IntervalSet& a1, const IntervalSet& a2, const IntervalSet& b,
                        const IntervalSet& c) {
    for (const auto* s : {&a1, &a2, &b, &c})
        if (!inside_range(*s)) throw std::invalid_argument("set leaves [0,11)");
    if (a1.measure() != 4 || a2.measure() != 4 || b.measure() != 5 || c.measure() != 1)
        throw std::invalid_argument("need |A1| = |A2| = 4, |B| = 5, |C| = 1");
    if (!b.intersect(a1.unite(a2).unite(c)).empty())
        throw std::invalid_argument("B must be disjoint from A1, A2 and C");
    const IntervalSet u = IntervalSet::full().minus(b.unite(c));
    auto widen = [&](const IntervalSet& a) {
        IntervalSet in = a.intersect(u);
        return in.unite(u.minus(in).earliest(Rational(4) - in.measure()));
    };
    const IntervalSet w1 = widen(a1), w2 = widen(a2);
    const IntervalSet both = w1.intersect(w2);
    const Rational t = u.minus(w1.unite(w2)).measure();
    IntervalSet x = u.minus(both).unite(both.earliest(t));
    if (x.measure() != 2 || !x.intersect(b.unite(c)).empty() || x.intersect(a1).measure() > 1 ||
        x.intersect(a2).measure() > 1)
        throw std::logic_error("set selection produced an invalid set");
    return x;
}

// ---------------------------------------------------------------------------------------------
// Averaging over vertex-deleted e-graphs

int girth(const EGraph& g) {
    int best = 0;
    for (int s = 0; s < g.size(); ++s) {
        std::vector<int> dist(g.size(), -1), parent(g.size(), -1);
        std::vector<int> queue = {s};
        dist[s] = 0;
        for (size_t h = 0; h < queue.size(); ++h) {
            int v = queue[h];
            for (int u : g.neighbors(v)) {
                if (dist[u] < 0) {
                    dist[u] = dist[v] + 1;
                    parent[u] = v;
                    queue.push_back(u);
                } else if (parent[v] != u) {
                    int len = dist[u] + dist[v] + 1;
                    if (best == 0 || len < best) best = len;
                }
            }
        }
    }
    return best;
}

namespace {
Mask distance_two(const EGraph& g, int v) {
    Mask near = g.neighbor_mask(v) | bit(v);
    Mask two = 0;
    for (int u : g.neighbors(v)) two |= g.neighbor_mask(u);
    return two & ~near;
}
}  // namespace

EGraph vertex_deleted_egraph(const EGraph& g, int v, const std::vector<int>& keep_nailed) {
    const Mask n2 = distance_two(g, v);
    Mask keep = 0;
    for (int x : keep_nailed) {
        if (!((n2 >> x) & 1u)) throw std::invalid_argument("nail plan names a vertex not at distance two");
        keep |= bit(x);
    }
    const Mask rest = all_vertices(g) & ~(g.neighbor_mask(v) | bit(v));
    EGraph h = induced_sub(g, rest);
    int k = 0;
    for (Mask t = rest; t; t &= t - 1, ++k) {
        int x = std::countr_zero(t);
        h.set_ext(k, ((n2 >> x) & 1u) && !((keep >> x) & 1u) ? 2 : 3);
    }
    return h;
}

CombineResult combine_vertex_deleted(const EGraph& g, const std::vector<std::vector<int>>& nail_plan,
                                     int jobs) {
    const int n = g.size();
    if (!g.three_regular()) throw std::invalid_argument("combine: graph must be 3-regular");
    int gi = girth(g);
    if (gi != 0 && gi < 5) throw std::invalid_argument("combine: girth must be at least 5");
    if (!nail_plan.empty() && static_cast<int>(nail_plan.size()) != n)
        throw std::invalid_argument("combine: nail plan must have one entry per vertex");
    std::vector<int> indegree(n, 0);
    for (const auto& d : nail_plan)
        for (int x : d)
            if (++indegree.at(x) > 1) throw std::invalid_argument("combine: a vertex is kept nailed twice");

    std::vector<std::optional<ColoringWitness>> local(n);
    std::vector<Mask> kept(n);
    parallel_for(static_cast<size_t>(n), jobs, [&](size_t i) {
        int v = static_cast<int>(i);
        EGraph h = vertex_deleted_egraph(g, v, nail_plan.empty() ? std::vector<int>{} : nail_plan[v]);
        kept[v] = all_vertices(g) & ~(g.neighbor_mask(v) | bit(v));
        local[v] = colorability(h).witness;
    });
    CombineResult result;
    for (int v = 0; v < n; ++v)
        if (!local[v]) result.failed.push_back(v);
    if (!result.failed.empty()) return result;

    using Piece = std::pair<Mask, Rational>;
    // Adds vertex x with measure m to the leftmost pieces avoiding `avoid`, splitting as needed.
    auto place = [](std::vector<Piece>& pieces, int x, Mask avoid, Rational m) {
        for (size_t p = 0; sgn(m) > 0 && p < pieces.size(); ++p) {
            if (pieces[p].first & avoid) continue;
            if (pieces[p].second <= m) {
                m -= pieces[p].second;
                pieces[p].first |= bit(x);
            } else {
                Piece rest{pieces[p].first, pieces[p].second - m};
                pieces[p] = {pieces[p].first | bit(x), m};
                pieces.insert(pieces.begin() + static_cast<long>(p) + 1, rest);
                m = 0;
            }
        }
        if (sgn(m) > 0) throw std::logic_error("combine: not enough free measure to extend");
    };
    std::vector<Piece> all;
    const Rational share(1, n);
    for (int v = 0; v < n; ++v) {
        std::vector<Piece> pieces;
        const auto& w = *local[v];
        for (size_t i = 0; i < w.sets.size(); ++i) {
            Mask m = 0;
            int k = 0;
            for (Mask t = kept[v]; t; t &= t - 1, ++k)
                if ((w.sets[i] >> k) & 1u) m |= bit(std::countr_zero(t));
            pieces.emplace_back(m, w.weights[i]);
        }
        for (int u : g.neighbors(v)) place(pieces, u, g.neighbor_mask(u) & ~bit(v), 1);
        place(pieces, v, g.neighbor_mask(v), 8);
        for (auto& p : pieces) all.emplace_back(p.first, p.second * share);
    }
    for (int x = 0; x < n; ++x) {
        Rational have = 0;
        for (size_t p = 0; p < all.size(); ++p) {
            if (!((all[p].first >> x) & 1u)) continue;
            if (have == 4) {
                all[p].first &= ~bit(x);
            } else if (have + all[p].second <= 4) {
                have += all[p].second;
            } else {
                Rational keep = Rational(4) - have;
                Piece rest{all[p].first & ~bit(x), all[p].second - keep};
                all[p].second = keep;
                all.insert(all.begin() + static_cast<long>(p) + 1, rest);
                have = 4;
                ++p;
            }
        }
        if (have != 4) throw std::logic_error("combine: vertex measure below 4 after averaging");
    }
    result.witness = normalize(std::move(all));
    EGraph cubic = g;
    for (int v = 0; v < n; ++v) cubic.set_ext(v, 3);
    if (!check_witness(cubic, *result.witness))
        throw std::logic_error("exact verification failed: averaged witness");
    return result;
}

}  // namespace fraccrit
