#include "fraccrit/ratlp.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "fraccrit/audit.hpp"

namespace fraccrit {

namespace {

std::vector<Term> normalize(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> out;
    for (auto& t : terms) {
        if (!out.empty() && out.back().var == t.var)
            out.back().coef += t.coef;
        else
            out.push_back(std::move(t));
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return sgn(t.coef) == 0; }),
              out.end());
    return out;
}

Rational evaluate(const std::vector<Term>& terms, const std::vector<Rational>& x) {
    Rational s = 0;
    for (const auto& t : terms) s += t.coef * x[t.var];
    return s;
}

// Revised simplex on A z = b, z >= 0, b >= 0, with an explicit
// exact basis inverse and Bland's anti-cycling rule.
class Simplex {
public:
    using Column = std::vector<std::pair<int, Rational>>;

    Simplex(int m, std::vector<Column> cols, std::vector<Rational> b, int first_artificial,
            std::vector<int> basis)
        : m_(m), cols_(std::move(cols)), first_art_(first_artificial), basis_(std::move(basis)),
          xb_(std::move(b)) {
        binv_.assign(m_, std::vector<Rational>(m_, 0));
        for (int r = 0; r < m_; ++r) binv_[r][r] = 1;
        is_basic_.assign(cols_.size(), false);
        for (int j : basis_) is_basic_[j] = true;
    }

    // Returns -1 when optimal, otherwise the entering column of an unbounded direction.
    int run(const std::vector<Rational>& cost) {
        for (;;) {
            std::vector<Rational> pi = duals(cost);
            int enter = -1;
            for (int j = 0; j < first_art_; ++j) {
                if (is_basic_[j]) continue;
                Rational d = cost[j];
                for (const auto& [i, a] : cols_[j])
                    if (sgn(pi[i]) != 0) d -= pi[i] * a;
                if (sgn(d) < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return -1;
            std::vector<Rational> u = ftran(enter);
            int leave = -1;
            Rational best;
            for (int r = 0; r < m_; ++r) {
                if (sgn(u[r]) <= 0) continue;
                Rational ratio = xb_[r] / u[r];
                if (leave < 0 || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
                    leave = r;
                    best = ratio;
                }
            }
            if (leave < 0) {
                last_u_ = std::move(u);
                return enter;
            }
            pivot(leave, enter, u);
        }
    }

    std::vector<Rational> duals(const std::vector<Rational>& cost) const {
        std::vector<Rational> pi(m_, 0);
        for (int r = 0; r < m_; ++r) {
            const Rational& c = cost[basis_[r]];
            if (sgn(c) == 0) continue;
            for (int i = 0; i < m_; ++i)
                if (sgn(binv_[r][i]) != 0) pi[i] += c * binv_[r][i];
        }
        return pi;
    }

    std::vector<Rational> ftran(int j) const {
        std::vector<Rational> u(m_, 0);
        for (int r = 0; r < m_; ++r)
            for (const auto& [i, a] : cols_[j])
                if (sgn(binv_[r][i]) != 0) u[r] += binv_[r][i] * a;
        return u;
    }

    void pivot(int leave, int enter, const std::vector<Rational>& u) {
        Rational piv = u[leave];
        for (auto& v : binv_[leave]) v /= piv;
        xb_[leave] /= piv;
        for (int r = 0; r < m_; ++r) {
            if (r == leave || sgn(u[r]) == 0) continue;
            const Rational f = u[r];
            for (int i = 0; i < m_; ++i)
                if (sgn(binv_[leave][i]) != 0) binv_[r][i] -= f * binv_[leave][i];
            xb_[r] -= f * xb_[leave];
        }
        is_basic_[basis_[leave]] = false;
        basis_[leave] = enter;
        is_basic_[enter] = true;
    }

    // Pivot zero-valued artificials out of the basis where some real column allows it.
    void drive_out_artificials() {
        for (int r = 0; r < m_; ++r) {
            if (basis_[r] < first_art_) continue;
            for (int j = 0; j < first_art_; ++j) {
                if (is_basic_[j]) continue;
                Rational ur = 0;
                for (const auto& [i, a] : cols_[j]) ur += binv_[r][i] * a;
                if (sgn(ur) != 0) {
                    pivot(r, j, ftran(j));
                    break;
                }
            }
        }
    }

    std::vector<Rational> primal() const {
        std::vector<Rational> z(cols_.size(), 0);
        for (int r = 0; r < m_; ++r) z[basis_[r]] = xb_[r];
        return z;
    }

    const std::vector<Rational>& last_u() const { return last_u_; }
    const std::vector<int>& basis() const { return basis_; }

private:
    int m_;
    std::vector<Column> cols_;
    int first_art_;
    std::vector<int> basis_;
    std::vector<Rational> xb_;
    std::vector<std::vector<Rational>> binv_;
    std::vector<bool> is_basic_;
    std::vector<Rational> last_u_;
};

struct StandardForm {
    int m = 0;
    std::vector<Simplex::Column> cols;
    std::vector<Rational> b;
    std::vector<int> row_sign;
    std::vector<std::pair<int, int>> origin;  // structural column -> (var, +-1)
    int num_structural = 0;
    int first_artificial = 0;
    std::vector<int> basis;
};

StandardForm standardize(const LinearSystem& sys) {
    StandardForm sf;
    const auto& eqs = sys.equalities();
    const auto& ins = sys.inequalities();
    sf.m = static_cast<int>(eqs.size() + ins.size());
    auto row = [&](int r) -> const Row& {
        return r < static_cast<int>(eqs.size()) ? eqs[r] : ins[r - eqs.size()];
    };
    sf.b.resize(sf.m);
    sf.row_sign.resize(sf.m);
    for (int r = 0; r < sf.m; ++r) {
        sf.row_sign[r] = sgn(row(r).rhs) < 0 ? -1 : 1;
        sf.b[r] = row(r).rhs * sf.row_sign[r];
    }
    std::vector<std::vector<std::pair<int, Rational>>> var_cols(sys.num_vars());
    for (int r = 0; r < sf.m; ++r)
        for (const auto& t : row(r).terms) var_cols[t.var].emplace_back(r, t.coef * sf.row_sign[r]);
    for (int v = 0; v < sys.num_vars(); ++v) {
        sf.cols.push_back(var_cols[v]);
        sf.origin.emplace_back(v, 1);
        if (!sys.is_nonneg(v)) {
            Simplex::Column neg = var_cols[v];
            for (auto& e : neg) e.second = -e.second;
            sf.cols.push_back(std::move(neg));
            sf.origin.emplace_back(v, -1);
        }
    }
    sf.num_structural = static_cast<int>(sf.cols.size());
    sf.basis.assign(sf.m, -1);
    for (int r = static_cast<int>(eqs.size()); r < sf.m; ++r) {
        int j = static_cast<int>(sf.cols.size());
        sf.cols.push_back({{r, Rational(sf.row_sign[r])}});
        if (sf.row_sign[r] > 0) sf.basis[r] = j;
    }
    sf.first_artificial = static_cast<int>(sf.cols.size());
    for (int r = 0; r < sf.m; ++r) {
        if (sf.basis[r] >= 0) continue;
        sf.basis[r] = static_cast<int>(sf.cols.size());
        sf.cols.push_back({{r, Rational(1)}});
    }
    return sf;
}

std::vector<Rational> to_original(const StandardForm& sf, const std::vector<Rational>& z, int nvars) {
    std::vector<Rational> x(nvars, 0);
    for (int j = 0; j < sf.num_structural; ++j)
        if (sgn(z[j]) != 0) x[sf.origin[j].first] += z[j] * sf.origin[j].second;
    return x;
}

void require(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("exact verification failed: ") + what);
}

LpResult run(const LinearSystem& sys, const std::vector<Rational>* objective, Sense sense) {
    StandardForm sf = standardize(sys);
    const int ncols = static_cast<int>(sf.cols.size());
    Simplex sx(sf.m, sf.cols, sf.b, sf.first_artificial, sf.basis);

    std::vector<Rational> phase1(ncols, 0);
    for (int j = sf.first_artificial; j < ncols; ++j) phase1[j] = 1;
    sx.run(phase1);
    std::vector<Rational> z = sx.primal();
    Rational infeas = 0;
    for (int j = sf.first_artificial; j < ncols; ++j) infeas += z[j];

    LpResult res;
    if (sgn(infeas) > 0) {
        std::vector<Rational> pi = sx.duals(phase1);
        const size_t ne = sys.equalities().size();
        res.status = LpStatus::Infeasible;
        res.certificate.eq.resize(ne);
        res.certificate.ineq.resize(sys.inequalities().size());
        for (int r = 0; r < sf.m; ++r) {
            Rational y = -pi[r] * sf.row_sign[r];
            if (r < static_cast<int>(ne))
                res.certificate.eq[r] = y;
            else
                res.certificate.ineq[r - ne] = y;
        }
        bool ok = verify_certificate(sys, res.certificate);
        audit::record_certificate(ok);
        require(ok, "infeasibility certificate");
        return res;
    }
    sx.drive_out_artificials();

    if (objective) {
        if (static_cast<int>(objective->size()) != sys.num_vars())
            throw std::invalid_argument("objective length does not match variable count");
        std::vector<Rational> cost(ncols, 0);
        for (int j = 0; j < sf.num_structural; ++j) {
            cost[j] = (*objective)[sf.origin[j].first] * sf.origin[j].second;
            if (sense == Sense::Maximize) cost[j] = -cost[j];
        }
        int enter = sx.run(cost);
        if (enter >= 0) {
            std::vector<Rational> dz(ncols, 0);
            dz[enter] = 1;
            const auto& u = sx.last_u();
            for (int r = 0; r < sf.m; ++r) dz[sx.basis()[r]] -= u[r];
            res.status = LpStatus::Unbounded;
            res.ray = to_original(sf, dz, sys.num_vars());
            bool ok = verify_ray(sys, *objective, sense, res.ray);
            audit::record_ray(ok);
            require(ok, "unbounded ray");
        } else {
            res.status = LpStatus::Optimal;
            std::vector<Rational> pi = sx.duals(cost);
            const size_t ne = sys.equalities().size();
            res.dual.eq.resize(ne);
            res.dual.ineq.resize(sys.inequalities().size());
            for (int r = 0; r < sf.m; ++r) {
                Rational y = pi[r] * sf.row_sign[r];
                if (sense == Sense::Maximize) y = -y;
                if (r < static_cast<int>(ne))
                    res.dual.eq[r] = y;
                else
                    res.dual.ineq[r - ne] = y;
            }
        }
    } else {
        res.status = LpStatus::Optimal;
    }
    res.point = to_original(sf, sx.primal(), sys.num_vars());
    bool ok = sys.satisfied_by(res.point);
    audit::record_point(ok);
    require(ok, "primal point");
    if (objective) {
        res.value = 0;
        for (int v = 0; v < sys.num_vars(); ++v) res.value += (*objective)[v] * res.point[v];
        if (res.status == LpStatus::Optimal) {
            bool dual_ok = verify_dual(sys, *objective, sense, res.dual, res.value);
            audit::record_certificate(dual_ok);
            require(dual_ok, "optimality certificate");
        }
    }
    return res;
}

}  // namespace

int LinearSystem::add_var(bool nonneg, std::string name) {
    int id = num_vars();
    nonneg_.push_back(nonneg);
    names_.push_back(name.empty() ? "x" + std::to_string(id) : std::move(name));
    return id;
}

void LinearSystem::check_terms(const std::vector<Term>& terms) const {
    for (const auto& t : terms)
        if (t.var < 0 || t.var >= num_vars()) throw std::out_of_range("term references unknown variable");
}

void LinearSystem::add_equality(std::vector<Term> terms, Rational rhs) {
    check_terms(terms);
    eqs_.push_back({normalize(std::move(terms)), std::move(rhs)});
}

void LinearSystem::add_inequality(std::vector<Term> terms, Rational rhs) {
    check_terms(terms);
    ins_.push_back({normalize(std::move(terms)), std::move(rhs)});
}

void LinearSystem::add_lower_bound(std::vector<Term> terms, Rational rhs) {
    for (auto& t : terms) t.coef = -t.coef;
    add_inequality(std::move(terms), -rhs);
}

void LinearSystem::set_free(int v) { nonneg_.at(v) = false; }

bool LinearSystem::satisfied_by(const std::vector<Rational>& x) const {
    if (static_cast<int>(x.size()) != num_vars()) return false;
    for (int v = 0; v < num_vars(); ++v)
        if (nonneg_[v] && sgn(x[v]) < 0) return false;
    for (const auto& r : eqs_)
        if (evaluate(r.terms, x) != r.rhs) return false;
    for (const auto& r : ins_)
        if (evaluate(r.terms, x) > r.rhs) return false;
    return true;
}

bool verify_certificate(const LinearSystem& sys, const Certificate& cert) {
    if (cert.eq.size() != sys.equalities().size() || cert.ineq.size() != sys.inequalities().size())
        return false;
    std::vector<Rational> comb(sys.num_vars(), 0);
    Rational rhs = 0;
    for (size_t i = 0; i < cert.eq.size(); ++i) {
        const Row& r = sys.equalities()[i];
        for (const auto& t : r.terms) comb[t.var] += cert.eq[i] * t.coef;
        rhs += cert.eq[i] * r.rhs;
    }
    for (size_t i = 0; i < cert.ineq.size(); ++i) {
        if (sgn(cert.ineq[i]) < 0) return false;
        const Row& r = sys.inequalities()[i];
        for (const auto& t : r.terms) comb[t.var] += cert.ineq[i] * t.coef;
        rhs += cert.ineq[i] * r.rhs;
    }
    for (int v = 0; v < sys.num_vars(); ++v) {
        if (sys.is_nonneg(v) ? sgn(comb[v]) < 0 : sgn(comb[v]) != 0) return false;
    }
    return sgn(rhs) < 0;
}

bool verify_dual(const LinearSystem& sys, const std::vector<Rational>& objective, Sense sense,
                 const Certificate& dual, const Rational& value) {
    if (dual.eq.size() != sys.equalities().size() || dual.ineq.size() != sys.inequalities().size() ||
        static_cast<int>(objective.size()) != sys.num_vars())
        return false;
    const int dir = sense == Sense::Minimize ? 1 : -1;
    std::vector<Rational> reduced = objective;
    Rational bound = 0;
    for (size_t i = 0; i < dual.eq.size(); ++i) {
        const Row& r = sys.equalities()[i];
        for (const auto& t : r.terms) reduced[t.var] -= dual.eq[i] * t.coef;
        bound += dual.eq[i] * r.rhs;
    }
    for (size_t i = 0; i < dual.ineq.size(); ++i) {
        if (sgn(dual.ineq[i]) * dir > 0) return false;
        const Row& r = sys.inequalities()[i];
        for (const auto& t : r.terms) reduced[t.var] -= dual.ineq[i] * t.coef;
        bound += dual.ineq[i] * r.rhs;
    }
    for (int v = 0; v < sys.num_vars(); ++v) {
        if (sys.is_nonneg(v) ? sgn(reduced[v]) * dir < 0 : sgn(reduced[v]) != 0) return false;
    }
    return bound == value;
}

bool verify_ray(const LinearSystem& sys, const std::vector<Rational>& objective, Sense sense,
                const std::vector<Rational>& ray) {
    if (static_cast<int>(ray.size()) != sys.num_vars()) return false;
    for (int v = 0; v < sys.num_vars(); ++v)
        if (sys.is_nonneg(v) && sgn(ray[v]) < 0) return false;
    for (const auto& r : sys.equalities())
        if (sgn(evaluate(r.terms, ray)) != 0) return false;
    for (const auto& r : sys.inequalities())
        if (sgn(evaluate(r.terms, ray)) > 0) return false;
    Rational gain = 0;
    for (int v = 0; v < sys.num_vars(); ++v) gain += objective[v] * ray[v];
    return sense == Sense::Minimize ? sgn(gain) < 0 : sgn(gain) > 0;
}

LpResult solve_feasibility(const LinearSystem& sys) { return run(sys, nullptr, Sense::Minimize); }

LpResult solve(const LinearSystem& sys, const std::vector<Rational>& objective, Sense sense) {
    return run(sys, &objective, sense);
}

std::string dump(const LinearSystem& sys) {
    std::ostringstream out;
    out << "vars " << sys.num_vars() << "\n";
    bool any_free = false;
    for (int v = 0; v < sys.num_vars(); ++v) {
        if (sys.is_nonneg(v)) continue;
        out << (any_free ? " " : "free ") << v;
        any_free = true;
    }
    if (any_free) out << "\n";
    auto emit = [&](const char* kind, const Row& r, const char* op) {
        out << kind;
        for (const auto& t : r.terms) out << " " << to_string(t.coef) << "*x" << t.var;
        out << " " << op << " " << to_string(r.rhs) << "\n";
    };
    for (const auto& r : sys.equalities()) emit("eq", r, "=");
    for (const auto& r : sys.inequalities()) emit("le", r, "<=");
    return out.str();
}

LinearSystem parse_system(std::string_view text) {
    LinearSystem sys;
    std::istringstream in{std::string(text)};
    std::string line;
    bool have_vars = false;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument("line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        if (kind == "vars") {
            int n = -1;
            if (have_vars || !(ls >> n) || n < 0) fail("bad vars line");
            for (int i = 0; i < n; ++i) sys.add_var(true);
            have_vars = true;
            continue;
        }
        if (!have_vars) fail("vars line must come first");
        if (kind == "free") {
            int v;
            while (ls >> v) {
                if (v < 0 || v >= sys.num_vars()) fail("free index out of range");
                sys.set_free(v);
            }
            continue;
        }
        if (kind != "eq" && kind != "le" && kind != "ge") fail("unknown row kind '" + kind + "'");
        std::vector<Term> terms;
        std::string tok;
        std::string op;
        while (ls >> tok) {
            if (tok == "=" || tok == "<=" || tok == ">=") {
                op = tok;
                break;
            }
            auto star = tok.find("*x");
            if (star == std::string::npos) fail("expected coef*xN, got '" + tok + "'");
            Rational c;
            int v = -1;
            try {
                c = parse_rational(tok.substr(0, star));
                v = std::stoi(tok.substr(star + 2));
            } catch (const std::exception&) {
                fail("bad term '" + tok + "'");
            }
            if (v < 0 || v >= sys.num_vars()) fail("variable out of range in '" + tok + "'");
            terms.push_back({v, c});
        }
        std::string rhs_tok;
        if (op.empty() || !(ls >> rhs_tok)) fail("missing relation or right-hand side");
        const std::string expected = kind == "eq" ? "=" : kind == "le" ? "<=" : ">=";
        if (op != expected) fail("relation '" + op + "' does not match row kind '" + kind + "'");
        Rational rhs;
        try {
            rhs = parse_rational(rhs_tok);
        } catch (const std::exception&) {
            fail("bad right-hand side '" + rhs_tok + "'");
        }
        if (kind == "eq")
            sys.add_equality(std::move(terms), rhs);
        else if (kind == "le")
            sys.add_inequality(std::move(terms), rhs);
        else
            sys.add_lower_bound(std::move(terms), rhs);
    }
    if (!have_vars) throw std::invalid_argument("empty linear system");
    return sys;
}

}  // namespace fraccrit
