#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fraccrit/rational.hpp"

namespace fraccrit {

struct Term {
    int var;
    Rational coef;
};

struct Row {
    std::vector<Term> terms;
    Rational rhs;
};

// Exact linear system over Q:
//   equalities   sum coef*x = rhs
//   inequalities sum coef*x <= rhs
// Each variable is either nonnegative or free.
class LinearSystem {
public:
    int add_var(bool nonneg = true, std::string name = {});
    void set_free(int v);
    void add_equality(std::vector<Term> terms, Rational rhs);
    void add_inequality(std::vector<Term> terms, Rational rhs);  // <=
    void add_lower_bound(std::vector<Term> terms, Rational rhs);  // >=, stored negated

    int num_vars() const { return static_cast<int>(nonneg_.size()); }
    bool is_nonneg(int v) const { return nonneg_[v]; }
    const std::string& name(int v) const { return names_[v]; }
    const std::vector<Row>& equalities() const { return eqs_; }
    const std::vector<Row>& inequalities() const { return ins_; }

    // True when the point satisfies every row and sign constraint exactly.
    bool satisfied_by(const std::vector<Rational>& x) const;

private:
    void check_terms(const std::vector<Term>& terms) const;

    std::vector<bool> nonneg_;
    std::vector<std::string> names_;
    std::vector<Row> eqs_;
    std::vector<Row> ins_;
};

// Farkas multipliers: eq[i] for equality i (any sign), ineq[j] >= 0 for inequality j.
// Valid when the combination has zero coefficient on free variables, nonnegative
// coefficient on nonnegative variables, and negative right-hand side.
struct Certificate {
    std::vector<Rational> eq;
    std::vector<Rational> ineq;
};

bool verify_certificate(const LinearSystem& sys, const Certificate& cert);

enum class Sense { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<Rational> point;  // feasible point (Optimal / Unbounded)
    Rational value;               // objective at point (Optimal)
    Certificate certificate;      // Infeasible
    Certificate dual;             // Optimal with an objective: multipliers proving optimality
    std::vector<Rational> ray;    // Unbounded: feasible direction improving the objective
};

// Feasibility only; Optimal means a point was found.
LpResult solve_feasibility(const LinearSystem& sys);
LpResult solve(const LinearSystem& sys, const std::vector<Rational>& objective, Sense sense);

// Dual multipliers y certify optimality of value:
//   Minimize: c - yA >= 0 on nonneg vars, = 0 on free vars, y_ineq <= 0, y.b = value
//   Maximize: c - yA <= 0 on nonneg vars, = 0 on free vars, y_ineq >= 0, y.b = value
bool verify_dual(const LinearSystem& sys, const std::vector<Rational>& objective, Sense sense,
                 const Certificate& dual, const Rational& value);

bool verify_ray(const LinearSystem& sys, const std::vector<Rational>& objective, Sense sense,
                const std::vector<Rational>& ray);

// Line-oriented text form, one row per line:
//   vars N
//   free i j ...
//   eq 1*x0 -3/2*x4 = 7
//   le 1*x1 <= 2
//   ge 1*x2 >= 0
std::string dump(const LinearSystem& sys);
LinearSystem parse_system(std::string_view text);

}  // namespace fraccrit
