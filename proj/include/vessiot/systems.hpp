#pragma once

#include "vessiot/jets.hpp"
#include "vessiot/linalg.hpp"
#include "vessiot/report.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vessiot {

struct Equation {
    RationalExpr residual;       // residual = 0
    std::optional<Var> leading;  // when set, residual = leading - rhs with rhs free of leading jets
    std::string label;
    int source = -1;             // index of the generating equation of the unprolonged system
    MultiIndex nu;               // residual = d_nu(source residual)
};

struct SolvedSystem {
    int order = 0;
    std::vector<std::size_t> ordering;  // independent indices of x^1, ..., x^n
    std::vector<int> unknowns;          // dependent indices; other dependents are given functions
    std::vector<Equation> equations;
    std::vector<RationalExpr> genericity;
    std::vector<RationalExpr> conditions;  // integrability conditions met while re-solving a prolongation

    bool fully_solved() const;
    Bindings leading_bindings() const;
};

struct EquationSpec {
    RationalExpr lhs;
    RationalExpr rhs;
    bool solved = false;  // lhs is the leading jet
    std::string label;
};

// Builds a system; right-hand sides of solved equations are resolved to be free of leading jets.
SolvedSystem make_system(const Context& ctx, int order, std::vector<std::size_t> ordering, std::vector<int> unknowns,
                         const std::vector<EquationSpec>& eqs, std::vector<RationalExpr> genericity = {});

// smallest position c (1-based) in the ordering with mu_{x^c} > 0; 0 for order-0 jets
int jet_class(const Context& ctx, const std::vector<std::size_t>& ordering, Var v);
std::vector<Var> unknown_jets(const Context& ctx, const SolvedSystem& s, int k);
std::vector<Var> unknown_jets_up_to(const Context& ctx, const SolvedSystem& s, int q);
int equation_order(const Context& ctx, const SolvedSystem& s, const Equation& e);

// d(residual)/d(cols) restricted to the system through its leading jets
Matrix jacobian(const Context& ctx, const SolvedSystem& s, const std::vector<Var>& cols);

// Adds d_nu of every equation for |nu| <= r. A fully solved system stays solved: new equations are
// re-solved for their top-order jets and leftover lower-order rows are recorded in `conditions`.
SolvedSystem prolong_system(const Context& ctx, const SolvedSystem& s, int r);

struct SymbolSystem {
    int order = 0;
    std::vector<Var> columns;  // order-q jets of the unknowns (v^k_mu)
    Matrix rows;
};
SymbolSystem symbol_of(const Context& ctx, const SolvedSystem& s);

struct CharacterVector {
    std::vector<int> alpha;  // alpha[c-1] for class c
    std::vector<int> beta;   // equations of class c in an involutive solved form
    bool exact = true;
};
CharacterVector characters(const Context& ctx, const SolvedSystem& s);
std::string to_string(const std::vector<int>& v);

struct Dimension {
    int value = 0;
    bool exact = true;
};
Dimension fiber_dimension(const Context& ctx, const SolvedSystem& s);
Dimension symbol_dimension(const Context& ctx, const SolvedSystem& s);
// fiber_dimension(s) minus the dimension of the projection of its first prolongation
Dimension integrability_conditions(const Context& ctx, const SolvedSystem& s);
// n * #equations minus the rank of the prolonged symbol map
Dimension compatibility_count(const Context& ctx, const SolvedSystem& s);

CheckReport cartan_test(const Context& ctx, const SolvedSystem& s);

struct JanetRow {
    int cls = 0;
    int dependent = -1;  // solved dependent
};
struct JanetBoard {
    std::vector<std::string> columns;  // names of x^1, ..., x^n
    std::vector<JanetRow> rows;        // class descending
    std::string render() const;
};
JanetBoard janet_board(const Context& ctx, const SolvedSystem& s);

CheckReport phs_check(const Context& cx, const SolvedSystem& a, const Context& cy, const SolvedSystem& r);
CheckReport automorphic_criterion(const Context& cx, const SolvedSystem& a, const Context& cy, const SolvedSystem& r);

}  // namespace vessiot
