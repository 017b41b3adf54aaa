#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vessiot {

using Scalar = mpq_class;

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

struct DivisionByZero : Error {
    explicit DivisionByZero(const std::string& w = "division by zero") : Error("DivisionByZero", w) {}
};
struct DenominatorVanishes : Error {
    explicit DenominatorVanishes(const std::string& w = "denominator vanishes at point")
        : Error("DenominatorVanishes", w) {}
};
struct UnknownVariable : Error {
    explicit UnknownVariable(const std::string& w) : Error("UnknownVariable", w) {}
};
struct CyclicBinding : Error {
    explicit CyclicBinding(const std::string& w) : Error("CyclicBinding", w) {}
};
struct OrderOverflow : Error {
    explicit OrderOverflow(const std::string& w) : Error("OrderOverflow", w) {}
};
struct SyntaxError : Error {
    SyntaxError(const std::string& w, std::size_t pos) : Error("SyntaxError", w), pos(pos) {}
    std::size_t pos;
};

enum class VarKind : std::uint8_t { Independent = 0, Parameter = 1, Special = 2, Jet = 3 };

// Exponent vector over the independents of a context.
struct MultiIndex {
    std::vector<int> e;

    MultiIndex() = default;
    explicit MultiIndex(std::size_t n) : e(n, 0) {}
    explicit MultiIndex(std::vector<int> v) : e(std::move(v)) {}

    int order() const {
        int s = 0;
        for (int x : e) s += x;
        return s;
    }
    std::size_t size() const { return e.size(); }
    MultiIndex bumped(std::size_t i, int by = 1) const {
        MultiIndex r = *this;
        r.e[i] += by;
        return r;
    }
    bool operator==(const MultiIndex&) const = default;
};

struct VariableId {
    VarKind kind = VarKind::Independent;
    int index = 0;  // independent/parameter/special index, or dependent index for jets
    MultiIndex mu;  // jets only

    bool operator==(const VariableId&) const = default;
};

// Canonical global order: independents < parameters < specials < jets; jets by
// (dependent, |mu|, lexicographic mu).
bool variable_less(const VariableId& a, const VariableId& b);

using Var = std::uint32_t;

struct Monomial {
    std::vector<std::pair<Var, std::uint32_t>> f;  // ascending var, positive exponents
    std::uint32_t deg = 0;

    bool is_one() const { return f.empty(); }
    std::uint32_t exponent(Var v) const;
    bool operator==(const Monomial& o) const { return deg == o.deg && f == o.f; }
};

Monomial mono_mul(const Monomial& a, const Monomial& b);
bool mono_divides(const Monomial& a, const Monomial& b);
Monomial mono_div(const Monomial& a, const Monomial& b);
Monomial mono_var(Var v, std::uint32_t e = 1);
// grevlex: +1 if a > b, -1 if a < b, 0 if equal
int grevlex(const Monomial& a, const Monomial& b);

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const;
};

struct Term {
    Monomial m;
    Scalar c;
};

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(const Scalar& c);
    static Polynomial variable(Var v);
    static Polynomial from_terms(std::vector<Term> terms);  // combines and sorts

    const std::vector<Term>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].m.is_one()); }
    Scalar constant_value() const;
    const Term& lead() const { return t_.front(); }
    std::size_t size() const { return t_.size(); }

    Polynomial operator-() const;
    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial scaled(const Scalar& c) const;
    Polynomial times_monomial(const Monomial& m, const Scalar& c) const;
    Polynomial pow(unsigned e) const;
    bool operator==(const Polynomial& o) const;
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    std::vector<Var> variables() const;
    bool contains(Var v) const;
    std::uint32_t degree_in(Var v) const;
    std::uint32_t total_degree() const;
    // coefficients with respect to v, index = power of v
    std::vector<Polynomial> coefficients_in(Var v) const;
    Polynomial partial(Var v) const;
    // exact division; nullopt if not divisible
    std::optional<Polynomial> divide_exact(const Polynomial& d) const;

private:
    std::vector<Term> t_;  // descending grevlex, no zero coefficients
    friend Polynomial poly_from_sorted(std::vector<Term>);
};

Polynomial poly_from_sorted(std::vector<Term> terms);

Polynomial poly_gcd(const Polynomial& a, const Polynomial& b);
// scale to integer coefficients with gcd 1 and positive leading coefficient; returns factor used
Polynomial primitive_integer(const Polynomial& p, Scalar* factor = nullptr);

class RationalExpr {
public:
    RationalExpr() : den_(Scalar(1)) {}
    RationalExpr(const Scalar& c) : num_(c), den_(Scalar(1)) {}
    RationalExpr(long c) : num_(Scalar(c)), den_(Scalar(1)) {}
    RationalExpr(const Polynomial& p) : num_(p), den_(Scalar(1)) {}
    static RationalExpr make(const Polynomial& num, const Polynomial& den);
    static RationalExpr variable(Var v) { return RationalExpr(Polynomial::variable(v)); }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Scalar constant_value() const;

    RationalExpr operator-() const;
    RationalExpr operator+(const RationalExpr& o) const;
    RationalExpr operator-(const RationalExpr& o) const;
    RationalExpr operator*(const RationalExpr& o) const;
    RationalExpr operator/(const RationalExpr& o) const;
    RationalExpr& operator+=(const RationalExpr& o) { return *this = *this + o; }
    RationalExpr& operator-=(const RationalExpr& o) { return *this = *this - o; }
    RationalExpr& operator*=(const RationalExpr& o) { return *this = *this * o; }
    RationalExpr pow(int e) const;
    RationalExpr inverse() const;
    bool operator==(const RationalExpr& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RationalExpr& o) const { return !(*this == o); }

    std::vector<Var> variables() const;
    bool contains(Var v) const { return num_.contains(v) || den_.contains(v); }

private:
    Polynomial num_, den_;
};

struct RewriteRule {
    Monomial pattern;
    Polynomial replacement;
};

struct SpecialDecl {
    std::string name;
    std::string base_name;
    int base = -1;           // independent index
    std::string derivative;  // expression text in the specials
    std::string partner;     // special sharing the rewrite relation
};

struct DependentDecl {
    std::string name;
    std::vector<int> base;  // independent indices
};

// Registry of all variables of a problem; immutable once built.
class Context {
public:
    struct Builder {
        std::vector<std::string> independents;
        std::vector<std::string> parameters;
        std::vector<SpecialDecl> specials;
        std::vector<std::pair<std::string, std::string>> rules;  // pattern text, replacement text
        std::vector<std::pair<std::string, std::vector<std::string>>> dependents;
        int max_order = 2;

        Builder& independent(const std::string& n) { independents.push_back(n); return *this; }
        Builder& parameter(const std::string& n) { parameters.push_back(n); return *this; }
        Builder& dependent(const std::string& n, std::vector<std::string> base) {
            dependents.emplace_back(n, std::move(base));
            return *this;
        }
        // (ch, sh) with d ch = sh, d sh = ch and ch^2 -> 1 + sh^2
        Builder& hyperbolic(const std::string& base, const std::string& c = "ch", const std::string& s = "sh");
        // (cos, sin) with d cos = -sin, d sin = cos and cos^2 -> 1 - sin^2
        Builder& trigonometric(const std::string& base, const std::string& c = "cos", const std::string& s = "sin");
        Builder& order(int q) { max_order = q; return *this; }
        std::shared_ptr<const Context> build() const;
    };

    std::size_t n() const { return independents_.size(); }
    std::size_t num_vars() const { return ids_.size(); }
    int max_order() const { return max_order_; }
    const std::vector<std::string>& independents() const { return independents_; }
    const std::vector<std::string>& parameters() const { return parameters_; }
    const std::vector<SpecialDecl>& specials() const { return specials_; }
    const std::vector<DependentDecl>& dependents() const { return dependents_; }
    const std::vector<RewriteRule>& rules() const { return rules_; }

    const VariableId& id(Var v) const { return ids_.at(v); }
    VarKind kind(Var v) const { return ids_.at(v).kind; }
    bool is_jet(Var v) const { return ids_.at(v).kind == VarKind::Jet; }
    int jet_order(Var v) const { return ids_.at(v).mu.order(); }
    std::optional<Var> find(const VariableId& id) const;
    Var code(const VariableId& id) const;  // throws UnknownVariable
    Var independent(std::size_t i) const { return static_cast<Var>(i); }
    Var parameter(std::size_t i) const { return static_cast<Var>(n() + i); }
    Var special(std::size_t i) const { return static_cast<Var>(n() + parameters_.size() + i); }
    std::optional<Var> jet(int dep, const MultiIndex& mu) const;
    // jet obtained by bumping direction i; nullopt when i is outside the dependent's base,
    // OrderOverflow past max_order; v must be a jet
    std::optional<Var> bump(Var v, std::size_t i) const;
    Var jet_or_throw(int dep, const MultiIndex& mu) const;
    std::optional<int> independent_index(const std::string& name) const;
    std::optional<int> dependent_index(const std::string& name) const;
    bool in_base(int dep, int i) const;
    std::optional<Var> lookup(const std::string& name) const;  // non-jet names and order-0 jets
    // d/dx_i of a special symbol (polynomial in specials); nullopt if not based on x_i
    const std::optional<Polynomial>& special_derivative(std::size_t special_index) const {
        return special_derivs_.at(special_index);
    }
    std::string name(Var v) const;
    // all jets of dependent dep with |mu| == k
    std::vector<Var> jets_of_order(int dep, int k) const;
    std::vector<MultiIndex> multi_indices(int dep, int k) const;

private:
    std::vector<std::string> independents_, parameters_;
    std::vector<SpecialDecl> specials_;
    std::vector<DependentDecl> dependents_;
    std::vector<RewriteRule> rules_;
    std::vector<std::optional<Polynomial>> special_derivs_;
    std::vector<VariableId> ids_;
    std::map<std::vector<int>, Var> jet_index_;  // key: dep, mu...
    std::vector<std::int64_t> bump_;             // jets: code, -1 outside base, -2 overflow
    std::unordered_map<std::string, Var> names_;
    int max_order_ = 0;
};

using ContextPtr = std::shared_ptr<const Context>;

// Expression trees for normalize()
struct RawExpr {
    enum class Op { Num, Var, Expr, Add, Sub, Mul, Div, Pow, Neg } op = Op::Num;
    Scalar value;
    Var var = 0;
    int exponent = 0;
    RationalExpr expr;
    std::vector<std::shared_ptr<RawExpr>> args;
};
using RawExprPtr = std::shared_ptr<RawExpr>;

RationalExpr normalize(const RawExpr& raw);
RawExprPtr parse_raw(const Context& ctx, const std::string& text,
                     const std::function<std::optional<RationalExpr>(const std::string&)>& resolve = {});
RationalExpr parse(const Context& ctx, const std::string& text,
                   const std::function<std::optional<RationalExpr>(const std::string&)>& resolve = {});

using Bindings = std::map<Var, RationalExpr>;
RationalExpr substitute(const RationalExpr& e, const Bindings& b);
Polynomial substitute_poly(const Polynomial& p, const std::map<Var, Polynomial>& b);

// partial derivative treating every variable as a coordinate; specials follow
// their derivative table when v is their base independent
RationalExpr partial(const Context& ctx, const RationalExpr& e, Var v);
// derivation defined by its values on variables (absent = 0)
Polynomial apply_derivation(const Polynomial& p, const std::function<const Polynomial*(Var)>& dv);
RationalExpr apply_derivation(const RationalExpr& e, const std::function<const Polynomial*(Var)>& dv);

Polynomial reduce_poly(const Polynomial& p, const std::vector<RewriteRule>& rules);
RationalExpr reduce(const RationalExpr& e, const std::vector<RewriteRule>& rules);
inline RationalExpr reduce(const Context& ctx, const RationalExpr& e) { return reduce(e, ctx.rules()); }
// zero test modulo the context's rewrite relations
bool is_zero(const Context& ctx, const RationalExpr& e);
inline bool is_zero(const RationalExpr& e) { return e.is_zero(); }

using Point = std::map<Var, Scalar>;
Scalar eval_point(const RationalExpr& e, const Point& p);
Scalar eval_poly(const Polynomial& p, const Point& pt);

std::string to_string(const Context& ctx, const Polynomial& p);
std::string to_string(const Context& ctx, const RationalExpr& e);
std::string scalar_string(const Scalar& s);

}  // namespace vessiot
