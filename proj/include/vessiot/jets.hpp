#pragma once

#include "vessiot/symcore.hpp"

#include <map>
#include <vector>

namespace vessiot {

// How a derivative along an independent coordinate acts on jet variables: as a
// coordinate partial (jets are independent coordinates) or as the formal derivative.
enum class DerivMode { Partial, Total };

RationalExpr total_derivative(const Context& ctx, const RationalExpr& e, std::size_t i);
Polynomial total_derivative(const Context& ctx, const Polynomial& p, std::size_t i);
// d_mu = product of d_i^{mu_i}
RationalExpr total_derivative(const Context& ctx, const RationalExpr& e, const MultiIndex& mu);
RationalExpr coordinate_derivative(const Context& ctx, const RationalExpr& e, Var v, DerivMode mode);

class VectorField {
public:
    VectorField() = default;
    explicit VectorField(std::map<Var, RationalExpr> c);

    const std::map<Var, RationalExpr>& components() const { return c_; }
    RationalExpr component(Var v) const;
    void set(Var v, const RationalExpr& e);
    bool is_zero() const { return c_.empty(); }
    bool equals(const Context& ctx, const VectorField& o) const;

    // theta . e = sum theta^v D_v e
    RationalExpr apply(const Context& ctx, const RationalExpr& e, DerivMode mode = DerivMode::Partial) const;

    VectorField operator+(const VectorField& o) const;
    VectorField operator-(const VectorField& o) const;
    VectorField scaled(const RationalExpr& s) const;

private:
    std::map<Var, RationalExpr> c_;
};

VectorField bracket(const Context& ctx, const VectorField& a, const VectorField& b,
                    DerivMode mode = DerivMode::Partial);

// order-q prolongation; deps lists the dependents to lift (empty = all)
VectorField prolong_field(const Context& ctx, const VectorField& theta, int q, const std::vector<int>& deps = {});

// Section f_{q+1}: (dependent, multi-index) -> expression in the independents.
struct JetSection {
    int order = 0;
    std::map<std::pair<int, std::vector<int>>, RationalExpr> values;

    const RationalExpr& at(int k, const MultiIndex& mu) const;
};

// j_q(f) for f^k given in the independents
JetSection holonomic_section(const Context& ctx, const std::vector<RationalExpr>& f, int q);

struct SpencerComponent {
    int dep;
    MultiIndex mu;
    std::size_t i;
    RationalExpr value;
};
std::vector<SpencerComponent> spencer(const Context& ctx, const JetSection& f);

// Exterior forms over an ordered coordinate list.
class DiffForm {
public:
    DiffForm() = default;
    DiffForm(std::vector<Var> coords, int grade) : coords_(std::move(coords)), grade_(grade) {}
    static DiffForm scalar(std::vector<Var> coords, const RationalExpr& f);
    // sum_j c_j d(coord_j)
    static DiffForm one_form(std::vector<Var> coords, const std::map<Var, RationalExpr>& c);
    static DiffForm differential(const Context& ctx, std::vector<Var> coords, const RationalExpr& f,
                                 DerivMode mode = DerivMode::Total);

    int grade() const { return grade_; }
    const std::vector<Var>& coords() const { return coords_; }
    const std::map<std::vector<int>, RationalExpr>& terms() const { return terms_; }
    // coefficient of d(v1)^...^d(vr) for variables given in any order (sign applied)
    RationalExpr coefficient(const std::vector<Var>& vars) const;
    void add_term(std::vector<int> idx, const RationalExpr& c);
    bool is_zero(const Context& ctx) const;

    DiffForm operator+(const DiffForm& o) const;
    DiffForm operator-(const DiffForm& o) const;
    DiffForm scaled(const RationalExpr& s) const;

private:
    std::vector<Var> coords_;
    int grade_ = 0;
    std::map<std::vector<int>, RationalExpr> terms_;  // strictly increasing positions
};

DiffForm exterior_derivative(const Context& ctx, const DiffForm& f, DerivMode mode = DerivMode::Total);
DiffForm wedge(const DiffForm& a, const DiffForm& b);
DiffForm interior(const Context& ctx, const VectorField& theta, const DiffForm& f);
DiffForm lie_derivative_form(const Context& ctx, const VectorField& theta, const DiffForm& f,
                             DerivMode mode = DerivMode::Total);

}  // namespace vessiot
