#pragma once

#include "vessiot/jets.hpp"
#include "vessiot/report.hpp"

#include <optional>
#include <vector>

namespace vessiot {

struct NotAMultiplier : Error {
    explicit NotAMultiplier(const std::string& w) : Error("NotAMultiplier", w) {}
};
struct DegenerateHamiltonian : Error {
    explicit DegenerateHamiltonian(const std::string& w = "H_p vanishes") : Error("DegenerateHamiltonian", w) {}
};

// Unknown functions are dependents of the context; derivatives are total derivatives along the
// independents. Hypotheses are imposed by solving a relation for one designated jet and substituting.

// Relation solved for `jet` (it must occur linearly); returns the binding jet -> value.
Bindings solve_for(const Context& ctx, const RationalExpr& relation, Var jet);

// Integrating factor: coordinates (x, y) are independents 0 and 1. Checks that the two forms of the
// invariance condition agree and that d_x chi - d_y(omega chi) vanishes once the condition is solved for
// `designated`; chi defaults to 1/(eta - F xi) and omega = -F.
CheckReport lie_condition_equivalence(const Context& ctx, const RationalExpr& xi, const RationalExpr& eta,
                                      const RationalExpr& F, Var designated,
                                      const std::optional<RationalExpr>& chi = std::nullopt);

RationalExpr divergence(const Context& ctx, const RationalExpr& M, const std::vector<RationalExpr>& theta);

// d/dxbar^j((1/Delta) d phi^j/dx^i) for every i, with dxbar expanded through the inverse Jacobian.
CheckReport jacobi_multiplier_identity(const Context& ctx, const std::vector<RationalExpr>& phi);

// Given d_i(M theta^i) = 0, checks that M/Delta is a multiplier of thetabar^j = d_i phi^j theta^i.
CheckReport multiplier_transport(const Context& ctx, const RationalExpr& M, const std::vector<RationalExpr>& theta,
                                 const std::vector<RationalExpr>& phi);

// Coordinates (t, x, v) are independents 0, 1, 2 with v the velocity:
// d_t(L_vv) + d_x(v L_vv) + d_v(L_x - L_tv - v L_xv).
CheckReport hessian_multiplier_identity(const Context& ctx, const RationalExpr& L);

// Coordinates (t, x, z, p) are independents 0..3; X, Z, P (and rho) name dependents over them.
// Reproduces the closure of dz - p dx + H dt = rho (dZ - P dX): the two-form, the wedge step and the
// four-form, whose dt^dx^dz^dp coefficient is reported; ok when every step matches its display.
struct ContactUnknowns {
    RationalExpr X, Z, P;
    std::optional<RationalExpr> rho;
};
CheckReport hj_closure_chain(const Context& ctx, const RationalExpr& H, const ContactUnknowns& u);

// Levi-Civita conditions H_z = 0 and d_t(H_x / H_p) = 0, coordinates as above.
CheckReport separability_conditions(const Context& ctx, const RationalExpr& H);

}  // namespace vessiot
