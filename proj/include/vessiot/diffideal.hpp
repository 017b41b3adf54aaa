#pragma once

#include "vessiot/jets.hpp"
#include "vessiot/report.hpp"

#include <vector>

namespace vessiot {

struct CertificateSearchExceeded : Error {
    explicit CertificateSearchExceeded(const std::string& w) : Error("CertificateSearchExceeded", w) {}
};

struct DiffPolySet {
    ContextPtr ctx;
    std::vector<RationalExpr> generators;
};

// all d_nu a for a in S and |nu| <= r, without duplicates
DiffPolySet prolong_gens(const DiffPolySet& s, int r);
bool same_generators(const DiffPolySet& a, const DiffPolySet& b);

CheckReport syzygy_check(const Context& ctx, const RationalExpr& combination);

// (d_i a)^{2r-1} = sum_j coefficients[j] d_i^j(a^r)
struct RadicalCertificate {
    RationalExpr target;
    std::vector<RationalExpr> coefficients;
    CheckReport report;
};
RadicalCertificate radical_power_membership(const Context& ctx, const RationalExpr& a, std::size_t i, int r);

// rho_r(S) solved for every principal jet in terms of the remaining (parametric) jets, each step linear
// with a constant coefficient; generators that reduce to zero on the way are counted as redundant.
CheckReport residue_ring_check(const DiffPolySet& s, int r, const std::vector<Var>& principal);

}  // namespace vessiot
