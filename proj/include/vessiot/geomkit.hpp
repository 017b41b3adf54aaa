#pragma once

#include "vessiot/jets.hpp"
#include "vessiot/linalg.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace vessiot {

struct DegenerateMetric : Error {
    explicit DegenerateMetric(const std::string& w = "det(omega) vanishes") : Error("DegenerateMetric", w) {}
};
struct DegenerateCurve : Error {
    explicit DegenerateCurve(const std::string& w = "omega vanishes") : Error("DegenerateCurve", w) {}
};
struct ZeroCurvatureLocus : Error {
    explicit ZeroCurvatureLocus(const std::string& w = "rho vanishes") : Error("ZeroCurvatureLocus", w) {}
};
struct SingularFrame : Error {
    explicit SingularFrame(const std::string& w = "frame matrix is singular") : Error("SingularFrame", w) {}
};

using Sym2 = std::array<std::array<RationalExpr, 2>, 2>;

// Surfaces y = f(x^1, x^2) in R^3; indices are 0-based (omega[0][1] is omega_12).
struct SurfaceData {
    Sym2 omega;
    std::array<Sym2, 2> gamma;  // gamma[r][i][j] = f_r . f_ij
    Sym2 sigma;                 // det(f_1, f_2, f_ij)
    RationalExpr det_omega, det_sigma, gauss_ratio;
};

// f is given in the first two independents of the context
SurfaceData surface_invariants(const Context& ctx, const std::array<RationalExpr, 3>& f);
RationalExpr gauss_residual(const Context& ctx, const SurfaceData& s);
std::pair<RationalExpr, RationalExpr> codazzi_residual(const Context& ctx, const SurfaceData& s);

// Curves y = f(x) in R^m, m = 2 or 3, x the first independent.
struct CurveData {
    int m = 0;
    RationalExpr omega, gamma, sigma, upsilon;  // m = 2: sigma = y1_x y2_xx - y2_x y1_xx, upsilon = |y_xx|^2
    RationalExpr phi, psi, rho;                 // m = 3 only; sigma = |y_xx|^2, upsilon = (y_x, y_xx, y_xxx)
    bool identities_hold = false;               // gamma = omega'/2, plus phi = gamma' - sigma and psi = sigma'/2 for m = 3
};
CurveData curve_invariants(const Context& ctx, const std::vector<RationalExpr>& f);

struct FrenetSquares {
    RationalExpr kappa2;
    std::optional<RationalExpr> tau;  // m = 3
};
FrenetSquares frenet_squares(const Context& ctx, const CurveData& c);

struct Gauging {
    Matrix A;
    std::vector<RationalExpr> B;
    bool orthogonal = false;
    bool unimodular = false;
};

// Frame matrix of a section: columns (f_x, f_xx, ...) for curves, (f_1, f_2, f_1 ^ f_2) for surfaces in R^3.
Matrix frame_matrix(const Context& ctx, const JetSection& f, int m);
// A = Mbar M^{-1}, B = fbar - A f
Gauging gauging(const Context& ctx, const JetSection& f, const JetSection& fbar, int m);

struct MaurerCartan {
    Matrix P;
    std::vector<RationalExpr> Q;
    bool skew = false;
};
// P = d_i A A^{-1}, Q = d_i B - P B
MaurerCartan maurer_cartan(const Context& ctx, const Gauging& g, std::size_t i = 0);

}  // namespace vessiot
