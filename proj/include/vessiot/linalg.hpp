#pragma once

#include "vessiot/symcore.hpp"

#include <optional>
#include <random>
#include <vector>

namespace vessiot {

using Matrix = std::vector<std::vector<RationalExpr>>;

// Values for every context variable modulo 2^61-1; special pairs satisfy their rewrite relation.
std::vector<std::uint64_t> random_mod_point(const Context& ctx, std::mt19937_64& rng);
std::optional<std::uint64_t> eval_mod(const RationalExpr& e, const std::vector<std::uint64_t>& pt);
std::uint64_t scalar_mod_p(const Scalar& c);

// Rational point for every context variable; special pairs satisfy their rewrite relation.
Point random_rational_point(const Context& ctx, std::mt19937_64& rng, int bound = 50);

// Lower bound for the rank over the function field (best of `tries` random points).
int rank_mod_p(const Context& ctx, const Matrix& m, std::mt19937_64& rng, int tries = 3);
// Pivot columns of a left-to-right elimination at the best of `tries` random points.
std::vector<std::size_t> pivot_columns_mod_p(const Context& ctx, const Matrix& m, std::mt19937_64& rng, int tries = 3);
// Exact rank by fraction-free elimination; nullopt when the size guard is exceeded.
std::optional<int> exact_rank(const Context& ctx, const Matrix& m, std::size_t term_guard = 20000);

struct RankReport {
    int rank = 0;
    bool exact = false;  // false: probabilistic (random-point) value
};
// Exact when the random-point rank is full or symbolic elimination of a small matrix succeeds.
RankReport generic_rank(const Context& ctx, const Matrix& m, std::uint64_t seed = 1);

// Process-wide seed mixed into every random-point computation (0 keeps the built-in seeds).
void set_global_seed(std::uint64_t seed);
std::uint64_t mixed_seed(std::uint64_t local);

RationalExpr determinant(const Context& ctx, const Matrix& m);
Matrix inverse(const Context& ctx, const Matrix& m);
Matrix multiply(const Context& ctx, const Matrix& a, const Matrix& b);

// One solution of A c = b over the rationals (free unknowns set to 0), or nullopt.
std::optional<std::vector<Scalar>> solve_rational(std::vector<std::vector<Scalar>> a, std::vector<Scalar> b);

}  // namespace vessiot
