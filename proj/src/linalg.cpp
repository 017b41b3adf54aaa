#include "vessiot/linalg.hpp"

#include <algorithm>
#include <atomic>

namespace vessiot {

namespace {

constexpr std::uint64_t kP = (1ull << 61) - 1;
constexpr std::size_t kExactRankCells = 600;

std::uint64_t mulm(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % kP);
}
std::uint64_t addm(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    return s >= kP ? s - kP : s;
}
std::uint64_t subm(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kP - b; }
std::uint64_t powm(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mulm(r, a);
        a = mulm(a, a);
        e >>= 1;
    }
    return r;
}
std::uint64_t invm(std::uint64_t a) { return powm(a, kP - 2); }

std::uint64_t eval_poly_mod(const Polynomial& p, const std::vector<std::uint64_t>& pt) {
    std::uint64_t s = 0;
    for (const auto& t : p.terms()) {
        std::uint64_t c = scalar_mod_p(t.c);
        for (const auto& [v, e] : t.m.f) c = mulm(c, powm(pt.at(v), e));
        s = addm(s, c);
    }
    return s;
}

// sign of the s^2 coefficient in the replacement of rule c^2 -> 1 +- s^2
int relation_sign(const Context& ctx, std::size_t special) {
    const auto& s = ctx.specials()[special];
    Var c = ctx.special(special);
    auto partner = ctx.lookup(s.partner);
    for (const auto& r : ctx.rules()) {
        if (r.pattern.exponent(c) == 2 && partner) {
            for (const auto& t : r.replacement.terms())
                if (t.m.exponent(*partner) == 2) return sgn(t.c);
        }
    }
    return 0;
}

}  // namespace

std::uint64_t scalar_mod_p(const Scalar& c) {
    std::uint64_t n = mpz_fdiv_ui(c.get_num_mpz_t(), kP);
    std::uint64_t d = mpz_fdiv_ui(c.get_den_mpz_t(), kP);
    return mulm(n, invm(d));
}

std::vector<std::uint64_t> random_mod_point(const Context& ctx, std::mt19937_64& rng) {
    std::vector<std::uint64_t> pt(ctx.num_vars());
    for (auto& v : pt) v = rng() % kP;
    const std::uint64_t half = invm(2);
    for (std::size_t i = 0; i < ctx.specials().size(); ++i) {
        int sg = relation_sign(ctx, i);
        if (sg == 0) continue;
        // the special carrying the rule (c) and its partner (s) share one parameter t
        Var c = ctx.special(i);
        Var s = *ctx.lookup(ctx.specials()[i].partner);
        std::uint64_t t = rng() % (kP - 2) + 2;
        std::uint64_t it = invm(t);
        if (sg > 0) {  // c^2 - s^2 = 1
            pt[c] = mulm(addm(t, it), half);
            pt[s] = mulm(subm(t, it), half);
        } else {  // c^2 + s^2 = 1
            std::uint64_t t2 = mulm(t, t);
            std::uint64_t d = invm(addm(1, t2));
            pt[c] = mulm(subm(1, t2), d);
            pt[s] = mulm(mulm(2, t), d);
        }
    }
    return pt;
}

std::optional<std::uint64_t> eval_mod(const RationalExpr& e, const std::vector<std::uint64_t>& pt) {
    std::uint64_t d = eval_poly_mod(e.den(), pt);
    if (d == 0) return std::nullopt;
    return mulm(eval_poly_mod(e.num(), pt), invm(d));
}

Point random_rational_point(const Context& ctx, std::mt19937_64& rng, int bound) {
    Point pt;
    std::uniform_int_distribution<int> num(-bound, bound), den(1, 7);
    for (Var v = 0; v < ctx.num_vars(); ++v) pt[v] = Scalar(num(rng), den(rng));
    for (auto& [v, s] : pt) s.canonicalize();
    for (std::size_t i = 0; i < ctx.specials().size(); ++i) {
        int sg = relation_sign(ctx, i);
        if (sg == 0) continue;
        Var c = ctx.special(i);
        Var s = *ctx.lookup(ctx.specials()[i].partner);
        Scalar t(std::uniform_int_distribution<int>(2, bound + 2)(rng), den(rng));
        t.canonicalize();
        if (sg > 0) {
            pt[c] = (t + 1 / t) / 2;
            pt[s] = (t - 1 / t) / 2;
        } else {
            pt[c] = (1 - t * t) / (1 + t * t);
            pt[s] = 2 * t / (1 + t * t);
        }
    }
    return pt;
}

std::vector<std::size_t> pivot_columns_mod_p(const Context& ctx, const Matrix& m, std::mt19937_64& rng, int tries) {
    std::vector<std::size_t> best;
    if (m.empty()) return best;
    std::size_t cols = m[0].size();
    for (int attempt = 0; attempt < tries; ++attempt) {
        auto pt = random_mod_point(ctx, rng);
        std::vector<std::vector<std::uint64_t>> a(m.size(), std::vector<std::uint64_t>(cols));
        bool bad = false;
        for (std::size_t i = 0; i < m.size() && !bad; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                auto v = eval_mod(m[i][j], pt);
                if (!v) {
                    bad = true;
                    break;
                }
                a[i][j] = *v;
            }
        if (bad) continue;
        std::vector<std::size_t> piv;
        std::size_t r = 0;
        for (std::size_t j = 0; j < cols && r < a.size(); ++j) {
            std::size_t p = r;
            while (p < a.size() && a[p][j] == 0) ++p;
            if (p == a.size()) continue;
            std::swap(a[p], a[r]);
            std::uint64_t inv = invm(a[r][j]);
            for (std::size_t i = r + 1; i < a.size(); ++i) {
                if (a[i][j] == 0) continue;
                std::uint64_t f = mulm(a[i][j], inv);
                for (std::size_t k = j; k < cols; ++k) a[i][k] = subm(a[i][k], mulm(f, a[r][k]));
            }
            piv.push_back(j);
            ++r;
        }
        if (piv.size() > best.size()) best = piv;
        if (best.size() == std::min(m.size(), cols)) break;
    }
    return best;
}

int rank_mod_p(const Context& ctx, const Matrix& m, std::mt19937_64& rng, int tries) {
    return static_cast<int>(pivot_columns_mod_p(ctx, m, rng, tries).size());
}

std::optional<int> exact_rank(const Context& ctx, const Matrix& m, std::size_t term_guard) {
    if (m.empty()) return 0;
    Matrix a = m;
    for (auto& row : a)
        for (auto& e : row) e = reduce(ctx, e);
    std::size_t cols = a[0].size();
    int r = 0;
    for (std::size_t j = 0; j < cols && r < static_cast<int>(a.size()); ++j) {
        std::size_t p = a.size();
        std::size_t best = ~std::size_t{0};
        for (std::size_t i = r; i < a.size(); ++i) {
            if (a[i][j].is_zero()) continue;
            std::size_t sz = a[i][j].num().size() + a[i][j].den().size();
            if (sz < best) {
                best = sz;
                p = i;
            }
        }
        if (p == a.size()) continue;
        std::swap(a[p], a[r]);
        RationalExpr inv = a[r][j].inverse();
        for (std::size_t i = r + 1; i < a.size(); ++i) {
            if (a[i][j].is_zero()) continue;
            RationalExpr f = a[i][j] * inv;
            std::size_t terms = 0;
            for (std::size_t k = j; k < cols; ++k) {
                if (!a[r][k].is_zero()) a[i][k] = reduce(ctx, a[i][k] - f * a[r][k]);
                terms += a[i][k].num().size() + a[i][k].den().size();
            }
            if (terms > term_guard) return std::nullopt;
        }
        ++r;
    }
    return r;
}

namespace {
std::atomic<std::uint64_t> g_seed{0};
}

void set_global_seed(std::uint64_t seed) { g_seed = seed; }

std::uint64_t mixed_seed(std::uint64_t local) { return local + g_seed.load() * 0x9E3779B97F4A7C15ull; }

RankReport generic_rank(const Context& ctx, const Matrix& m, std::uint64_t seed) {
    std::mt19937_64 rng(mixed_seed(seed));
    int lower = rank_mod_p(ctx, m, rng);
    std::size_t full = m.empty() ? 0 : std::min(m.size(), m[0].size());
    if (lower == static_cast<int>(full)) return {lower, true};
    if (m.size() * m[0].size() > kExactRankCells) return {lower, false};
    auto ex = exact_rank(ctx, m);
    if (ex) return {*ex, true};
    return {lower, false};
}

RationalExpr determinant(const Context& ctx, const Matrix& m) {
    std::size_t n = m.size();
    if (n == 0) return RationalExpr(1);
    if (n == 1) return m[0][0];
    if (n == 2) return reduce(ctx, m[0][0] * m[1][1] - m[0][1] * m[1][0]);
    RationalExpr d;
    for (std::size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        Matrix minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<RationalExpr> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(row);
        }
        RationalExpr c = m[0][j] * determinant(ctx, minor);
        d += (j % 2 == 0) ? c : -c;
    }
    return reduce(ctx, d);
}

Matrix inverse(const Context& ctx, const Matrix& m) {
    std::size_t n = m.size();
    RationalExpr d = determinant(ctx, m);
    if (is_zero(ctx, d)) throw Error("SingularFrame", "matrix is singular");
    RationalExpr id = d.inverse();
    Matrix r(n, std::vector<RationalExpr>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Matrix minor;
            for (std::size_t a = 0; a < n; ++a) {
                if (a == j) continue;
                std::vector<RationalExpr> row;
                for (std::size_t b = 0; b < n; ++b)
                    if (b != i) row.push_back(m[a][b]);
                minor.push_back(row);
            }
            RationalExpr c = determinant(ctx, minor) * id;
            r[i][j] = reduce(ctx, ((i + j) % 2 == 0) ? c : -c);
        }
    return r;
}

Matrix multiply(const Context& ctx, const Matrix& a, const Matrix& b) {
    std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    Matrix r(n, std::vector<RationalExpr>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            RationalExpr s;
            for (std::size_t l = 0; l < k; ++l) s += a[i][l] * b[l][j];
            r[i][j] = reduce(ctx, s);
        }
    return r;
}

std::optional<std::vector<Scalar>> solve_rational(std::vector<std::vector<Scalar>> a, std::vector<Scalar> b) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    std::vector<int> pivot_col;
    std::size_t r = 0;
    for (std::size_t j = 0; j < cols && r < rows; ++j) {
        std::size_t p = r;
        while (p < rows && sgn(a[p][j]) == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        std::swap(b[p], b[r]);
        Scalar inv = 1 / a[r][j];
        for (auto& x : a[r]) x *= inv;
        b[r] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || sgn(a[i][j]) == 0) continue;
            Scalar f = a[i][j];
            for (std::size_t k = 0; k < cols; ++k) a[i][k] -= f * a[r][k];
            b[i] -= f * b[r];
        }
        pivot_col.push_back(static_cast<int>(j));
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (sgn(b[i]) != 0) return std::nullopt;
    std::vector<Scalar> x(cols, Scalar(0));
    for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i];
    return x;
}

}  // namespace vessiot
