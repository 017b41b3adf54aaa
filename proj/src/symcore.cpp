#include "vessiot/symcore.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace vessiot {

bool variable_less(const VariableId& a, const VariableId& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.index != b.index) return a.index < b.index;
    if (a.kind != VarKind::Jet) return false;
    int oa = a.mu.order(), ob = b.mu.order();
    if (oa != ob) return oa < ob;
    return a.mu.e < b.mu.e;
}

// ---------------------------------------------------------------- monomials

std::uint32_t Monomial::exponent(Var v) const {
    auto it = std::lower_bound(f.begin(), f.end(), v,
                               [](const std::pair<Var, std::uint32_t>& p, Var x) { return p.first < x; });
    return (it != f.end() && it->first == v) ? it->second : 0;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.f.reserve(a.f.size() + b.f.size());
    std::size_t i = 0, j = 0;
    while (i < a.f.size() || j < b.f.size()) {
        if (j == b.f.size() || (i < a.f.size() && a.f[i].first < b.f[j].first)) {
            r.f.push_back(a.f[i++]);
        } else if (i == a.f.size() || b.f[j].first < a.f[i].first) {
            r.f.push_back(b.f[j++]);
        } else {
            r.f.emplace_back(a.f[i].first, a.f[i].second + b.f[j].second);
            ++i;
            ++j;
        }
    }
    r.deg = a.deg + b.deg;
    return r;
}

bool mono_divides(const Monomial& a, const Monomial& b) {
    if (a.deg > b.deg) return false;
    std::size_t j = 0;
    for (const auto& [v, e] : a.f) {
        while (j < b.f.size() && b.f[j].first < v) ++j;
        if (j == b.f.size() || b.f[j].first != v || b.f[j].second < e) return false;
    }
    return true;
}

Monomial mono_div(const Monomial& a, const Monomial& b) {
    Monomial r;
    std::size_t j = 0;
    for (const auto& [v, e] : a.f) {
        std::uint32_t s = 0;
        if (j < b.f.size() && b.f[j].first == v) s = b.f[j++].second;
        if (e > s) r.f.emplace_back(v, e - s);
    }
    r.deg = a.deg - b.deg;
    return r;
}

Monomial mono_var(Var v, std::uint32_t e) {
    Monomial m;
    if (e > 0) {
        m.f.emplace_back(v, e);
        m.deg = e;
    }
    return m;
}

int grevlex(const Monomial& a, const Monomial& b) {
    if (a.deg != b.deg) return a.deg > b.deg ? 1 : -1;
    std::size_t i = 0, j = 0;
    while (i < a.f.size() && j < b.f.size()) {
        if (a.f[i].first == b.f[j].first) {
            if (a.f[i].second != b.f[j].second) return a.f[i].second < b.f[j].second ? 1 : -1;
            ++i;
            ++j;
        } else if (a.f[i].first < b.f[j].first) {
            return -1;
        } else {
            return 1;
        }
    }
    if (i < a.f.size()) return -1;
    if (j < b.f.size()) return 1;
    return 0;
}

std::size_t MonomialHash::operator()(const Monomial& m) const {
    std::size_t h = 1469598103934665603ull;
    for (const auto& [v, e] : m.f) {
        h ^= (static_cast<std::size_t>(v) << 20) ^ e;
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------- polynomials

namespace {

using TermMap = std::unordered_map<Monomial, Scalar, MonomialHash>;

void accumulate(TermMap& acc, const Monomial& m, const Scalar& c) {
    auto [it, inserted] = acc.try_emplace(m, c);
    if (!inserted) it->second += c;
}

Polynomial from_map(TermMap& acc) {
    std::vector<Term> t;
    t.reserve(acc.size());
    for (auto& [m, c] : acc)
        if (sgn(c) != 0) t.push_back(Term{m, c});
    std::sort(t.begin(), t.end(), [](const Term& a, const Term& b) { return grevlex(a.m, b.m) > 0; });
    return poly_from_sorted(std::move(t));
}

}  // namespace

Polynomial poly_from_sorted(std::vector<Term> terms) {
    Polynomial p;
    p.t_ = std::move(terms);
    return p;
}

Polynomial::Polynomial(const Scalar& c) {
    if (sgn(c) != 0) t_.push_back(Term{Monomial{}, c});
}

Polynomial Polynomial::variable(Var v) {
    Polynomial p;
    p.t_.push_back(Term{mono_var(v), Scalar(1)});
    return p;
}

Polynomial Polynomial::from_terms(std::vector<Term> terms) {
    TermMap acc;
    for (auto& t : terms) accumulate(acc, t.m, t.c);
    return from_map(acc);
}

Scalar Polynomial::constant_value() const {
    if (t_.empty()) return Scalar(0);
    if (!is_constant()) throw Error("NotConstant", "polynomial is not constant");
    return t_[0].c;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto& t : r.t_) t.c = -t.c;
    return r;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<Term> r;
    r.reserve(t_.size() + o.t_.size());
    std::size_t i = 0, j = 0;
    while (i < t_.size() || j < o.t_.size()) {
        int c;
        if (i == t_.size()) c = -1;
        else if (j == o.t_.size()) c = 1;
        else c = grevlex(t_[i].m, o.t_[j].m);
        if (c > 0) {
            r.push_back(t_[i++]);
        } else if (c < 0) {
            r.push_back(o.t_[j++]);
        } else {
            Scalar s = t_[i].c + o.t_[j].c;
            if (sgn(s) != 0) r.push_back(Term{t_[i].m, s});
            ++i;
            ++j;
        }
    }
    return poly_from_sorted(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (is_zero() || o.is_zero()) return Polynomial();
    if (o.is_constant()) return scaled(o.t_[0].c);
    if (is_constant()) return o.scaled(t_[0].c);
    if (o.t_.size() == 1) return times_monomial(o.t_[0].m, o.t_[0].c);
    if (t_.size() == 1) return o.times_monomial(t_[0].m, t_[0].c);
    TermMap acc;
    acc.reserve(t_.size() * o.t_.size());
    for (const auto& a : t_)
        for (const auto& b : o.t_) accumulate(acc, mono_mul(a.m, b.m), a.c * b.c);
    return from_map(acc);
}

Polynomial Polynomial::scaled(const Scalar& c) const {
    if (sgn(c) == 0) return Polynomial();
    Polynomial r = *this;
    for (auto& t : r.t_) t.c *= c;
    return r;
}

Polynomial Polynomial::times_monomial(const Monomial& m, const Scalar& c) const {
    if (sgn(c) == 0) return Polynomial();
    Polynomial r;
    r.t_.reserve(t_.size());
    for (const auto& t : t_) r.t_.push_back(Term{mono_mul(t.m, m), t.c * c});
    return r;
}

Polynomial Polynomial::pow(unsigned e) const {
    Polynomial result(Scalar(1)), base = *this;
    while (e) {
        if (e & 1u) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

bool Polynomial::operator==(const Polynomial& o) const {
    if (t_.size() != o.t_.size()) return false;
    for (std::size_t i = 0; i < t_.size(); ++i)
        if (!(t_[i].m == o.t_[i].m) || t_[i].c != o.t_[i].c) return false;
    return true;
}

std::vector<Var> Polynomial::variables() const {
    std::vector<Var> vs;
    for (const auto& t : t_)
        for (const auto& f : t.m.f) vs.push_back(f.first);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

bool Polynomial::contains(Var v) const {
    for (const auto& t : t_)
        if (t.m.exponent(v) > 0) return true;
    return false;
}

std::uint32_t Polynomial::degree_in(Var v) const {
    std::uint32_t d = 0;
    for (const auto& t : t_) d = std::max(d, t.m.exponent(v));
    return d;
}

std::uint32_t Polynomial::total_degree() const { return t_.empty() ? 0 : t_[0].m.deg; }

std::vector<Polynomial> Polynomial::coefficients_in(Var v) const {
    std::uint32_t d = degree_in(v);
    std::vector<std::vector<Term>> parts(d + 1);
    for (const auto& t : t_) {
        std::uint32_t e = t.m.exponent(v);
        if (e == 0) {
            parts[0].push_back(t);
        } else {
            parts[e].push_back(Term{mono_div(t.m, mono_var(v, e)), t.c});
        }
    }
    std::vector<Polynomial> r;
    r.reserve(d + 1);
    for (auto& p : parts) {
        // removing a common variable power from a grevlex-sorted list keeps it sorted only up to
        // ties in degree, so resort
        std::sort(p.begin(), p.end(), [](const Term& a, const Term& b) { return grevlex(a.m, b.m) > 0; });
        r.push_back(poly_from_sorted(std::move(p)));
    }
    return r;
}

Polynomial Polynomial::partial(Var v) const {
    TermMap acc;
    for (const auto& t : t_) {
        std::uint32_t e = t.m.exponent(v);
        if (e == 0) continue;
        accumulate(acc, mono_div(t.m, mono_var(v, 1)), t.c * e);
    }
    return from_map(acc);
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& d) const {
    if (d.is_zero()) throw DivisionByZero();
    if (is_zero()) return Polynomial();
    if (d.is_constant()) return scaled(1 / d.t_[0].c);
    if (d.t_.size() == 1) {
        std::vector<Term> q;
        q.reserve(t_.size());
        for (const auto& t : t_) {
            if (!mono_divides(d.t_[0].m, t.m)) return std::nullopt;
            q.push_back(Term{mono_div(t.m, d.t_[0].m), t.c / d.t_[0].c});
        }
        return poly_from_sorted(std::move(q));
    }
    if (total_degree() < d.total_degree()) return std::nullopt;
    Polynomial r = *this;
    std::vector<Term> q;
    const Term& lt = d.t_[0];
    while (!r.is_zero()) {
        const Term& rt = r.t_[0];
        if (!mono_divides(lt.m, rt.m)) return std::nullopt;
        Term qt{mono_div(rt.m, lt.m), rt.c / lt.c};
        r = r - d.times_monomial(qt.m, qt.c);
        q.push_back(std::move(qt));
    }
    return poly_from_sorted(std::move(q));
}

// ---------------------------------------------------------------- gcd

Polynomial primitive_integer(const Polynomial& p, Scalar* factor) {
    if (p.is_zero()) {
        if (factor) *factor = 1;
        return p;
    }
    mpz_class l = 1, g = 0;
    for (const auto& t : p.terms()) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.c.get_den_mpz_t());
    }
    for (const auto& t : p.terms()) {
        mpz_class n = t.c.get_num() * (l / t.c.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    }
    Scalar f(l, g);
    f.canonicalize();
    if (sgn(p.lead().c) < 0) f = -f;
    if (factor) *factor = f;
    if (f == 1) return p;
    return p.scaled(f);
}

namespace {

constexpr std::uint64_t kPrime = (1ull << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % kPrime);
}
std::uint64_t addmod(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    return s >= kPrime ? s - kPrime : s;
}
std::uint64_t submod(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kPrime - b; }
std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a);
        a = mulmod(a, a);
        e >>= 1;
    }
    return r;
}
std::uint64_t invmod(std::uint64_t a) { return powmod(a, kPrime - 2); }

std::uint64_t scalar_mod(const Scalar& c) {
    std::uint64_t n = mpz_fdiv_ui(c.get_num_mpz_t(), kPrime);
    std::uint64_t d = mpz_fdiv_ui(c.get_den_mpz_t(), kPrime);
    if (d == 0) return 0;
    return mulmod(n, invmod(d));
}

// degree of the gcd of two univariate polynomials mod p (coefficients low to high)
int univariate_gcd_degree(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
    auto trim = [](std::vector<std::uint64_t>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    };
    trim(a);
    trim(b);
    while (!b.empty()) {
        while (a.size() >= b.size()) {
            std::uint64_t f = mulmod(a.back(), invmod(b.back()));
            std::size_t shift = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] = submod(a[i + shift], mulmod(f, b[i]));
            trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return static_cast<int>(a.size()) - 1;
}

struct Lcg {
    std::uint64_t s;
    std::uint64_t next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return (s >> 3) % kPrime;
    }
};

std::vector<std::uint64_t> image_in(const Polynomial& p, Var v, const std::map<Var, std::uint64_t>& pt) {
    std::vector<std::uint64_t> r(p.degree_in(v) + 1, 0);
    for (const auto& t : p.terms()) {
        std::uint64_t c = scalar_mod(t.c);
        std::uint32_t ev = 0;
        for (const auto& [w, e] : t.m.f) {
            if (w == v) ev = e;
            else c = mulmod(c, powmod(pt.at(w), e));
        }
        r[ev] = addmod(r[ev], c);
    }
    return r;
}

Polynomial gcd_rec(const Polynomial& a0, const Polynomial& b0);

Polynomial content_in(const Polynomial& p, Var v) {
    auto cs = p.coefficients_in(v);
    Polynomial g;
    // smallest coefficients first makes early exit more likely
    std::sort(cs.begin(), cs.end(), [](const Polynomial& x, const Polynomial& y) { return x.size() < y.size(); });
    for (const auto& c : cs) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? primitive_integer(c) : gcd_rec(g, c);
        if (g.is_constant()) return Polynomial(Scalar(1));
    }
    return g;
}

Polynomial exact(const Polynomial& a, const Polynomial& b) {
    auto q = a.divide_exact(b);
    if (!q) throw Error("Internal", "inexact division in gcd");
    return *q;
}

Polynomial from_coeffs(const std::vector<Polynomial>& cs, Var v) {
    Polynomial r;
    for (std::size_t k = 0; k < cs.size(); ++k)
        if (!cs[k].is_zero()) r = r + cs[k].times_monomial(mono_var(v, static_cast<std::uint32_t>(k)), Scalar(1));
    return r;
}

Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, Var v) {
    auto A = a.coefficients_in(v);
    auto B = b.coefficients_in(v);
    const Polynomial lb = B.back();
    while (A.size() >= B.size()) {
        Polynomial la = A.back();
        std::size_t shift = A.size() - B.size();
        for (auto& c : A) c = c * lb;
        for (std::size_t i = 0; i < B.size(); ++i) A[i + shift] = A[i + shift] - la * B[i];
        while (!A.empty() && A.back().is_zero()) A.pop_back();
        if (A.empty()) break;
    }
    return from_coeffs(A, v);
}

Polynomial gcd_rec(const Polynomial& a0, const Polynomial& b0) {
    if (a0.is_zero()) return primitive_integer(b0);
    if (b0.is_zero()) return primitive_integer(a0);
    if (a0.is_constant() || b0.is_constant()) return Polynomial(Scalar(1));
    Polynomial a = primitive_integer(a0), b = primitive_integer(b0);
    if (a == b) return a;

    // monomial content
    auto mcontent = [](const Polynomial& p) {
        Monomial m = p.terms()[0].m;
        for (const auto& t : p.terms()) {
            Monomial r;
            std::size_t j = 0;
            for (const auto& [v, e] : m.f) {
                while (j < t.m.f.size() && t.m.f[j].first < v) ++j;
                if (j < t.m.f.size() && t.m.f[j].first == v) {
                    auto k = std::min(e, t.m.f[j].second);
                    r.f.emplace_back(v, k);
                    r.deg += k;
                }
            }
            m = std::move(r);
            if (m.is_one()) break;
        }
        return m;
    };
    Monomial ma = mcontent(a), mb = mcontent(b);
    Monomial mc;
    {
        std::size_t j = 0;
        for (const auto& [v, e] : ma.f) {
            while (j < mb.f.size() && mb.f[j].first < v) ++j;
            if (j < mb.f.size() && mb.f[j].first == v) {
                auto k = std::min(e, mb.f[j].second);
                mc.f.emplace_back(v, k);
                mc.deg += k;
            }
        }
    }
    Polynomial mcp = Polynomial(Scalar(1)).times_monomial(mc, Scalar(1));
    if (!ma.is_one()) a = exact(a, Polynomial(Scalar(1)).times_monomial(ma, Scalar(1)));
    if (!mb.is_one()) b = exact(b, Polynomial(Scalar(1)).times_monomial(mb, Scalar(1)));
    if (a.is_constant() || b.is_constant()) return mcp;

    auto va = a.variables(), vb = b.variables();
    for (Var v : va)
        if (!std::binary_search(vb.begin(), vb.end(), v)) return mcp * gcd_rec(content_in(a, v), b);
    for (Var v : vb)
        if (!std::binary_search(va.begin(), va.end(), v)) return mcp * gcd_rec(a, content_in(b, v));

    // modular degree bounds per variable
    Lcg rng{0x9e3779b97f4a7c15ull ^ (a.size() * 131 + b.size())};
    for (Var v : va) {
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::map<Var, std::uint64_t> pt;
            for (Var w : va)
                if (w != v) pt[w] = rng.next();
            auto ia = image_in(a, v, pt), ib = image_in(b, v, pt);
            if (ia.back() == 0 || ib.back() == 0) continue;
            if (univariate_gcd_degree(ia, ib) == 0)
                return mcp * gcd_rec(content_in(a, v), content_in(b, v));
            break;
        }
    }

    if (a.total_degree() <= b.total_degree()) {
        if (b.divide_exact(a)) return mcp * a;
    } else {
        if (a.divide_exact(b)) return mcp * b;
    }

    Var v = va[0];
    std::uint32_t best = ~0u;
    for (Var w : va) {
        std::uint32_t d = std::max(a.degree_in(w), b.degree_in(w));
        if (d < best) {
            best = d;
            v = w;
        }
    }
    Polynomial ca = content_in(a, v), cb = content_in(b, v);
    Polynomial c = gcd_rec(ca, cb);
    Polynomial pa = exact(a, ca), pb = exact(b, cb);
    if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
    Polynomial g;
    while (true) {
        Polynomial r = pseudo_remainder(pa, pb, v);
        if (r.is_zero()) {
            g = pb;
            break;
        }
        if (r.degree_in(v) == 0) {
            g = Polynomial(Scalar(1));
            break;
        }
        pa = pb;
        pb = primitive_integer(exact(r, content_in(r, v)));
    }
    return primitive_integer(mcp * c * g);
}

}  // namespace

Polynomial poly_gcd(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() && b.is_zero()) return Polynomial();
    return primitive_integer(gcd_rec(a, b));
}

// ---------------------------------------------------------------- rational functions

RationalExpr RationalExpr::make(const Polynomial& num, const Polynomial& den) {
    if (den.is_zero()) throw DivisionByZero();
    if (num.is_zero()) return RationalExpr();
    if (den.is_constant()) return RationalExpr(num.scaled(1 / den.constant_value()));
    Polynomial g = poly_gcd(num, den);
    Polynomial n = g.is_constant() ? num : exact(num, g);
    Polynomial d = g.is_constant() ? den : exact(den, g);
    RationalExpr r;
    Scalar f;
    r.den_ = primitive_integer(d, &f);
    r.num_ = n.scaled(f);
    if (r.den_.is_constant()) {
        r.num_ = r.num_.scaled(1 / r.den_.constant_value());
        r.den_ = Polynomial(Scalar(1));
    }
    return r;
}

Scalar RationalExpr::constant_value() const { return num_.constant_value() / den_.constant_value(); }

RationalExpr RationalExpr::operator-() const {
    RationalExpr r = *this;
    r.num_ = -r.num_;
    return r;
}

RationalExpr RationalExpr::operator+(const RationalExpr& o) const {
    if (o.is_zero()) return *this;
    if (is_zero()) return o;
    bool d1 = den_.is_constant(), d2 = o.den_.is_constant();
    if (d1 && d2) return RationalExpr(num_ + o.num_);
    RationalExpr r;
    if (d2) {
        r.num_ = num_ + o.num_ * den_;
        r.den_ = den_;
        return r;  // gcd(a + c b, b) = gcd(a, b) = 1
    }
    if (d1) {
        r.num_ = num_ * o.den_ + o.num_;
        r.den_ = o.den_;
        return r;
    }
    if (den_ == o.den_) {
        Polynomial n = num_ + o.num_;
        if (n.is_zero()) return RationalExpr();
        Polynomial g = poly_gcd(n, den_);
        if (g.is_constant()) {
            r.num_ = std::move(n);
            r.den_ = den_;
            return r;
        }
        return make(exact(n, g), exact(den_, g));
    }
    Polynomial g = poly_gcd(den_, o.den_);
    Polynomial b1 = g.is_constant() ? den_ : exact(den_, g);
    Polynomial d1p = g.is_constant() ? o.den_ : exact(o.den_, g);
    Polynomial n = num_ * d1p + o.num_ * b1;
    if (n.is_zero()) return RationalExpr();
    Polynomial d = b1 * o.den_;
    if (!g.is_constant()) {
        Polynomial h = poly_gcd(n, g);
        if (!h.is_constant()) {
            n = exact(n, h);
            d = exact(d, h);
        }
    }
    Scalar f;
    Polynomial dn = primitive_integer(d, &f);
    r.num_ = n.scaled(f);
    r.den_ = std::move(dn);
    if (r.den_.is_constant()) {
        r.num_ = r.num_.scaled(1 / r.den_.constant_value());
        r.den_ = Polynomial(Scalar(1));
    }
    return r;
}

RationalExpr RationalExpr::operator-(const RationalExpr& o) const { return *this + (-o); }

RationalExpr RationalExpr::operator*(const RationalExpr& o) const {
    if (is_zero() || o.is_zero()) return RationalExpr();
    bool d1 = den_.is_constant(), d2 = o.den_.is_constant();
    if (d1 && d2) return RationalExpr(num_ * o.num_);
    Polynomial a = num_, b = den_, c = o.num_, d = o.den_;
    if (!d2) {
        Polynomial g = poly_gcd(a, d);
        if (!g.is_constant()) {
            a = exact(a, g);
            d = exact(d, g);
        }
    }
    if (!d1) {
        Polynomial g = poly_gcd(c, b);
        if (!g.is_constant()) {
            c = exact(c, g);
            b = exact(b, g);
        }
    }
    RationalExpr r;
    Scalar f;
    Polynomial den = primitive_integer(b * d, &f);
    r.num_ = (a * c).scaled(f);
    r.den_ = std::move(den);
    if (r.den_.is_constant()) {
        r.num_ = r.num_.scaled(1 / r.den_.constant_value());
        r.den_ = Polynomial(Scalar(1));
    }
    return r;
}

RationalExpr RationalExpr::inverse() const {
    if (is_zero()) throw DivisionByZero();
    RationalExpr r;
    Scalar f;
    Polynomial den = primitive_integer(num_, &f);
    r.num_ = den_.scaled(f);
    r.den_ = std::move(den);
    if (r.den_.is_constant()) {
        r.num_ = r.num_.scaled(1 / r.den_.constant_value());
        r.den_ = Polynomial(Scalar(1));
    }
    return r;
}

RationalExpr RationalExpr::operator/(const RationalExpr& o) const { return *this * o.inverse(); }

RationalExpr RationalExpr::pow(int e) const {
    if (e < 0) return inverse().pow(-e);
    RationalExpr r;
    r.num_ = num_.pow(static_cast<unsigned>(e));
    r.den_ = den_.pow(static_cast<unsigned>(e));
    if (e == 0) r.den_ = Polynomial(Scalar(1));
    return r;
}

std::vector<Var> RationalExpr::variables() const {
    auto a = num_.variables(), b = den_.variables();
    std::vector<Var> r;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

// ---------------------------------------------------------------- context

Context::Builder& Context::Builder::hyperbolic(const std::string& base, const std::string& c, const std::string& s) {
    specials.push_back(SpecialDecl{c, base, -1, s, s});
    specials.push_back(SpecialDecl{s, base, -1, c, c});
    rules.emplace_back(c + "^2", "1 + " + s + "^2");
    return *this;
}

Context::Builder& Context::Builder::trigonometric(const std::string& base, const std::string& c, const std::string& s) {
    specials.push_back(SpecialDecl{c, base, -1, "-" + s, s});
    specials.push_back(SpecialDecl{s, base, -1, c, c});
    rules.emplace_back(c + "^2", "1 - " + s + "^2");
    return *this;
}

namespace {

void enumerate_indices(const std::vector<int>& base, std::size_t n, int k, std::vector<MultiIndex>& out) {
    // lexicographically ascending exponent vectors of order k supported on base
    std::vector<int> e(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
        if (pos == n) {
            if (left == 0) out.emplace_back(e);
            return;
        }
        bool allowed = std::find(base.begin(), base.end(), static_cast<int>(pos)) != base.end();
        int hi = allowed ? left : 0;
        for (int x = 0; x <= hi; ++x) {
            e[pos] = x;
            rec(pos + 1, left - x);
        }
        e[pos] = 0;
    };
    rec(0, k);
}

bool valid_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char ch : s)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) return false;
    return true;
}

}  // namespace

std::shared_ptr<const Context> Context::Builder::build() const {
    auto ctx = std::make_shared<Context>();
    Context& c = *ctx;
    if (max_order < 0) throw Error("ContextMismatch", "max_order must be non-negative");
    c.max_order_ = max_order;
    c.independents_ = independents;
    c.parameters_ = parameters;
    std::set<std::string> seen;
    auto claim = [&](const std::string& nm) {
        if (!valid_identifier(nm)) throw Error("ContextMismatch", "invalid identifier '" + nm + "'");
        if (!seen.insert(nm).second) throw Error("ContextMismatch", "duplicate name '" + nm + "'");
    };
    for (const auto& s : independents) claim(s);
    for (const auto& s : parameters) claim(s);
    for (const auto& s : specials) claim(s.name);
    for (const auto& d : dependents) claim(d.first);
    std::size_t n = independents.size();
    auto indep_index = [&](const std::string& nm) -> int {
        for (std::size_t i = 0; i < n; ++i)
            if (independents[i] == nm) return static_cast<int>(i);
        throw UnknownVariable("unknown independent '" + nm + "'");
    };
    for (std::size_t i = 0; i < n; ++i) c.ids_.push_back(VariableId{VarKind::Independent, static_cast<int>(i), {}});
    for (std::size_t i = 0; i < parameters.size(); ++i)
        c.ids_.push_back(VariableId{VarKind::Parameter, static_cast<int>(i), {}});
    for (std::size_t i = 0; i < specials.size(); ++i) {
        SpecialDecl s = specials[i];
        s.base = indep_index(s.base_name);
        c.specials_.push_back(s);
        c.ids_.push_back(VariableId{VarKind::Special, static_cast<int>(i), {}});
    }
    for (const auto& [name, base] : dependents) {
        DependentDecl d{name, {}};
        for (const auto& b : base) d.base.push_back(indep_index(b));
        std::sort(d.base.begin(), d.base.end());
        d.base.erase(std::unique(d.base.begin(), d.base.end()), d.base.end());
        c.dependents_.push_back(d);
    }
    for (std::size_t k = 0; k < c.dependents_.size(); ++k) {
        for (int q = 0; q <= max_order; ++q) {
            std::vector<MultiIndex> mus;
            enumerate_indices(c.dependents_[k].base, n, q, mus);
            for (auto& mu : mus) {
                std::vector<int> key{static_cast<int>(k)};
                key.insert(key.end(), mu.e.begin(), mu.e.end());
                c.jet_index_[key] = static_cast<Var>(c.ids_.size());
                c.ids_.push_back(VariableId{VarKind::Jet, static_cast<int>(k), mu});
            }
        }
    }
    for (Var v = 0; v < c.ids_.size(); ++v) {
        const auto& id = c.ids_[v];
        switch (id.kind) {
            case VarKind::Independent: c.names_[independents[id.index]] = v; break;
            case VarKind::Parameter: c.names_[parameters[id.index]] = v; break;
            case VarKind::Special: c.names_[specials[id.index].name] = v; break;
            case VarKind::Jet:
                if (id.mu.order() == 0) c.names_[c.dependents_[id.index].name] = v;
                break;
        }
    }
    c.bump_.assign(c.ids_.size() * n, -1);
    for (Var v = 0; v < c.ids_.size(); ++v) {
        const auto& id = c.ids_[v];
        if (id.kind != VarKind::Jet) continue;
        for (std::size_t i = 0; i < n; ++i) {
            if (!c.in_base(id.index, static_cast<int>(i))) continue;
            auto j = c.jet(id.index, id.mu.bumped(i));
            c.bump_[v * n + i] = j ? static_cast<std::int64_t>(*j) : -2;
        }
    }
    for (const auto& s : c.specials_) {
        RationalExpr d = parse(c, s.derivative);
        if (!d.is_polynomial()) throw Error("ContextMismatch", "special derivative must be polynomial");
        c.special_derivs_.push_back(d.num());
    }
    for (const auto& [pat, rep] : rules) {
        RationalExpr p = parse(c, pat), r = parse(c, rep);
        if (!p.is_polynomial() || p.num().size() != 1 || !r.is_polynomial())
            throw Error("ContextMismatch", "rewrite rule pattern must be a power product");
        const Term& t = p.num().lead();
        RewriteRule rule{t.m, r.num().scaled(1 / t.c)};
        for (Var v : rule.replacement.variables())
            if (rule.pattern.exponent(v) > 0)
                throw Error("ContextMismatch", "rewrite rule replacement shares a variable with its pattern");
        c.rules_.push_back(rule);
    }
    return ctx;
}

std::optional<Var> Context::find(const VariableId& id) const {
    switch (id.kind) {
        case VarKind::Independent:
            if (id.index >= 0 && static_cast<std::size_t>(id.index) < n()) return independent(id.index);
            return std::nullopt;
        case VarKind::Parameter:
            if (id.index >= 0 && static_cast<std::size_t>(id.index) < parameters_.size()) return parameter(id.index);
            return std::nullopt;
        case VarKind::Special:
            if (id.index >= 0 && static_cast<std::size_t>(id.index) < specials_.size()) return special(id.index);
            return std::nullopt;
        case VarKind::Jet: return jet(id.index, id.mu);
    }
    return std::nullopt;
}

Var Context::code(const VariableId& id) const {
    auto v = find(id);
    if (!v) throw UnknownVariable("variable not declared in context");
    return *v;
}

std::optional<Var> Context::jet(int dep, const MultiIndex& mu) const {
    std::vector<int> key{dep};
    key.insert(key.end(), mu.e.begin(), mu.e.end());
    auto it = jet_index_.find(key);
    if (it == jet_index_.end()) return std::nullopt;
    return it->second;
}

Var Context::jet_or_throw(int dep, const MultiIndex& mu) const {
    auto v = jet(dep, mu);
    if (v) return *v;
    if (mu.order() > max_order_)
        throw OrderOverflow("jet of order " + std::to_string(mu.order()) + " exceeds max_order " +
                            std::to_string(max_order_));
    throw UnknownVariable("jet outside the base of '" + dependents_.at(dep).name + "'");
}

std::optional<Var> Context::bump(Var v, std::size_t i) const {
    std::int64_t r = bump_.at(v * n() + i);
    if (r == -1) return std::nullopt;
    if (r == -2) throw OrderOverflow("derivative of " + name(v) + " exceeds max_order " + std::to_string(max_order_));
    return static_cast<Var>(r);
}

std::optional<int> Context::independent_index(const std::string& nm) const {
    for (std::size_t i = 0; i < independents_.size(); ++i)
        if (independents_[i] == nm) return static_cast<int>(i);
    return std::nullopt;
}

std::optional<int> Context::dependent_index(const std::string& nm) const {
    for (std::size_t i = 0; i < dependents_.size(); ++i)
        if (dependents_[i].name == nm) return static_cast<int>(i);
    return std::nullopt;
}

bool Context::in_base(int dep, int i) const {
    const auto& b = dependents_.at(dep).base;
    return std::binary_search(b.begin(), b.end(), i);
}

std::optional<Var> Context::lookup(const std::string& nm) const {
    auto it = names_.find(nm);
    if (it == names_.end()) return std::nullopt;
    return it->second;
}

std::string Context::name(Var v) const {
    const auto& id = ids_.at(v);
    switch (id.kind) {
        case VarKind::Independent: return independents_[id.index];
        case VarKind::Parameter: return parameters_[id.index];
        case VarKind::Special: return specials_[id.index].name;
        case VarKind::Jet: {
            std::string s = dependents_[id.index].name;
            if (id.mu.order() == 0) return s;
            s += "[";
            bool first = true;
            for (std::size_t i = 0; i < id.mu.size(); ++i)
                for (int k = 0; k < id.mu.e[i]; ++k) {
                    if (!first) s += ",";
                    s += independents_[i];
                    first = false;
                }
            return s + "]";
        }
    }
    return "?";
}

std::vector<Var> Context::jets_of_order(int dep, int k) const {
    std::vector<Var> r;
    for (const auto& mu : multi_indices(dep, k)) r.push_back(*jet(dep, mu));
    return r;
}

std::vector<MultiIndex> Context::multi_indices(int dep, int k) const {
    std::vector<MultiIndex> out;
    enumerate_indices(dependents_.at(dep).base, n(), k, out);
    return out;
}

// ---------------------------------------------------------------- normalize / parse

RationalExpr normalize(const RawExpr& raw) {
    using Op = RawExpr::Op;
    switch (raw.op) {
        case Op::Num: return RationalExpr(raw.value);
        case Op::Var: return RationalExpr::variable(raw.var);
        case Op::Expr: return raw.expr;
        case Op::Neg: return -normalize(*raw.args.at(0));
        case Op::Add: {
            RationalExpr r;
            for (const auto& a : raw.args) r += normalize(*a);
            return r;
        }
        case Op::Sub: return normalize(*raw.args.at(0)) - normalize(*raw.args.at(1));
        case Op::Mul: {
            RationalExpr r(1);
            for (const auto& a : raw.args) r *= normalize(*a);
            return r;
        }
        case Op::Div: {
            RationalExpr d = normalize(*raw.args.at(1));
            if (d.is_zero()) throw DivisionByZero();
            return normalize(*raw.args.at(0)) / d;
        }
        case Op::Pow: return normalize(*raw.args.at(0)).pow(raw.exponent);
    }
    return RationalExpr();
}

namespace {

class Parser {
public:
    Parser(const Context& ctx, const std::string& s,
           const std::function<std::optional<RationalExpr>(const std::string&)>& resolve)
        : ctx_(ctx), s_(s), resolve_(resolve) {}

    RawExprPtr parse_all() {
        auto e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    const Context& ctx_;
    const std::string& s_;
    const std::function<std::optional<RationalExpr>(const std::string&)>& resolve_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg + " at offset " + std::to_string(pos_) + " in '" + s_ + "'", pos_);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    static RawExprPtr node(RawExpr::Op op, std::vector<RawExprPtr> args) {
        auto n = std::make_shared<RawExpr>();
        n->op = op;
        n->args = std::move(args);
        return n;
    }

    RawExprPtr expr() {
        auto lhs = term();
        while (true) {
            if (accept('+')) lhs = node(RawExpr::Op::Add, {lhs, term()});
            else if (accept('-')) lhs = node(RawExpr::Op::Sub, {lhs, term()});
            else return lhs;
        }
    }
    RawExprPtr term() {
        auto lhs = unary();
        while (true) {
            if (accept('*')) lhs = node(RawExpr::Op::Mul, {lhs, unary()});
            else if (accept('/')) lhs = node(RawExpr::Op::Div, {lhs, unary()});
            else return lhs;
        }
    }
    RawExprPtr unary() {
        if (accept('-')) return node(RawExpr::Op::Neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }
    RawExprPtr power() {
        auto base = atom();
        if (accept('^')) {
            bool neg = accept('-');
            skip();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected integer exponent");
            int e = std::stoi(s_.substr(start, pos_ - start));
            auto n = node(RawExpr::Op::Pow, {base});
            n->exponent = neg ? -e : e;
            return n;
        }
        return base;
    }
    std::string ident() {
        skip();
        std::size_t start = pos_;
        if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        }
        if (start == pos_) fail("expected identifier");
        return s_.substr(start, pos_ - start);
    }
    int independent(const std::string& nm) {
        auto i = ctx_.independent_index(nm);
        if (!i) throw UnknownVariable("unknown independent '" + nm + "' in '" + s_ + "'");
        return *i;
    }
    RawExprPtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        if (accept('(')) {
            auto e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            auto n = std::make_shared<RawExpr>();
            n->op = RawExpr::Op::Num;
            n->value = Scalar(mpz_class(s_.substr(start, pos_ - start)));
            return n;
        }
        std::string nm = ident();
        auto dep = ctx_.dependent_index(nm);
        skip();
        if (pos_ < s_.size() && s_[pos_] == '[') {
            if (!dep) fail("'" + nm + "' is not a dependent");
            ++pos_;
            MultiIndex mu(ctx_.n());
            if (!accept(']')) {
                do {
                    mu.e[independent(ident())] += 1;
                } while (accept(','));
                expect(']');
            }
            auto n = std::make_shared<RawExpr>();
            n->op = RawExpr::Op::Var;
            n->var = ctx_.jet_or_throw(*dep, mu);
            return n;
        }
        if (pos_ < s_.size() && s_[pos_] == '(') {
            auto v = ctx_.lookup(nm);
            if (!v || !(ctx_.kind(*v) == VarKind::Special || dep)) fail("'" + nm + "' is not a function symbol");
            ++pos_;
            std::vector<int> args;
            if (!accept(')')) {
                do {
                    args.push_back(independent(ident()));
                } while (accept(','));
                expect(')');
            }
            std::vector<int> want;
            if (dep) want = ctx_.dependents()[*dep].base;
            else want = {ctx_.specials()[ctx_.id(*v).index].base};
            std::sort(args.begin(), args.end());
            if (args != want) fail("arguments of '" + nm + "' do not match its base");
            auto n = std::make_shared<RawExpr>();
            n->op = RawExpr::Op::Var;
            n->var = *v;
            return n;
        }
        if (resolve_) {
            if (auto r = resolve_(nm)) {
                auto n = std::make_shared<RawExpr>();
                n->op = RawExpr::Op::Expr;
                n->expr = *r;
                return n;
            }
        }
        auto v = ctx_.lookup(nm);
        if (!v) throw UnknownVariable("unknown identifier '" + nm + "' in '" + s_ + "'");
        auto n = std::make_shared<RawExpr>();
        n->op = RawExpr::Op::Var;
        n->var = *v;
        return n;
    }
};

}  // namespace

RawExprPtr parse_raw(const Context& ctx, const std::string& text,
                     const std::function<std::optional<RationalExpr>(const std::string&)>& resolve) {
    Parser p(ctx, text, resolve);
    return p.parse_all();
}

RationalExpr parse(const Context& ctx, const std::string& text,
                   const std::function<std::optional<RationalExpr>(const std::string&)>& resolve) {
    return normalize(*parse_raw(ctx, text, resolve));
}

// ---------------------------------------------------------------- substitution

namespace {

void resolve_binding(Var v, const Bindings& in, Bindings& done, std::set<Var>& active);

RationalExpr substitute_resolved(const RationalExpr& e, const Bindings& b) {
    std::vector<Var> vars;
    for (Var v : e.variables())
        if (b.count(v)) vars.push_back(v);
    if (vars.empty()) return e;
    std::map<Var, std::uint32_t> emax;
    for (Var v : vars) emax[v] = std::max(e.num().degree_in(v), e.den().degree_in(v));
    struct Powers {
        std::vector<Polynomial> a, b;
        bool poly;
    };
    std::map<Var, Powers> pw;
    for (Var v : vars) {
        const RationalExpr& r = b.at(v);
        Powers p;
        p.poly = r.den().is_constant();
        p.a.push_back(Polynomial(Scalar(1)));
        p.b.push_back(Polynomial(Scalar(1)));
        for (std::uint32_t k = 1; k <= emax[v]; ++k) {
            p.a.push_back(p.a.back() * r.num());
            if (!p.poly) p.b.push_back(p.b.back() * r.den());
        }
        pw[v] = std::move(p);
    }
    auto apply = [&](const Polynomial& poly) {
        Polynomial out;
        for (const auto& t : poly.terms()) {
            Monomial rest;
            Polynomial factor(t.c);
            for (const auto& [v, e] : t.m.f) {
                auto it = pw.find(v);
                if (it == pw.end()) {
                    rest.f.emplace_back(v, e);
                    rest.deg += e;
                    continue;
                }
                factor = factor * it->second.a[e];
                if (!it->second.poly) factor = factor * it->second.b[emax[v] - e];
            }
            for (auto& [v, p] : pw)
                if (!p.poly && t.m.exponent(v) == 0) factor = factor * p.b[emax[v]];
            out = out + factor.times_monomial(rest, Scalar(1));
        }
        return out;
    };
    Polynomial n = apply(e.num()), d = apply(e.den());
    if (d.is_zero()) throw DivisionByZero("denominator vanishes after substitution");
    return RationalExpr::make(n, d);
}

void resolve_binding(Var v, const Bindings& in, Bindings& done, std::set<Var>& active) {
    if (done.count(v)) return;
    if (!active.insert(v).second) throw CyclicBinding("cyclic substitution binding");
    const RationalExpr& r = in.at(v);
    for (Var w : r.variables())
        if (in.count(w) && w != v) resolve_binding(w, in, done, active);
    if (r.contains(v) && !(r == RationalExpr::variable(v))) throw CyclicBinding("binding refers to itself");
    Bindings sub;
    for (Var w : r.variables())
        if (w != v && done.count(w)) sub[w] = done.at(w);
    done[v] = substitute_resolved(r, sub);
    active.erase(v);
}

}  // namespace

RationalExpr substitute(const RationalExpr& e, const Bindings& b) {
    if (b.empty()) return e;
    Bindings done;
    std::set<Var> active;
    for (const auto& [v, r] : b) resolve_binding(v, b, done, active);
    return substitute_resolved(e, done);
}

Polynomial substitute_poly(const Polynomial& p, const std::map<Var, Polynomial>& b) {
    Polynomial out;
    for (const auto& t : p.terms()) {
        Monomial rest;
        Polynomial factor(t.c);
        for (const auto& [v, e] : t.m.f) {
            auto it = b.find(v);
            if (it == b.end()) {
                rest.f.emplace_back(v, e);
                rest.deg += e;
            } else {
                factor = factor * it->second.pow(e);
            }
        }
        out = out + factor.times_monomial(rest, Scalar(1));
    }
    return out;
}

// ---------------------------------------------------------------- derivations

Polynomial apply_derivation(const Polynomial& p, const std::function<const Polynomial*(Var)>& dv) {
    TermMap acc;
    std::unordered_map<Var, const Polynomial*> cache;
    for (const auto& t : p.terms()) {
        for (const auto& [v, e] : t.m.f) {
            auto it = cache.find(v);
            const Polynomial* d = it != cache.end() ? it->second : (cache[v] = dv(v));
            if (!d || d->is_zero()) continue;
            Monomial rest = mono_div(t.m, mono_var(v, 1));
            Scalar c = t.c * e;
            for (const auto& dt : d->terms()) accumulate(acc, mono_mul(rest, dt.m), c * dt.c);
        }
    }
    return from_map(acc);
}

RationalExpr apply_derivation(const RationalExpr& e, const std::function<const Polynomial*(Var)>& dv) {
    Polynomial dn = apply_derivation(e.num(), dv);
    if (e.den().is_constant()) return RationalExpr(dn);
    Polynomial dd = apply_derivation(e.den(), dv);
    if (dd.is_zero()) return RationalExpr::make(dn, e.den());
    // (n/d)' = (n' d - n d') / d^2 ; reduce by d first
    Polynomial g = poly_gcd(e.den(), dd);
    Polynomial d1 = exact(e.den(), g), dd1 = exact(dd, g);
    Polynomial num = dn * d1 - e.num() * dd1;
    return RationalExpr::make(num, e.den() * d1);
}

RationalExpr partial(const Context& ctx, const RationalExpr& e, Var v) {
    if (v >= ctx.num_vars()) throw UnknownVariable("variable code out of range");
    static const Polynomial one(Scalar(1));
    bool indep = ctx.kind(v) == VarKind::Independent;
    auto dv = [&](Var w) -> const Polynomial* {
        if (w == v) return &one;
        if (indep && ctx.kind(w) == VarKind::Special) {
            std::size_t si = ctx.id(w).index;
            if (ctx.specials()[si].base == static_cast<int>(v)) return &*ctx.special_derivative(si);
        }
        return nullptr;
    };
    return apply_derivation(e, dv);
}

// ---------------------------------------------------------------- rewriting

Polynomial reduce_poly(const Polynomial& p, const std::vector<RewriteRule>& rules) {
    if (rules.empty()) return p;
    TermMap acc;
    std::vector<Term> work(p.terms().rbegin(), p.terms().rend());
    bool changed = false;
    while (!work.empty()) {
        Term t = std::move(work.back());
        work.pop_back();
        const RewriteRule* hit = nullptr;
        for (const auto& r : rules)
            if (mono_divides(r.pattern, t.m)) {
                hit = &r;
                break;
            }
        if (!hit) {
            accumulate(acc, t.m, t.c);
            continue;
        }
        changed = true;
        Monomial q = mono_div(t.m, hit->pattern);
        for (const auto& rt : hit->replacement.terms()) work.push_back(Term{mono_mul(q, rt.m), t.c * rt.c});
    }
    if (!changed) return p;
    return from_map(acc);
}

RationalExpr reduce(const RationalExpr& e, const std::vector<RewriteRule>& rules) {
    if (rules.empty()) return e;
    Polynomial n = reduce_poly(e.num(), rules);
    if (e.den().is_constant()) return RationalExpr(n);
    return RationalExpr::make(n, reduce_poly(e.den(), rules));
}

bool is_zero(const Context& ctx, const RationalExpr& e) { return reduce_poly(e.num(), ctx.rules()).is_zero(); }

// ---------------------------------------------------------------- evaluation

Scalar eval_poly(const Polynomial& p, const Point& pt) {
    Scalar s = 0;
    std::unordered_map<Var, std::vector<Scalar>> pw;
    for (const auto& t : p.terms()) {
        Scalar c = t.c;
        for (const auto& [v, e] : t.m.f) {
            auto it = pt.find(v);
            if (it == pt.end()) throw UnknownVariable("unbound variable in evaluation");
            auto& cache = pw[v];
            if (cache.empty()) cache.push_back(Scalar(1));
            while (cache.size() <= e) cache.push_back(cache.back() * it->second);
            c *= cache[e];
        }
        s += c;
    }
    return s;
}

Scalar eval_point(const RationalExpr& e, const Point& p) {
    Scalar d = eval_poly(e.den(), p);
    if (sgn(d) == 0) throw DenominatorVanishes();
    return eval_poly(e.num(), p) / d;
}

// ---------------------------------------------------------------- printing

std::string scalar_string(const Scalar& s) { return s.get_str(); }

std::string to_string(const Context& ctx, const Polynomial& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : p.terms()) {
        Scalar c = t.c;
        bool neg = sgn(c) < 0;
        if (neg) c = -c;
        if (first) out += neg ? "-" : "";
        else out += neg ? " - " : " + ";
        first = false;
        std::string mono;
        for (const auto& [v, e] : t.m.f) {
            if (!mono.empty()) mono += "*";
            mono += ctx.name(v);
            if (e > 1) mono += "^" + std::to_string(e);
        }
        if (mono.empty()) out += c.get_str();
        else if (c == 1) out += mono;
        else out += c.get_str() + "*" + mono;
    }
    return out;
}

std::string to_string(const Context& ctx, const RationalExpr& e) {
    if (e.den().is_constant()) return to_string(ctx, e.num());
    std::string n = to_string(ctx, e.num());
    if (e.num().size() > 1) n = "(" + n + ")";
    std::string d = to_string(ctx, e.den());
    const auto& dt = e.den().terms();
    bool simple = dt.size() == 1 && dt[0].c == 1 && dt[0].m.f.size() == 1 && dt[0].m.f[0].second == 1;
    if (!simple) d = "(" + d + ")";
    return n + "/" + d;
}

}  // namespace vessiot
