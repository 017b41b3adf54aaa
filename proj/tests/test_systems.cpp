#include <doctest.h>

#include "vessiot/systems.hpp"

#include <fstream>
#include <sstream>

using namespace vessiot;

namespace {

std::vector<EquationSpec> eqs(const Context& c, std::initializer_list<const char*> lines, bool solved = false) {
    std::vector<EquationSpec> out;
    for (const char* l : lines) {
        std::string s(l);
        auto k = s.find('=');
        out.push_back({parse(c, s.substr(0, k)), parse(c, s.substr(k + 1)), solved, s});
    }
    return out;
}

std::vector<std::size_t> ordering(const Context& c, std::initializer_list<const char*> names) {
    std::vector<std::size_t> o;
    for (const char* n : names) o.push_back(static_cast<std::size_t>(*c.independent_index(n)));
    return o;
}

std::vector<int> unknowns(const Context& c, std::initializer_list<const char*> names) {
    std::vector<int> u;
    for (const char* n : names) u.push_back(*c.dependent_index(n));
    return u;
}

std::string golden(const std::string& name) {
    std::ifstream in(std::string(VESSIOT_SOURCE_DIR) + "/corpus/golden/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ContextPtr shell_ctx(int q) {
    Context::Builder b;
    b.independent("x1").independent("x2");
    for (const char* d : {"y1", "y2", "y3", "w11", "w12", "w22"}) b.dependent(d, {"x1", "x2"});
    return b.order(q).build();
}

SolvedSystem shell_a1(const Context& c) {
    return make_system(c, 1, {}, unknowns(c, {"y1", "y2", "y3"}),
                       eqs(c, {"y1[x1]^2 + y2[x1]^2 + y3[x1]^2 = w11",
                               "y1[x1]*y1[x2] + y2[x1]*y2[x2] + y3[x1]*y3[x2] = w12",
                               "y1[x2]^2 + y2[x2]^2 + y3[x2]^2 = w22"}));
}

const char* kGauss =
    "y1[x1,x1]*y1[x2,x2] - y1[x1,x2]^2 + y2[x1,x1]*y2[x2,x2] - y2[x1,x2]^2 + y3[x1,x1]*y3[x2,x2] - y3[x1,x2]^2 "
    "= w12[x1,x2] - 1/2*w22[x1,x1] - 1/2*w11[x2,x2]";

ContextPtr rigid_ctx(int q) {
    Context::Builder b;
    b.independent("u1").independent("u2").independent("u3");
    for (const char* d : {"Y1", "Y2", "Y3"}) b.dependent(d, {"u1", "u2", "u3"});
    return b.order(q).build();
}

SolvedSystem rigid_r1(const Context& c) {
    return make_system(c, 1, {}, {},
                       eqs(c, {"Y1[u1]^2 + Y2[u1]^2 + Y3[u1]^2 = 1", "Y1[u2]^2 + Y2[u2]^2 + Y3[u2]^2 = 1",
                               "Y1[u3]^2 + Y2[u3]^2 + Y3[u3]^2 = 1",
                               "Y1[u1]*Y1[u2] + Y2[u1]*Y2[u2] + Y3[u1]*Y3[u2] = 0",
                               "Y1[u1]*Y1[u3] + Y2[u1]*Y2[u3] + Y3[u1]*Y3[u3] = 0",
                               "Y1[u2]*Y1[u3] + Y2[u2]*Y2[u3] + Y3[u2]*Y3[u3] = 0"}));
}

}  // namespace

TEST_CASE("shell symbol characters and Cartan test") {
    auto c = shell_ctx(4);
    SolvedSystem a2 = prolong_system(*c, shell_a1(*c), 1);
    CHECK(a2.order == 2);
    CHECK(a2.equations.size() == 9);
    CHECK(fiber_dimension(*c, a2).value == 9);
    CharacterVector g2 = characters(*c, a2);
    CHECK(g2.alpha == std::vector<int>{2, 1});
    CHECK(g2.beta == std::vector<int>{4, 2});
    CHECK(g2.exact);
    CheckReport ct = cartan_test(*c, a2);
    CHECK(ct.ok);
    CHECK(ct.numbers["dim_symbol_next"] == 4);
    CHECK(ct.numbers["bound"] == 4);

    SolvedSystem a3 = prolong_system(*c, a2, 1);
    CHECK(a3.equations.size() == 18);
    CHECK(fiber_dimension(*c, a3).value == 12);
    CHECK(symbol_dimension(*c, a3).value == 4);
    CHECK(integrability_conditions(*c, a2).value == 1);
    CHECK(integrability_conditions(*c, shell_a1(*c)).value == 0);

    SolvedSystem a21 = a2;
    Equation gauss;
    std::string gs(kGauss);
    gauss.residual = parse(*c, gs.substr(0, gs.find('='))) - parse(*c, gs.substr(gs.find('=') + 1));
    gauss.source = 3;
    gauss.nu = MultiIndex(2);
    a21.equations.push_back(gauss);
    CHECK(fiber_dimension(*c, a21).value == 8);
    CharacterVector g21 = characters(*c, a21);
    CHECK(g21.alpha == std::vector<int>{2, 0});
    CHECK(cartan_test(*c, a21).ok);
}

TEST_CASE("shell Gauss condition is a combination of prolonged equations") {
    auto c = shell_ctx(3);
    SolvedSystem a2 = prolong_system(*c, shell_a1(*c), 1);
    auto find = [&](int src, std::vector<int> nu) {
        for (const auto& e : a2.equations)
            if (e.source == src && e.nu.e == nu) return e.residual;
        FAIL("missing prolonged equation");
        return RationalExpr();
    };
    // Gamma_{1,22} - gamma and Gamma_{1,12} - gamma from d_i Omega
    RationalExpr g122 = find(1, {0, 1}) - find(2, {1, 0}) * RationalExpr(Scalar(1, 2));
    RationalExpr g112 = find(0, {0, 1}) * RationalExpr(Scalar(1, 2));
    RationalExpr gauss = total_derivative(*c, g122, 0) - total_derivative(*c, g112, 1);
    std::string s(kGauss);
    auto k = s.find('=');
    RationalExpr expected = parse(*c, s.substr(0, k)) - parse(*c, s.substr(k + 1));
    CHECK(is_zero(*c, gauss - expected));
}

TEST_CASE("shell tower and compatibility count") {
    auto c = shell_ctx(5);
    SolvedSystem a1 = shell_a1(*c);
    for (int r = 0; r <= 2; ++r) {
        auto d = fiber_dimension(*c, prolong_system(*c, a1, 2 + r));
        CHECK(d.value == 3 * r + 12);
        CHECK(d.exact);
    }
    CHECK_THROWS_AS(prolong_system(*c, a1, 5), OrderOverflow);
    CHECK(prolong_system(*c, a1, 0).equations.size() == a1.equations.size());
}

TEST_CASE("shell completed system and rigid motions") {
    auto cx = shell_ctx(3);
    auto cy = rigid_ctx(3);
    SolvedSystem r1 = rigid_r1(*cy);
    SolvedSystem a1 = shell_a1(*cx);
    CHECK(fiber_dimension(*cy, r1).value == 6);
    CheckReport low = phs_check(*cx, a1, *cy, r1);
    CHECK(low.ok);
    CHECK(low.numbers["dim_X"] == 6);
    CheckReport high = phs_check(*cx, prolong_system(*cx, a1, 1), *cy, prolong_system(*cy, r1, 1));
    CHECK_FALSE(high.ok);
    CHECK(high.numbers["dim_X"] == 9);
    CHECK(high.numbers["dim_Y"] == 6);
    CHECK_FALSE(automorphic_criterion(*cx, a1, *cy, r1).ok);

    Context::Builder b;
    b.independent("x1").independent("x2");
    for (const char* d : {"y1", "y2", "y3", "w11", "w12", "w22", "g111", "g112", "g122", "g211", "g212", "g222",
                          "s11", "s12", "s22"})
        b.dependent(d, {"x1", "x2"});
    auto cc = b.order(3).build();
    std::vector<std::string> lines = {
        "y1[x1]^2 + y2[x1]^2 + y3[x1]^2 = w11", "y1[x1]*y1[x2] + y2[x1]*y2[x2] + y3[x1]*y3[x2] = w12",
        "y1[x2]^2 + y2[x2]^2 + y3[x2]^2 = w22"};
    const char* dirs[3] = {"x1,x1", "x1,x2", "x2,x2"};
    const char* ij[3] = {"11", "12", "22"};
    for (int r = 1; r <= 2; ++r)
        for (int k = 0; k < 3; ++k) {
            std::string d = dirs[k];
            std::string lhs;
            for (int m = 1; m <= 3; ++m)
                lhs += std::string(m > 1 ? " + " : "") + "y" + std::to_string(m) + "[x" + std::to_string(r) + "]*y" +
                       std::to_string(m) + "[" + d + "]";
            lines.push_back(lhs + " = g" + std::to_string(r) + ij[k]);
        }
    for (int k = 0; k < 3; ++k) {
        std::string d = dirs[k];
        lines.push_back("y1[x1]*y2[x2]*y3[" + d + "] - y1[x1]*y3[x2]*y2[" + d + "] - y2[x1]*y1[x2]*y3[" + d +
                        "] + y2[x1]*y3[x2]*y1[" + d + "] + y3[x1]*y1[x2]*y2[" + d + "] - y3[x1]*y2[x2]*y1[" + d +
                        "] = s" + ij[k]);
    }
    std::vector<EquationSpec> specs;
    for (const auto& l : lines) {
        auto k = l.find('=');
        specs.push_back({parse(*cc, l.substr(0, k)), parse(*cc, l.substr(k + 1)), false, l});
    }
    SolvedSystem full = make_system(*cc, 2, {}, unknowns(*cc, {"y1", "y2", "y3"}), specs);
    CHECK(symbol_dimension(*cc, full).value == 0);
    CHECK(cartan_test(*cc, full).ok);
    CHECK(compatibility_count(*cc, full).value == 12);
    CheckReport aut = automorphic_criterion(*cc, full, *cy, prolong_system(*cy, r1, 1));
    CHECK(aut.ok);
    CHECK(aut.numbers["dim_X"] == 6);
    CHECK(aut.numbers["dim_Y"] == 6);
    CHECK(aut.numbers["dim_X_next"] == 6);
    CHECK(aut.numbers["dim_Y_next"] == 6);
}

TEST_CASE("unimodular affine automorphic system") {
    Context::Builder bx;
    bx.independent("x").dependent("y1", {"x"}).dependent("y2", {"x"}).dependent("phi", {"x"}).dependent("psi", {"x"});
    auto cx = bx.order(4).build();
    Context::Builder by;
    by.independent("u1").independent("u2").dependent("Y1", {"u1", "u2"}).dependent("Y2", {"u1", "u2"});
    auto cy = by.order(4).build();
    auto u = unknowns(*cx, {"y1", "y2"});
    SolvedSystem a2 = make_system(*cx, 2, {}, u, eqs(*cx, {"y1[x]*y2[x,x] - y2[x]*y1[x,x] = phi"}));
    auto r_eqs = eqs(*cy, {"Y1[u1] = (1 + Y1[u2]*Y2[u1])/Y2[u2]", "Y1[u1,u1] = 0", "Y1[u1,u2] = 0", "Y1[u2,u2] = 0",
                           "Y2[u1,u1] = 0", "Y2[u1,u2] = 0", "Y2[u2,u2] = 0"},
                     true);
    SolvedSystem r2 = make_system(*cy, 2, {}, {}, r_eqs);
    CheckReport p2 = phs_check(*cx, a2, *cy, r2);
    CHECK(p2.ok);
    CHECK(p2.numbers["dim_X"] == 5);
    CHECK(p2.numbers["dim_Y"] == 5);
    CHECK(symbol_dimension(*cy, r2).value == 0);
    CHECK_FALSE(automorphic_criterion(*cx, a2, *cy, r2).ok);

    SolvedSystem a3 = make_system(
        *cx, 3, {}, u,
        eqs(*cx, {"y1[x]*y2[x,x] - y2[x]*y1[x,x] = phi", "y1[x]*y2[x,x,x] - y2[x]*y1[x,x,x] = phi[x]",
                  "y1[x,x]*y2[x,x,x] - y2[x,x]*y1[x,x,x] = psi"}));
    SolvedSystem r3 = prolong_system(*cy, r2, 1);
    CHECK(fiber_dimension(*cx, a3).value == 5);
    CHECK(fiber_dimension(*cy, r3).value == 5);
    CHECK(r3.fully_solved());
    CHECK(r3.equations.size() == 15);
    CHECK(r3.conditions.empty());
    CHECK(symbol_dimension(*cx, a3).value == 0);
    CheckReport aut = automorphic_criterion(*cx, a3, *cy, r3);
    CHECK(aut.ok);
    CHECK(aut.numbers["dim_X_next"] == 5);
    CHECK(aut.numbers["dim_Y_next"] == 5);
}

TEST_CASE("full jet space and zero symbol") {
    Context::Builder b;
    b.independent("x1").independent("x2").dependent("u", {"x1", "x2"});
    auto c = b.order(3).build();
    SolvedSystem s = make_system(*c, 1, {}, {}, {});
    CHECK(characters(*c, s).alpha == std::vector<int>{1, 1});
    CheckReport ct = cartan_test(*c, s);
    CHECK(ct.ok);
    CHECK(ct.numbers["bound"] == 3);
    CHECK(janet_board(*c, s).render().empty());

    Context::Builder bc;
    bc.independent("x").dependent("y1", {"x"}).dependent("y2", {"x"}).dependent("w", {"x"});
    auto cc = bc.order(3).build();
    SolvedSystem chain = make_system(
        *cc, 2, {}, unknowns(*cc, {"y1", "y2"}),
        eqs(*cc, {"y1[x]^2 + y2[x]^2 = w", "y1[x]*y1[x,x] + y2[x]*y2[x,x] = 1/2*w[x]"}));
    SolvedSystem chain2 = prolong_system(*cc, make_system(*cc, 1, {}, unknowns(*cc, {"y1", "y2"}),
                                                          eqs(*cc, {"y1[x]^2 + y2[x]^2 = w"})),
                                         1);
    CHECK(symbol_dimension(*cc, chain2).value == 1);
    CHECK(symbol_dimension(*cc, chain).value == 1);

    Context::Builder b1;
    b1.independent("x").dependent("u", {"x"});
    auto c1 = b1.order(2).build();
    SolvedSystem one = make_system(*c1, 1, {}, {}, eqs(*c1, {"u[x] = 0"}, true));
    CHECK(janet_board(*c1, one).render() == "x\n");
}

TEST_CASE("solved form validation") {
    Context::Builder b;
    b.independent("x").dependent("u", {"x"}).dependent("v", {"x"});
    auto c = b.order(2).build();
    CHECK_THROWS_AS(make_system(*c, 1, {}, {}, eqs(*c, {"u[x]*v = 0"}, true)), Error);
    CHECK_THROWS_AS(make_system(*c, 1, {}, {}, eqs(*c, {"u[x] = 1", "u[x] = 2"}, true)), Error);
    CHECK_THROWS_AS(make_system(*c, 3, {}, {}, {}), OrderOverflow);
    SolvedSystem s = make_system(*c, 1, {}, {}, eqs(*c, {"u[x] = v[x]*u", "v[x] = u"}, true));
    CHECK(s.equations[0].residual == parse(*c, "u[x] - u^2"));
}

TEST_CASE("Hamilton-Jacobi boards") {
    Context::Builder bg;
    bg.independent("X").independent("Z").independent("P");
    for (const char* d : {"xi", "eta", "zeta"}) bg.dependent(d, {"X", "Z", "P"});
    auto cg = bg.order(2).build();
    auto r1_eqs = eqs(*cg, {"xi[X] - P*eta[X] - zeta + P*(xi[Z] - P*eta[Z]) = 0", "xi[P] - P*eta[P] = 0"});
    SolvedSystem r1 = make_system(*cg, 1, ordering(*cg, {"Z", "P", "X"}), {}, r1_eqs);
    CHECK(integrability_conditions(*cg, r1).value == 1);
    r1_eqs.push_back(eqs(*cg, {"eta[X] - xi[Z] + zeta[P] + 2*P*eta[Z] = 0"})[0]);
    SolvedSystem r11 = make_system(*cg, 1, ordering(*cg, {"Z", "P", "X"}), {}, r1_eqs);
    CHECK(integrability_conditions(*cg, r11).value == 0);
    CHECK(fiber_dimension(*cg, r11).value == 9);
    CHECK(janet_board(*cg, r11).render() == golden("hj_groupoid.txt"));
    CHECK(cartan_test(*cg, r11).ok);

    Context::Builder bu;
    bu.independent("X").independent("Z").independent("P");
    for (const char* d : {"Xb", "Zb", "Pb"}) bu.dependent(d, {"X", "Z", "P"});
    auto cu = bu.order(2).build();
    SolvedSystem ru = make_system(*cu, 1, ordering(*cu, {"P", "X", "Z"}), {},
                                  eqs(*cu, {"Zb[Z] = 1", "Xb[Z] = 0", "Pb[Z] = 0", "Zb[X] = Pb*Xb[X] - P",
                                            "Xb[X] = (1 + Xb[P]*Pb[X])/Pb[P]", "Zb[P] = Pb*Xb[P]"},
                                      true));
    CHECK(fiber_dimension(*cu, ru).value == 6);
    CHECK(characters(*cu, ru).alpha == std::vector<int>{2, 1, 0});
    CHECK(janet_board(*cu, ru).render() == golden("hj_unimodular_groupoid.txt"));
    CHECK(cartan_test(*cu, ru).ok);
    SolvedSystem ru_implicit =
        make_system(*cu, 1, ordering(*cu, {"P", "X", "Z"}), {},
                    eqs(*cu, {"Zb[Z] = 1", "Xb[Z] = 0", "Pb[Z] = 0", "Zb[X] - Pb*Xb[X] = -P",
                              "Xb[X]*Pb[P] - Xb[P]*Pb[X] = 1", "Zb[P] - Pb*Xb[P] = 0"}));
    CHECK(janet_board(*cu, ru_implicit).render() == golden("hj_unimodular_groupoid.txt"));

    Context::Builder ba;
    ba.independent("t").independent("x").independent("z").independent("p");
    for (const char* d : {"X", "Z", "P"}) ba.dependent(d, {"t", "x", "z", "p"});
    ba.dependent("H", {"t", "x", "p"});
    auto ca = ba.order(2).build();
    auto u = unknowns(*ca, {"X", "Z", "P"});
    SolvedSystem au = make_system(
        *ca, 1, ordering(*ca, {"t", "p", "x", "z"}), u,
        eqs(*ca, {"Z[z] = 1", "X[z] = 0", "P[z] = 0", "Z[x] - P*X[x] = -p", "Z[p] - P*X[p] = 0", "Z[t] - P*X[t] = H",
                  "X[x]*P[p] - X[p]*P[x] = 1", "X[x]*P[t] - X[t]*P[x] = H[x]", "X[p]*P[t] - X[t]*P[p] = H[p]"}));
    CHECK(fiber_dimension(*ca, au).value == 6);
    CHECK(characters(*ca, au).alpha == std::vector<int>{2, 1, 0, 0});
    CHECK(janet_board(*ca, au).render() == golden("hj_unimodular_automorphic.txt"));

    SolvedSystem at = make_system(
        *ca, 1, ordering(*ca, {"p", "t", "x", "z"}), u,
        eqs(*ca, {"Z[z] = 1", "X[z] = 0", "P[z] = 0", "X[t] = 0", "Z[t] = H", "P[t] = 1", "X[x] = H[x]",
                  "X[p] = H[p]", "Z[x] - H[x]*P = -p", "Z[p] - H[p]*P = 0", "H[x]*P[p] - H[p]*P[x] = 1"}));
    CHECK(fiber_dimension(*ca, at).value == 4);
    CHECK(characters(*ca, at).alpha == std::vector<int>{1, 0, 0, 0});
    CHECK(janet_board(*ca, at).render() == golden("hj_translation_automorphic.txt"));

    SolvedSystem gt = make_system(*cu, 1, ordering(*cu, {"X", "P", "Z"}), {},
                                  eqs(*cu, {"Zb[Z] = 1", "Xb[Z] = 0", "Pb[Z] = 0", "Zb[P] = 0", "Xb[P] = 0",
                                            "Pb[P] = 1", "Xb[X] = 1", "Zb[X] - Pb = -P"}));
    CHECK(fiber_dimension(*cu, gt).value == 4);
    CHECK(characters(*cu, gt).alpha == std::vector<int>{1, 0, 0});
    CHECK(janet_board(*cu, gt).render() == golden("hj_translation_groupoid.txt"));

    Context::Builder bh;
    bh.independent("t").independent("x").independent("z").independent("p");
    for (const char* d : {"X", "Z", "P"}) bh.dependent(d, {"t", "x", "z", "p"});
    bh.dependent("H", {"t", "x", "z", "p"});
    auto ch = bh.order(2).build();
    auto uh = unknowns(*ch, {"X", "Z", "P"});
    const char* w = "(Z[z] - P*X[z])";
    std::vector<std::string> lines = {
        std::string("Z[x] - P*X[x] + p*") + w + " = 0",
        std::string("Z[t] - P*X[t] - H*") + w + " = 0",
        "Z[p] - P*X[p] = 0",
        std::string("(X[x] + p*X[z])*P[p] - X[p]*(P[x] + p*P[z]) - ") + w + " = 0",
        std::string("(X[x] + p*X[z])*(P[t] - H*P[z]) - (X[t] - H*X[z])*(P[x] + p*P[z]) - ") + w +
            "*(H[x] + p*H[z]) = 0",
        std::string("X[p]*(P[t] - H*P[z]) - (X[t] - H*X[z])*P[p] - ") + w + "*H[p] = 0"};
    std::vector<EquationSpec> specs;
    for (const auto& l : lines) {
        auto k = l.find('=');
        specs.push_back({parse(*ch, l.substr(0, k)), parse(*ch, l.substr(k + 1)), false, l});
    }
    SolvedSystem ah = make_system(*ch, 1, ordering(*ch, {"z", "p", "t", "x"}), uh, specs);
    CHECK(fiber_dimension(*ch, ah).value == 9);
    CHECK(janet_board(*ch, ah).render() == golden("hj_automorphic.txt"));

    // the free particle complete integral X = p, Z = z - p*x + p^2*t/2, P = p*t - x solves it for H = p^2/2
    Bindings sol;
    auto set = [&](const char* jet, const char* val) { sol[*parse(*ch, jet).variables().begin()] = parse(*ch, val); };
    set("X[t]", "0"), set("X[x]", "0"), set("X[z]", "0"), set("X[p]", "1");
    set("Z[t]", "1/2*p^2"), set("Z[x]", "-p"), set("Z[z]", "1"), set("Z[p]", "-x + p*t");
    set("P[t]", "p"), set("P[x]", "-1"), set("P[z]", "0"), set("P[p]", "t");
    set("H", "1/2*p^2"), set("H[t]", "0"), set("H[x]", "0"), set("H[z]", "0"), set("H[p]", "p");
    set("P", "p*t - x");
    for (const auto& e : ah.equations) CHECK(is_zero(*ch, substitute(e.residual, sol)));
}
