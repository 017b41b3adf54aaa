#include <doctest.h>

#include "vessiot/diffideal.hpp"

using namespace vessiot;

namespace {

ContextPtr plane(int q) {
    Context::Builder b;
    b.independent("x1").independent("x2").dependent("y", {"x1", "x2"}).dependent("w", {"x1", "x2"});
    return b.order(q).build();
}

DiffPolySet example_gens(const ContextPtr& c) {
    return {c, {parse(*c, "y[x2,x2] - y[x1,x1]^3/3"), parse(*c, "y[x1,x2] - y[x1,x1]^2/2")}};
}

RationalExpr d(const Context& c, const RationalExpr& e, std::size_t i) { return total_derivative(c, e, i); }

}  // namespace

TEST_CASE("prolonged generator sets") {
    auto c = plane(4);
    DiffPolySet lin{c, {parse(*c, "y[x1] - w*y[x2]")}};
    auto p1 = prolong_gens(lin, 1);
    REQUIRE(p1.generators.size() == 3);
    CHECK(is_zero(*c, p1.generators[1] - d(*c, lin.generators[0], 0)));
    CHECK(is_zero(*c, p1.generators[2] - d(*c, lin.generators[0], 1)));
    CHECK(same_generators(prolong_gens(lin, 0), lin));

    auto s = example_gens(c);
    CHECK(prolong_gens(s, 1).generators.size() == 6);
    CHECK(same_generators(prolong_gens(prolong_gens(s, 1), 1), prolong_gens(s, 2)));
    CHECK(prolong_gens(s, 2).generators.size() == 12);
    DiffPolySet dup{c, {parse(*c, "y[x1]"), parse(*c, "y")}};
    CHECK(prolong_gens(dup, 1).generators.size() == 5);
    CHECK_THROWS_AS(prolong_gens(s, 3), OrderOverflow);
}

TEST_CASE("syzygy between the two generators") {
    auto c = plane(3);
    auto s = example_gens(c);
    const auto& P1 = s.generators[0];
    const auto& P2 = s.generators[1];
    auto y11 = parse(*c, "y[x1,x1]");
    CHECK(syzygy_check(*c, d(*c, P2, 1) - d(*c, P1, 0) + y11 * d(*c, P2, 0)).ok);
    CHECK(syzygy_check(*c, d(*c, P1, 0) - d(*c, P1, 0)).ok);
    auto bad = syzygy_check(*c, d(*c, P2, 1) - d(*c, P1, 0) - y11 * d(*c, P2, 0));
    CHECK_FALSE(bad.ok);
    CHECK(is_zero(*c, parse(*c, bad.witness) - parse(*c, "2*y[x1,x1]*(y[x1,x1]*y[x1,x1,x1] - y[x1,x1,x2])")));
}

TEST_CASE("residue ring has parametric jets y, y1, y2 and pure x1 derivatives") {
    auto c = plane(4);
    auto s = example_gens(c);
    std::vector<Var> principal;
    for (int o = 2; o <= 4; ++o)
        for (Var v : c->jets_of_order(0, o))
            if (c->id(v).mu.e[1] > 0) principal.push_back(v);
    DiffPolySet only_y{c, s.generators};
    std::vector<Var> py = principal;
    auto rep = residue_ring_check(only_y, 2, py);
    CHECK(rep.numbers["principal"] == 9);
    CHECK(rep.numbers["solved"] == 9);
    CHECK(rep.numbers["redundant"] == 3);
    CHECK(rep.numbers["generators"] == 12);
    CHECK(rep.ok);
    py.pop_back();
    CHECK_FALSE(residue_ring_check(only_y, 2, py).ok);
}

TEST_CASE("radical power certificates") {
    Context::Builder b;
    b.independent("x").dependent("y", {"x"});
    auto c = b.order(8).build();
    auto y = parse(*c, "y");
    auto one = radical_power_membership(*c, y, 0, 1);
    CHECK(one.report.ok);
    REQUIRE(one.coefficients.size() == 2);
    CHECK(one.coefficients[1] == RationalExpr(1));
    auto two = radical_power_membership(*c, y, 0, 2);
    CHECK(two.report.ok);
    CHECK(is_zero(*c, two.target - parse(*c, "y[x]^3")));
    for (int r = 1; r <= 4; ++r) {
        CHECK(radical_power_membership(*c, y, 0, r).report.ok);
        CHECK(radical_power_membership(*c, parse(*c, "y^2"), 0, r).report.ok);
        CHECK(radical_power_membership(*c, parse(*c, "y[x] - x*y"), 0, r).report.ok);
    }
    CHECK_THROWS_AS(radical_power_membership(*c, y, 0, 5), CertificateSearchExceeded);
}
