#include "doctest.h"
#include "common/witt_oracle.hpp"
#include "drw/witt.hpp"

#include <random>

using namespace drw;

namespace {

std::shared_ptr<const LogChart> point(int p) {
    return std::make_shared<LogChart>(p, std::vector<std::vector<std::string>>{}, std::vector<SmoothVar>{});
}

WittVector constants(std::shared_ptr<const LogChart> c, std::vector<i64> v) {
    Zmod F(c->p(), 1);
    std::vector<MonomialElement> m;
    for (i64 x : v) m.push_back(MonomialElement::constant(c, F, PRat::integer(8, c->p()), x));
    return WittVector(m);
}

}  // namespace

TEST_CASE("structure polynomials validate against ghost identities") {
    for (int p : {2, 3, 5})
        for (int n = 1; n <= (p == 5 ? 3 : 4); ++n) CHECK(witt_polys(p, n).validate());
    // S_1 for p = 2 is a0 b0 over F_2 up to sign conventions: (1,0)+(1,0) = (0,1)
    auto c = point(2);
    CHECK(witt_add(constants(c, {1, 0}), constants(c, {1, 0})) == constants(c, {0, 1}));
    CHECK(witt_mul(constants(c, {1, 1}), constants(c, {1, 1})) == constants(c, {1, 0}));
    CHECK(witt_add(constants(c, {1, 1}), constants(c, {0, 0})) == constants(c, {1, 1}));
}

TEST_CASE("Witt examples match the ghost-lift oracle") {
    auto c = point(2);
    auto one = constants(c, {1, 0});
    CHECK(oracle::add(one, one) == constants(c, {0, 1}));
    CHECK(oracle::mul(constants(c, {1, 1}), constants(c, {1, 1})) == constants(c, {1, 0}));
    // split: (1,1) = [1] + V[1]
    auto [a0, rest] = split(constants(c, {1, 1}));
    CHECK(a0 == constants(c, {1})[0]);
    CHECK(witt_add(teichmuller(a0, 2), verschiebung(WittVector(std::vector<MonomialElement>{rest[0], rest[0]}))) ==
          constants(c, {1, 1}));
}

TEST_CASE("F, V and Teichmuller basics") {
    LogChart ch(3, {{"T0", "T1"}}, {{"x", false}});
    auto c = std::make_shared<const LogChart>(ch);
    Zmod F3(3, 1);
    PRat D = PRat::integer(60, 3);
    auto T0 = MonomialElement::monomial(c, F3, D, ExponentVector::unit(3, 3, 0));
    auto x = MonomialElement::monomial(c, F3, D, ExponentVector::unit(3, 3, 2), 2);
    auto a = T0 + x;
    for (size_t n = 2; n <= 3; ++n) {
        CHECK(frobenius_W(teichmuller(a, n)) == teichmuller(a.pow(3), n - 1));
        auto t = teichmuller(a, n);
        CHECK(frobenius_W(verschiebung(t)) == witt_mul(restrict_W(t, n - 1), WittVector::integer(c, n - 1, D, 3)));
        auto [h, tail] = split(verschiebung(t));
        CHECK(h.is_zero());
        CHECK(tail == restrict_W(t, n - 1));
    }
    auto V1 = verschiebung(WittVector::integer(point(2), 2, PRat::integer(4, 2), 1));
    CHECK(frobenius_W(V1) == WittVector::zero(point(2), 1, PRat::integer(4, 2)));
}
