#include "doctest.h"
#include "drw/monomial.hpp"

#include <random>

using namespace drw;

namespace {

std::shared_ptr<const LogChart> block01(int p) {
    return std::make_shared<LogChart>(p, std::vector<std::vector<std::string>>{{"T0", "T1"}}, std::vector<SmoothVar>{});
}

}  // namespace

TEST_CASE("chart json round trip and validation") {
    nlohmann::json j = nlohmann::json::parse(R"({"prime":3,"blocks":[["T0","T1"]],"smooth":[{"name":"u","laurent":true}]})");
    LogChart c = LogChart::from_json(j);
    CHECK(c.nvars() == 3);
    CHECK(c.is_laurent(2));
    CHECK(c.block_of(1) == 0);
    CHECK(LogChart::from_json(c.to_json()) == c);
    CHECK_THROWS_AS(LogChart::from_json(nlohmann::json::parse(R"({"prime":4,"blocks":[["a"]]})")), ChartError);
    CHECK_THROWS_AS(LogChart::from_json(nlohmann::json::parse(R"({"prime":2,"blocks":[["a","a"]]})")), ChartError);
    CHECK_THROWS_AS(LogChart::from_json(nlohmann::json::parse(R"({"prime":2,"blocks":[[]]})")), ChartError);
    CHECK_THROWS_AS(LogChart::from_json(nlohmann::json::parse(R"({"prime":2,"blok":[]})")), ChartError);
}

TEST_CASE("multiply: block vanishing") {
    auto c = block01(2);
    Zmod F2(2, 1);
    PRat D = PRat::integer(6, 2);
    auto T0 = MonomialElement::monomial(c, F2, D, ExponentVector::unit(2, 2, 0));
    auto T1 = MonomialElement::monomial(c, F2, D, ExponentVector::unit(2, 2, 1));
    CHECK((T0 * T1).is_zero());
    auto one = MonomialElement::constant(c, F2, D, 1);
    CHECK(one * T0 == T0);
    auto s = (T0 + T1) * (T0 + T1);
    CHECK(s == T0 * T0 + T1 * T1);

    Zmod F3(3, 1);
    auto c3 = block01(3);
    PRat D3 = PRat::integer(6, 3);
    auto U0 = MonomialElement::monomial(c3, F3, D3, ExponentVector::unit(3, 2, 0));
    auto U1 = MonomialElement::monomial(c3, F3, D3, ExponentVector::unit(3, 2, 1));
    CHECK((U0 + U1) * (U0 + U1) == U0 * U0 + U1 * U1);
}

TEST_CASE("ring axioms, ideal property and frobenius on random elements") {
    std::mt19937_64 rng(17);
    LogChart base(3, {{"T0", "T1"}}, {{"u", true}});
    auto c = std::make_shared<const LogChart>(base);
    Zmod R(3, 2);
    PRat D = PRat::integer(12, 3);
    auto random_el = [&]() {
        MonomialElement m(c, R, D);
        for (int k = 0; k < 4; ++k) {
            std::vector<i64> e = {i64(rng() % 3), i64(rng() % 3), i64(rng() % 3) - 1};
            m.add_term(ExponentVector(3, e), rng() % 9);
        }
        return m;
    };
    for (int t = 0; t < 30; ++t) {
        auto a = random_el(), b = random_el(), d = random_el();
        CHECK((a * b) * d == a * (b * d));
        CHECK(a * (b + d) == a * b + a * d);
        CHECK(a * b == b * a);
        auto van = MonomialElement::monomial(c, R, D, ExponentVector(3, {1, 1, 0}));
        CHECK(van.is_zero());
        CHECK(((a * b).frobenius()) == a.frobenius() * b.frobenius());
    }
    Zmod F3(3, 1);
    for (int t = 0; t < 20; ++t) {
        MonomialElement a(c, F3, PRat::integer(20, 3)), b(c, F3, PRat::integer(20, 3));
        for (int k = 0; k < 3; ++k) {
            a.add_term(ExponentVector(3, {i64(rng() % 2), i64(rng() % 2), i64(rng() % 3) - 1}), 1 + rng() % 2);
            b.add_term(ExponentVector(3, {i64(rng() % 2), i64(rng() % 2), i64(rng() % 3) - 1}), 1 + rng() % 2);
        }
        CHECK((a + b).frobenius() == a.frobenius() + b.frobenius());
        // over Z/p the exponent map is the ring Frobenius
        CHECK(a.pow(3) == a.frobenius());
    }
}

TEST_CASE("frobenius records its exact window") {
    auto c = block01(2);
    Zmod F2(2, 1);
    auto T0 = MonomialElement::monomial(c, F2, PRat::integer(4, 2), ExponentVector::unit(2, 2, 0));
    auto f = T0.frobenius();
    CHECK(f == MonomialElement::monomial(c, F2, PRat::integer(4, 2), ExponentVector::unit(2, 2, 0, 2)));
    CHECK(f.exact_below() == PRat{2, 0, 2});
}

TEST_CASE("enumerate_basis examples") {
    LogChart c(2, {{"T0", "T1"}}, {});
    auto b = enumerate_basis(c, 0, 2, 0);
    REQUIRE(b.size() == 5);
    CHECK(b[0].is_zero());
    CHECK(b[1] == ExponentVector::unit(2, 2, 0));
    CHECK(enumerate_basis(c, 0, 0, 0).size() == 1);
    for (int p : {2, 3, 5}) {
        LogChart cp(p, {{"T0", "T1"}}, {});
        CHECK(enumerate_basis(cp, 1, 1, 0).size() == size_t(2 * p + 1));
    }
    LogChart lu(2, {}, {{"u", true}});
    CHECK(enumerate_basis(lu, 0, 3, 2).size() == 5);
}
