#include "doctest.h"
#include "drw/padic_linalg.hpp"

#include <random>
#include <set>

using namespace drw;

namespace {

// brute-force row span over Z/q (small q, small sizes only)
std::set<Vec> enumerate_row_span(const Matrix& m) {
    const Zmod& R = m.ring();
    std::set<Vec> out;
    size_t r = m.rows();
    std::vector<u64> coef(r, 0);
    while (true) {
        Vec v(m.cols(), 0);
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < m.cols(); ++j) v[j] = R.add(v[j], R.mul(coef[i], m(i, j)));
        out.insert(v);
        size_t k = 0;
        while (k < r && ++coef[k] == R.q()) coef[k++] = 0;
        if (k == r) break;
    }
    return out;
}

std::vector<Vec> all_vectors(const Zmod& R, size_t n) {
    std::vector<Vec> out;
    Vec v(n, 0);
    while (true) {
        out.push_back(v);
        size_t k = 0;
        while (k < n && ++v[k] == R.q()) v[k++] = 0;
        if (k == n) break;
    }
    return out;
}

Matrix random_matrix(const Zmod& R, size_t r, size_t c, std::mt19937_64& rng, int zero_bias = 0) {
    Matrix m(R, r, c);
    std::uniform_int_distribution<u64> dist(0, R.q() - 1);
    std::uniform_int_distribution<int> coin(0, 3);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) m.at(i, j) = (coin(rng) < zero_bias) ? 0 : dist(rng);
    return m;
}

}  // namespace

TEST_CASE("howell: small canonical cases") {
    Zmod Z4(2, 2);
    Matrix a = Matrix::from_rows(Z4, {{2}});
    CHECK(howell_form(a) == a);

    Matrix z(Z4, 3, 2);
    CHECK(howell_form(z).rows() == 0);
}

TEST_CASE("howell: [[1,2],[2,0]] over Z/4 against enumeration") {
    Zmod Z4(2, 2);
    Matrix m = Matrix::from_rows(Z4, {{1, 2}, {2, 0}});
    auto span = enumerate_row_span(m);
    Lattice L(m);
    // brute force: the span has 4 elements and does not contain (0,2)
    CHECK(span.size() == 4);
    CHECK(span.count(Vec{0, 2}) == 0);
    CHECK_FALSE(L.contains(Vec{0, 2}));
    CHECK(L.contains(Vec{2, 0}));
    for (const auto& v : all_vectors(Z4, 2)) CHECK(L.contains(v) == (span.count(v) == 1));
}

TEST_CASE("howell: idempotent and span preserving on random matrices") {
    std::mt19937_64 rng(7);
    for (auto [p, N] : std::vector<std::pair<u64, int>>{{2, 3}, {3, 2}, {5, 1}, {3, 3}}) {
        Zmod R(p, N);
        for (int t = 0; t < 30; ++t) {
            Matrix m = random_matrix(R, 1 + t % 4, 1 + (t / 4) % 3, rng, t % 3);
            Matrix H = howell_form(m);
            CHECK(howell_form(H) == H);
            Lattice L(m), LH(H);
            for (size_t i = 0; i < m.rows(); ++i) CHECK(LH.contains(m.row(i)));
            for (size_t i = 0; i < H.rows(); ++i) CHECK(L.contains(H.row(i)));
            if (std::pow(double(R.q()), double(m.cols())) <= 1000 && std::pow(double(R.q()), double(m.rows())) <= 20000) {
                auto span = enumerate_row_span(m);
                for (const auto& v : all_vectors(R, m.cols())) CHECK(L.contains(v) == (span.count(v) == 1));
                CHECK(int(span.size()) * 1 > 0);
            }
        }
    }
}

TEST_CASE("kernel: examples") {
    Zmod Z4(2, 2);
    Matrix m = Matrix::from_rows(Z4, {{2, 2}});
    Matrix K = kernel(m);
    CHECK((m * K).is_zero());
    Lattice LK = Lattice::from_columns(K);
    CHECK(LK.contains(Vec{1, 1}));
    CHECK(LK.contains(Vec{2, 0}));
    // enumeration of all 16 vectors
    for (const auto& v : all_vectors(Z4, 2)) CHECK(LK.contains(v) == vec_is_zero(m.apply(v)));

    Zmod Z9(3, 2);
    Matrix mp = Matrix::from_rows(Z9, {{3}});
    Matrix Kp = kernel(mp);
    CHECK(Lattice::from_columns(Kp).contains(Vec{3}));
    CHECK_FALSE(Lattice::from_columns(Kp).contains(Vec{1}));

    CHECK(kernel(Matrix::identity(Z9, 3)).cols() == 0);
}

TEST_CASE("kernel: rank-nullity by enumeration, p^N <= 27") {
    std::mt19937_64 rng(11);
    for (auto [p, N] : std::vector<std::pair<u64, int>>{{2, 2}, {3, 1}, {3, 2}, {2, 3}, {3, 3}, {5, 1}}) {
        Zmod R(p, N);
        for (int t = 0; t < 12; ++t) {
            size_t r = 1 + t % 3, c = 1 + (t / 3) % 3;
            if (std::pow(double(R.q()), double(c)) > 20000) continue;
            Matrix m = random_matrix(R, r, c, rng, t % 3);
            Matrix K = kernel(m);
            CHECK((m * K).is_zero());
            auto img = enumerate_row_span(m.transpose());  // column span of m
            size_t kers = 0;
            for (const auto& v : all_vectors(R, c)) kers += vec_is_zero(m.apply(v));
            double total = std::pow(double(R.q()), double(c));
            CHECK(double(img.size()) * double(kers) == total);
            Lattice LK = Lattice::from_columns(K);
            for (const auto& v : all_vectors(R, c)) CHECK(LK.contains(v) == vec_is_zero(m.apply(v)));
        }
    }
}

TEST_CASE("solve: examples and substitution oracle") {
    Zmod Z4(2, 2);
    Matrix m = Matrix::from_rows(Z4, {{2}});
    auto x = solve(m, Vec{2});
    REQUIRE(x);
    CHECK((*x)[0] == 1);
    CHECK_FALSE(solve(m, Vec{1}));

    Zmod Z27(3, 3);
    std::mt19937_64 rng(5);
    int solved = 0;
    for (int t = 0; t < 40; ++t) {
        Matrix a = random_matrix(Z27, 6, 6, rng, t % 4);
        Vec b(6);
        if (t % 2 == 0) {
            Vec y(6);
            for (auto& e : y) e = rng() % 27;
            b = a.apply(y);
        } else {
            for (auto& e : b) e = rng() % 27;
        }
        auto s = solve(a, b);
        if (t % 2 == 0) REQUIRE(s);
        if (s) {
            CHECK(a.apply(*s) == b);
            ++solved;
        }
    }
    CHECK(solved >= 20);
}

TEST_CASE("subquotient: examples") {
    Zmod Z4(2, 2);
    Matrix v = Matrix::from_rows(Z4, {{1}, {0}});
    Matrix pv = Matrix::from_rows(Z4, {{2}, {0}});
    CHECK(subquotient(v, pv).divisors == std::vector<int>{1});
    CHECK(subquotient(v, v).divisors.empty());

    Zmod Z8(2, 3);
    Matrix cyc = Matrix::identity(Z8, 2);
    Matrix bd = Matrix::from_rows(Z8, {{2, 0}, {0, 4}});
    auto sq = subquotient(cyc, bd);
    CHECK(sq.divisors == std::vector<int>{1, 2});
    CHECK(sq.module.log_order() == 3);

    CHECK_THROWS_AS(subquotient(pv, v), ContainmentError);
}

TEST_CASE("subquotient: divisors invariant under permutations") {
    Zmod R(3, 3);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        Matrix cyc = Matrix::identity(R, 3);
        Matrix bd = random_matrix(R, 3, 3, rng, 1).scaled(3);
        auto base = subquotient(cyc, bd).divisors;
        Matrix P(R, 3, 3);
        P.at(0, 2) = P.at(1, 0) = P.at(2, 1) = 1;
        auto permuted = subquotient(P * cyc, P * bd).divisors;
        CHECK(permuted == base);
        Matrix colperm = bd * P;
        CHECK(subquotient(cyc, colperm).divisors == base);
    }
}

TEST_CASE("smith and module orders agree with enumeration") {
    Zmod R(2, 3);
    std::mt19937_64 rng(13);
    for (int t = 0; t < 20; ++t) {
        Matrix rel = random_matrix(R, 2, 2, rng, 1);
        ModulePresentation M(R, 2, rel);
        auto span = enumerate_row_span(rel.transpose());
        int lo = 0;
        size_t idx = 64 / span.size();
        while (idx > 1) {
            idx /= 2;
            ++lo;
        }
        CHECK(M.log_order() == lo);
        int sum = 0;
        for (int e : M.divisors()) sum += e;
        CHECK(sum == lo);
    }
}

TEST_CASE("moduli mixing is a fault") {
    Zmod A(2, 2), B(3, 2);
    CHECK_THROWS_AS(Matrix::identity(A, 2) * Matrix::identity(B, 2), ModulusMismatch);
}
