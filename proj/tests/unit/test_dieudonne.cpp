#include "doctest.h"

#include <random>

#include "common/synthetic.hpp"
#include "drw/dieudonne.hpp"
#include "drw/log_forms.hpp"

using namespace drw;

namespace {

LatticeComplex times_p_complex(int p, int N) {
    Zmod R(p, N);
    Matrix m = Matrix::from_rows(R, {{p}});
    return LatticeComplex::free(R, {1, 1}, {{m, 0}});
}

// the weight complex of the chart at an integral exponent, over Z/p^N
LatticeComplex weight_complex(const DlogBasis& B, const ExponentVector& a, const Zmod& R) {
    WeightForms w = weight_forms(B, a, R);
    std::vector<size_t> dims;
    std::vector<RationalMap> d;
    for (size_t i = 0; i < w.basis.size(); ++i) dims.push_back(w.dim(static_cast<int>(i)));
    for (const auto& m : w.dnum) d.push_back({m, w.dden});
    return LatticeComplex::free(R, dims, d);
}

std::vector<AmbientFn> identities(int n) {
    return std::vector<AmbientFn>(static_cast<size_t>(n), [](const Vec& x) { return x; });
}

}  // namespace

TEST_CASE("eta_p kills p-torsion of [x p]") {
    LatticeComplex C = times_p_complex(3, 8);
    CHECK(C.zp_cohomology(1) == std::vector<int>{1});
    CHECK(C.zp_cohomology(0).empty());
    LatticeComplex E = eta_p(C);
    CHECK(E.guard() == 2);
    CHECK(E.zp_cohomology(1).empty());
    CHECK(E.cohomology_mod(1).cohomology(1).log_order() == 0);
    // over Z/p the complex is [0 -> F_p] in both degrees: H^1(C/p) = F_p
    CHECK(C.cohomology_mod(1).module(1).log_order() == 1);
}

TEST_CASE("zero complex") {
    Zmod R(2, 6);
    LatticeComplex C = LatticeComplex::free(R, {0, 0}, {{Matrix(R, 0, 0), 0}});
    LatticeComplex E = eta_p(C);
    CHECK(E.zp_cohomology(0).empty());
    CHECK(E.zp_cohomology(1).empty());
    CHECK(gamma_check(C).pass);
}

TEST_CASE("eta_p precision guard") {
    Zmod R(2, 2);
    LatticeComplex C = LatticeComplex::free(R, {1, 1}, {{Matrix::from_rows(R, {{2}}), 0}});
    CHECK_THROWS_AS(eta_p(C), PrecisionExhausted);
}

TEST_CASE("Bockstein") {
    const int p = 2;
    Zmod R(p, 10);
    DlogBasis B(LogChart(p, {{"T0", "T1"}}, {}), LogBase::Standard);
    // at exponent p^r e_1 the class of X_1^{p^r} has beta = X_1^{p^r} e_1
    for (int r = 1; r <= 3; ++r) {
        i64 a = 1 << r;
        LatticeComplex K = weight_complex(B, ExponentVector(p, {0, a}, 0), R);
        ComplexLevel X = K.cohomology_mod(r);
        Vec one{1};
        CHECK(X.module(0).contains(one));
        CHECK(K.bockstein(0, r, one) == Vec{1});
    }
    // not a cocycle at exponent 1 mod p
    LatticeComplex K1 = weight_complex(B, ExponentVector(p, {0, 1}, 0), R);
    CHECK_THROWS_AS(K1.bockstein(0, 1, Vec{1}), LiftFailure);
    // beta of a class that lifts to a cocycle is zero
    LatticeComplex K0 = weight_complex(B, ExponentVector(p, {0, 0}, 0), R);
    CHECK(vec_is_zero(K0.bockstein(0, 1, Vec{1})));
}

TEST_CASE("beta squared vanishes on H^0 of the weight complexes") {
    const int p = 2;
    Zmod R(p, 10);
    DlogBasis B(LogChart(p, {{"T0", "T1", "T2"}}, {}), LogBase::Standard);
    for (const auto& a : enumerate_basis(B.chart(), 0, 6, 1)) {
        LatticeComplex K = weight_complex(B, a, R);
        ComplexLevel X = K.cohomology_mod(1);
        std::string w;
        CHECK(X.d_squared_zero(&w));
    }
}

TEST_CASE("phi_F on the weight complexes is onto eta_p") {
    for (int p : {2, 3}) {
        Zmod R(p, 12);
        for (const auto& c : {LogChart(p, {{"T0", "T1"}}, {}), LogChart(p, {{"T0", "T1"}}, {{"u", true}})}) {
            DlogBasis B(c, LogBase::Standard);
            for (const auto& a : enumerate_basis(c, 0, 4, 1)) {
                LatticeComplex src = weight_complex(B, a, R);
                LatticeComplex dst = weight_complex(B, a.times_p(), R);
                PhiFReport rep = phi_F(src, dst, identities(src.top() + 1));
                INFO(rep.witness);
                CHECK(rep.chain_map);
                CHECK(rep.into_eta);
                CHECK(rep.bijective);
            }
        }
    }
}

TEST_CASE("Cartier criterion on weight complexes") {
    const int p = 3;
    Zmod R(p, 8);
    DlogBasis B(LogChart(p, {{"T0", "T1"}}, {{"x", false}}), LogBase::Standard);
    for (const auto& a : enumerate_basis(B.chart(), 0, 4, 1)) {
        auto rep = cartier_criterion_check(weight_complex(B, a, R), weight_complex(B, a.times_p(), R),
                                           identities(static_cast<int>(B.size()) + 1));
        INFO(rep.witness);
        CHECK(rep.pass);
    }
    // F = 0 with nonzero cohomology
    LatticeComplex K = weight_complex(B, ExponentVector::zero(p, 3), R);
    std::vector<AmbientFn> zero(static_cast<size_t>(K.top() + 1), [](const Vec& x) { return Vec(x.size(), 0); });
    CHECK_FALSE(cartier_criterion_check(K, K, zero).pass);
}

TEST_CASE("restriction via psi on weight complexes") {
    const int p = 2, r = 2;
    Zmod R(p, 12);
    DlogBasis B(LogChart(p, {{"T0", "T1"}}, {}), LogBase::Standard);
    // [X_1^{p^r}] at level r restricts to [X_1^{p^{r-1}}]
    LatticeComplex big = weight_complex(B, ExponentVector(p, {0, 4}, 0), R);
    LatticeComplex small = weight_complex(B, ExponentVector(p, {0, 2}, 0), R);
    auto F = identities(2);
    Vec z = restriction_via_psi(small, big, F, r, 0, Vec{1});
    SubQ H = small.cycles_mod(0, r - 1);
    CHECK(H.equal(z, Vec{1}));
    // e_1 -> e_1 at exponent 0
    LatticeComplex K0 = weight_complex(B, ExponentVector::zero(p, 2), R);
    Vec e = restriction_via_psi(K0, K0, F, r, 1, Vec{1});
    CHECK(K0.cycles_mod(1, r - 1).equal(e, Vec{1}));
    // with F = 0 nothing is in the image of psi
    std::vector<AmbientFn> F0(2, [](const Vec& x) { return Vec(x.size(), 0); });
    CHECK_THROWS_AS(restriction_via_psi(small, big, F0, r, 0, Vec{1}), PsiNotInvertible);
}

TEST_CASE("synthetic complexes: eta_p and gamma") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        int p = t % 2 ? 3 : 2;
        auto S = synth::random_complex(rng, p, 24, 1 + t % 4, 5, 5);
        for (int i = 0; i <= S.C.top(); ++i) CHECK(S.C.zp_cohomology(i) == S.expected[static_cast<size_t>(i)]);
        LatticeComplex E = eta_p(S.C);
        for (int i = 0; i <= S.C.top(); ++i)
            CHECK(E.zp_cohomology(i) == synth::kill_p_torsion(S.expected[static_cast<size_t>(i)], 24));
        auto g = gamma_check(S.C);
        INFO(g.witness);
        CHECK(g.pass);
    }
}
