#pragma once

// Koszul complexes of the monomial chart after crystalline specialization, their
// Bockstein towers with coordinate log data, and the comparison with the de Rham-Witt tower.
//
// K_a is spanned by X^a e_I for an integral exponent vector a, with
// d(X^a e_I) = sum_l c_l(a) X^a e_l ^ e_I, c_{h,i}(a) = a_{h,i} - a_{h,0} on block symbols and
// c_u(a) = a_u on laurent (and positive non-log) smooth symbols. X is displayed as T^(1/p).

#include <map>
#include <memory>
#include <mutex>

#include "drw/drw_chart.hpp"

namespace drw {

struct ComparisonFailure : std::runtime_error {
    explicit ComparisonFailure(const std::string& what) : std::runtime_error(what) {}
};

class KoszulModel {
public:
    // exponents of degree <= D, coefficients Z/p^r; lattices are held at surplus precision
    KoszulModel(const LogChart& chart, int r, i64 D, i64 L = 1);

    const LogChart& chart() const { return B_->chart(); }
    const DlogBasis& basis() const { return *B_; }
    int level() const { return r_; }
    const Zmod& ring() const { return R_; }
    size_t symbol_count(size_t block) const;
    // integral exponents of degree <= D
    const std::vector<ExponentVector>& monomials() const;

    const WeightForms& forms(const ExponentVector& a) const;
    // K_a over Z_p (modelled at the surplus precision)
    const LatticeComplex& complex(const ExponentVector& a) const;
    Vec d(const ExponentVector& a, int i, const Vec& x) const;
    // H^i(K_a / p^s)
    std::vector<int> cohomology_divisors(const ExponentVector& a, int i, int s) const;
    std::string display(const ExponentVector& a, Mask I) const;

private:
    struct Entry {
        WeightForms wf;
        LatticeComplex K;
    };
    const Entry& entry(const ExponentVector& a) const;

    std::shared_ptr<const DlogBasis> B_;
    int r_;
    i64 D_, L_;
    Zmod R_;
    mutable std::vector<ExponentVector> mono_;
    mutable std::mutex mu_;
    mutable bool mono_done_ = false;
    mutable std::map<ExponentVector, std::unique_ptr<Entry>> cache_;
};

KoszulModel build_koszul(const LogChart& chart, int r, i64 D, i64 L = 1);

// psi = p^i F with F(X^a e_I) = X^{pa} e_I, from K_a into eta_p K_{pa}
PhiFReport divided_frobenius(const KoszulModel& K, const ExponentVector& a);
CheckResult divided_frobenius_check(const KoszulModel& K);

// Level r at weight k is (H^*(K_{p^r k} / p^r), beta). F reduces, V multiplies by p,
// R = psi^{-1} mu_r through restriction_via_psi.
class KoszulTower : public GradedTower {
public:
    KoszulTower(const LogChart& chart, int r_max, i64 D, i64 L = 1);

    const LogChart& chart() const override { return K_.chart(); }
    int max_level() const override { return rmax_; }
    int top() const override { return K_.basis().top_degree(); }
    std::vector<ExponentVector> weights(int r) const override;
    bool in_window(int r, const ExponentVector& k) const override;
    const SubQ& piece(int r, const ExponentVector& k, int i) const override;
    Vec d(int r, const ExponentVector& k, int i, const Vec& x) const override;
    Vec F(int r, const ExponentVector& k, int i, const Vec& x) const override;
    Vec V(int r, const ExponentVector& k, int i, const Vec& x) const override;
    Vec R(int r, const ExponentVector& k, int i, const Vec& x) const override;
    Vec mul(int r, const ExponentVector& k1, int i1, const Vec& x, const ExponentVector& k2, int i2,
            const Vec& y) const override;
    Vec teichmuller(int r, const ExponentVector& m) const override;
    // gamma_r(dlog T_v) in degree 1 at weight 0: e_{h,i}, and -(e_{h,1} + ... ) for T_{h,0}
    Vec gamma(int r, size_t var) const;

    const KoszulModel& model() const { return K_; }
    const Zmod& ring() const { return K_.ring(); }
    i64 degree_bound() const { return D_; }
    // the exponent a = p^r k carried by a level-r weight
    static ExponentVector exponent(int r, const ExponentVector& k) { return k.times_p(r); }

private:
    KoszulModel K_;
    int rmax_;
    i64 D_, L_;
    mutable std::mutex mu_;
    mutable std::map<std::tuple<int, ExponentVector, int>, std::unique_ptr<SubQ>> pieces_;
};

std::unique_ptr<KoszulTower> build_ar_tower(const LogChart& chart, int r_max, i64 D, i64 L = 1);

// alpha_r(b_{h,i}) = [X_{h,i}^{p^r}] (displayed T_{h,i}^{p^{r-1}}), delta_r(b_{h,i}) = [e_{h,i}],
// delta_r(b_{h,0}) = -(e_{h,1} + ... + e_{h,r_h})
LogData specialized_log_data(const KoszulTower& X);

struct TauReport {
    bool pass = true;
    bool unique = true;
    bool bijective = true;
    bool identity_on_coefficients = true;  // the two towers share coefficient lattices
    std::string witness;
    int levels = 0;
    long pieces = 0;
    long checks = 0;
    void fail(const std::string& w) {
        if (pass) witness = w;
        pass = false;
    }
};
// tau on levels 1..r. At integral weights T^m dlog_I goes to prod alpha^m * delta^I (dx to
// beta alpha(x)); the map is then solved weight by weight from beta tau = tau d, tau V = V tau,
// R tau = tau R, F tau = tau F against the level below. Pieces are compared modulo p^r.
class TauMap {
public:
    struct Piece {
        SubQ P, Q;   // W and X pieces over Z/p^r
        Matrix img;  // columns: tau of the P generators, in the X ambient
    };
    TauMap(const DRWTower& W, const KoszulTower& X, int r);
    // alpha from L, each variable's Teichmuller factor scaled by unit[v]
    TauMap(const DRWTower& W, const KoszulTower& X, int r, const LogData& L, std::vector<u64> unit);

    const TauReport& report() const { return report_; }
    bool shared(int r, const ExponentVector& k) const;
    const Piece* find(int r, const ExponentVector& k, int i) const;
    const std::map<std::tuple<int, ExponentVector, int>, Piece>& pieces() const { return pieces_; }
    // x in the W ambient at (r, k, i); the image is an X ambient vector modulo p^r
    Vec apply(int r, const ExponentVector& k, int i, const Vec& x) const;
    // in presentation coordinates, reduced
    Matrix matrix(int r, const ExponentVector& k, int i) const;

private:
    void build_level(int r);
    const DRWTower& W_;
    const KoszulTower& X_;
    LogData L_;
    std::vector<u64> unit_;
    std::map<std::tuple<int, ExponentVector, int>, Piece> pieces_;
    TauReport report_;
};

// Builds tau and checks it: unique, bijective per weight and degree, and compatible with
// products and the log data. Throws ComparisonFailure when no compatible map exists.
TauReport tau_compare(const DRWTower& W, const KoszulTower& X, int r);

struct CoordinateReport {
    bool tau_equal = true;
    bool alpha_differs = false;
    bool delta_differs = false;
    bool log_invariants = true;  // beta alpha' = alpha' delta' in the new coordinates
    std::string witness;
};
// T_{0,0} -> c T_{0,0}, T_{0,1} -> c^{-1} T_{0,1}: tau built from the new log data agrees with tau
// on every integral-weight generator of level r.
CoordinateReport coordinate_independence_check(const LogChart& chart, u64 c, int r, i64 D);

// H^i(K / p) against omega^i per integral weight, and sum over all exponents of degree <= pD.
CheckResult hodge_tate_check(const LogChart& chart, i64 D, i64 L = 1);

}  // namespace drw
