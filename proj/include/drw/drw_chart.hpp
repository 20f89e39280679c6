#pragma once

// The log de Rham-Witt tower of a monomial chart, weight by weight.
//
// At a weight k in Z[1/p]^vars the forms are coefficient vectors c on wedge words in the
// dlog basis; d(T^k c) = T^k (sum_j k_j dlog T_j) ^ c. The integral forms are
//   E^i_k = {c integral : d_k c integral},
//   W_r w^i_k = E^i_k / (p^r E^i_{p^r k} + d_k p^r E^{i-1}_{p^r k}),
// and V^u[T^{p^u k}] is the coefficient p^u at weight k. F is the identity on coefficients
// (weight k to pk), V multiplies by p (weight k to k/p), R is the identity.

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "drw/dieudonne.hpp"
#include "drw/log_forms.hpp"

namespace drw {

struct CapacityExceeded : std::runtime_error {
    explicit CapacityExceeded(const std::string& what) : std::runtime_error(what) {}
};
struct ExactnessFailure : std::runtime_error {
    explicit ExactnessFailure(const std::string& what) : std::runtime_error(what) {}
};

class DRWTower : public GradedTower {
public:
    DRWTower(const LogChart& chart, LogBase base, int r_max, i64 D, i64 L = 1);

    const LogChart& chart() const override { return B_->chart(); }
    int max_level() const override { return rmax_; }
    int top() const override { return B_->top_degree(); }
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

    const DlogBasis& basis() const { return *B_; }
    std::shared_ptr<const DlogBasis> basis_ptr() const { return B_; }
    LogBase base() const { return B_->base(); }
    const Zmod& ring() const { return R_; }
    i64 degree_bound() const { return D_; }
    i64 laurent_bound() const { return L_; }

    const WeightForms& forms(const ExponentVector& k) const;
    // E^i_k as generator columns
    const Matrix& integral_forms(const ExponentVector& k, int i) const;
    LatticeComplex integral_complex(const ExponentVector& k) const;
    ComplexLevel level_complex(int r, const ExponentVector& k) const;
    // V^l[T^m] at weight m / p^l, degree 0
    Vec verschiebung_teichmuller(int l, const ExponentVector& m) const;
    Vec dlog(int r, size_t var) const;  // degree 1, weight 0
    // wedge of coefficient vectors; the result lives at weight k1 + k2
    Vec wedge(const ExponentVector& k1, int i1, const Vec& x, const ExponentVector& k2, int i2, const Vec& y) const;
    LogData log_data() const;

private:
    struct WeightData {
        WeightForms wf;
        std::vector<Matrix> E;
    };
    const WeightData& data(const ExponentVector& k) const;

    std::shared_ptr<const DlogBasis> B_;
    int rmax_;
    i64 D_, L_;
    Zmod R_;
    mutable std::mutex mu_;
    mutable std::map<ExponentVector, std::unique_ptr<WeightData>> wd_;
    mutable std::map<std::tuple<int, ExponentVector, int>, std::unique_ptr<SubQ>> pieces_;
};

// Levels 1..r_max on the standard log point.
std::unique_ptr<DRWTower> build_drw_tower(const LogChart& chart, int r_max, i64 D, i64 L = 1);

// nu: omega^i -> W_1 omega^i per integral weight of degree <= D.
CheckResult nu_bijection_check(const DRWTower& T, i64 D);
// W_r omega / p -> W_1 omega induces bijections on cohomology, per weight.
CheckResult mod_p_comparison_check(const DRWTower& T, int r);
// Cartier criterion on the lift complex (integral weights) and phi_F onto eta_p at every weight
// of degree <= D with denominators up to p^{r_max}.
CheckResult tower_cartier_check(const DRWTower& T, i64 D);

struct MonodromyReport {
    bool exact = true;
    bool n_phi = true;
    bool kernel_filtration = true;
    std::string witness;
    // per degree: (log order of W^{i-1}, of the wedge-theta image, of W~^i, of W^i), summed over weights
    std::vector<std::array<long, 4>> ranks;
    long classes = 0;      // cohomology generators acted on
    long n_nonzero = 0;    // generators with N != 0
    bool n_of_one_zero = true;
};
// Towers over the standard log point and over the trivial log point, the sequence
// 0 -> W[-1] -> W~ -> W -> 0 with W[-1] -> W~ the wedge with theta, and N from the
// connecting map, checked against N phi = p phi N.
MonodromyReport monodromy(const LogChart& chart, int r, i64 D, i64 L = 1);

// ---- Hyodo-Kato presentation in degrees 0 and 1 ----

// Generators of omega^{<=1}_{W_n(R)} at one weight: b_k = V^u[T^{p^u k}] in degree 0, and
// b_{k0} d b_{k1}, b_k dlog_l in degree 1.
struct HKGenerator {
    enum Kind { Scalar, Differential, Dlog } kind;
    ExponentVector k0, k1;  // Scalar/Dlog use k0 only
    size_t symbol = 0;      // Dlog symbol
    std::string label(const LogChart& c, const DlogBasis& B) const;
};

struct HKPresentation {
    ExponentVector k;
    int n = 1;
    std::vector<HKGenerator> gens0, gens1;
    Matrix rel0, rel1;  // order and Leibniz relations (columns)
    Matrix eta1;        // the relation ideal in degree 1 (columns)
    ModulePresentation omega0() const;
    ModulePresentation omega1() const;    // before the relation ideal
    ModulePresentation w_omega1() const;  // after
};

// relation schemas (ii)-(iv) at weight k and level n over Z/p^M
HKPresentation build_witt_omega(const DRWTower& T, int n, const ExponentVector& k);
// the eta_{i,j,a,m} family at weight k in degree 1, as relation columns on gens1
Matrix hk_ideal(const DRWTower& T, const HKPresentation& P);

struct HKComparison {
    bool pass = true;
    std::string witness;
    long weights = 0;
    long eta_relations = 0;
    bool level_one_eta_vanish = true;
};
// the presentation maps isomorphically onto the tower pieces in degrees 0, 1, with d and F
HKComparison hk_comparison(const DRWTower& T, int n, i64 D);

}  // namespace drw
