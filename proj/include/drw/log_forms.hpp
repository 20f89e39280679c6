#pragma once

// Log differential forms of a monomial chart, split by monomial weight.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "drw/monomial.hpp"
#include "drw/padic_linalg.hpp"

namespace drw {

struct DegreeOverflow : std::runtime_error {
    explicit DegreeOverflow(const std::string& what) : std::runtime_error(what) {}
};

// Standard: the log point (k, N) with the block products mapping to the base.
// Trivial: the trivial log structure on k; all block products agree (single diagonal).
enum class LogBase { Standard, Trivial };

using Mask = std::uint32_t;

// Basis of the degree-one forms: dlog symbols, with dT for non-log smooth variables
// written as T dlog T and used only at weights positive in that variable.
class DlogBasis {
public:
    DlogBasis() = default;
    DlogBasis(const LogChart& chart, LogBase base);

    const LogChart& chart() const { return chart_; }
    LogBase base() const { return base_; }
    size_t size() const { return sym_.size(); }
    const std::string& symbol(size_t l) const { return label_[l]; }
    size_t variable_of(size_t l) const { return sym_[l]; }
    // coefficients of dlog T_v in the basis
    const std::vector<i64>& dlog_coeffs(size_t v) const { return coeff_[v]; }
    // basis symbol whose variable is v, if any
    int symbol_of(size_t v) const { return sym_of_var_[v]; }
    bool symbol_needs_positive(size_t l) const { return !chart_.is_log(sym_[l]); }
    // theta = sum over the first block of dlog T_{0,i} (trivial base only)
    std::vector<i64> theta() const;

    // numerators of the coefficients of d(T^k) / T^k, over p^{k.depth()}
    std::vector<i64> weight_coeffs(const ExponentVector& k) const;
    bool symbol_allowed(const ExponentVector& k, size_t l) const;
    Mask allowed_mask(const ExponentVector& k) const;
    // degree-i basis masks at weight k (vanishing weights give none), in a fixed order
    std::vector<Mask> forms(const ExponentVector& k, int i) const;
    int top_degree() const { return static_cast<int>(size()); }
    std::string form_label(const ExponentVector& k, Mask m) const;

private:
    LogChart chart_;
    LogBase base_ = LogBase::Standard;
    std::vector<size_t> sym_;
    std::vector<std::string> label_;
    std::vector<std::vector<i64>> coeff_;
    std::vector<int> sym_of_var_;
};

// sign of e_l wedge e_I relative to the sorted wedge, 0 if l is in I
int wedge_sign(size_t l, Mask I);
int wedge_sign(Mask A, Mask B);  // e_A wedge e_B

// The forms at one weight: free ambient per degree, d = dnum / p^dden.
struct WeightForms {
    ExponentVector k;
    std::vector<std::vector<Mask>> basis;           // per degree
    std::vector<std::map<Mask, size_t>> index;      // per degree
    std::vector<Matrix> dnum;                       // d: degree i -> i+1
    int dden = 0;
    size_t dim(int i) const { return basis[i].size(); }
};
WeightForms weight_forms(const DlogBasis& B, const ExponentVector& k, const Zmod& R);

// General-path presentation of omega^i at an integral weight over Z/p: Kahler forms
// plus log symbols modulo the log relation, the block relation and the base relation.
ModulePresentation omega_general_presentation(const LogChart& chart, LogBase base, const ExponentVector& k, int i);

class LogFormModule {
public:
    LogFormModule() = default;
    LogFormModule(std::shared_ptr<const DlogBasis> B, int degree, Zmod R, i64 D, i64 L);

    int degree() const { return degree_; }
    const Zmod& ring() const { return R_; }
    const DlogBasis& basis() const { return *B_; }
    std::shared_ptr<const DlogBasis> basis_ptr() const { return B_; }
    const std::vector<std::pair<ExponentVector, Mask>>& generators() const { return gens_; }
    const ModulePresentation& presentation() const { return pres_; }
    i64 degree_bound() const { return D_; }
    i64 laurent_bound() const { return L_; }
    bool in_window(const ExponentVector& k) const;

private:
    std::shared_ptr<const DlogBasis> B_;
    int degree_ = 0;
    Zmod R_;
    i64 D_ = 0, L_ = 0;
    std::vector<std::pair<ExponentVector, Mask>> gens_;
    ModulePresentation pres_;
};

struct OmegaBuild {
    std::vector<LogFormModule> modules;  // degrees 0..top
    bool general_path_checked = false;
    bool general_path_agrees = true;
    std::string mismatch;
};
// Fast path with a cross-check of every weight piece against the general path when D <= 6.
OmegaBuild build_omega(const LogChart& chart, LogBase base, i64 D, i64 L = 1);

class LogForm {
public:
    using Key = std::pair<ExponentVector, Mask>;
    LogForm() = default;
    LogForm(std::shared_ptr<const DlogBasis> B, Zmod R, int degree) : B_(std::move(B)), R_(R), degree_(degree) {}
    static LogForm monomial(std::shared_ptr<const DlogBasis> B, Zmod R, const ExponentVector& k, Mask I, i64 c = 1);

    int degree() const { return degree_; }
    const Zmod& ring() const { return R_; }
    const DlogBasis& basis() const { return *B_; }
    std::shared_ptr<const DlogBasis> basis_ptr() const { return B_; }
    const std::map<Key, u64>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    void add_term(const ExponentVector& k, Mask I, u64 c);
    LogForm operator+(const LogForm& o) const;
    LogForm scaled(i64 c) const;
    LogForm wedge(const LogForm& o) const;
    bool operator==(const LogForm& o) const { return degree_ == o.degree_ && t_ == o.t_; }
    std::string to_string() const;

private:
    std::shared_ptr<const DlogBasis> B_;
    Zmod R_;
    int degree_ = 0;
    std::map<Key, u64> t_;
};

// d on forms; throws DegreeOverflow if a weight lies outside the window of the module.
LogForm d(const LogForm& f, i64 D = -1);
LogForm dlog_form(std::shared_ptr<const DlogBasis> B, Zmod R, size_t var);
// C^{-1}(x dlog w) = x^p dlog w on integral weights
LogForm cartier_inverse(const LogForm& f);

struct CartierReport {
    bool cocycles = true;
    bool bijective = true;
    std::string witness;
    int weights_checked = 0;
};
// C^{-1}: omega^i -> H^i(omega) per weight within degree bound D.
CartierReport cartier_inverse_check(const LogChart& chart, LogBase base, i64 D, i64 L = 1);

}  // namespace drw
