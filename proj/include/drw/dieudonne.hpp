#pragma once

// Cochain complexes of finite Z/p^N-modules with Frobenius: decalage, Bocksteins,
// the Cartier criterion, and checkers for towers with F, V, R and log data.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "drw/monomial.hpp"
#include "drw/padic_linalg.hpp"
#include "json.hpp"

namespace drw {

struct LiftFailure : std::runtime_error {
    explicit LiftFailure(const std::string& what) : std::runtime_error(what) {}
};
struct PsiNotInvertible : std::runtime_error {
    explicit PsiNotInvertible(const std::string& what) : std::runtime_error(what) {}
};
struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

// x -> num x / p^den; the division must be exact.
struct RationalMap {
    Matrix num;
    int den = 0;
    Vec operator()(const Vec& x) const;
    AmbientFn fn() const;
};

// Subquotients of free ambients, one per degree, with ambient differentials.
class ComplexLevel {
public:
    ComplexLevel() = default;
    ComplexLevel(Zmod R, std::vector<SubQ> mods, std::vector<AmbientFn> d, int guard = 0);

    const Zmod& ring() const { return R_; }
    int top() const { return static_cast<int>(mods_.size()) - 1; }
    const SubQ& module(int i) const { return mods_.at(static_cast<size_t>(i)); }
    Vec d(int i, const Vec& x) const;
    int guard() const { return guard_; }

    // d^i in presentation coordinates
    Matrix d_matrix(int i) const;
    bool d_squared_zero(std::string* witness = nullptr) const;
    SubQ cohomology(int i) const;
    std::vector<int> cohomology_divisors(int i) const { return cohomology(i).divisors(); }

private:
    Zmod R_;
    std::vector<SubQ> mods_;
    std::vector<AmbientFn> d_;
    int guard_ = 0;
};

// f is a family of ambient maps, one per degree.
bool is_chain_map(const ComplexLevel& a, const ComplexLevel& b, const std::vector<AmbientFn>& f,
                  std::string* witness = nullptr);
bool is_degreewise_bijection(const ComplexLevel& a, const ComplexLevel& b, const std::vector<AmbientFn>& f,
                             std::string* witness = nullptr);
bool is_quasi_isomorphism(const ComplexLevel& a, const ComplexLevel& b, const std::vector<AmbientFn>& f,
                          std::string* witness = nullptr);
Matrix induced_on_cohomology(const ComplexLevel& a, const ComplexLevel& b, const AmbientFn& f, int i);

// A complex of p-torsion-free modules, modelled by lattices in free ambients over
// Z/p^N at surplus precision. Only results down to p^{N - guard} are meaningful.
class LatticeComplex {
public:
    LatticeComplex() = default;
    LatticeComplex(Zmod R, std::vector<Matrix> lattices, std::vector<RationalMap> d, int guard = 0);
    // lattices equal to the ambients
    static LatticeComplex free(Zmod R, std::vector<size_t> dims, std::vector<RationalMap> d);

    const Zmod& ring() const { return R_; }
    int top() const { return static_cast<int>(lat_.size()) - 1; }
    size_t ambient_dim(int i) const { return lat_.at(static_cast<size_t>(i)).rows(); }
    const Matrix& lattice(int i) const { return lat_.at(static_cast<size_t>(i)); }
    const RationalMap& d_map(int i) const { return d_.at(static_cast<size_t>(i)); }
    Vec d(int i, const Vec& x) const;
    std::vector<AmbientFn> d_fns() const;
    int guard() const { return guard_; }
    int precision() const { return R_.N() - guard_; }

    // the lattice p^r times degree i
    Matrix scaled_lattice(int i, int r) const;
    ComplexLevel reduce(int r) const;          // the complex mod p^r
    ComplexLevel cohomology_mod(int r) const;  // (H^*(- / p^r), Bockstein)
    SubQ cycles_mod(int i, int r) const;       // H^i(- / p^r) as a subquotient of the ambient
    // w with d z = p^r w; throws LiftFailure when d z is not divisible in the lattice
    Vec bockstein(int i, int r, const Vec& z) const;
    // Z_p-cohomology divisors from Smith valuations: torsion exponents, free summands as N
    std::vector<int> zp_cohomology(int i) const;

private:
    Zmod R_;
    std::vector<Matrix> lat_;
    std::vector<RationalMap> d_;
    int guard_ = 0;
    // set by eta_p: the isomorphic complex (p^{-i} lattice, d / p) at the input's guard
    std::shared_ptr<const LatticeComplex> unscaled_;
    friend LatticeComplex eta_p(const LatticeComplex& c);
};

// (eta_p C)^i = {x in p^i C^i : dx in p^{i+1} C^{i+1}}; the guard grows by top + 1.
// zp_cohomology runs on the isomorphic complex ({x : dx in p C^{i+1}}, d / p), which keeps
// the precision of C up to the one division by p.
LatticeComplex eta_p(const LatticeComplex& c);

struct CheckResult {
    bool pass = true;
    std::string witness;
    long checked = 0;
    void fail(const std::string& w) {
        if (pass) witness = w;
        pass = false;
    }
};

// phi_F = p^i F from src into eta_p(dst): chain map, lands in eta_p, and bijective onto it.
struct PhiFReport {
    bool chain_map = true, into_eta = true, bijective = true;
    std::string witness;
};
PhiFReport phi_F(const LatticeComplex& src, const LatticeComplex& dst, const std::vector<AmbientFn>& F);

// A / (V^r A + d V^r A): A holds the target weight, B the source weight of V^r (V^r = p^r).
ComplexLevel w_r_quotient(const LatticeComplex& A, const LatticeComplex& B, int r);

// F: (A/p, d) -> (H^*(A'/p), beta) is a chain map and a degree-wise bijection.
CheckResult cartier_criterion_check(const LatticeComplex& source, const LatticeComplex& target,
                                    const std::vector<AmbientFn>& F);
// gamma: eta_p(C)/p -> (H^*(C/p), beta), x -> x / p^i, is a quasi-isomorphism
CheckResult gamma_check(const LatticeComplex& C);

// R = psi^{-1} mu_r on a class y of H^i(big / p^r): finds z in small with
// psi(z) - p^i y in p^{r-1} eta_p(big) + d eta_p(big). Throws PsiNotInvertible.
Vec restriction_via_psi(const LatticeComplex& small, const LatticeComplex& big, const std::vector<AmbientFn>& F,
                        int r, int i, const Vec& y);

// ---- graded towers ----

// Pieces W_r at weight k and degree i are subquotients of free ambients. Weights follow the
// de Rham-Witt convention: F sends k to pk, V sends k to k/p, R and d keep k.
class GradedTower {
public:
    virtual ~GradedTower() = default;
    virtual const LogChart& chart() const = 0;
    virtual int max_level() const = 0;
    virtual int top() const = 0;
    // weights of possibly nonzero pieces inside the validity window of level r
    virtual std::vector<ExponentVector> weights(int r) const = 0;
    virtual bool in_window(int r, const ExponentVector& k) const = 0;
    virtual const SubQ& piece(int r, const ExponentVector& k, int i) const = 0;
    virtual Vec d(int r, const ExponentVector& k, int i, const Vec& x) const = 0;
    virtual Vec F(int r, const ExponentVector& k, int i, const Vec& x) const = 0;  // to (r-1, pk)
    virtual Vec V(int r, const ExponentVector& k, int i, const Vec& x) const = 0;  // to (r+1, k/p)
    virtual Vec R(int r, const ExponentVector& k, int i, const Vec& x) const = 0;  // to (r-1, k)
    virtual Vec mul(int r, const ExponentVector& k1, int i1, const Vec& x, const ExponentVector& k2, int i2,
                    const Vec& y) const = 0;
    virtual Vec teichmuller(int r, const ExponentVector& m) const = 0;  // degree 0 at integral weight m
    int p() const { return chart().p(); }
};

// alpha(v) in degree 0 at weight e_v, delta(v) in degree 1 at weight 0, per level.
struct LogData {
    std::vector<size_t> generators;
    std::function<Vec(int r, size_t v)> alpha;
    std::function<Vec(int r, size_t v)> delta;
    bool diagonal_vanishes = true;  // over the standard log point the block sums of delta are 0
};

struct AxiomResult {
    std::string name;
    bool pass = true;
    std::string witness;
    long checked = 0;
};

struct TowerReport {
    std::vector<AxiomResult> axioms;
    bool all_pass() const;
    const AxiomResult* find(const std::string& name) const;
    nlohmann::json to_json() const;
};

struct TowerCheckOptions {
    // products are checked on pairs whose total degree stays within this bound (-1: none)
    i64 product_degree_bound = -1;
    // at most this many generators per piece enter the product checks (0: all)
    size_t product_gens = 0;
};

// d d = 0, F V = V F = p, V d = p d V, d F = p F d, R commuting with F, V, d.
TowerReport dieudonne_tower_check(const GradedTower& T);
// FV = p, FdV = d, F d[x] = [x]^{p-1} d[x], (Vx) y = V(x Fy), F delta = delta, plus the log
// data invariants alpha delta = d alpha, d delta = 0, F alpha = alpha^p, R compatibility.
TowerReport fv_procomplex_check(const GradedTower& T, const LogData& L, const TowerCheckOptions& opt = {});
// 0 -> Fil^r W_{r+1} -> W_{r+1} -> W_r -> 0 per degree by order bookkeeping
AxiomResult fil_exactness_check(const GradedTower& T, int r);

// Log data given by Teichmuller lifts of the log variables and a dlog function.
LogData teichmuller_log_data(const GradedTower& T, std::function<Vec(int r, size_t v)> dlog);

std::string weight_label(const LogChart& c, const ExponentVector& k);

}  // namespace drw
