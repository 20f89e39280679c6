#pragma once

// Exact linear algebra over Z/p^N.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace drw {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using Vec = std::vector<u64>;

struct ModulusMismatch : std::logic_error {
    explicit ModulusMismatch(const std::string& what) : std::logic_error(what) {}
};
struct ContainmentError : std::runtime_error {
    explicit ContainmentError(const std::string& what) : std::runtime_error(what) {}
};
struct PrecisionExhausted : std::runtime_error {
    explicit PrecisionExhausted(const std::string& what) : std::runtime_error(what) {}
};

// The ring Z/p^N. Residues are kept as u64 in [0, p^N).
class Zmod {
public:
    Zmod() = default;
    Zmod(u64 p, int N);

    u64 p() const { return p_; }
    int N() const { return N_; }
    u64 q() const { return q_; }

    u64 from_int(i64 v) const;
    i64 lift(u64 a) const;  // symmetric representative
    u64 add(u64 a, u64 b) const { u64 s = a + b; return s >= q_ ? s - q_ : s; }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + q_ - b; }
    u64 neg(u64 a) const { return a == 0 ? 0 : q_ - a; }
    u64 mul(u64 a, u64 b) const {
        return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % q_);
    }
    int val(u64 a) const;         // N for a == 0
    u64 ppow(int e) const;        // p^e, zero once e >= N
    u64 unit_inverse(u64 a) const;
    u64 reduce_from(u64 a, const Zmod& bigger) const;  // Z/p^M -> Z/p^N, M >= N

    bool operator==(const Zmod& o) const { return p_ == o.p_ && N_ == o.N_; }
    bool operator!=(const Zmod& o) const { return !(*this == o); }

private:
    u64 p_ = 2;
    int N_ = 1;
    u64 q_ = 2;
};

void require_same(const Zmod& a, const Zmod& b, const char* where);

class ModPScalar {
public:
    ModPScalar(Zmod R, i64 v) : R_(R), v_(R.from_int(v)) {}
    u64 value() const { return v_; }
    const Zmod& ring() const { return R_; }
    int valuation() const { return R_.val(v_); }
    ModPScalar operator+(const ModPScalar& o) const;
    ModPScalar operator-(const ModPScalar& o) const;
    ModPScalar operator*(const ModPScalar& o) const;
    bool operator==(const ModPScalar& o) const { return R_ == o.R_ && v_ == o.v_; }

private:
    Zmod R_;
    u64 v_;
};

// Dense matrix; the workhorse of every algorithm here.
class Matrix {
public:
    Matrix() = default;
    Matrix(Zmod R, size_t rows, size_t cols) : R_(R), r_(rows), c_(cols), a_(rows * cols, 0) {}
    static Matrix identity(Zmod R, size_t n);
    static Matrix from_rows(Zmod R, const std::vector<std::vector<i64>>& rows, size_t cols = 0);
    static Matrix from_columns(Zmod R, size_t rows, const std::vector<Vec>& cols);

    const Zmod& ring() const { return R_; }
    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    u64 operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }
    u64& at(size_t i, size_t j) { return a_[i * c_ + j]; }
    void set(size_t i, size_t j, i64 v) { a_[i * c_ + j] = R_.from_int(v); }

    Vec column(size_t j) const;
    Vec row(size_t i) const;
    void set_column(size_t j, const Vec& v);
    void append_column(const Vec& v);

    Matrix operator*(const Matrix& o) const;
    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix scaled(u64 s) const;
    Vec apply(const Vec& v) const;
    Matrix transpose() const;
    Matrix hcat(const Matrix& o) const;
    Matrix vcat(const Matrix& o) const;
    Matrix column_block(size_t from, size_t to) const;
    Matrix row_block(size_t from, size_t to) const;
    bool is_zero() const;
    bool operator==(const Matrix& o) const { return R_ == o.R_ && r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }

private:
    Zmod R_;
    size_t r_ = 0, c_ = 0;
    std::vector<u64> a_;
};

class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(Zmod R, size_t rows, size_t cols) : R_(R), r_(rows), c_(cols) {}
    static SparseMatrix from_dense(const Matrix& m);
    Matrix to_dense() const;

    const Zmod& ring() const { return R_; }
    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    void set(size_t i, size_t j, const ModPScalar& v);
    ModPScalar get(size_t i, size_t j) const;
    const std::map<std::pair<size_t, size_t>, u64>& entries() const { return e_; }
    bool operator==(const SparseMatrix& o) const { return R_ == o.R_ && r_ == o.r_ && c_ == o.c_ && e_ == o.e_; }

private:
    Zmod R_;
    size_t r_ = 0, c_ = 0;
    std::map<std::pair<size_t, size_t>, u64> e_;
};

// Vector helpers.
Vec vec_add(const Zmod& R, const Vec& a, const Vec& b);
Vec vec_sub(const Zmod& R, const Vec& a, const Vec& b);
Vec vec_scale(const Zmod& R, const Vec& a, u64 s);
bool vec_is_zero(const Vec& a);
int vec_val(const Zmod& R, const Vec& a);
// Exact division by p^e; throws if some entry is not divisible.
Vec vec_div_ppow(const Zmod& R, const Vec& a, int e);

// Howell normal form of the row span. Rows are normalized so that pivots are p^e,
// entries above a pivot are reduced modulo it, and zero rows are dropped.
Matrix howell_form(const Matrix& m);
SparseMatrix howell_form(const SparseMatrix& m);

// Row span of a matrix, kept in Howell form.
class Lattice {
public:
    Lattice() = default;
    explicit Lattice(const Matrix& rows);
    static Lattice from_columns(const Matrix& cols) { return Lattice(cols.transpose()); }

    const Matrix& howell() const { return H_; }
    size_t dim() const { return n_; }
    Vec reduce(Vec v) const;  // canonical representative modulo the span
    bool contains(const Vec& v) const { return vec_is_zero(reduce(v)); }
    bool contains_all_columns(const Matrix& m) const;
    int log_index() const;  // log_p of |ambient / span|
    bool operator==(const Lattice& o) const { return H_ == o.H_; }

private:
    Matrix H_;
    size_t n_ = 0;
    std::vector<size_t> piv_;
    std::vector<int> pe_;
};

// Column span of m with solution tracking: m x = b.
class ColumnSolver {
public:
    ColumnSolver() = default;
    explicit ColumnSolver(const Matrix& m);

    std::optional<Vec> solve(const Vec& b) const;
    bool contains(const Vec& b) const;
    const Matrix& kernel() const { return K_; }

private:
    Zmod R_;
    size_t r_ = 0, c_ = 0;
    std::vector<Vec> h_, u_;
    std::vector<size_t> piv_;
    std::vector<int> pe_;
    Matrix K_;
};

// Columns generate {v : m v = 0}.
Matrix kernel(const Matrix& m);
SparseMatrix kernel(const SparseMatrix& m);
// Some v with m v = b, or nullopt.
std::optional<Vec> solve(const Matrix& m, const Vec& b);
std::optional<Vec> solve(const SparseMatrix& m, const Vec& b);

// Exponents e of the nonzero diagonal entries p^e of a Smith form (units included as 0).
std::vector<int> smith_exponents(const Matrix& m);
// Elementary divisors (exponents, trivial ones dropped, free summands reported as N)
// of the module with ngens generators and relation columns rel.
std::vector<int> module_divisors(size_t ngens, const Matrix& rel);

// Finitely presented module: generators modulo the column span of relations.
class ModulePresentation {
public:
    ModulePresentation() = default;
    ModulePresentation(Zmod R, size_t ngens, Matrix relations, std::vector<std::string> labels = {});
    static ModulePresentation free_module(Zmod R, size_t n);

    const Zmod& ring() const { return R_; }
    size_t ngens() const { return n_; }
    const Matrix& relations() const { return rel_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const Lattice& relation_lattice() const { return *lat_; }

    Vec reduce(const Vec& v) const { return lat_->reduce(v); }
    bool is_zero(const Vec& v) const { return lat_->contains(v); }
    bool equal(const Vec& a, const Vec& b) const;
    const std::vector<int>& divisors() const;
    int log_order() const;  // log_p |M|
    bool is_trivial() const { return log_order() == 0; }
    bool operator==(const ModulePresentation& o) const;

private:
    Zmod R_;
    size_t n_ = 0;
    Matrix rel_;
    std::vector<std::string> labels_;
    std::shared_ptr<Lattice> lat_;
    std::shared_ptr<std::vector<int>> div_;
};

// Module maps are matrices from source generators to target generators.
bool map_well_defined(const Matrix& f, const ModulePresentation& src, const ModulePresentation& dst);
bool map_is_zero(const Matrix& f, const ModulePresentation& dst);
bool map_is_surjective(const Matrix& f, const ModulePresentation& dst);
bool map_is_injective(const Matrix& f, const ModulePresentation& src, const ModulePresentation& dst);
bool map_is_isomorphism(const Matrix& f, const ModulePresentation& src, const ModulePresentation& dst);
// log_p of |image|.
int map_image_log_order(const Matrix& f, const ModulePresentation& dst);

// A subquotient T/B of a free ambient module, with T and B given by generator columns.
class SubQ {
public:
    SubQ() = default;
    SubQ(const Matrix& top, const Matrix& bottom);  // throws ContainmentError
    static SubQ full(Zmod R, size_t n);             // ambient / 0

    const Zmod& ring() const { return R_; }
    size_t ambient_dim() const { return n_; }
    const Matrix& gens() const { return gens_; }     // ambient x ngens
    const Matrix& bottom_gens() const { return bottom_; }
    const ModulePresentation& presentation() const { return pres_; }
    const Lattice& top_lattice() const { return top_; }
    const Lattice& bottom_lattice() const { return bot_; }

    bool contains(const Vec& v) const { return top_.contains(v); }
    bool is_zero(const Vec& v) const { return bot_.contains(v); }
    bool equal(const Vec& a, const Vec& b) const;
    Vec coords(const Vec& v) const;  // throws ContainmentError if v is not in T
    Vec ambient(const Vec& coords) const { return gens_.apply(coords); }
    const std::vector<int>& divisors() const { return pres_.divisors(); }
    int log_order() const { return pres_.log_order(); }

private:
    Zmod R_;
    size_t n_ = 0;
    Matrix gens_, bottom_;
    Lattice top_, bot_;
    ColumnSolver solver_;
    ModulePresentation pres_;
};

// The spec-level subquotient: cycles/boundaries given by columns.
struct SubquotientResult {
    ModulePresentation module;
    std::vector<int> divisors;
};
SubquotientResult subquotient(const Matrix& cycles, const Matrix& boundaries);
SubquotientResult subquotient(const SparseMatrix& cycles, const SparseMatrix& boundaries);

using AmbientFn = std::function<Vec(const Vec&)>;
// Matrix of an ambient linear map in presentation coordinates.
Matrix induced_matrix(const AmbientFn& f, const SubQ& src, const SubQ& dst);
Matrix induced_matrix(const Matrix& ambient_map, const SubQ& src, const SubQ& dst);

std::string divisors_string(const std::vector<int>& exps, u64 p, int free_exp);

}  // namespace drw
