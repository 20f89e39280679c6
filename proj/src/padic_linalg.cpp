#include "drw/padic_linalg.hpp"

#include <algorithm>
#include <sstream>

namespace drw {

namespace {

bool is_prime(u64 p) {
    if (p < 2) return false;
    for (u64 d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

}  // namespace

Zmod::Zmod(u64 p, int N) : p_(p), N_(N) {
    if (!is_prime(p)) throw std::invalid_argument("Zmod: modulus base must be prime");
    if (N < 1) throw std::invalid_argument("Zmod: exponent must be >= 1");
    unsigned __int128 q = 1;
    for (int i = 0; i < N; ++i) {
        q *= p;
        if (q > (static_cast<unsigned __int128>(1) << 62))
            throw std::invalid_argument("Zmod: p^N too large for 62-bit residues");
    }
    q_ = static_cast<u64>(q);
}

u64 Zmod::from_int(i64 v) const {
    i64 qq = static_cast<i64>(q_);
    i64 r = v % qq;
    if (r < 0) r += qq;
    return static_cast<u64>(r);
}

i64 Zmod::lift(u64 a) const {
    if (a > q_ / 2) return static_cast<i64>(a) - static_cast<i64>(q_);
    return static_cast<i64>(a);
}

int Zmod::val(u64 a) const {
    if (a == 0) return N_;
    int e = 0;
    while (a % p_ == 0) {
        a /= p_;
        ++e;
    }
    return e;
}

u64 Zmod::ppow(int e) const {
    if (e >= N_) return 0;
    u64 r = 1;
    for (int i = 0; i < e; ++i) r *= p_;
    return r;
}

u64 Zmod::unit_inverse(u64 a) const {
    if (a % p_ == 0) throw std::domain_error("Zmod: inverse of a non-unit");
    // extended Euclid on signed 128-bit values
    __int128 r0 = q_, r1 = a, s0 = 0, s1 = 1;
    while (r1 != 0) {
        __int128 t = r0 / r1;
        __int128 r2 = r0 - t * r1;
        r0 = r1;
        r1 = r2;
        __int128 s2 = s0 - t * s1;
        s0 = s1;
        s1 = s2;
    }
    __int128 res = s0 % static_cast<__int128>(q_);
    if (res < 0) res += q_;
    return static_cast<u64>(res);
}

u64 Zmod::reduce_from(u64 a, const Zmod& bigger) const {
    if (bigger.p_ != p_ || bigger.N_ < N_) throw ModulusMismatch("reduce_from: incompatible moduli");
    return a % q_;
}

void require_same(const Zmod& a, const Zmod& b, const char* where) {
    if (a != b) throw ModulusMismatch(std::string(where) + ": moduli differ");
}

ModPScalar ModPScalar::operator+(const ModPScalar& o) const {
    require_same(R_, o.R_, "ModPScalar+");
    ModPScalar r = *this;
    r.v_ = R_.add(v_, o.v_);
    return r;
}
ModPScalar ModPScalar::operator-(const ModPScalar& o) const {
    require_same(R_, o.R_, "ModPScalar-");
    ModPScalar r = *this;
    r.v_ = R_.sub(v_, o.v_);
    return r;
}
ModPScalar ModPScalar::operator*(const ModPScalar& o) const {
    require_same(R_, o.R_, "ModPScalar*");
    ModPScalar r = *this;
    r.v_ = R_.mul(v_, o.v_);
    return r;
}

// ---- Matrix ----

Matrix Matrix::identity(Zmod R, size_t n) {
    Matrix m(R, n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1 % R.q();
    return m;
}

Matrix Matrix::from_rows(Zmod R, const std::vector<std::vector<i64>>& rows, size_t cols) {
    size_t c = cols;
    if (!rows.empty()) c = rows[0].size();
    Matrix m(R, rows.size(), c);
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != c) throw std::invalid_argument("from_rows: ragged rows");
        for (size_t j = 0; j < c; ++j) m.set(i, j, rows[i][j]);
    }
    return m;
}

Matrix Matrix::from_columns(Zmod R, size_t rows, const std::vector<Vec>& cols) {
    Matrix m(R, rows, cols.size());
    for (size_t j = 0; j < cols.size(); ++j) m.set_column(j, cols[j]);
    return m;
}

Vec Matrix::column(size_t j) const {
    Vec v(r_);
    for (size_t i = 0; i < r_; ++i) v[i] = a_[i * c_ + j];
    return v;
}

Vec Matrix::row(size_t i) const { return Vec(a_.begin() + i * c_, a_.begin() + (i + 1) * c_); }

void Matrix::set_column(size_t j, const Vec& v) {
    if (v.size() != r_) throw std::invalid_argument("set_column: size mismatch");
    for (size_t i = 0; i < r_; ++i) a_[i * c_ + j] = v[i];
}

void Matrix::append_column(const Vec& v) {
    if (v.size() != r_) throw std::invalid_argument("append_column: size mismatch");
    std::vector<u64> b(r_ * (c_ + 1));
    for (size_t i = 0; i < r_; ++i) {
        for (size_t j = 0; j < c_; ++j) b[i * (c_ + 1) + j] = a_[i * c_ + j];
        b[i * (c_ + 1) + c_] = v[i];
    }
    a_ = std::move(b);
    ++c_;
}

Matrix Matrix::operator*(const Matrix& o) const {
    require_same(R_, o.R_, "Matrix*");
    if (c_ != o.r_) throw std::invalid_argument("Matrix*: shape mismatch");
    Matrix m(R_, r_, o.c_);
    const unsigned __int128 q = R_.q();
    for (size_t i = 0; i < r_; ++i) {
        for (size_t k = 0; k < c_; ++k) {
            u64 x = a_[i * c_ + k];
            if (!x) continue;
            for (size_t j = 0; j < o.c_; ++j) {
                u64 y = o.a_[k * o.c_ + j];
                if (!y) continue;
                u64 t = static_cast<u64>((static_cast<unsigned __int128>(x) * y) % q);
                m.a_[i * o.c_ + j] = R_.add(m.a_[i * o.c_ + j], t);
            }
        }
    }
    return m;
}

Matrix Matrix::operator+(const Matrix& o) const {
    require_same(R_, o.R_, "Matrix+");
    if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("Matrix+: shape mismatch");
    Matrix m = *this;
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = R_.add(a_[i], o.a_[i]);
    return m;
}

Matrix Matrix::operator-(const Matrix& o) const {
    require_same(R_, o.R_, "Matrix-");
    if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("Matrix-: shape mismatch");
    Matrix m = *this;
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = R_.sub(a_[i], o.a_[i]);
    return m;
}

Matrix Matrix::scaled(u64 s) const {
    Matrix m = *this;
    for (auto& x : m.a_) x = R_.mul(x, s);
    return m;
}

Vec Matrix::apply(const Vec& v) const {
    if (v.size() != c_) throw std::invalid_argument("Matrix::apply: size mismatch");
    Vec out(r_, 0);
    for (size_t i = 0; i < r_; ++i) {
        u64 acc = 0;
        for (size_t j = 0; j < c_; ++j)
            if (a_[i * c_ + j] && v[j]) acc = R_.add(acc, R_.mul(a_[i * c_ + j], v[j]));
        out[i] = acc;
    }
    return out;
}

Matrix Matrix::transpose() const {
    Matrix m(R_, c_, r_);
    for (size_t i = 0; i < r_; ++i)
        for (size_t j = 0; j < c_; ++j) m.a_[j * r_ + i] = a_[i * c_ + j];
    return m;
}

Matrix Matrix::hcat(const Matrix& o) const {
    require_same(R_, o.R_, "hcat");
    if (r_ != o.r_) throw std::invalid_argument("hcat: row mismatch");
    Matrix m(R_, r_, c_ + o.c_);
    for (size_t i = 0; i < r_; ++i) {
        for (size_t j = 0; j < c_; ++j) m.a_[i * m.c_ + j] = a_[i * c_ + j];
        for (size_t j = 0; j < o.c_; ++j) m.a_[i * m.c_ + c_ + j] = o.a_[i * o.c_ + j];
    }
    return m;
}

Matrix Matrix::vcat(const Matrix& o) const {
    require_same(R_, o.R_, "vcat");
    if (c_ != o.c_) throw std::invalid_argument("vcat: column mismatch");
    Matrix m(R_, r_ + o.r_, c_);
    std::copy(a_.begin(), a_.end(), m.a_.begin());
    std::copy(o.a_.begin(), o.a_.end(), m.a_.begin() + a_.size());
    return m;
}

Matrix Matrix::column_block(size_t from, size_t to) const {
    Matrix m(R_, r_, to - from);
    for (size_t i = 0; i < r_; ++i)
        for (size_t j = from; j < to; ++j) m.a_[i * m.c_ + j - from] = a_[i * c_ + j];
    return m;
}

Matrix Matrix::row_block(size_t from, size_t to) const {
    Matrix m(R_, to - from, c_);
    std::copy(a_.begin() + from * c_, a_.begin() + to * c_, m.a_.begin());
    return m;
}

bool Matrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](u64 x) { return x == 0; });
}

// ---- SparseMatrix ----

SparseMatrix SparseMatrix::from_dense(const Matrix& m) {
    SparseMatrix s(m.ring(), m.rows(), m.cols());
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j)
            if (m(i, j)) s.e_[{i, j}] = m(i, j);
    return s;
}

Matrix SparseMatrix::to_dense() const {
    Matrix m(R_, r_, c_);
    for (const auto& [ij, v] : e_) m.at(ij.first, ij.second) = v;
    return m;
}

void SparseMatrix::set(size_t i, size_t j, const ModPScalar& v) {
    require_same(R_, v.ring(), "SparseMatrix::set");
    if (i >= r_ || j >= c_) throw std::out_of_range("SparseMatrix::set");
    if (v.value() == 0)
        e_.erase({i, j});
    else
        e_[{i, j}] = v.value();
}

ModPScalar SparseMatrix::get(size_t i, size_t j) const {
    auto it = e_.find({i, j});
    return ModPScalar(R_, it == e_.end() ? 0 : static_cast<i64>(it->second));
}

// ---- vectors ----

Vec vec_add(const Zmod& R, const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = R.add(a[i], b[i]);
    return r;
}
Vec vec_sub(const Zmod& R, const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = R.sub(a[i], b[i]);
    return r;
}
Vec vec_scale(const Zmod& R, const Vec& a, u64 s) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = R.mul(a[i], s);
    return r;
}
bool vec_is_zero(const Vec& a) {
    return std::all_of(a.begin(), a.end(), [](u64 x) { return x == 0; });
}
int vec_val(const Zmod& R, const Vec& a) {
    int v = R.N();
    for (u64 x : a) v = std::min(v, R.val(x));
    return v;
}
Vec vec_div_ppow(const Zmod& R, const Vec& a, int e) {
    if (e == 0) return a;
    if (e >= R.N()) throw PrecisionExhausted("vec_div_ppow: exponent exceeds precision");
    u64 pe = R.ppow(e);
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] % pe != 0) throw ContainmentError("vec_div_ppow: entry not divisible");
        r[i] = a[i] / pe;
    }
    return r;
}

// ---- Howell form ----

namespace {

// row -= f * piv, restricted to columns >= from
void row_axpy(const Zmod& R, Vec& row, const Vec& piv, u64 f, size_t from) {
    for (size_t j = from; j < row.size(); ++j)
        if (piv[j]) row[j] = R.sub(row[j], R.mul(f, piv[j]));
}

struct HowellRows {
    std::vector<Vec> rows;
    std::vector<size_t> piv;
    std::vector<int> pe;
};

HowellRows howell_rows(const Zmod& R, std::vector<Vec> pool, size_t ncols) {
    HowellRows out;
    pool.erase(std::remove_if(pool.begin(), pool.end(), vec_is_zero), pool.end());
    for (size_t c = 0; c < ncols && !pool.empty(); ++c) {
        int best = -1, bv = R.N();
        for (size_t i = 0; i < pool.size(); ++i) {
            int v = R.val(pool[i][c]);
            if (v < bv) {
                bv = v;
                best = static_cast<int>(i);
            }
        }
        if (best < 0) continue;
        Vec P = std::move(pool[best]);
        pool.erase(pool.begin() + best);
        u64 pe = R.ppow(bv);
        u64 unit = P[c] / pe;
        if (unit != 1) {
            // unit is a unit modulo p^{N-bv}; any lift to Z/p^N is a unit
            u64 inv = R.unit_inverse(unit);
            for (size_t j = c; j < ncols; ++j) P[j] = R.mul(P[j], inv);
        }
        for (auto& row : pool) {
            u64 x = row[c];
            if (!x) continue;
            row_axpy(R, row, P, x / pe, c);
        }
        pool.erase(std::remove_if(pool.begin(), pool.end(), vec_is_zero), pool.end());
        if (bv > 0) {
            Vec A = vec_scale(R, P, R.ppow(R.N() - bv));
            if (!vec_is_zero(A)) pool.push_back(std::move(A));
        }
        out.rows.push_back(std::move(P));
        out.piv.push_back(c);
        out.pe.push_back(bv);
    }
    // back-reduction above pivots
    for (size_t i = 0; i < out.rows.size(); ++i) {
        size_t c = out.piv[i];
        u64 pe = R.ppow(out.pe[i]);
        for (size_t j = 0; j < i; ++j) {
            u64 t = out.rows[j][c];
            u64 f = t / pe;
            if (f) row_axpy(R, out.rows[j], out.rows[i], f, c);
        }
    }
    return out;
}

std::vector<Vec> matrix_rows(const Matrix& m) {
    std::vector<Vec> rows;
    rows.reserve(m.rows());
    for (size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
    return rows;
}

}  // namespace

Matrix howell_form(const Matrix& m) {
    HowellRows h = howell_rows(m.ring(), matrix_rows(m), m.cols());
    Matrix H(m.ring(), h.rows.size(), m.cols());
    for (size_t i = 0; i < h.rows.size(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) H.at(i, j) = h.rows[i][j];
    return H;
}

SparseMatrix howell_form(const SparseMatrix& m) { return SparseMatrix::from_dense(howell_form(m.to_dense())); }

Lattice::Lattice(const Matrix& rows) : n_(rows.cols()) {
    HowellRows h = howell_rows(rows.ring(), matrix_rows(rows), rows.cols());
    H_ = Matrix(rows.ring(), h.rows.size(), n_);
    for (size_t i = 0; i < h.rows.size(); ++i)
        for (size_t j = 0; j < n_; ++j) H_.at(i, j) = h.rows[i][j];
    piv_ = h.piv;
    pe_ = h.pe;
}

Vec Lattice::reduce(Vec v) const {
    const Zmod& R = H_.ring();
    if (v.size() != n_) throw std::invalid_argument("Lattice::reduce: size mismatch");
    for (size_t i = 0; i < piv_.size(); ++i) {
        size_t c = piv_[i];
        u64 f = v[c] / R.ppow(pe_[i]);
        if (!f) continue;
        for (size_t j = c; j < n_; ++j)
            if (H_(i, j)) v[j] = R.sub(v[j], R.mul(f, H_(i, j)));
    }
    return v;
}

bool Lattice::contains_all_columns(const Matrix& m) const {
    for (size_t j = 0; j < m.cols(); ++j)
        if (!contains(m.column(j))) return false;
    return true;
}

int Lattice::log_index() const {
    // Howell pivots p^e; columns without pivot contribute N
    int total = 0;
    std::vector<int> e(n_, H_.ring().N());
    for (size_t i = 0; i < piv_.size(); ++i) e[piv_[i]] = pe_[i];
    for (int x : e) total += x;
    return total;
}

// ---- ColumnSolver / kernel / solve ----

ColumnSolver::ColumnSolver(const Matrix& m) : R_(m.ring()), r_(m.rows()), c_(m.cols()) {
    std::vector<Vec> pool;
    pool.reserve(c_);
    for (size_t j = 0; j < c_; ++j) {
        Vec row(r_ + c_, 0);
        for (size_t i = 0; i < r_; ++i) row[i] = m(i, j);
        row[r_ + j] = 1 % R_.q();
        pool.push_back(std::move(row));
    }
    HowellRows h = howell_rows(R_, std::move(pool), r_ + c_);
    std::vector<Vec> kcols;
    for (size_t i = 0; i < h.rows.size(); ++i) {
        Vec u(h.rows[i].begin() + r_, h.rows[i].end());
        if (h.piv[i] < r_) {
            h_.emplace_back(h.rows[i].begin(), h.rows[i].begin() + r_);
            u_.push_back(std::move(u));
            piv_.push_back(h.piv[i]);
            pe_.push_back(h.pe[i]);
        } else {
            kcols.push_back(std::move(u));
        }
    }
    K_ = Matrix::from_columns(R_, c_, kcols);
}

std::optional<Vec> ColumnSolver::solve(const Vec& b) const {
    if (b.size() != r_) throw std::invalid_argument("ColumnSolver::solve: size mismatch");
    Vec res = b;
    Vec x(c_, 0);
    for (size_t i = 0; i < piv_.size(); ++i) {
        size_t c = piv_[i];
        // entries left of this pivot must already be cleared
        u64 pe = R_.ppow(pe_[i]);
        if (res[c] % pe != 0) return std::nullopt;
        u64 f = res[c] / pe;
        if (!f) continue;
        row_axpy(R_, res, h_[i], f, c);
        for (size_t j = 0; j < c_; ++j)
            if (u_[i][j]) x[j] = R_.add(x[j], R_.mul(f, u_[i][j]));
    }
    if (!vec_is_zero(res)) return std::nullopt;
    return x;
}

bool ColumnSolver::contains(const Vec& b) const { return solve(b).has_value(); }

Matrix kernel(const Matrix& m) { return ColumnSolver(m).kernel(); }
SparseMatrix kernel(const SparseMatrix& m) { return SparseMatrix::from_dense(kernel(m.to_dense())); }
std::optional<Vec> solve(const Matrix& m, const Vec& b) { return ColumnSolver(m).solve(b); }
std::optional<Vec> solve(const SparseMatrix& m, const Vec& b) { return solve(m.to_dense(), b); }

// ---- Smith exponents ----

std::vector<int> smith_exponents(const Matrix& m) {
    const Zmod& R = m.ring();
    size_t r = m.rows(), c = m.cols();
    std::vector<Vec> a = matrix_rows(m);
    std::vector<int> out;
    for (size_t t = 0; t < std::min(r, c); ++t) {
        int bv = R.N();
        size_t bi = 0, bj = 0;
        for (size_t i = t; i < r; ++i)
            for (size_t j = t; j < c; ++j) {
                int v = R.val(a[i][j]);
                if (v < bv) {
                    bv = v;
                    bi = i;
                    bj = j;
                }
            }
        if (bv == R.N()) break;
        std::swap(a[t], a[bi]);
        for (size_t i = 0; i < r; ++i) std::swap(a[i][t], a[i][bj]);
        u64 pe = R.ppow(bv);
        u64 inv = R.unit_inverse(a[t][t] / pe);
        for (size_t j = t; j < c; ++j) a[t][j] = R.mul(a[t][j], inv);
        for (size_t i = t + 1; i < r; ++i) {
            u64 x = a[i][t];
            if (x) row_axpy(R, a[i], a[t], x / pe, t);
        }
        // column elimination: the pivot row now only matters at column t
        for (size_t j = t + 1; j < c; ++j) a[t][j] = 0;
        out.push_back(bv);
    }
    return out;
}

std::vector<int> module_divisors(size_t ngens, const Matrix& rel) {
    const Zmod& R = rel.ring();
    std::vector<int> e = rel.cols() == 0 ? std::vector<int>{} : smith_exponents(rel);
    std::vector<int> out;
    for (int x : e)
        if (x > 0) out.push_back(x);
    for (size_t i = e.size(); i < ngens; ++i) out.push_back(R.N());
    std::sort(out.begin(), out.end());
    return out;
}

// ---- ModulePresentation ----

ModulePresentation::ModulePresentation(Zmod R, size_t ngens, Matrix relations, std::vector<std::string> labels)
    : R_(R), n_(ngens), rel_(std::move(relations)), labels_(std::move(labels)) {
    if (rel_.rows() != n_) {
        if (rel_.rows() == 0 && rel_.cols() == 0)
            rel_ = Matrix(R_, n_, 0);
        else
            throw std::invalid_argument("ModulePresentation: relation rows != generator count");
    }
    require_same(R_, rel_.ring(), "ModulePresentation");
    if (!labels_.empty() && labels_.size() != n_) throw std::invalid_argument("ModulePresentation: label count");
    lat_ = std::make_shared<Lattice>(rel_.transpose());
}

ModulePresentation ModulePresentation::free_module(Zmod R, size_t n) { return ModulePresentation(R, n, Matrix(R, n, 0)); }

bool ModulePresentation::equal(const Vec& a, const Vec& b) const { return is_zero(vec_sub(R_, a, b)); }

const std::vector<int>& ModulePresentation::divisors() const {
    if (!div_) {
        // Howell rows span the same module, and there are few of them
        const Matrix& H = lat_->howell();
        auto d = module_divisors(n_, H.transpose());
        const_cast<ModulePresentation*>(this)->div_ = std::make_shared<std::vector<int>>(std::move(d));
    }
    return *div_;
}

int ModulePresentation::log_order() const { return lat_->log_index(); }

bool ModulePresentation::operator==(const ModulePresentation& o) const {
    return R_ == o.R_ && n_ == o.n_ && lat_->howell() == o.lat_->howell();
}

// ---- maps ----

bool map_well_defined(const Matrix& f, const ModulePresentation& src, const ModulePresentation& dst) {
    if (f.rows() != dst.ngens() || f.cols() != src.ngens()) throw std::invalid_argument("map: shape mismatch");
    Matrix img = f * src.relations();
    return dst.relation_lattice().contains_all_columns(img);
}

bool map_is_zero(const Matrix& f, const ModulePresentation& dst) {
    return dst.relation_lattice().contains_all_columns(f);
}

int map_image_log_order(const Matrix& f, const ModulePresentation& dst) {
    // |im| = |dst| / |dst / (im + rel)|
    Matrix both = f.hcat(dst.relations());
    Lattice L(both.transpose());
    return dst.log_order() - L.log_index();
}

bool map_is_surjective(const Matrix& f, const ModulePresentation& dst) {
    Matrix both = f.hcat(dst.relations());
    return Lattice(both.transpose()).log_index() == 0;
}

bool map_is_injective(const Matrix& f, const ModulePresentation& src, const ModulePresentation& dst) {
    return map_image_log_order(f, dst) == src.log_order();
}

bool map_is_isomorphism(const Matrix& f, const ModulePresentation& src, const ModulePresentation& dst) {
    return map_well_defined(f, src, dst) && map_is_surjective(f, dst) && src.log_order() == dst.log_order();
}

// ---- SubQ ----

SubQ::SubQ(const Matrix& top, const Matrix& bottom) : R_(top.ring()), n_(top.rows()) {
    require_same(top.ring(), bottom.ring(), "SubQ");
    if (bottom.rows() != n_) throw std::invalid_argument("SubQ: ambient mismatch");
    top_ = Lattice(top.transpose());
    bot_ = Lattice(bottom.transpose());
    if (!top_.contains_all_columns(bottom)) throw ContainmentError("SubQ: bottom not contained in top");
    gens_ = top_.howell().transpose();
    bottom_ = bot_.howell().transpose();
    solver_ = ColumnSolver(gens_);
    Matrix rel = solver_.kernel();
    for (size_t j = 0; j < bottom_.cols(); ++j) {
        auto x = solver_.solve(bottom_.column(j));
        if (!x) throw ContainmentError("SubQ: bottom generator not in top");
        rel.append_column(*x);
    }
    if (rel.rows() != gens_.cols()) rel = Matrix(R_, gens_.cols(), 0);
    pres_ = ModulePresentation(R_, gens_.cols(), rel);
}

SubQ SubQ::full(Zmod R, size_t n) { return SubQ(Matrix::identity(R, n), Matrix(R, n, 0)); }

bool SubQ::equal(const Vec& a, const Vec& b) const { return is_zero(vec_sub(R_, a, b)); }

Vec SubQ::coords(const Vec& v) const {
    auto x = solver_.solve(v);
    if (!x) throw ContainmentError("SubQ::coords: vector not in the top lattice");
    return *x;
}

SubquotientResult subquotient(const Matrix& cycles, const Matrix& boundaries) {
    SubQ s(cycles, boundaries);
    return {s.presentation(), s.divisors()};
}

SubquotientResult subquotient(const SparseMatrix& cycles, const SparseMatrix& boundaries) {
    return subquotient(cycles.to_dense(), boundaries.to_dense());
}

Matrix induced_matrix(const AmbientFn& f, const SubQ& src, const SubQ& dst) {
    Matrix m(dst.ring(), dst.presentation().ngens(), src.presentation().ngens());
    for (size_t j = 0; j < src.gens().cols(); ++j) m.set_column(j, dst.coords(f(src.gens().column(j))));
    return m;
}

Matrix induced_matrix(const Matrix& ambient_map, const SubQ& src, const SubQ& dst) {
    return induced_matrix([&](const Vec& v) { return ambient_map.apply(v); }, src, dst);
}

std::string divisors_string(const std::vector<int>& exps, u64 p, int free_exp) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < exps.size(); ++i) {
        if (i) os << ",";
        if (exps[i] >= free_exp) {
            os << "free";
        } else {
            u64 v = 1;
            for (int k = 0; k < exps[i]; ++k) v *= p;
            os << v;
        }
    }
    os << "]";
    return os.str();
}

}  // namespace drw
