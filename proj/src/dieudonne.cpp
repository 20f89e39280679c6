#include "drw/dieudonne.hpp"

#include <algorithm>
#include <sstream>

namespace drw {

namespace {

Matrix apply_columns(const AmbientFn& f, const Matrix& G, size_t out_dim, const Zmod& R) {
    Matrix out(R, out_dim, 0);
    for (size_t j = 0; j < G.cols(); ++j) out.append_column(f(G.column(j)));
    if (out.rows() != out_dim) return Matrix(R, out_dim, 0);
    return out;
}

// largest pivot exponent of a full-rank lattice; N if some column has no pivot
int max_pivot_exponent(const Lattice& L) {
    const Matrix& H = L.howell();
    const Zmod& R = H.ring();
    int worst = 0;
    size_t pivots = 0;
    for (size_t i = 0; i < H.rows(); ++i) {
        for (size_t j = 0; j < H.cols(); ++j) {
            if (!H(i, j)) continue;
            worst = std::max(worst, R.val(H(i, j)));
            ++pivots;
            break;
        }
    }
    return pivots < H.cols() ? R.N() : worst;
}

std::string deg_label(int i) { return "degree " + std::to_string(i); }

}  // namespace

// ---- RationalMap ----

Vec RationalMap::operator()(const Vec& x) const {
    Vec y = num.apply(x);
    if (den > 0) y = vec_div_ppow(num.ring(), y, den);
    return y;
}

AmbientFn RationalMap::fn() const {
    RationalMap copy = *this;
    return [copy](const Vec& x) { return copy(x); };
}

// ---- ComplexLevel ----

ComplexLevel::ComplexLevel(Zmod R, std::vector<SubQ> mods, std::vector<AmbientFn> d, int guard)
    : R_(R), mods_(std::move(mods)), d_(std::move(d)), guard_(guard) {
    if (!mods_.empty() && d_.size() + 1 < mods_.size())
        throw std::invalid_argument("ComplexLevel: need a differential between consecutive degrees");
    for (const auto& m : mods_) require_same(R_, m.ring(), "ComplexLevel");
}

Vec ComplexLevel::d(int i, const Vec& x) const {
    if (i < 0 || i >= top()) throw std::out_of_range("ComplexLevel::d: no differential in this degree");
    return d_[static_cast<size_t>(i)](x);
}

Matrix ComplexLevel::d_matrix(int i) const {
    return induced_matrix([&](const Vec& x) { return d(i, x); }, module(i), module(i + 1));
}

bool ComplexLevel::d_squared_zero(std::string* witness) const {
    for (int i = 0; i + 2 <= top(); ++i) {
        const Matrix& G = module(i).gens();
        for (size_t j = 0; j < G.cols(); ++j) {
            if (!module(i + 2).is_zero(d(i + 1, d(i, G.column(j))))) {
                if (witness) *witness = deg_label(i) + ": d d of generator " + std::to_string(j) + " is nonzero";
                return false;
            }
        }
    }
    return true;
}

SubQ ComplexLevel::cohomology(int i) const {
    const SubQ& T = module(i);
    const Matrix& G = T.gens();
    Matrix Z(R_, T.ambient_dim(), 0);
    if (i < top()) {
        const SubQ& N = module(i + 1);
        Matrix C(R_, N.presentation().ngens(), 0);
        for (size_t j = 0; j < G.cols(); ++j) C.append_column(N.coords(d(i, G.column(j))));
        if (C.rows() != N.presentation().ngens()) C = Matrix(R_, N.presentation().ngens(), G.cols());
        Matrix K = kernel(C.hcat(N.presentation().relations()));
        Matrix W = K.row_block(0, G.cols());
        Z = G * W;
    } else {
        Z = G;
    }
    Z = Z.hcat(T.bottom_gens());
    Matrix Bd(R_, T.ambient_dim(), 0);
    if (i > 0) Bd = apply_columns([&](const Vec& x) { return d(i - 1, x); }, module(i - 1).gens(), T.ambient_dim(), R_);
    Bd = Bd.hcat(T.bottom_gens());
    return SubQ(Z, Bd);
}

bool is_chain_map(const ComplexLevel& a, const ComplexLevel& b, const std::vector<AmbientFn>& f, std::string* witness) {
    if (a.top() != b.top() || static_cast<int>(f.size()) != a.top() + 1)
        throw std::invalid_argument("is_chain_map: degree ranges differ");
    for (int i = 0; i <= a.top(); ++i) {
        const SubQ& A = a.module(i);
        const SubQ& B = b.module(i);
        for (size_t j = 0; j < A.bottom_gens().cols(); ++j) {
            if (!B.is_zero(f[i](A.bottom_gens().column(j)))) {
                if (witness) *witness = deg_label(i) + ": map is not well defined on the quotient";
                return false;
            }
        }
        for (size_t j = 0; j < A.gens().cols(); ++j) {
            Vec x = A.gens().column(j);
            Vec fx = f[i](x);
            if (!B.contains(fx)) {
                if (witness) *witness = deg_label(i) + ": image of generator " + std::to_string(j) + " lies outside the target";
                return false;
            }
            if (i < a.top()) {
                Vec l = f[i + 1](a.d(i, x));
                Vec r = b.d(i, fx);
                if (!b.module(i + 1).equal(l, r)) {
                    if (witness) *witness = deg_label(i) + ": f d != d f on generator " + std::to_string(j);
                    return false;
                }
            }
        }
    }
    return true;
}

Matrix induced_on_cohomology(const ComplexLevel& a, const ComplexLevel& b, const AmbientFn& f, int i) {
    return induced_matrix(f, a.cohomology(i), b.cohomology(i));
}

bool is_degreewise_bijection(const ComplexLevel& a, const ComplexLevel& b, const std::vector<AmbientFn>& f,
                             std::string* witness) {
    for (int i = 0; i <= a.top(); ++i) {
        Matrix m = induced_matrix(f[i], a.module(i), b.module(i));
        if (!map_is_isomorphism(m, a.module(i).presentation(), b.module(i).presentation())) {
            if (witness)
                *witness = deg_label(i) + ": orders " + std::to_string(a.module(i).log_order()) + " -> " +
                           std::to_string(b.module(i).log_order()) + ", not a bijection";
            return false;
        }
    }
    return true;
}

bool is_quasi_isomorphism(const ComplexLevel& a, const ComplexLevel& b, const std::vector<AmbientFn>& f,
                          std::string* witness) {
    for (int i = 0; i <= a.top(); ++i) {
        SubQ ha = a.cohomology(i), hb = b.cohomology(i);
        Matrix m = induced_matrix(f[i], ha, hb);
        if (!map_is_isomorphism(m, ha.presentation(), hb.presentation())) {
            if (witness)
                *witness = deg_label(i) + ": cohomology " + divisors_string(ha.divisors(), a.ring().p(), a.ring().N()) +
                           " -> " + divisors_string(hb.divisors(), b.ring().p(), b.ring().N()) + " is not bijective";
            return false;
        }
    }
    return true;
}

// ---- LatticeComplex ----

LatticeComplex::LatticeComplex(Zmod R, std::vector<Matrix> lattices, std::vector<RationalMap> d, int guard)
    : R_(R), d_(std::move(d)), guard_(guard) {
    for (auto& L : lattices) {
        require_same(R_, L.ring(), "LatticeComplex");
        lat_.push_back(Lattice::from_columns(L).howell().transpose());
        if (lat_.back().cols() == 0) lat_.back() = Matrix(R_, L.rows(), 0);
    }
    if (!lat_.empty() && d_.size() + 1 < lat_.size()) throw std::invalid_argument("LatticeComplex: missing differential");
}

LatticeComplex LatticeComplex::free(Zmod R, std::vector<size_t> dims, std::vector<RationalMap> d) {
    std::vector<Matrix> L;
    for (size_t n : dims) L.push_back(Matrix::identity(R, n));
    return LatticeComplex(R, std::move(L), std::move(d));
}

Vec LatticeComplex::d(int i, const Vec& x) const {
    if (i < 0 || i >= top()) throw std::out_of_range("LatticeComplex::d: no differential in this degree");
    return d_[static_cast<size_t>(i)](x);
}

std::vector<AmbientFn> LatticeComplex::d_fns() const {
    std::vector<AmbientFn> out;
    for (int i = 0; i < top(); ++i) out.push_back(d_[static_cast<size_t>(i)].fn());
    return out;
}

Matrix LatticeComplex::scaled_lattice(int i, int r) const { return lattice(i).scaled(R_.ppow(r)); }

ComplexLevel LatticeComplex::reduce(int r) const {
    std::vector<SubQ> mods;
    for (int i = 0; i <= top(); ++i) mods.emplace_back(lattice(i), scaled_lattice(i, r));
    return ComplexLevel(R_, std::move(mods), d_fns(), guard_);
}

SubQ LatticeComplex::cycles_mod(int i, int r) const {
    const Matrix& G = lattice(i);
    Matrix Z(R_, ambient_dim(i), 0);
    if (i < top()) {
        Matrix DG = apply_columns([&](const Vec& x) { return d(i, x); }, G, ambient_dim(i + 1), R_);
        Matrix K = kernel(DG.hcat(scaled_lattice(i + 1, r)));
        Z = G * K.row_block(0, G.cols());
    } else {
        Z = G;
    }
    Matrix bottom = scaled_lattice(i, r);
    Z = Z.hcat(bottom);
    Matrix Bd(R_, ambient_dim(i), 0);
    if (i > 0) Bd = apply_columns([&](const Vec& x) { return d(i - 1, x); }, lattice(i - 1), ambient_dim(i), R_);
    return SubQ(Z, Bd.hcat(bottom));
}

Vec LatticeComplex::bockstein(int i, int r, const Vec& z) const {
    Vec y = d(i, z);
    Vec w;
    try {
        w = vec_div_ppow(R_, y, r);
    } catch (const std::exception&) {
        throw LiftFailure(deg_label(i) + ": d of the lift is not divisible by p^" + std::to_string(r));
    }
    if (!Lattice::from_columns(lattice(i + 1)).contains(w))
        throw LiftFailure(deg_label(i) + ": d of the lift divided by p^" + std::to_string(r) + " leaves the lattice");
    return w;
}

ComplexLevel LatticeComplex::cohomology_mod(int r) const {
    std::vector<SubQ> mods;
    for (int i = 0; i <= top(); ++i) mods.push_back(cycles_mod(i, r));
    std::vector<AmbientFn> beta;
    auto self = std::make_shared<const LatticeComplex>(*this);
    for (int i = 0; i < top(); ++i) beta.push_back([self, i, r](const Vec& z) { return self->bockstein(i, r, z); });
    return ComplexLevel(R_, std::move(mods), std::move(beta), guard_);
}

std::vector<int> LatticeComplex::zp_cohomology(int i) const {
    if (unscaled_) return unscaled_->zp_cohomology(i);
    const int M = R_.N();
    // matrix of d^j in the lattice generators, with its reliable precision
    auto dmat = [&](int j, int& prec) {
        const Matrix& G = lattice(j);
        Lattice target = Lattice::from_columns(lattice(j + 1));
        ColumnSolver S(lattice(j + 1));
        Matrix m(R_, lattice(j + 1).cols(), 0);
        for (size_t c = 0; c < G.cols(); ++c) {
            auto w = S.solve(d(j, G.column(c)));
            if (!w) throw InvariantViolation("zp_cohomology: d leaves the lattice");
            m.append_column(*w);
        }
        if (m.rows() != lattice(j + 1).cols()) m = Matrix(R_, lattice(j + 1).cols(), G.cols());
        prec = M - guard_ - d_map(j).den - max_pivot_exponent(target);
        return m;
    };
    auto ranks = [&](int j, std::vector<int>& vals) {
        int prec = 0;
        Matrix m = dmat(j, prec);
        if (prec <= 1) throw PrecisionExhausted("zp_cohomology: no precision left");
        int rank = 0;
        for (int v : smith_exponents(m)) {
            if (v >= prec) continue;
            if (2 * v >= prec) throw PrecisionExhausted("zp_cohomology: Smith valuation " + std::to_string(v) +
                                                        " too close to the working precision");
            vals.push_back(v);
            ++rank;
        }
        return rank;
    };
    std::vector<int> prev, cur;
    int rk_prev = i > 0 ? ranks(i - 1, prev) : 0;
    int rk_cur = i < top() ? ranks(i, cur) : 0;
    int n = static_cast<int>(lattice(i).cols());
    std::vector<int> out;
    for (int v : prev)
        if (v >= 1) out.push_back(v);
    std::sort(out.begin(), out.end());
    for (int f = 0; f < n - rk_prev - rk_cur; ++f) out.push_back(M);
    return out;
}

LatticeComplex eta_p(const LatticeComplex& c) {
    const Zmod& R = c.ring();
    const int top = c.top();
    if (c.precision() <= top + 1) throw PrecisionExhausted("eta_p: need precision above top degree + 1");
    std::vector<Matrix> L, K;
    for (int i = 0; i <= top; ++i) {
        const Matrix& G = c.lattice(i);
        Matrix W;
        if (i < top) {
            Matrix DG = apply_columns([&](const Vec& x) { return c.d(i, x); }, G, c.ambient_dim(i + 1), R);
            Matrix K = kernel(DG.hcat(c.scaled_lattice(i + 1, 1)));
            W = G * K.row_block(0, G.cols());
        } else {
            W = G;
        }
        L.push_back(W.scaled(R.ppow(i)));
        K.push_back(W);
    }
    std::vector<RationalMap> d, d1;
    for (int i = 0; i < top; ++i) {
        d.push_back(c.d_map(i));
        d1.push_back({c.d_map(i).num, c.d_map(i).den + 1});
    }
    LatticeComplex out(R, std::move(L), std::move(d), c.guard() + top + 1);
    out.unscaled_ = std::make_shared<const LatticeComplex>(R, std::move(K), std::move(d1), c.guard());
    return out;
}

PhiFReport phi_F(const LatticeComplex& src, const LatticeComplex& dst, const std::vector<AmbientFn>& F) {
    PhiFReport rep;
    LatticeComplex E = eta_p(dst);
    const Zmod& R = dst.ring();
    const int prec = E.precision();
    auto phi = [&](int i, const Vec& x) { return vec_scale(R, F[i](x), R.ppow(i)); };
    for (int i = 0; i <= src.top(); ++i) {
        const Matrix& G = src.lattice(i);
        Lattice eta = Lattice::from_columns(E.lattice(i));
        Matrix img(R, dst.ambient_dim(i), 0);
        for (size_t j = 0; j < G.cols(); ++j) {
            Vec x = G.column(j);
            Vec y = phi(i, x);
            img.append_column(y);
            if (!eta.contains(y)) {
                rep.into_eta = false;
                if (rep.witness.empty()) rep.witness = deg_label(i) + ": phi_F of a generator is outside eta_p";
            }
            if (i < src.top()) {
                Vec a = dst.d(i, y);
                Vec b = phi(i + 1, src.d(i, x));
                if (vec_val(R, vec_sub(R, a, b)) < prec) {
                    rep.chain_map = false;
                    if (rep.witness.empty()) rep.witness = deg_label(i) + ": d phi_F != phi_F d";
                }
            }
        }
        if (img.rows() != dst.ambient_dim(i)) img = Matrix(R, dst.ambient_dim(i), 0);
        if (!(Lattice::from_columns(img) == eta)) {
            rep.bijective = false;
            if (rep.witness.empty()) rep.witness = deg_label(i) + ": phi_F is not onto eta_p";
        }
    }
    return rep;
}

ComplexLevel w_r_quotient(const LatticeComplex& A, const LatticeComplex& B, int r) {
    const Zmod& R = A.ring();
    std::vector<SubQ> mods;
    for (int i = 0; i <= A.top(); ++i) {
        Matrix bottom = B.scaled_lattice(i, r);
        if (i > 0) bottom = bottom.hcat(apply_columns([&](const Vec& x) { return A.d(i - 1, x); },
                                                      B.scaled_lattice(i - 1, r), A.ambient_dim(i), R));
        mods.emplace_back(A.lattice(i), bottom);
    }
    return ComplexLevel(R, std::move(mods), A.d_fns(), A.guard());
}

CheckResult cartier_criterion_check(const LatticeComplex& source, const LatticeComplex& target,
                                    const std::vector<AmbientFn>& F) {
    CheckResult res;
    ComplexLevel a = source.reduce(1);
    ComplexLevel b = target.cohomology_mod(1);
    std::string w;
    res.checked = a.top() + 1;
    if (!is_chain_map(a, b, F, &w)) res.fail("F is not a chain map to (H, beta): " + w);
    else if (!is_degreewise_bijection(a, b, F, &w)) res.fail(w);
    return res;
}

CheckResult gamma_check(const LatticeComplex& C) {
    CheckResult res;
    LatticeComplex E = eta_p(C);
    ComplexLevel a = E.reduce(1);
    ComplexLevel b = C.cohomology_mod(1);
    const Zmod& R = C.ring();
    std::vector<AmbientFn> g;
    for (int i = 0; i <= C.top(); ++i) g.push_back([R, i](const Vec& x) { return vec_div_ppow(R, x, i); });
    std::string w;
    res.checked = C.top() + 1;
    if (!is_chain_map(a, b, g, &w)) res.fail("gamma is not a chain map: " + w);
    else if (!is_quasi_isomorphism(a, b, g, &w)) res.fail(w);
    return res;
}

Vec restriction_via_psi(const LatticeComplex& small, const LatticeComplex& big, const std::vector<AmbientFn>& F,
                        int r, int i, const Vec& y) {
    const Zmod& R = big.ring();
    LatticeComplex E = eta_p(big);
    const Matrix& G = small.lattice(i);
    Matrix cols = apply_columns([&](const Vec& x) { return vec_scale(R, F[i](x), R.ppow(i)); }, G, big.ambient_dim(i), R);
    Matrix amb = E.scaled_lattice(i, r - 1);
    if (i > 0) amb = amb.hcat(apply_columns([&](const Vec& x) { return big.d(i - 1, x); }, E.lattice(i - 1),
                                            big.ambient_dim(i), R));
    auto sol = solve(cols.hcat(amb), vec_scale(R, y, R.ppow(i)));
    if (!sol) throw PsiNotInvertible(deg_label(i) + ": p^i y is not in the image of psi modulo p^{r-1}");
    Vec w(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(G.cols()));
    return G.apply(w);
}

// ---- tower checks ----

bool TowerReport::all_pass() const {
    return std::all_of(axioms.begin(), axioms.end(), [](const AxiomResult& a) { return a.pass; });
}

const AxiomResult* TowerReport::find(const std::string& name) const {
    for (const auto& a : axioms)
        if (a.name == name) return &a;
    return nullptr;
}

nlohmann::json TowerReport::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& a : axioms) {
        nlohmann::json j = {{"name", a.name}, {"pass", a.pass}, {"checked", a.checked}};
        if (!a.pass) j["witness"] = a.witness;
        out.push_back(j);
    }
    return out;
}

std::string weight_label(const LogChart& c, const ExponentVector& k) {
    return k.is_zero() ? std::string("1") : k.to_string(c);
}

namespace {

struct Checker {
    const GradedTower& T;
    AxiomResult res;
    Checker(const GradedTower& t, std::string name) : T(t) { res.name = std::move(name); }

    std::string where(int r, const ExponentVector& k, int i) const {
        return "level " + std::to_string(r) + " weight " + weight_label(T.chart(), k) + " " + deg_label(i);
    }
    void expect_equal(int r, const ExponentVector& k, int i, const Vec& a, const Vec& b, const std::string& what) {
        ++res.checked;
        if (!res.pass) return;
        const SubQ& P = T.piece(r, k, i);
        if (!P.contains(a) || !P.contains(b)) {
            res.pass = false;
            res.witness = where(r, k, i) + ": " + what + " leaves the piece";
        } else if (!P.equal(a, b)) {
            res.pass = false;
            res.witness = where(r, k, i) + ": " + what;
        }
    }
    void expect_zero(int r, const ExponentVector& k, int i, const Vec& a, const std::string& what) {
        expect_equal(r, k, i, a, Vec(a.size(), 0), what);
    }
};

Vec scale(const GradedTower& T, int r, const ExponentVector& k, int i, const Vec& x, i64 s) {
    return vec_scale(T.piece(r, k, i).ring(), x, T.piece(r, k, i).ring().from_int(s));
}

template <class Fn>
void for_generators(const GradedTower& T, int r, Fn&& fn) {
    for (const auto& k : T.weights(r)) {
        for (int i = 0; i <= T.top(); ++i) {
            const SubQ& P = T.piece(r, k, i);
            for (size_t j = 0; j < P.gens().cols(); ++j) {
                if (P.is_zero(P.gens().column(j))) continue;
                fn(k, i, P.gens().column(j));
            }
        }
    }
}

}  // namespace

TowerReport dieudonne_tower_check(const GradedTower& T) {
    TowerReport rep;
    const int top = T.top(), rmax = T.max_level();
    const i64 p = T.p();
    Checker dd(T, "d d = 0"), FV(T, "F V = p"), VF(T, "V F = p"), Vd(T, "V d = p d V"), dF(T, "d F = p F d"),
        RF(T, "R F = F R"), RV(T, "R V = V R"), Rd(T, "R d = d R");
    for (int r = 1; r <= rmax; ++r) {
        for_generators(T, r, [&](const ExponentVector& k, int i, const Vec& x) {
            if (i + 2 <= top) dd.expect_zero(r, k, i + 2, T.d(r, k, i + 1, T.d(r, k, i, x)), "d d x != 0");
            const ExponentVector kp = k.times_p(), kq = k.div_p();
            if (r < rmax && T.in_window(r + 1, kq)) {
                Vec v = T.V(r, k, i, x);
                FV.expect_equal(r, k, i, T.F(r + 1, kq, i, v), scale(T, r, k, i, x, p), "F V x != p x");
                if (i < top)
                    Vd.expect_equal(r + 1, kq, i + 1, T.V(r, k, i + 1, T.d(r, k, i, x)),
                                    scale(T, r + 1, kq, i + 1, T.d(r + 1, kq, i, v), p), "V d x != p d V x");
                if (r >= 2)
                    RV.expect_equal(r, kq, i, T.R(r + 1, kq, i, v), T.V(r - 1, k, i, T.R(r, k, i, x)), "R V x != V R x");
            }
            if (r >= 2 && T.in_window(r - 1, kp)) {
                Vec f = T.F(r, k, i, x);
                VF.expect_equal(r, k, i, T.V(r - 1, kp, i, f), scale(T, r, k, i, x, p), "V F x != p x");
                if (i < top)
                    dF.expect_equal(r - 1, kp, i + 1, T.d(r - 1, kp, i, f),
                                    scale(T, r - 1, kp, i + 1, T.F(r, k, i + 1, T.d(r, k, i, x)), p), "d F x != p F d x");
                if (r >= 3)
                    RF.expect_equal(r - 2, kp, i, T.R(r - 1, kp, i, f), T.F(r - 1, k, i, T.R(r, k, i, x)), "R F x != F R x");
            }
            if (r >= 2 && i < top)
                Rd.expect_equal(r - 1, k, i + 1, T.R(r, k, i + 1, T.d(r, k, i, x)), T.d(r - 1, k, i, T.R(r, k, i, x)),
                                "R d x != d R x");
        });
    }
    for (auto* c : {&dd, &FV, &VF, &Vd, &dF, &RF, &RV, &Rd}) rep.axioms.push_back(c->res);
    return rep;
}

TowerReport fv_procomplex_check(const GradedTower& T, const LogData& L, const TowerCheckOptions& opt) {
    TowerReport rep;
    const int top = T.top(), rmax = T.max_level();
    const int p = T.p();
    const LogChart& C = T.chart();
    const size_t n = C.nvars();
    const ExponentVector zero = ExponentVector::zero(p, n);
    Checker FV(T, "F V = p"), FdV(T, "F d V = d"), Fdx(T, "F d[x] = [x]^(p-1) d[x]"), VxY(T, "(V x) y = V(x F y)"),
        Fdel(T, "F delta = delta"), dal(T, "d alpha = alpha delta"), ddel(T, "d delta = 0"), Fal(T, "F alpha = alpha^p"),
        Ral(T, "R alpha = alpha"), Rdel(T, "R delta = delta"), diag(T, "delta of the diagonal = 0");

    for (int r = 1; r < rmax; ++r) {
        for_generators(T, r, [&](const ExponentVector& k, int i, const Vec& x) {
            const ExponentVector kq = k.div_p();
            if (!T.in_window(r + 1, kq)) return;
            Vec v = T.V(r, k, i, x);
            FV.expect_equal(r, k, i, T.F(r + 1, kq, i, v), scale(T, r, k, i, x, p), "F V x != p x");
            if (i < top)
                FdV.expect_equal(r, k, i + 1, T.F(r + 1, kq, i + 1, T.d(r + 1, kq, i, v)), T.d(r, k, i, x), "F d V x != d x");
        });
    }
    for (int r = 2; r <= rmax; ++r) {
        for (const auto& m : T.weights(r)) {
            if (!m.is_integral() || !T.in_window(r - 1, m.times_p()) || !T.in_window(r - 1, m.scaled(p - 1))) continue;
            Vec lhs = T.F(r, m, 1, T.d(r, m, 0, T.teichmuller(r, m)));
            Vec rhs = T.mul(r - 1, m.scaled(p - 1), 0, T.teichmuller(r - 1, m.scaled(p - 1)), m, 1,
                            T.d(r - 1, m, 0, T.teichmuller(r - 1, m)));
            Fdx.expect_equal(r - 1, m.times_p(), 1, lhs, rhs, "F d[x] != [x]^(p-1) d[x] for x = " + weight_label(C, m));
        }
    }
    for (int r = 2; r <= rmax; ++r) {
        // x at level r-1, y at level r
        std::vector<std::tuple<ExponentVector, int, Vec>> xs, ys;
        auto collect = [&](int lvl, auto& out) {
            for (const auto& k : T.weights(lvl)) {
                for (int i = 0; i <= top; ++i) {
                    const SubQ& P = T.piece(lvl, k, i);
                    size_t taken = 0;
                    for (size_t j = 0; j < P.gens().cols(); ++j) {
                        if (P.is_zero(P.gens().column(j))) continue;
                        if (opt.product_gens && taken >= opt.product_gens) break;
                        out.emplace_back(k, i, P.gens().column(j));
                        ++taken;
                    }
                }
            }
        };
        collect(r - 1, xs);
        collect(r, ys);
        for (const auto& [k1, i1, x] : xs) {
            for (const auto& [k2, i2, y] : ys) {
                if (i1 + i2 > top) continue;
                const ExponentVector kl = k1.div_p() + k2;
                if (opt.product_degree_bound >= 0 && !kl.degree_le(PRat::integer(opt.product_degree_bound, p))) continue;
                const ExponentVector kF = k2.times_p(), kx = k1 + kF;
                if (!T.in_window(r, k1.div_p()) || !T.in_window(r, kl) || !T.in_window(r - 1, kF) ||
                    !T.in_window(r - 1, kx))
                    continue;
                if (kl.vanishes(C) || !kl.admissible(C)) continue;
                Vec lhs = T.mul(r, k1.div_p(), i1, T.V(r - 1, k1, i1, x), k2, i2, y);
                Vec xf = kx.vanishes(C) ? Vec(T.piece(r - 1, kx, i1 + i2).ambient_dim(), 0)
                                        : T.mul(r - 1, k1, i1, x, kF, i2, T.F(r, k2, i2, y));
                Vec rhs = T.V(r - 1, kx, i1 + i2, xf);
                VxY.expect_equal(r, kl, i1 + i2, lhs, rhs, "(V x) y != V(x F y)");
            }
        }
    }
    for (int r = 1; r <= rmax; ++r) {
        for (size_t v : L.generators) {
            const ExponentVector ev = ExponentVector::unit(p, n, v);
            Vec a = L.alpha(r, v), dl = L.delta(r, v);
            dal.expect_equal(r, ev, 1, T.d(r, ev, 0, a), T.mul(r, ev, 0, a, zero, 1, dl), "d alpha != alpha delta at " + C.name(v));
            if (top >= 2) ddel.expect_zero(r, zero, 2, T.d(r, zero, 1, dl), "d delta != 0 at " + C.name(v));
            if (r >= 2) {
                Fdel.expect_equal(r - 1, zero, 1, T.F(r, zero, 1, dl), L.delta(r - 1, v), "F delta != delta at " + C.name(v));
                Rdel.expect_equal(r - 1, zero, 1, T.R(r, zero, 1, dl), L.delta(r - 1, v), "R delta != delta at " + C.name(v));
                Ral.expect_equal(r - 1, ev, 0, T.R(r, ev, 0, a), L.alpha(r - 1, v), "R alpha != alpha at " + C.name(v));
                // alpha^p at level r-1
                Vec pw = L.alpha(r - 1, v);
                ExponentVector kw = ev;
                for (int e = 1; e < p; ++e) {
                    pw = T.mul(r - 1, kw, 0, pw, ev, 0, L.alpha(r - 1, v));
                    kw = kw + ev;
                }
                Fal.expect_equal(r - 1, ev.times_p(), 0, T.F(r, ev, 0, a), pw, "F alpha != alpha^p at " + C.name(v));
            }
        }
        if (L.diagonal_vanishes) {
            for (size_t h = 0; h < C.blocks().size(); ++h) {
                Vec s(T.piece(r, zero, 1).ambient_dim(), 0);
                for (size_t i = 0; i < C.blocks()[h].size(); ++i)
                    s = vec_add(T.piece(r, zero, 1).ring(), s, L.delta(r, C.block_var(h, i)));
                diag.expect_zero(r, zero, 1, s, "sum of delta over block " + std::to_string(h) + " != 0");
            }
        }
    }
    for (auto* c : {&FV, &FdV, &Fdx, &VxY, &Fdel, &dal, &ddel, &Fal, &Ral, &Rdel, &diag}) rep.axioms.push_back(c->res);
    return rep;
}

AxiomResult fil_exactness_check(const GradedTower& T, int r) {
    Checker c(T, "Fil exactness r=" + std::to_string(r));
    const int top = T.top();
    if (r + 1 > T.max_level()) throw std::invalid_argument("fil_exactness_check: level out of range");
    for (const auto& k : T.weights(r + 1)) {
        const ExponentVector src = k.times_p(r);
        if (!T.in_window(1, src) || !T.in_window(r, k)) continue;
        // V^r from level 1 weight p^r k to level r+1 weight k
        auto Vr = [&](int i, Vec x) {
            ExponentVector w = src;
            for (int l = 1; l <= r; ++l) {
                x = T.V(l, w, i, x);
                w = w.div_p();
            }
            return x;
        };
        for (int i = 0; i <= top; ++i) {
            ++c.res.checked;
            if (!c.res.pass) continue;
            const SubQ& P = T.piece(r + 1, k, i);
            const SubQ& Q = T.piece(r, k, i);
            Matrix img = P.bottom_gens();
            const SubQ& S = T.piece(1, src, i);
            for (size_t j = 0; j < S.gens().cols(); ++j) img.append_column(Vr(i, S.gens().column(j)));
            if (i > 0) {
                const SubQ& S1 = T.piece(1, src, i - 1);
                for (size_t j = 0; j < S1.gens().cols(); ++j) img.append_column(T.d(r + 1, k, i - 1, Vr(i - 1, S1.gens().column(j))));
            }
            for (size_t j = 0; j < img.cols(); ++j) {
                if (!P.contains(img.column(j))) {
                    c.res.pass = false;
                    c.res.witness = c.where(r + 1, k, i) + ": Fil^r is not inside W_{r+1}";
                    break;
                }
                if (!Q.is_zero(T.R(r + 1, k, i, img.column(j)))) {
                    c.res.pass = false;
                    c.res.witness = c.where(r + 1, k, i) + ": R does not kill Fil^r";
                    break;
                }
            }
            if (!c.res.pass) continue;
            int fil = SubQ(img, P.bottom_gens()).log_order();
            Matrix Rm = induced_matrix([&](const Vec& x) { return T.R(r + 1, k, i, x); }, P, Q);
            bool onto = map_is_surjective(Rm, Q.presentation());
            if (!onto || P.log_order() != fil + Q.log_order()) {
                c.res.pass = false;
                std::ostringstream os;
                os << c.where(r + 1, k, i) << ": |W_{r+1}| = p^" << P.log_order() << ", |Fil^r| = p^" << fil
                   << ", |W_r| = p^" << Q.log_order() << (onto ? "" : ", R not onto");
                c.res.witness = os.str();
            }
        }
    }
    return c.res;
}

LogData teichmuller_log_data(const GradedTower& T, std::function<Vec(int r, size_t v)> dlog) {
    LogData L;
    const LogChart& C = T.chart();
    for (size_t v = 0; v < C.nvars(); ++v)
        if (!C.is_smooth(v)) L.generators.push_back(v);
    const GradedTower* t = &T;
    const int p = C.p();
    const size_t n = C.nvars();
    L.alpha = [t, p, n](int r, size_t v) { return t->teichmuller(r, ExponentVector::unit(p, n, v)); };
    L.delta = std::move(dlog);
    return L;
}

}  // namespace drw
