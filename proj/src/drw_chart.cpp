#include "drw/drw_chart.hpp"

#include <algorithm>
#include <sstream>

namespace drw {

namespace {

std::string where(const LogChart& c, int r, const ExponentVector& k, int i) {
    return "level " + std::to_string(r) + " weight " + weight_label(c, k) + " degree " + std::to_string(i);
}

Matrix columns_of(const Zmod& R, size_t rows, const std::vector<Vec>& cols) {
    Matrix m(R, rows, 0);
    for (const auto& c : cols) m.append_column(c);
    return m;
}

int precision_for(int r_max) { return 3 * r_max + 4; }

}  // namespace

// ---- DRWTower ----

DRWTower::DRWTower(const LogChart& chart, LogBase base, int r_max, i64 D, i64 L)
    : B_(std::make_shared<DlogBasis>(chart, base)), rmax_(r_max), D_(D), L_(L),
      R_(static_cast<u64>(chart.p()), precision_for(r_max)) {
    if (r_max < 1 || r_max > 3) throw CapacityExceeded("level r_max = " + std::to_string(r_max) + " outside 1..3");
    if (D < 0 || D > 16) throw CapacityExceeded("degree bound " + std::to_string(D) + " outside 0..16");
    if (B_->size() > 12) throw CapacityExceeded("too many dlog symbols");
}

std::unique_ptr<DRWTower> build_drw_tower(const LogChart& chart, int r_max, i64 D, i64 L) {
    return std::make_unique<DRWTower>(chart, LogBase::Standard, r_max, D, L);
}

std::vector<ExponentVector> DRWTower::weights(int r) const {
    return enumerate_basis(chart(), r - 1, D_, L_);
}

bool DRWTower::in_window(int r, const ExponentVector& k) const {
    if (r < 1 || r > rmax_) return false;
    const LogChart& c = chart();
    if (!k.admissible(c) || k.vanishes(c)) return false;
    i64 scale = 1;
    for (int j = r; j < rmax_; ++j) scale *= c.p();
    if (!k.degree_le(PRat::integer(D_ * scale, c.p()))) return false;
    for (size_t v = 0; v < k.size(); ++v) {
        if (!c.is_laurent(v)) continue;
        PRat a{std::abs(k.num(v)), k.depth(), c.p()};
        if (!(a <= PRat::integer(L_ * scale, c.p()))) return false;
    }
    return true;
}

const DRWTower::WeightData& DRWTower::data(const ExponentVector& k) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = wd_.find(k);
    if (it != wd_.end()) return *it->second;
    auto w = std::make_unique<WeightData>();
    w->wf = weight_forms(*B_, k, R_);
    const int top = B_->top_degree();
    const int u = k.depth();
    for (int i = 0; i <= top; ++i) {
        const size_t n = w->wf.dim(i);
        if (u == 0 || i == top || n == 0) {
            w->E.push_back(Matrix::identity(R_, n));
            continue;
        }
        const size_t m = w->wf.dim(i + 1);
        Matrix A = w->wf.dnum[static_cast<size_t>(i)].hcat(Matrix::identity(R_, m).scaled(R_.ppow(u)));
        w->E.push_back(kernel(A).row_block(0, n));
    }
    return *wd_.emplace(k, std::move(w)).first->second;
}

const WeightForms& DRWTower::forms(const ExponentVector& k) const { return data(k).wf; }

const Matrix& DRWTower::integral_forms(const ExponentVector& k, int i) const {
    return data(k).E.at(static_cast<size_t>(i));
}

const SubQ& DRWTower::piece(int r, const ExponentVector& k, int i) const {
    auto key = std::make_tuple(r, k, i);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = pieces_.find(key);
        if (it != pieces_.end()) return *it->second;
    }
    const WeightData& W = data(k);
    const size_t n = W.wf.dim(i);
    const Matrix& E = W.E.at(static_cast<size_t>(i));
    Matrix fil(R_, n, 0);
    if (n > 0) {
        if (k.depth() >= r) {
            fil = E;
        } else {
            const ExponentVector kr = k.times_p(r);
            const WeightData& Wr = data(kr);
            fil = Wr.E.at(static_cast<size_t>(i)).scaled(R_.ppow(r));
            if (i > 0) {
                const Matrix& Eb = Wr.E.at(static_cast<size_t>(i - 1));
                for (size_t j = 0; j < Eb.cols(); ++j)
                    fil.append_column(d(r, k, i - 1, vec_scale(R_, Eb.column(j), R_.ppow(r))));
            }
        }
    }
    auto P = std::make_unique<SubQ>(E, fil);
    std::lock_guard<std::mutex> lock(mu_);
    return *pieces_.emplace(key, std::move(P)).first->second;
}

Vec DRWTower::d(int, const ExponentVector& k, int i, const Vec& x) const {
    const WeightForms& w = forms(k);
    if (i >= static_cast<int>(w.dnum.size())) throw std::out_of_range("DRWTower::d: degree out of range");
    Vec y = w.dnum[static_cast<size_t>(i)].apply(x);
    return w.dden > 0 ? vec_div_ppow(R_, y, w.dden) : y;
}

Vec DRWTower::F(int, const ExponentVector&, int, const Vec& x) const { return x; }

Vec DRWTower::V(int, const ExponentVector&, int, const Vec& x) const { return vec_scale(R_, x, R_.ppow(1)); }

Vec DRWTower::R(int, const ExponentVector&, int, const Vec& x) const { return x; }

Vec DRWTower::wedge(const ExponentVector& k1, int i1, const Vec& x, const ExponentVector& k2, int i2,
                    const Vec& y) const {
    const WeightForms& a = forms(k1);
    const WeightForms& b = forms(k2);
    const WeightForms& c = forms(k1 + k2);
    Vec out(c.dim(i1 + i2), 0);
    if (out.empty()) return out;
    for (size_t s = 0; s < x.size(); ++s) {
        if (!x[s]) continue;
        Mask I = a.basis[static_cast<size_t>(i1)][s];
        for (size_t t = 0; t < y.size(); ++t) {
            if (!y[t]) continue;
            Mask J = b.basis[static_cast<size_t>(i2)][t];
            int sg = wedge_sign(I, J);
            if (!sg) continue;
            size_t row = c.index[static_cast<size_t>(i1 + i2)].at(I | J);
            u64 v = R_.mul(x[s], y[t]);
            out[row] = sg > 0 ? R_.add(out[row], v) : R_.sub(out[row], v);
        }
    }
    return out;
}

Vec DRWTower::mul(int, const ExponentVector& k1, int i1, const Vec& x, const ExponentVector& k2, int i2,
                  const Vec& y) const {
    return wedge(k1, i1, x, k2, i2, y);
}

Vec DRWTower::teichmuller(int, const ExponentVector& m) const {
    return Vec(forms(m).dim(0), 1);
}

Vec DRWTower::verschiebung_teichmuller(int l, const ExponentVector& m) const {
    return Vec(forms(m.div_p(l)).dim(0), R_.ppow(l));
}

Vec DRWTower::dlog(int, size_t var) const {
    const ExponentVector zero = ExponentVector::zero(chart().p(), chart().nvars());
    const WeightForms& w = forms(zero);
    Vec out(w.dim(1), 0);
    const auto& c = B_->dlog_coeffs(var);
    for (size_t l = 0; l < c.size(); ++l) {
        if (!c[l]) continue;
        auto it = w.index[1].find(Mask{1} << l);
        if (it == w.index[1].end()) throw std::logic_error("dlog of a variable without a log structure");
        out[it->second] = R_.from_int(c[l]);
    }
    return out;
}

LogData DRWTower::log_data() const {
    const DRWTower* t = this;
    LogData L = teichmuller_log_data(*this, [t](int r, size_t v) { return t->dlog(r, v); });
    L.diagonal_vanishes = base() == LogBase::Standard;
    return L;
}

LatticeComplex DRWTower::integral_complex(const ExponentVector& k) const {
    const WeightData& W = data(k);
    std::vector<Matrix> lat = W.E;
    std::vector<RationalMap> dm;
    for (const auto& m : W.wf.dnum) dm.push_back(RationalMap{m, W.wf.dden});
    return LatticeComplex(R_, std::move(lat), std::move(dm), k.depth());
}

ComplexLevel DRWTower::level_complex(int r, const ExponentVector& k) const {
    std::vector<SubQ> mods;
    std::vector<AmbientFn> ds;
    for (int i = 0; i <= top(); ++i) {
        mods.push_back(piece(r, k, i));
        if (i < top()) ds.push_back([this, r, k, i](const Vec& x) { return d(r, k, i, x); });
    }
    return ComplexLevel(R_, std::move(mods), std::move(ds));
}

// ---- comparisons ----

CheckResult nu_bijection_check(const DRWTower& T, i64 D) {
    CheckResult res;
    const LogChart& c = T.chart();
    for (const auto& k : enumerate_basis(c, 1, D, T.laurent_bound())) {
        for (int i = 0; i <= T.top(); ++i) {
            ++res.checked;
            const SubQ& W = T.piece(1, k, i);
            if (!k.is_integral()) {
                if (W.log_order() != 0) res.fail(where(c, 1, k, i) + ": W_1 is nonzero at a fractional weight");
                continue;
            }
            // the basis forms of omega^i go to the coefficient basis of W_1
            ModulePresentation om = omega_general_presentation(c, T.base(), k, i);
            const size_t n = T.forms(k).dim(i);
            bool basis_ok = W.log_order() == static_cast<int>(n);
            for (size_t j = 0; j < n && basis_ok; ++j) {
                Vec e(n, 0);
                e[j] = 1;
                if (!W.contains(e) || W.is_zero(e)) basis_ok = false;
            }
            if (!basis_ok || om.log_order() != static_cast<int>(n) ||
                std::any_of(om.divisors().begin(), om.divisors().end(), [](int e) { return e != 1; })) {
                std::ostringstream os;
                os << where(c, 1, k, i) << ": |omega| = p^" << om.log_order() << ", |W_1| = p^" << W.log_order();
                res.fail(os.str());
            }
        }
    }
    return res;
}

CheckResult mod_p_comparison_check(const DRWTower& T, int r) {
    CheckResult res;
    const LogChart& c = T.chart();
    const Zmod& R = T.ring();
    const u64 p = R.ppow(1);
    for (const auto& k : T.weights(r)) {
        ++res.checked;
        std::vector<SubQ> mods;
        std::vector<AmbientFn> ds, id;
        for (int i = 0; i <= T.top(); ++i) {
            const SubQ& P = T.piece(r, k, i);
            Matrix bot = P.bottom_gens().hcat(P.gens().scaled(p));
            mods.emplace_back(P.gens(), bot);
            if (i < T.top()) ds.push_back([&T, r, k, i](const Vec& x) { return T.d(r, k, i, x); });
            id.push_back([](const Vec& x) { return x; });
        }
        ComplexLevel A(R, std::move(mods), std::move(ds));
        ComplexLevel B = T.level_complex(1, k);
        std::string w;
        if (!is_chain_map(A, B, id, &w) || !is_quasi_isomorphism(A, B, id, &w))
            res.fail("level " + std::to_string(r) + " weight " + weight_label(c, k) + ": " + w);
    }
    return res;
}

CheckResult tower_cartier_check(const DRWTower& T, i64 D) {
    CheckResult res;
    const LogChart& c = T.chart();
    std::vector<AmbientFn> id(static_cast<size_t>(T.top() + 1), [](const Vec& x) { return x; });
    for (const auto& k : enumerate_basis(c, T.max_level(), D, T.laurent_bound())) {
        ++res.checked;
        LatticeComplex A = T.integral_complex(k);
        LatticeComplex B = T.integral_complex(k.times_p());
        // the lift complex lives at integral weights
        if (k.is_integral()) {
            CheckResult cc = cartier_criterion_check(A, B, id);
            if (!cc.pass) res.fail("weight " + weight_label(c, k) + ": " + cc.witness);
        }
        PhiFReport ph = phi_F(A, B, id);
        if (!ph.chain_map || !ph.into_eta || !ph.bijective)
            res.fail("weight " + weight_label(c, k) + ": phi_F " + ph.witness);
    }
    return res;
}

// ---- monodromy ----

namespace {

struct SymbolMaps {
    std::vector<size_t> lift;                           // standard symbol -> trivial symbol
    std::vector<std::vector<std::pair<size_t, i64>>> proj;  // trivial symbol -> standard combination
    std::vector<i64> theta;
};

SymbolMaps symbol_maps(const DlogBasis& S, const DlogBasis& T) {
    SymbolMaps m;
    for (size_t l = 0; l < S.size(); ++l) m.lift.push_back(static_cast<size_t>(T.symbol_of(S.variable_of(l))));
    for (size_t l = 0; l < T.size(); ++l) {
        size_t v = T.variable_of(l);
        std::vector<std::pair<size_t, i64>> img;
        if (S.symbol_of(v) >= 0) {
            img.emplace_back(static_cast<size_t>(S.symbol_of(v)), 1);
        } else {
            const auto& c = S.dlog_coeffs(v);
            for (size_t s = 0; s < c.size(); ++s)
                if (c[s]) img.emplace_back(s, c[s]);
        }
        m.proj.push_back(std::move(img));
    }
    m.theta = T.theta();
    return m;
}

Mask lift_mask(const SymbolMaps& m, Mask I) {
    Mask J = 0;
    for (size_t l = 0; l < m.lift.size(); ++l)
        if (I >> l & 1u) J |= Mask{1} << m.lift[l];
    return J;
}

// symbol orders agree, so lifting a word keeps its sign
Vec lift_vec(const DRWTower& S, const DRWTower& Tt, const SymbolMaps& m, const ExponentVector& k, int i, const Vec& x) {
    const WeightForms& a = S.forms(k);
    const WeightForms& b = Tt.forms(k);
    Vec out(b.dim(i), 0);
    for (size_t s = 0; s < x.size(); ++s)
        if (x[s]) out[b.index[static_cast<size_t>(i)].at(lift_mask(m, a.basis[static_cast<size_t>(i)][s]))] = x[s];
    return out;
}

Vec theta_wedge(const DRWTower& Tt, const SymbolMaps& m, const ExponentVector& k, int i, const Vec& x) {
    const ExponentVector zero = ExponentVector::zero(k.p(), k.size());
    const WeightForms& z = Tt.forms(zero);
    Vec th(z.dim(1), 0);
    for (size_t l = 0; l < m.theta.size(); ++l)
        if (m.theta[l]) th[z.index[1].at(Mask{1} << l)] = Tt.ring().from_int(m.theta[l]);
    return Tt.wedge(zero, 1, th, k, i, x);
}

Vec project(const DRWTower& S, const DRWTower& Tt, const SymbolMaps& m, const ExponentVector& k, int i, const Vec& x) {
    const Zmod& R = S.ring();
    const WeightForms& a = Tt.forms(k);
    const WeightForms& b = S.forms(k);
    Vec out(b.dim(i), 0);
    for (size_t s = 0; s < x.size(); ++s) {
        if (!x[s]) continue;
        std::map<Mask, i64> acc{{0, 1}};
        Mask I = a.basis[static_cast<size_t>(i)][s];
        for (size_t l = 0; l < m.proj.size(); ++l) {
            if (!(I >> l & 1u)) continue;
            std::map<Mask, i64> nxt;
            for (const auto& [A, c] : acc) {
                for (const auto& [t, e] : m.proj[l]) {
                    int sg = wedge_sign(A, Mask{1} << t);
                    if (sg) nxt[A | Mask{1} << t] += sg * c * e;
                }
            }
            acc = std::move(nxt);
        }
        for (const auto& [A, c] : acc) {
            if (!c) continue;
            size_t row = b.index[static_cast<size_t>(i)].at(A);
            out[row] = R.add(out[row], R.mul(x[s], R.from_int(c)));
        }
    }
    return out;
}

// lattice intersection of the column spans of A and B
Matrix intersect(const Matrix& A, const Matrix& B) {
    Matrix K = kernel(A.hcat(B.scaled(A.ring().neg(1))));
    return A * K.row_block(0, A.cols());
}

}  // namespace

MonodromyReport monodromy(const LogChart& chart, int r, i64 D, i64 L) {
    if (chart.blocks().empty()) throw std::invalid_argument("monodromy: the chart has no block");
    MonodromyReport rep;
    DRWTower S(chart, LogBase::Standard, r, D, L);
    DRWTower Tt(chart, LogBase::Trivial, r, D, L);
    const SymbolMaps m = symbol_maps(S.basis(), Tt.basis());
    const Zmod& R = S.ring();
    const int top = Tt.top();
    rep.ranks.assign(static_cast<size_t>(top + 1), {0, 0, 0, 0});
    auto fail_exact = [&](const std::string& w) {
        if (rep.exact) rep.witness = w;
        rep.exact = false;
    };

    // N on H^i(W_l omega) at weight k, in cohomology coordinates
    auto N_matrix = [&](int lvl, const ExponentVector& k, int i, const SubQ& H) {
        Matrix out(R, H.presentation().ngens(), 0);
        const SubQ& P = S.piece(lvl, k, i);
        const SubQ& Q = Tt.piece(lvl, k, i + 1);
        Matrix cols(R, Q.ambient_dim(), 0);
        for (size_t j = 0; j < P.gens().cols(); ++j) cols.append_column(theta_wedge(Tt, m, k, i, lift_vec(S, Tt, m, k, i, P.gens().column(j))));
        ColumnSolver solver(cols.hcat(Q.bottom_gens()));
        // preimages under the projection, taken inside W~
        const SubQ& Pt = Tt.piece(lvl, k, i);
        Matrix pr(R, P.ambient_dim(), 0);
        for (size_t j = 0; j < Pt.gens().cols(); ++j) pr.append_column(project(S, Tt, m, k, i, Pt.gens().column(j)));
        ColumnSolver lifter(pr.hcat(P.bottom_gens()));
        for (size_t j = 0; j < H.gens().cols(); ++j) {
            auto lf = lifter.solve(H.gens().column(j));
            if (!lf) throw ExactnessFailure(where(chart, lvl, k, i) + ": a cocycle does not lift to W~");
            Vec z(lf->begin(), lf->begin() + static_cast<std::ptrdiff_t>(Pt.gens().cols()));
            Vec w = Tt.d(lvl, k, i, Pt.gens().apply(z));
            auto sol = solver.solve(w);
            if (!sol) throw ExactnessFailure(where(chart, lvl, k, i + 1) + ": d of a lifted cocycle is not in theta W");
            Vec c(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(P.gens().cols()));
            out.append_column(H.coords(P.gens().apply(c)));
        }
        if (out.cols() == 0) out = Matrix(R, H.presentation().ngens(), 0);
        return out;
    };

    for (int lvl = 1; lvl <= r; ++lvl) {
        for (const auto& k : S.weights(lvl)) {
            for (int i = 0; i <= top; ++i) {
                const SubQ& Wt = Tt.piece(lvl, k, i);
                const SubQ Wm = i > 0 ? S.piece(lvl, k, i - 1) : SubQ(Matrix(R, 0, 0), Matrix(R, 0, 0));
                const bool has_wi = i <= S.top();
                Matrix th = i > 0 ? induced_matrix([&](const Vec& x) { return theta_wedge(Tt, m, k, i - 1, lift_vec(S, Tt, m, k, i - 1, x)); }, Wm, Wt)
                                  : Matrix(R, Wt.presentation().ngens(), 0);
                int img = i > 0 ? map_image_log_order(th, Wt.presentation()) : 0;
                int wi = 0;
                if (has_wi) {
                    const SubQ& W = S.piece(lvl, k, i);
                    wi = W.log_order();
                    Matrix pr = induced_matrix([&](const Vec& x) { return project(S, Tt, m, k, i, x); }, Wt, W);
                    if (!map_is_surjective(pr, W.presentation())) fail_exact(where(chart, lvl, k, i) + ": projection is not onto");
                    if (i > 0 && !map_is_zero(pr * th, W.presentation()))
                        fail_exact(where(chart, lvl, k, i) + ": projection after theta is nonzero");
                }
                auto& rk = rep.ranks[static_cast<size_t>(i)];
                if (lvl == 1) {
                    rk[0] += i > 0 ? Wm.log_order() : 0;
                    rk[1] += img;
                    rk[2] += Wt.log_order();
                    rk[3] += wi;
                }
                if ((i > 0 && img != Wm.log_order()) || Wt.log_order() != img + wi) {
                    std::ostringstream os;
                    os << where(chart, lvl, k, i) << ": |W~| = p^" << Wt.log_order() << ", |theta W[-1]| = p^" << img
                       << " of p^" << (i > 0 ? Wm.log_order() : 0) << ", |W| = p^" << wi;
                    fail_exact(os.str());
                }
                // theta W[-1] meets Fil^{lvl-1} W~ in theta Fil^{lvl-1} W[-1]
                if (i > 0 && lvl >= 2) {
                    const SubQ& Wt1 = Tt.piece(lvl - 1, k, i);
                    Matrix K = Wt.bottom_gens();
                    for (size_t j = 0; j < Wm.gens().cols(); ++j)
                        K.append_column(theta_wedge(Tt, m, k, i - 1, lift_vec(S, Tt, m, k, i - 1, Wm.gens().column(j))));
                    Matrix KF = intersect(K, Wt1.bottom_gens());
                    Matrix TF = Wt.bottom_gens();
                    const SubQ& Wm1 = S.piece(lvl - 1, k, i - 1);
                    for (size_t j = 0; j < Wm1.bottom_gens().cols(); ++j)
                        TF.append_column(theta_wedge(Tt, m, k, i - 1, lift_vec(S, Tt, m, k, i - 1, Wm1.bottom_gens().column(j))));
                    if (SubQ(KF, Wt.bottom_gens()).log_order() != SubQ(TF, Wt.bottom_gens()).log_order()) {
                        if (rep.kernel_filtration && rep.witness.empty())
                            rep.witness = where(chart, lvl, k, i) + ": Fil of the kernel differs from kernel of Fil";
                        rep.kernel_filtration = false;
                    }
                }
            }
        }
    }
    if (!rep.exact) throw ExactnessFailure(rep.witness);

    // N and N phi = p phi N
    for (int lvl = 1; lvl <= r; ++lvl) {
        for (const auto& k : S.weights(lvl)) {
            ComplexLevel C = S.level_complex(lvl, k);
            for (int i = 0; i < S.top(); ++i) {
                SubQ H = C.cohomology(i);
                Matrix N = N_matrix(lvl, k, i, H);
                for (size_t j = 0; j < N.cols(); ++j) {
                    ++rep.classes;
                    if (!H.presentation().is_zero(N.column(j))) ++rep.n_nonzero;
                }
                if (i == 0 && k.is_zero() && !map_is_zero(N, H.presentation())) rep.n_of_one_zero = false;
                const ExponentVector kp = k.times_p();
                if (lvl < 2 || !S.in_window(lvl - 1, kp)) continue;
                ComplexLevel C1 = S.level_complex(lvl - 1, kp);
                SubQ H1 = C1.cohomology(i);
                const u64 pi = R.ppow(i);
                Matrix phi = induced_matrix([&](const Vec& x) { return vec_scale(R, x, pi); }, H, H1);
                Matrix N1 = N_matrix(lvl - 1, kp, i, H1);
                Matrix lhs = N1 * phi;
                Matrix rhs = (phi * N).scaled(R.ppow(1));
                if (!map_is_zero(lhs - rhs, H1.presentation())) {
                    if (rep.n_phi && rep.witness.empty())
                        rep.witness = where(chart, lvl, k, i) + ": N phi != p phi N";
                    rep.n_phi = false;
                }
            }
        }
    }
    return rep;
}

// ---- Hyodo-Kato presentation ----

namespace {

struct HKContext {
    const DRWTower& T;
    const LogChart& c;
    const DlogBasis& B;
    Zmod R;
    int n;
    ExponentVector k;
    int p;
    std::map<std::pair<ExponentVector, ExponentVector>, size_t> gidx;
    std::map<size_t, size_t> didx;  // log symbol -> generator
    std::vector<HKGenerator> gens1;

    HKContext(const DRWTower& t, int n_, ExponentVector k_)
        : T(t), c(t.chart()), B(t.basis()), R(t.ring()), n(n_), k(std::move(k_)), p(t.chart().p()) {}

    bool live(const ExponentVector& x) const { return x.admissible(c) && !x.vanishes(c) && x.depth() < n; }
    int e(const ExponentVector& x, const ExponentVector& y) const { return x.depth() + y.depth() - (x + y).depth(); }

    bool normalized(const ExponentVector& y) const {
        for (size_t v = 0; v < y.size(); ++v) {
            if (!c.is_laurent(v)) continue;
            if (y.num(v) < 0 || PRat::integer(1, p) <= PRat{y.num(v), y.depth(), p}) return false;
        }
        return true;
    }

    // b_x d b_y as a combination of degree-one generators
    Vec expand(const ExponentVector& x, const ExponentVector& y) const {
        Vec out(gens1.size(), 0);
        if (!live(x) || !live(y) || y.is_zero() || !live(x + y)) return out;
        std::vector<i64> m(y.size(), 0);
        std::vector<i64> ynum = y.nums();
        i64 sc = 1;
        for (int j = 0; j < y.depth(); ++j) sc *= p;
        for (size_t v = 0; v < y.size(); ++v) {
            if (!c.is_laurent(v)) continue;
            i64 a = y.num(v);
            m[v] = a >= 0 ? a / sc : -((-a + sc - 1) / sc);
            ynum[v] -= m[v] * sc;
        }
        ExponentVector yn(p, ynum, y.depth());
        ExponentVector mv(p, m, 0);
        ExponentVector xn = x + mv;
        if (!yn.is_zero()) {
            auto it = gidx.find({xn, yn});
            if (it == gidx.end()) throw std::logic_error("HK: missing generator " + xn.to_string(c) + " d " + yn.to_string(c));
            out[it->second] = R.add(out[it->second], 1);
        }
        const u64 pe = R.ppow(e(x, y));
        for (size_t v = 0; v < y.size(); ++v)
            if (m[v]) add_dlog(out, v, R.mul(pe, R.from_int(m[v])));
        return out;
    }

    // b_k dlog T_v with coefficient s
    void add_dlog(Vec& out, size_t v, u64 s) const {
        const auto& dc = B.dlog_coeffs(v);
        for (size_t l = 0; l < dc.size(); ++l) {
            if (!dc[l]) continue;
            size_t g = didx.at(l);
            out[g] = R.add(out[g], R.mul(s, R.from_int(dc[l])));
        }
    }
};

// points x with 0 <= x <= k on polynomial variables and laurent coordinates in [lo, hi), step p^{-(n-1)}
std::vector<ExponentVector> grid(const LogChart& c, const ExponentVector& k, int n, i64 lo, i64 hi) {
    const int p = c.p();
    const int s = n - 1;
    i64 sc = 1;
    for (int j = 0; j < s; ++j) sc *= p;
    std::vector<ExponentVector> out;
    std::vector<i64> cur(k.size(), 0);
    auto rec = [&](auto&& self, size_t v) -> void {
        if (v == k.size()) {
            out.emplace_back(p, cur, s);
            return;
        }
        i64 a, b;
        if (c.is_laurent(v)) {
            a = lo * sc;
            b = hi * sc - 1;
        } else {
            a = 0;
            b = k.num_at(v, s);
        }
        for (i64 x = a; x <= b; ++x) {
            cur[v] = x;
            self(self, v + 1);
        }
    };
    rec(rec, 0);
    return out;
}

bool log_supported(const LogChart& c, const ExponentVector& x) {
    for (size_t v = 0; v < x.size(); ++v)
        if (x.num(v) && !c.is_log(v)) return false;
    return true;
}

HKContext make_context(const DRWTower& T, int n, const ExponentVector& k) {
    HKContext h(T, n, k);
    for (const auto& y : grid(h.c, k, n, 0, 1)) {
        if (y.is_zero()) continue;
        ExponentVector x = k - y;
        if (!h.live(x) || !h.live(y)) continue;
        h.gidx[{x, y}] = h.gens1.size();
        h.gens1.push_back(HKGenerator{HKGenerator::Differential, x, y, 0});
    }
    for (size_t l = 0; l < h.B.size(); ++l) {
        if (h.B.symbol_needs_positive(l)) continue;
        h.didx[l] = h.gens1.size();
        h.gens1.push_back(HKGenerator{HKGenerator::Dlog, k, ExponentVector(), l});
    }
    return h;
}

}  // namespace

std::string HKGenerator::label(const LogChart& c, const DlogBasis& B) const {
    auto b = [&](const ExponentVector& x) {
        std::ostringstream os;
        if (x.depth() > 0) os << "V^" << x.depth();
        os << "[" << weight_label(c, x.times_p(x.depth())) << "]";
        return os.str();
    };
    switch (kind) {
        case Scalar: return b(k0);
        case Differential: return b(k0) + " d" + b(k1);
        case Dlog: return b(k0) + " " + B.symbol(symbol);
    }
    return "";
}

ModulePresentation HKPresentation::omega0() const { return ModulePresentation(rel0.ring(), gens0.size(), rel0); }
ModulePresentation HKPresentation::omega1() const { return ModulePresentation(rel1.ring(), gens1.size(), rel1); }
ModulePresentation HKPresentation::w_omega1() const {
    return ModulePresentation(rel1.ring(), gens1.size(), rel1.hcat(eta1));
}

HKPresentation build_witt_omega(const DRWTower& T, int n, const ExponentVector& k) {
    HKContext h = make_context(T, n, k);
    const Zmod& R = h.R;
    HKPresentation P;
    P.k = k;
    P.n = n;
    P.gens1 = h.gens1;
    const size_t G = h.gens1.size();
    P.rel0 = Matrix(R, 0, 0);
    if (h.live(k)) {
        P.gens0.push_back(HKGenerator{HKGenerator::Scalar, k, ExponentVector(), 0});
        P.rel0 = Matrix(R, 1, 0);
        P.rel0.append_column(Vec{R.ppow(n - k.depth())});
    }
    std::vector<Vec> rel;
    // orders
    for (size_t g = 0; g < G; ++g) {
        const HKGenerator& x = h.gens1[g];
        std::vector<int> ords;
        if (x.kind == HKGenerator::Differential) ords = {n - x.k0.depth(), n - x.k1.depth()};
        else ords = {n - k.depth()};
        for (int o : ords) {
            Vec col(G, 0);
            col[g] = R.ppow(o);
            rel.push_back(col);
        }
    }
    // Leibniz: b_a d(b_x b_y) = b_a b_x d b_y + b_a b_y d b_x
    auto pts = grid(h.c, k, n, -1, 2);
    for (const auto& x : pts) {
        if (!h.live(x) || x.is_zero()) continue;
        for (const auto& y : pts) {
            if (!h.live(y) || y.is_zero()) continue;
            ExponentVector a = k - x - y;
            if (!h.live(a) || !h.live(x + y)) continue;
            Vec col = vec_scale(R, h.expand(a, x + y), R.ppow(h.e(x, y)));
            col = vec_sub(R, col, vec_scale(R, h.expand(a + x, y), R.ppow(h.e(a, x))));
            col = vec_sub(R, col, vec_scale(R, h.expand(a + y, x), R.ppow(h.e(a, y))));
            if (!vec_is_zero(col)) rel.push_back(col);
        }
    }
    // the log relation b_x d[T^m] = b_{x+m} dlog T^m for integral monoid elements m
    for (const auto& [key, g] : h.gidx) {
        const auto& [x, y] = key;
        if (!y.is_integral() || !log_supported(h.c, y)) continue;
        Vec col(G, 0);
        col[g] = 1;
        for (size_t v = 0; v < y.size(); ++v)
            if (y.num(v)) h.add_dlog(col, v, R.neg(R.from_int(y.num(v))));
        rel.push_back(col);
        (void)x;
    }
    P.rel1 = columns_of(R, G, rel);
    P.eta1 = hk_ideal(T, P);
    return P;
}

Matrix hk_ideal(const DRWTower& T, const HKPresentation& P) {
    HKContext h = make_context(T, P.n, P.k);
    const Zmod& R = h.R;
    const int n = P.n;
    const size_t G = h.gens1.size();
    std::vector<Vec> cols;
    for (const auto& [key, g] : h.gidx) {
        const auto& [x, y] = key;
        const int u0 = x.depth(), u1 = y.depth(), uk = P.k.depth();
        for (int i = std::max(u0, u1); i < n; ++i) {
            for (int j = u1; j <= i; ++j) {
                const u64 lhs = R.ppow((i - u0) + (j - u1));
                if (log_supported(h.c, y)) {
                    // V^i[a] dV^j[m] - V^i[a m^{p^{i-j}}] dlog m
                    Vec col(G, 0);
                    col[g] = lhs;
                    const u64 s = R.ppow((i - uk) + (j - u1));
                    const ExponentVector m = y.times_p(u1);
                    for (size_t v = 0; v < m.size(); ++v)
                        if (m.num(v)) h.add_dlog(col, v, R.neg(R.mul(s, R.from_int(m.num(v)))));
                    cols.push_back(col);
                } else if (j < i) {
                    // V^i[a] dV^j[m] - V^i[a m^{p^{i-j}-1}] dV^i[m]
                    ExponentVector y2 = y.times_p(j).div_p(i);
                    ExponentVector x2 = P.k - y2;
                    Vec col(G, 0);
                    col[g] = lhs;
                    col = vec_sub(R, col, vec_scale(R, h.expand(x2, y2), R.ppow((i - x2.depth()) + (i - y2.depth()))));
                    cols.push_back(col);
                }
            }
        }
    }
    // V^i of the Leibniz rule: V^i[a] dV^i[bc] = V^i[ab] dV^i[c] + V^i[ac] dV^i[b]
    for (int i = 1; i < n; ++i) {
        auto pts = grid(h.c, P.k, i + 1, -1, 2);
        for (const auto& b : pts) {
            if (b.is_zero() || !h.live(b)) continue;
            for (const auto& c : pts) {
                if (c.is_zero() || !h.live(c)) continue;
                const ExponentVector a = P.k - b - c;
                if (!h.live(a) || a.depth() > i) continue;
                auto coef = [&](const ExponentVector& x, const ExponentVector& y) {
                    return R.ppow((i - x.depth()) + (i - y.depth()));
                };
                Vec col = vec_scale(R, h.expand(a, b + c), coef(a, b + c));
                col = vec_sub(R, col, vec_scale(R, h.expand(a + b, c), coef(a + b, c)));
                col = vec_sub(R, col, vec_scale(R, h.expand(a + c, b), coef(a + c, b)));
                if (!vec_is_zero(col)) cols.push_back(col);
            }
        }
    }
    return columns_of(R, G, cols);
}

HKComparison hk_comparison(const DRWTower& T, int n, i64 D) {
    HKComparison rep;
    const LogChart& c = T.chart();
    const Zmod& R = T.ring();
    if (n < 1 || n > T.max_level()) throw std::invalid_argument("hk_comparison: level out of range");
    auto fail = [&](const std::string& w) {
        if (rep.pass) rep.witness = w;
        rep.pass = false;
    };
    auto img_b = [&](const ExponentVector& x) { return T.verschiebung_teichmuller(x.depth(), x.times_p(x.depth())); };
    auto img_gen = [&](const HKGenerator& g) -> Vec {
        if (g.kind == HKGenerator::Scalar) return img_b(g.k0);
        if (g.kind == HKGenerator::Differential) {
            Vec db = T.d(n, g.k1, 0, img_b(g.k1));
            return T.wedge(g.k0, 0, img_b(g.k0), g.k1, 1, db);
        }
        const WeightForms& w = T.forms(g.k0);
        Vec out(w.dim(1), 0);
        out[w.index[1].at(Mask{1} << g.symbol)] = R.ppow(g.k0.depth());
        return out;
    };
    auto images = [&](const std::vector<HKGenerator>& gs, const SubQ& P) {
        Matrix f(R, P.presentation().ngens(), 0);
        for (const auto& g : gs) f.append_column(P.coords(img_gen(g)));
        return f;
    };
    for (const auto& k : enumerate_basis(c, n - 1, D, T.laurent_bound())) {
        if (!T.in_window(n, k)) continue;
        ++rep.weights;
        HKPresentation P = build_witt_omega(T, n, k);
        rep.eta_relations += static_cast<long>(P.eta1.cols());
        const std::string at = "level " + std::to_string(n) + " weight " + weight_label(c, k);
        const SubQ& W0 = T.piece(n, k, 0);
        const SubQ& W1 = T.piece(n, k, 1);
        Matrix f0 = images(P.gens0, W0);
        if (!map_well_defined(f0, P.omega0(), W0.presentation()) ||
            !map_is_isomorphism(f0, P.omega0(), W0.presentation())) {
            fail(at + " degree 0: W_n(R) does not match");
            continue;
        }
        Matrix f1 = images(P.gens1, W1);
        if (!map_well_defined(f1, P.omega1(), W1.presentation())) {
            fail(at + " degree 1: a Kahler relation does not hold in the tower");
            continue;
        }
        if (!map_well_defined(f1, P.w_omega1(), W1.presentation())) {
            fail(at + " degree 1: an eta relation does not hold in the tower");
            continue;
        }
        if (n == 1 && P.eta1.cols() > 0) {
            ModulePresentation om = P.omega1();
            for (size_t j = 0; j < P.eta1.cols(); ++j)
                if (!om.is_zero(P.eta1.column(j))) rep.level_one_eta_vanish = false;
        }
        if (!map_is_isomorphism(f1, P.w_omega1(), W1.presentation())) {
            std::ostringstream os;
            os << at << " degree 1: presentation has order p^" << P.w_omega1().log_order() << ", tower p^"
               << W1.log_order();
            fail(os.str());
            continue;
        }
        // d on b_k and F on all generators
        if (!P.gens0.empty()) {
            HKContext h = make_context(T, n, k);
            Vec db = h.expand(ExponentVector::zero(c.p(), c.nvars()), k);
            Vec lhs(W1.ambient_dim(), 0);
            for (size_t g = 0; g < db.size(); ++g)
                if (db[g]) lhs = vec_add(R, lhs, vec_scale(R, img_gen(P.gens1[g]), db[g]));
            if (!W1.equal(lhs, T.d(n, k, 0, img_b(k)))) fail(at + ": d b_k does not match");
        }
        const ExponentVector kp = k.times_p();
        if (n >= 2 && T.in_window(n - 1, kp)) {
            HKContext h = make_context(T, n - 1, kp);
            const SubQ& Q0 = T.piece(n - 1, kp, 0);
            const SubQ& Q1 = T.piece(n - 1, kp, 1);
            auto embed = [&](const Vec& comb) {
                Vec out(Q1.ambient_dim(), 0);
                for (size_t g = 0; g < comb.size(); ++g)
                    if (comb[g]) out = vec_add(R, out, vec_scale(R, img_gen(h.gens1[g]), comb[g]));
                return out;
            };
            auto Fb = [&](const ExponentVector& x) { return x.depth() >= 1 ? R.ppow(1) : u64{1}; };
            for (const auto& g : P.gens0) {
                Vec lhs = vec_scale(R, img_b(kp), Fb(g.k0));
                if (!Q0.equal(lhs, T.F(n, k, 0, img_gen(g)))) fail(at + ": F on " + g.label(c, T.basis()));
            }
            for (const auto& g : P.gens1) {
                Vec lhs;
                const HKGenerator& G = g;
                if (G.kind == HKGenerator::Dlog) {
                    lhs = vec_scale(R, img_gen(HKGenerator{HKGenerator::Dlog, kp, ExponentVector(), G.symbol}), Fb(G.k0));
                } else if (G.k1.depth() >= 1) {
                    // F(b_x d b_y) = F(b_x) d b_{py}
                    lhs = vec_scale(R, embed(h.expand(G.k0.times_p(), G.k1.times_p())), Fb(G.k0));
                } else {
                    // F d[y] = [y]^{p-1} d[y]
                    const ExponentVector x = G.k0.times_p() + G.k1.scaled(c.p() - 1);
                    lhs = vec_scale(R, embed(h.expand(x, G.k1)), R.mul(Fb(G.k0), R.ppow(h.e(G.k0.times_p(), G.k1.scaled(c.p() - 1)))));
                }
                if (!Q1.equal(lhs, T.F(n, k, 1, img_gen(G)))) fail(at + ": F on " + G.label(c, T.basis()));
            }
        }
    }
    return rep;
}

}  // namespace drw
