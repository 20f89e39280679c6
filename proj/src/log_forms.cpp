#include "drw/log_forms.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace drw {

namespace {

std::vector<Mask> subsets_of(Mask allowed, int n, int i) {
    // lexicographic in the sorted index lists
    std::vector<size_t> idx;
    for (int l = 0; l < n; ++l)
        if (allowed >> l & 1u) idx.push_back(static_cast<size_t>(l));
    std::vector<Mask> out;
    if (i < 0 || static_cast<size_t>(i) > idx.size()) return out;
    std::vector<size_t> pick(static_cast<size_t>(i));
    auto rec = [&](auto&& self, size_t pos, size_t from) -> void {
        if (pos == pick.size()) {
            Mask m = 0;
            for (size_t x : pick) m |= Mask{1} << idx[x];
            out.push_back(m);
            return;
        }
        for (size_t x = from; x < idx.size(); ++x) {
            pick[pos] = x;
            self(self, pos + 1, x + 1);
        }
    };
    rec(rec, 0, 0);
    return out;
}

// all admissible integral weights (vanishing ones included) with |k| <= D, laurent in [-L, L]
std::vector<ExponentVector> all_integral_weights(const LogChart& c, i64 D, i64 L) {
    std::vector<ExponentVector> out;
    std::vector<i64> cur(c.nvars(), 0);
    auto rec = [&](auto&& self, size_t v, i64 left) -> void {
        if (v == c.nvars()) {
            out.emplace_back(c.p(), cur, 0);
            return;
        }
        i64 lo = 0, hi = left;
        if (c.is_laurent(v)) {
            hi = std::min(left, L);
            lo = -hi;
        }
        for (i64 x = lo; x <= hi; ++x) {
            cur[v] = x;
            self(self, v + 1, left - std::abs(x));
        }
        cur[v] = 0;
    };
    rec(rec, 0, D);
    return out;
}

}  // namespace

// ---- DlogBasis ----

DlogBasis::DlogBasis(const LogChart& chart, LogBase base) : chart_(chart), base_(base) {
    const size_t n = chart.nvars();
    sym_of_var_.assign(n, -1);
    auto add_symbol = [&](size_t v) {
        sym_of_var_[v] = static_cast<int>(sym_.size());
        sym_.push_back(v);
        label_.push_back(chart.is_log(v) ? "dlog" + chart.name(v) : "dlog" + chart.name(v) + "'");
    };
    for (size_t h = 0; h < chart.blocks().size(); ++h) {
        size_t from = (base == LogBase::Trivial && h == 0) ? 0 : 1;
        for (size_t i = from; i < chart.blocks()[h].size(); ++i) add_symbol(chart.block_var(h, i));
    }
    for (size_t v = 0; v < n; ++v)
        if (chart.is_smooth(v)) add_symbol(v);
    if (sym_.size() > 31) throw ChartError("chart: too many dlog symbols");

    coeff_.assign(n, std::vector<i64>(sym_.size(), 0));
    for (size_t v = 0; v < n; ++v)
        if (sym_of_var_[v] >= 0) coeff_[v][static_cast<size_t>(sym_of_var_[v])] = 1;
    for (size_t h = 0; h < chart.blocks().size(); ++h) {
        if (base == LogBase::Trivial && h == 0) continue;
        auto& c = coeff_[chart.block_var(h, 0)];
        for (size_t i = 1; i < chart.blocks()[h].size(); ++i) c[static_cast<size_t>(sym_of_var_[chart.block_var(h, i)])] -= 1;
        if (base == LogBase::Trivial)
            for (size_t i = 0; i < chart.blocks()[0].size(); ++i)
                c[static_cast<size_t>(sym_of_var_[chart.block_var(0, i)])] += 1;
    }
}

std::vector<i64> DlogBasis::theta() const {
    std::vector<i64> t(size(), 0);
    if (base_ != LogBase::Trivial || chart_.blocks().empty()) return t;
    for (size_t i = 0; i < chart_.blocks()[0].size(); ++i)
        t[static_cast<size_t>(sym_of_var_[chart_.block_var(0, i)])] = 1;
    return t;
}

std::vector<i64> DlogBasis::weight_coeffs(const ExponentVector& k) const {
    std::vector<i64> c(size(), 0);
    for (size_t v = 0; v < k.size(); ++v) {
        i64 a = k.num(v);
        if (!a) continue;
        for (size_t l = 0; l < size(); ++l) c[l] += a * coeff_[v][l];
    }
    return c;
}

bool DlogBasis::symbol_allowed(const ExponentVector& k, size_t l) const {
    size_t v = sym_[l];
    return chart_.is_log(v) || k.num(v) > 0;
}

Mask DlogBasis::allowed_mask(const ExponentVector& k) const {
    Mask m = 0;
    for (size_t l = 0; l < size(); ++l)
        if (symbol_allowed(k, l)) m |= Mask{1} << l;
    return m;
}

std::vector<Mask> DlogBasis::forms(const ExponentVector& k, int i) const {
    if (!k.admissible(chart_) || k.vanishes(chart_)) return {};
    return subsets_of(allowed_mask(k), static_cast<int>(size()), i);
}

std::string DlogBasis::form_label(const ExponentVector& k, Mask m) const {
    std::ostringstream os;
    os << (k.is_zero() ? std::string("1") : k.to_string(chart_));
    for (size_t l = 0; l < size(); ++l)
        if (m >> l & 1u) os << " " << label_[l];
    return os.str();
}

int wedge_sign(size_t l, Mask I) {
    if (I >> l & 1u) return 0;
    Mask below = I & ((Mask{1} << l) - 1);
    return (std::popcount(below) & 1) ? -1 : 1;
}

int wedge_sign(Mask A, Mask B) {
    if (A & B) return 0;
    // move each element of B left past the elements of A above it
    int s = 0;
    for (size_t l = 0; l < 32; ++l)
        if (B >> l & 1u) s += std::popcount(A >> l);
    return (s & 1) ? -1 : 1;
}

WeightForms weight_forms(const DlogBasis& B, const ExponentVector& k, const Zmod& R) {
    WeightForms w;
    w.k = k;
    w.dden = k.depth();
    const int n = static_cast<int>(B.size());
    const bool live = k.admissible(B.chart()) && !k.vanishes(B.chart());
    Mask allowed = B.allowed_mask(k);
    for (int i = 0; i <= n; ++i) {
        w.basis.push_back(live ? subsets_of(allowed, n, i) : std::vector<Mask>{});
        std::map<Mask, size_t> ix;
        for (size_t j = 0; j < w.basis.back().size(); ++j) ix[w.basis.back()[j]] = j;
        w.index.push_back(std::move(ix));
    }
    std::vector<i64> c = B.weight_coeffs(k);
    for (int i = 0; i < n; ++i) {
        Matrix m(R, w.basis[i + 1].size(), w.basis[i].size());
        for (size_t j = 0; j < w.basis[i].size(); ++j) {
            Mask I = w.basis[i][j];
            for (int l = 0; l < n; ++l) {
                if (!(allowed >> l & 1u) || c[l] == 0) continue;
                int s = wedge_sign(static_cast<size_t>(l), I);
                if (!s) continue;
                size_t row = w.index[i + 1].at(I | Mask{1} << l);
                m.set(row, j, s * c[l]);
            }
        }
        w.dnum.push_back(std::move(m));
    }
    return w;
}

// ---- general path ----

ModulePresentation omega_general_presentation(const LogChart& chart, LogBase base, const ExponentVector& k, int i) {
    if (!k.is_integral()) throw std::invalid_argument("omega_general_presentation: integral weights only");
    const int p = chart.p();
    const Zmod R(static_cast<u64>(p), 1);
    const size_t n = chart.nvars();
    // raw symbols: dT_v for every variable, then e_v for the log variables
    std::vector<int> e_of(n, -1);
    size_t nraw = n;
    for (size_t v = 0; v < n; ++v)
        if (chart.is_log(v)) e_of[v] = static_cast<int>(nraw++);
    // weight contribution of a raw symbol set
    auto multiplier = [&](const ExponentVector& w, Mask I) -> std::optional<ExponentVector> {
        ExponentVector c = w;
        for (size_t v = 0; v < n; ++v)
            if (I >> v & 1u) c = c - ExponentVector::unit(p, n, v);
        if (!c.admissible(chart) || c.vanishes(chart)) return std::nullopt;
        return c;
    };
    std::map<Mask, size_t> gen;
    std::vector<std::string> labels;
    for (Mask I : subsets_of((Mask{1} << nraw) - 1, static_cast<int>(nraw), i)) {
        if (multiplier(k, I)) {
            const size_t id = gen.size();
            gen[I] = id;
            labels.push_back(std::to_string(I));
        }
    }
    Matrix rel(R, gen.size(), 0);
    auto emit = [&](const std::vector<std::pair<Mask, i64>>& terms) {
        // terms are raw wedges of degree i at weight k, with their coefficients
        Vec col(gen.size(), 0);
        bool any = false;
        for (auto [I, c] : terms) {
            auto it = gen.find(I);
            if (it == gen.end() || c % p == 0) continue;
            col[it->second] = R.add(col[it->second], R.from_int(c));
            any = true;
        }
        if (any && !vec_is_zero(col)) rel.append_column(col);
    };
    // Every relation is multiplied by an arbitrary monomial; at a fixed total weight k and
    // fixed wedge partner J, the multiplier is determined, so it is enough to list the
    // degree-one relations as raw-symbol combinations with integer weight offsets.
    struct Rel1 {
        std::vector<std::tuple<size_t, std::vector<i64>, i64>> terms;  // symbol, extra weight, coefficient
    };
    std::vector<Rel1> rels;
    const std::vector<i64> zero(n, 0);
    // dT_v = T_v e_v
    for (size_t v = 0; v < n; ++v) {
        if (e_of[v] < 0) continue;
        std::vector<i64> ev(n, 0);
        ev[v] = 1;
        rels.push_back({{{v, zero, 1}, {static_cast<size_t>(e_of[v]), ev, -1}}});
    }
    // d of the block products
    for (size_t h = 0; h < chart.blocks().size(); ++h) {
        const size_t rh = chart.blocks()[h].size();
        Rel1 r;
        for (size_t a = 0; a < rh; ++a) {
            std::vector<i64> w(n, 0);
            for (size_t b = 0; b < rh; ++b)
                if (b != a) w[chart.block_var(h, b)] = 1;
            r.terms.push_back({chart.block_var(h, a), w, 1});
        }
        rels.push_back(r);
    }
    // base relations on the log symbols
    for (size_t h = 0; h < chart.blocks().size(); ++h) {
        if (base == LogBase::Trivial && h == 0) continue;
        Rel1 r;
        for (size_t a = 0; a < chart.blocks()[h].size(); ++a)
            r.terms.push_back({static_cast<size_t>(e_of[chart.block_var(h, a)]), zero, 1});
        if (base == LogBase::Trivial)
            for (size_t a = 0; a < chart.blocks()[0].size(); ++a)
                r.terms.push_back({static_cast<size_t>(e_of[chart.block_var(0, a)]), zero, -1});
        rels.push_back(r);
    }

    // weight of a raw wedge I at multiplier c is c + (dT part of I), so the multiplier of
    // the relation itself is k - (dT part of J) - (base weight of the relation term)
    // A relation term (s, w) wedged with J sits on the raw wedge J + s with multiplier
    // m + w, where the relation multiplier m = k - dT(J) - weight(s) - w is the same for
    // every term and must be admissible.
    std::vector<Mask> Js = i >= 1 ? subsets_of((Mask{1} << nraw) - 1, static_cast<int>(nraw), i - 1) : std::vector<Mask>{};
    for (const auto& r : rels) {
        for (Mask J : Js) {
            ExponentVector kJ = k;
            for (size_t v = 0; v < n; ++v)
                if (J >> v & 1u) kJ = kJ - ExponentVector::unit(p, n, v);
            std::optional<ExponentVector> m;
            for (const auto& [s, w, c] : r.terms) {
                (void)c;
                ExponentVector x = kJ - ExponentVector(p, w, 0);
                if (s < n) x = x - ExponentVector::unit(p, n, s);
                if (!m) m = x;
                else if (!(*m == x)) throw std::logic_error("omega_general_presentation: inhomogeneous relation");
            }
            if (!m || !m->admissible(chart)) continue;
            std::vector<std::pair<Mask, i64>> terms;
            for (const auto& [s, w, c] : r.terms) {
                int sg = wedge_sign(s, J);
                if (sg) terms.push_back({J | Mask{1} << s, sg * c});
            }
            emit(terms);
        }
    }
    return ModulePresentation(R, gen.size(), rel, labels);
}

// ---- LogFormModule / build_omega ----

LogFormModule::LogFormModule(std::shared_ptr<const DlogBasis> B, int degree, Zmod R, i64 D, i64 L)
    : B_(std::move(B)), degree_(degree), R_(R), D_(D), L_(L) {
    for (const auto& k : enumerate_basis(B_->chart(), 0, D, L))
        for (Mask m : B_->forms(k, degree)) gens_.push_back({k, m});
    std::vector<std::string> labels;
    for (const auto& [k, m] : gens_) labels.push_back(B_->form_label(k, m));
    pres_ = ModulePresentation(R_, gens_.size(), Matrix(R_, gens_.size(), 0), labels);
}

bool LogFormModule::in_window(const ExponentVector& k) const {
    return k.is_integral() && k.in_window(B_->chart(), PRat::integer(D_, B_->chart().p()), L_);
}

OmegaBuild build_omega(const LogChart& chart, LogBase base, i64 D, i64 L) {
    OmegaBuild out;
    auto B = std::make_shared<const DlogBasis>(chart, base);
    const Zmod R(static_cast<u64>(chart.p()), 1);
    for (int i = 0; i <= B->top_degree(); ++i) out.modules.emplace_back(B, i, R, D, L);
    if (D <= 6) {
        out.general_path_checked = true;
        for (const auto& k : all_integral_weights(chart, D, L)) {
            for (int i = 0; i <= B->top_degree(); ++i) {
                int fast = static_cast<int>(B->forms(k, i).size());
                int gen = omega_general_presentation(chart, base, k, i).log_order();
                if (fast != gen) {
                    out.general_path_agrees = false;
                    std::ostringstream os;
                    os << "weight " << (k.is_zero() ? std::string("1") : k.to_string(chart)) << " degree " << i
                       << ": fast rank " << fast << ", general rank " << gen;
                    out.mismatch = os.str();
                    return out;
                }
            }
        }
    }
    return out;
}

// ---- LogForm ----

LogForm LogForm::monomial(std::shared_ptr<const DlogBasis> B, Zmod R, const ExponentVector& k, Mask I, i64 c) {
    LogForm f(std::move(B), R, std::popcount(I));
    f.add_term(k, I, R.from_int(c));
    return f;
}

void LogForm::add_term(const ExponentVector& k, Mask I, u64 c) {
    if (std::popcount(I) != degree_) throw std::invalid_argument("LogForm: degree mismatch");
    if (!k.admissible(B_->chart())) throw std::invalid_argument("LogForm: negative exponent on a non-laurent variable");
    if (k.vanishes(B_->chart()) || c == 0) return;
    if ((B_->allowed_mask(k) & I) != I) return;  // dx' with x-exponent 0 is not a form
    u64& slot = t_[{k, I}];
    slot = R_.add(slot, c);
    if (!slot) t_.erase({k, I});
}

LogForm LogForm::operator+(const LogForm& o) const {
    require_same(R_, o.R_, "LogForm+");
    if (degree_ != o.degree_) throw std::invalid_argument("LogForm+: degrees differ");
    LogForm r = *this;
    for (const auto& [key, c] : o.t_) r.add_term(key.first, key.second, c);
    return r;
}

LogForm LogForm::scaled(i64 c) const {
    LogForm r(B_, R_, degree_);
    u64 s = R_.from_int(c);
    for (const auto& [key, v] : t_) r.add_term(key.first, key.second, R_.mul(v, s));
    return r;
}

LogForm LogForm::wedge(const LogForm& o) const {
    require_same(R_, o.R_, "LogForm wedge");
    LogForm r(B_, R_, degree_ + o.degree_);
    for (const auto& [a, x] : t_)
        for (const auto& [b, y] : o.t_) {
            int s = wedge_sign(a.second, b.second);
            if (!s) continue;
            r.add_term(a.first + b.first, a.second | b.second, R_.mul(R_.from_int(s), R_.mul(x, y)));
        }
    return r;
}

std::string LogForm::to_string() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [key, c] : t_) {
        if (!first) os << " + ";
        first = false;
        i64 v = R_.lift(c);
        if (v != 1) os << v << "*";
        os << B_->form_label(key.first, key.second);
    }
    return os.str();
}

LogForm d(const LogForm& f, i64 D) {
    const DlogBasis& B = f.basis();
    LogForm r(f.basis_ptr(), f.ring(), f.degree() + 1);
    for (const auto& [key, c] : f.terms()) {
        const auto& [k, I] = key;
        if (!k.is_integral()) throw std::invalid_argument("d: forms over the base ring have integral weights");
        if (D >= 0 && !k.degree_le(PRat::integer(D, B.chart().p())))
            throw DegreeOverflow("d: weight " + k.to_string(B.chart()) + " exceeds the degree bound");
        auto w = B.weight_coeffs(k);
        Mask allowed = B.allowed_mask(k);
        for (size_t l = 0; l < B.size(); ++l) {
            if (!(allowed >> l & 1u) || w[l] == 0) continue;
            int s = wedge_sign(l, I);
            if (!s) continue;
            r.add_term(k, I | Mask{1} << l, f.ring().mul(c, f.ring().from_int(s * w[l])));
        }
    }
    return r;
}

LogForm dlog_form(std::shared_ptr<const DlogBasis> B, Zmod R, size_t var) {
    if (!B->chart().is_log(var)) throw std::invalid_argument("dlog_form: variable carries no log structure");
    LogForm f(B, R, 1);
    const auto& c = B->dlog_coeffs(var);
    ExponentVector zero = ExponentVector::zero(B->chart().p(), B->chart().nvars());
    for (size_t l = 0; l < B->size(); ++l)
        if (c[l]) f.add_term(zero, Mask{1} << l, R.from_int(c[l]));
    return f;
}

LogForm cartier_inverse(const LogForm& f) {
    LogForm r(f.basis_ptr(), f.ring(), f.degree());
    for (const auto& [key, c] : f.terms()) {
        if (!key.first.is_integral()) throw std::invalid_argument("cartier_inverse: integral weights only");
        r.add_term(key.first.times_p(), key.second, c);
    }
    return r;
}

CartierReport cartier_inverse_check(const LogChart& chart, LogBase base, i64 D, i64 L) {
    CartierReport rep;
    DlogBasis B(chart, base);
    const int p = chart.p();
    const Zmod R(static_cast<u64>(p), 1);
    const int n = B.top_degree();
    for (const auto& k : enumerate_basis(chart, 0, D, L * p)) {
        ++rep.weights_checked;
        WeightForms w = weight_forms(B, k, R);
        bool divisible = true;
        for (size_t v = 0; v < k.size(); ++v)
            if (k.num(v) % p != 0) divisible = false;
        for (int i = 0; i <= n; ++i) {
            if (w.dim(i) == 0) continue;
            Matrix cyc = i < n ? kernel(w.dnum[i]) : Matrix::identity(R, w.dim(i));
            Matrix bnd = i > 0 ? w.dnum[i - 1] : Matrix(R, w.dim(i), 0);
            int h = SubQ(cyc, bnd).log_order();
            std::string at = "weight " + k.to_string(chart) + " degree " + std::to_string(i);
            if (divisible) {
                ExponentVector k0 = k.div_p();
                auto src = B.forms(k0, i);
                if (i < n && !w.dnum[i].is_zero()) {
                    rep.cocycles = false;
                    if (rep.witness.empty()) rep.witness = at + ": image of C^{-1} is not closed";
                }
                if (src != w.basis[i] || h != static_cast<int>(src.size())) {
                    rep.bijective = false;
                    if (rep.witness.empty()) rep.witness = at + ": C^{-1} is not onto cohomology";
                }
            } else if (h != 0) {
                rep.bijective = false;
                if (rep.witness.empty()) rep.witness = at + ": cohomology off the Frobenius weights";
            }
        }
    }
    return rep;
}

}  // namespace drw
