#include "drw/witt.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace drw {

namespace {

WittPoly::Key key_add(WittPoly::Key a, WittPoly::Key b) {
    WittPoly::Key r = 0;
    for (int v = 0; v < 8; ++v) {
        int e = WittPoly::exponent(a, v) + WittPoly::exponent(b, v);
        if (e > 255) throw std::overflow_error("WittPoly: exponent overflow");
        r |= static_cast<WittPoly::Key>(e) << (8 * v);
    }
    return r;
}

u64 upow(u64 b, int e) {
    u64 r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace

WittPoly WittPoly::variable(Zmod R, int nvars, int v) {
    if (nvars > 8 || v >= nvars) throw std::invalid_argument("WittPoly: too many variables");
    WittPoly f(R, nvars);
    f.t_[static_cast<Key>(1) << (8 * v)] = 1 % R.q();
    return f;
}

WittPoly WittPoly::constant(Zmod R, int nvars, i64 c) {
    WittPoly f(R, nvars);
    u64 x = R.from_int(c);
    if (x) f.t_[0] = x;
    return f;
}

WittPoly WittPoly::operator+(const WittPoly& o) const {
    WittPoly r = *this;
    for (const auto& [k, c] : o.t_) {
        u64& s = r.t_[k];
        s = R_.add(s, c);
        if (!s) r.t_.erase(k);
    }
    return r;
}

WittPoly WittPoly::operator-(const WittPoly& o) const { return *this + o.scaled(R_.q() - 1); }

WittPoly WittPoly::operator*(const WittPoly& o) const {
    WittPoly r(R_, nvars_);
    r.t_.reserve(t_.size() * o.t_.size());
    for (const auto& [a, x] : t_)
        for (const auto& [b, y] : o.t_) {
            u64& s = r.t_[key_add(a, b)];
            s = R_.add(s, R_.mul(x, y));
        }
    for (auto it = r.t_.begin(); it != r.t_.end();) {
        if (it->second == 0)
            it = r.t_.erase(it);
        else
            ++it;
    }
    return r;
}

WittPoly WittPoly::scaled(u64 s) const {
    WittPoly r(R_, nvars_);
    for (const auto& [k, c] : t_) {
        u64 x = R_.mul(c, s);
        if (x) r.t_[k] = x;
    }
    return r;
}

WittPoly WittPoly::pow(u64 e) const {
    WittPoly result = constant(R_, nvars_, 1), base = *this;
    while (e) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

WittPoly WittPoly::div_ppow(int e) const {
    WittPoly r(R_, nvars_);
    u64 pe = R_.ppow(e);
    for (const auto& [k, c] : t_) {
        if (c % pe) throw std::logic_error("WittPoly: ghost recursion produced a non-integral coefficient");
        if (c / pe) r.t_[k] = c / pe;
    }
    return r;
}

WittPoly WittStructurePolys::ghost(int j, int offset) const {
    Zmod R(p, n);
    WittPoly w(R, 2 * n);
    for (int i = 0; i <= j; ++i)
        w = w + WittPoly::variable(R, 2 * n, offset + i).pow(upow(p, j - i)).scaled(R.ppow(i));
    return w;
}

namespace {

// Solves w_j(X) = target_j for X_j recursively.
std::vector<WittPoly> ghost_solve(const Zmod& R, int p, const std::vector<WittPoly>& target) {
    std::vector<WittPoly> X;
    for (size_t j = 0; j < target.size(); ++j) {
        WittPoly num = target[j];
        for (size_t i = 0; i < j; ++i) num = num - X[i].pow(upow(p, int(j - i))).scaled(R.ppow(int(i)));
        X.push_back(num.div_ppow(int(j)));
    }
    return X;
}

WittStructurePolys build_polys(int p, int n) {
    WittStructurePolys w;
    w.p = p;
    w.n = n;
    Zmod R(p, n);
    std::vector<WittPoly> sum_t, prod_t, frob_t;
    for (int j = 0; j < n; ++j) {
        WittPoly wa = w.ghost(j, 0), wb = w.ghost(j, n);
        sum_t.push_back(wa + wb);
        prod_t.push_back(wa * wb);
        if (j + 1 < n) frob_t.push_back(w.ghost(j + 1, 0));
    }
    w.S = ghost_solve(R, p, sum_t);
    w.P = ghost_solve(R, p, prod_t);
    w.F = ghost_solve(R, p, frob_t);
    if (!w.validate()) throw std::logic_error("Witt structure polynomials failed ghost validation");
    return w;
}

// w_j evaluated on given polynomials
WittPoly ghost_of(const Zmod& R, int p, const std::vector<WittPoly>& X, int j) {
    WittPoly w(R, X.empty() ? 0 : X[0].nvars());
    for (int i = 0; i <= j; ++i) w = w + X[i].pow(upow(p, j - i)).scaled(R.ppow(i));
    return w;
}

}  // namespace

bool WittStructurePolys::validate() const {
    Zmod R(p, n);
    for (int j = 0; j < n; ++j) {
        WittPoly wa = ghost(j, 0), wb = ghost(j, n);
        if (!(ghost_of(R, p, S, j) == wa + wb)) return false;
        if (!(ghost_of(R, p, P, j) == wa * wb)) return false;
        if (j + 1 < n && !(ghost_of(R, p, F, j) == ghost(j + 1, 0))) return false;
    }
    return true;
}

const WittStructurePolys& witt_polys(int p, int n) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<WittStructurePolys>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{p, n}];
    if (!slot) {
        if (n < 1 || 2 * n > 8) throw std::invalid_argument("witt_polys: length must be 1..4");
        slot = std::make_unique<WittStructurePolys>(build_polys(p, n));
    }
    return *slot;
}

// ---- evaluation ----

namespace {

// x^e over F_p via base-p digits: x^(sum d_k p^k) = prod frob^k(x)^d_k
MonomialElement power_fp(const MonomialElement& x, u64 e, u64 p) {
    MonomialElement r = MonomialElement::constant(x.chart_ptr(), x.ring(), x.bound(), 1);
    MonomialElement f = x;
    while (e) {
        u64 d = e % p;
        if (d) r = r * f.pow(d);
        e /= p;
        if (e) f = f.frobenius();
    }
    return r;
}

}  // namespace

MonomialElement evaluate_witt_poly(const WittPoly& f, const std::vector<MonomialElement>& vars) {
    if (vars.empty()) throw std::invalid_argument("evaluate_witt_poly: no variables");
    const MonomialElement& x0 = vars[0];
    u64 p = x0.ring().p();
    if (x0.ring().N() != 1) throw std::invalid_argument("Witt coordinates must live over Z/p");
    MonomialElement out(x0.chart_ptr(), x0.ring(), x0.bound());
    std::map<std::pair<int, int>, MonomialElement> powers;
    auto pw = [&](int v, int e) -> const MonomialElement& {
        auto it = powers.find({v, e});
        if (it != powers.end()) return it->second;
        return powers.emplace(std::make_pair(v, e), power_fp(vars[v], e, p)).first->second;
    };
    for (const auto& [k, c] : f.terms()) {
        u64 cp = c % p;
        if (!cp) continue;
        MonomialElement term = MonomialElement::constant(x0.chart_ptr(), x0.ring(), x0.bound(), static_cast<i64>(cp));
        bool zero = false;
        for (int v = 0; v < f.nvars() && !zero; ++v) {
            int e = WittPoly::exponent(k, v);
            if (!e) continue;
            if (vars[v].is_zero()) {
                zero = true;
                break;
            }
            term = term * pw(v, e);
            zero = term.is_zero();
        }
        if (!zero) out = out + term;
    }
    return out;
}

// ---- WittVector ----

WittVector::WittVector(std::vector<MonomialElement> coords) : x_(std::move(coords)) {
    if (x_.empty()) throw LengthMismatch("WittVector: length must be >= 1");
    for (const auto& c : x_) {
        if (c.ring().N() != 1 || c.ring().p() != static_cast<u64>(c.chart().p()))
            throw std::invalid_argument("WittVector: entries must live over Z/p");
        if (!(c.chart() == x_[0].chart())) throw ChartMismatch("WittVector: mixed charts");
    }
}

WittVector WittVector::zero(std::shared_ptr<const LogChart> chart, size_t n, PRat D) {
    Zmod R(chart->p(), 1);
    return WittVector(std::vector<MonomialElement>(n, MonomialElement(chart, R, D)));
}

WittVector WittVector::integer(std::shared_ptr<const LogChart> chart, size_t n, PRat D, i64 m) {
    if (m < 0) throw std::invalid_argument("WittVector::integer: non-negative only");
    Zmod R(chart->p(), 1);
    WittVector one = teichmuller(MonomialElement::constant(chart, R, D, 1), n);
    WittVector acc = zero(chart, n, D);
    for (i64 i = 0; i < m; ++i) acc = witt_add(acc, one);
    return acc;
}

std::string WittVector::to_string() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < x_.size(); ++i) {
        if (i) os << ", ";
        os << x_[i].to_string();
    }
    os << ")";
    return os.str();
}

namespace {

std::vector<MonomialElement> concat(const WittVector& x, const WittVector& y) {
    if (x.length() != y.length()) throw LengthMismatch("Witt vectors of different lengths");
    if (!(x.chart() == y.chart())) throw ChartMismatch("Witt vectors over different charts");
    std::vector<MonomialElement> v = x.coords();
    v.insert(v.end(), y.coords().begin(), y.coords().end());
    return v;
}

}  // namespace

WittVector witt_add(const WittVector& x, const WittVector& y) {
    const auto& W = witt_polys(x.chart().p(), static_cast<int>(x.length()));
    auto vars = concat(x, y);
    std::vector<MonomialElement> out;
    for (const auto& s : W.S) out.push_back(evaluate_witt_poly(s, vars));
    return WittVector(out);
}

WittVector witt_mul(const WittVector& x, const WittVector& y) {
    const auto& W = witt_polys(x.chart().p(), static_cast<int>(x.length()));
    auto vars = concat(x, y);
    std::vector<MonomialElement> out;
    for (const auto& s : W.P) out.push_back(evaluate_witt_poly(s, vars));
    return WittVector(out);
}

WittVector teichmuller(const MonomialElement& a, size_t n) {
    std::vector<MonomialElement> v(n, MonomialElement(a.chart_ptr(), a.ring(), a.bound()));
    v[0] = a;
    return WittVector(v);
}

WittVector verschiebung(const WittVector& x) {
    std::vector<MonomialElement> v;
    v.push_back(MonomialElement(x[0].chart_ptr(), x[0].ring(), x[0].bound()));
    for (size_t i = 0; i + 1 < x.length(); ++i) v.push_back(x[i]);
    return WittVector(v);
}

WittVector frobenius_W(const WittVector& x) {
    if (x.length() < 2) throw LengthMismatch("frobenius_W needs length >= 2");
    const auto& W = witt_polys(x.chart().p(), static_cast<int>(x.length()));
    std::vector<MonomialElement> vars = x.coords();
    // the polynomials are in 2n variables; the b-block is unused
    vars.insert(vars.end(), x.coords().begin(), x.coords().end());
    std::vector<MonomialElement> out;
    for (const auto& f : W.F) out.push_back(evaluate_witt_poly(f, vars));
    return WittVector(out);
}

WittVector restrict_W(const WittVector& x, size_t m) {
    if (m < 1 || m > x.length()) throw LengthMismatch("restrict_W: bad length");
    return WittVector(std::vector<MonomialElement>(x.coords().begin(), x.coords().begin() + m));
}

std::pair<MonomialElement, WittVector> split(const WittVector& x) {
    if (x.length() < 2) {
        // x' lives in W_0 = 0; it is reported as a length-1 zero vector
        return {x[0], WittVector::zero(x[0].chart_ptr(), 1, x[0].bound())};
    }
    return {x[0], WittVector(std::vector<MonomialElement>(x.coords().begin() + 1, x.coords().end()))};
}

}  // namespace drw
