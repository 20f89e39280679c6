#include "drw/monomial.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace drw {

namespace {

bool small_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

i64 ipow(i64 p, int e) {
    i64 r = 1;
    for (int i = 0; i < e; ++i) r *= p;
    return r;
}

}  // namespace

// ---- LogChart ----

LogChart::LogChart(int p, std::vector<std::vector<std::string>> blocks, std::vector<SmoothVar> smooth)
    : p_(p), blocks_(std::move(blocks)), smooth_(std::move(smooth)) {
    if (!small_prime(p_)) throw ChartError("chart: prime " + std::to_string(p_) + " is not prime");
    std::set<std::string> seen;
    for (size_t h = 0; h < blocks_.size(); ++h) {
        if (blocks_[h].size() < 1) throw ChartError("chart: empty block");
        block_start_.push_back(names_.size());
        for (const auto& n : blocks_[h]) {
            if (n.empty()) throw ChartError("chart: empty variable name");
            if (!seen.insert(n).second) throw ChartError("chart: duplicate variable " + n);
            names_.push_back(n);
            block_of_.push_back(static_cast<int>(h));
        }
    }
    for (const auto& s : smooth_) {
        if (s.name.empty()) throw ChartError("chart: empty variable name");
        if (!seen.insert(s.name).second) throw ChartError("chart: duplicate variable " + s.name);
        names_.push_back(s.name);
        block_of_.push_back(-1);
    }
}

LogChart LogChart::from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw ChartError("chart: expected an object");
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.key() != "prime" && it.key() != "blocks" && it.key() != "smooth")
                throw ChartError("chart: unknown key '" + it.key() + "'");
        if (!j.contains("prime") || !j.at("prime").is_number_integer()) throw ChartError("chart: 'prime' must be an integer");
        int p = j.at("prime").get<int>();
        std::vector<std::vector<std::string>> blocks;
        if (j.contains("blocks")) {
            for (const auto& b : j.at("blocks")) {
                if (!b.is_array()) throw ChartError("chart: each block must be a list of names");
                std::vector<std::string> names;
                for (const auto& n : b) names.push_back(n.get<std::string>());
                blocks.push_back(names);
            }
        }
        std::vector<SmoothVar> smooth;
        if (j.contains("smooth")) {
            for (const auto& s : j.at("smooth")) {
                if (!s.is_object() || !s.contains("name")) throw ChartError("chart: smooth entries need a name");
                smooth.push_back({s.at("name").get<std::string>(), s.value("laurent", false)});
            }
        }
        return LogChart(p, blocks, smooth);
    } catch (const nlohmann::json::exception& e) {
        throw ChartError(std::string("chart: malformed JSON: ") + e.what());
    }
}

LogChart LogChart::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ChartError("chart: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ChartError("chart: cannot parse " + path + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json LogChart::to_json() const {
    nlohmann::json j;
    j["prime"] = p_;
    j["blocks"] = blocks_;
    j["smooth"] = nlohmann::json::array();
    for (const auto& s : smooth_) j["smooth"].push_back({{"name", s.name}, {"laurent", s.laurent}});
    return j;
}

bool LogChart::is_laurent(size_t v) const {
    if (!is_smooth(v)) return false;
    return smooth_[v - (names_.size() - smooth_.size())].laurent;
}

bool LogChart::has_nonlog_smooth() const {
    return std::any_of(smooth_.begin(), smooth_.end(), [](const SmoothVar& s) { return !s.laurent; });
}

std::optional<size_t> LogChart::index(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

// ---- PRat ----

bool PRat::operator<=(const PRat& o) const {
    int d = std::max(den, o.den);
    return num * ipow(p, d - den) <= o.num * ipow(p, d - o.den);
}
bool PRat::operator<(const PRat& o) const {
    int d = std::max(den, o.den);
    return num * ipow(p, d - den) < o.num * ipow(p, d - o.den);
}

// ---- ExponentVector ----

ExponentVector::ExponentVector(int p, std::vector<i64> num, int depth) : p_(p), num_(std::move(num)), depth_(depth) {
    if (depth_ < 0) {
        for (auto& x : num_) x *= ipow(p_, -depth_);
        depth_ = 0;
    }
    normalize();
}

ExponentVector ExponentVector::unit(int p, size_t n, size_t i, i64 m) {
    std::vector<i64> v(n, 0);
    v[i] = m;
    return ExponentVector(p, v, 0);
}

void ExponentVector::normalize() {
    while (depth_ > 0 && std::all_of(num_.begin(), num_.end(), [&](i64 x) { return x % p_ == 0; })) {
        for (auto& x : num_) x /= p_;
        --depth_;
    }
}

bool ExponentVector::is_zero() const {
    return std::all_of(num_.begin(), num_.end(), [](i64 x) { return x == 0; });
}

i64 ExponentVector::num_at(size_t i, int scale) const { return num_[i] * ipow(p_, scale - depth_); }

ExponentVector ExponentVector::operator+(const ExponentVector& o) const {
    if (o.size() != size() || o.p_ != p_) throw ChartMismatch("ExponentVector+: shape mismatch");
    int d = std::max(depth_, o.depth_);
    std::vector<i64> v(size());
    for (size_t i = 0; i < size(); ++i) v[i] = num_at(i, d) + o.num_at(i, d);
    return ExponentVector(p_, v, d);
}

ExponentVector ExponentVector::operator-(const ExponentVector& o) const { return *this + o.scaled(-1); }

ExponentVector ExponentVector::times_p(int k) const { return ExponentVector(p_, num_, depth_ - k); }

ExponentVector ExponentVector::div_p(int k) const { return ExponentVector(p_, num_, depth_ + k); }

ExponentVector ExponentVector::scaled(i64 m) const {
    std::vector<i64> v = num_;
    for (auto& x : v) x *= m;
    return ExponentVector(p_, v, depth_);
}

PRat ExponentVector::degree() const {
    PRat r;
    r.p = p_;
    r.den = depth_;
    for (i64 x : num_) r.num += x < 0 ? -x : x;
    return r;
}

bool ExponentVector::vanishes(const LogChart& c) const {
    for (size_t h = 0; h < c.blocks().size(); ++h) {
        bool all = true;
        for (size_t i = 0; i < c.blocks()[h].size(); ++i)
            if (num_[c.block_var(h, i)] <= 0) all = false;
        if (all) return true;
    }
    return false;
}

bool ExponentVector::admissible(const LogChart& c) const {
    for (size_t v = 0; v < size(); ++v)
        if (!c.is_laurent(v) && num_[v] < 0) return false;
    return true;
}

bool ExponentVector::in_window(const LogChart& c, const PRat& D, i64 L) const {
    if (!admissible(c) || vanishes(c) || !degree_le(D)) return false;
    for (size_t v = 0; v < size(); ++v)
        if (c.is_laurent(v) && std::abs(num_[v]) > L * ipow(p_, depth_)) return false;
    return true;
}

std::string ExponentVector::to_string(const LogChart& c) const {
    std::ostringstream os;
    bool any = false;
    for (size_t v = 0; v < size(); ++v) {
        if (num_[v] == 0) continue;
        if (any) os << "*";
        any = true;
        os << c.name(v);
        i64 den = ipow(p_, depth_);
        i64 g = std::gcd(std::abs(num_[v]), den);
        i64 n = num_[v] / g, d = den / g;
        if (n != 1 || d != 1) {
            os << "^";
            if (d == 1)
                os << n;
            else
                os << "(" << n << "/" << d << ")";
        }
    }
    if (!any) os << "1";
    return os.str();
}

bool ExponentVector::operator<(const ExponentVector& o) const {
    if (depth_ != o.depth_) return depth_ < o.depth_;
    return num_ < o.num_;
}

bool ExponentVector::lex_less(const ExponentVector& a, const ExponentVector& b) {
    int d = std::max(a.depth_, b.depth_);
    for (size_t i = 0; i < a.size(); ++i) {
        i64 x = a.num_at(i, d), y = b.num_at(i, d);
        if (x != y) return x < y;
    }
    return false;
}

// ---- MonomialElement ----

MonomialElement::MonomialElement(std::shared_ptr<const LogChart> chart, Zmod R, PRat D)
    : chart_(std::move(chart)), R_(R), D_(D), exact_(D) {
    D_.p = exact_.p = chart_->p();
}

MonomialElement MonomialElement::monomial(std::shared_ptr<const LogChart> chart, Zmod R, PRat D,
                                          const ExponentVector& e, i64 coef) {
    MonomialElement m(std::move(chart), R, D);
    m.add_term(e, R.from_int(coef));
    return m;
}

MonomialElement MonomialElement::constant(std::shared_ptr<const LogChart> chart, Zmod R, PRat D, i64 c) {
    size_t n = chart->nvars();
    int p = chart->p();
    return monomial(std::move(chart), R, D, ExponentVector::zero(p, n), c);
}

u64 MonomialElement::coefficient(const ExponentVector& e) const {
    auto it = t_.find(e);
    return it == t_.end() ? 0 : it->second;
}

void MonomialElement::add_term(const ExponentVector& e, u64 c) {
    if (e.size() != chart_->nvars()) throw ChartMismatch("MonomialElement: exponent length");
    if (!e.admissible(*chart_)) throw std::invalid_argument("MonomialElement: negative exponent on a non-laurent variable");
    if (e.vanishes(*chart_) || !e.degree_le(D_) || c == 0) return;
    u64& slot = t_[e];
    slot = R_.add(slot, c);
    if (slot == 0) t_.erase(e);
}

void MonomialElement::check_compatible(const MonomialElement& o, const char* where) const {
    if (!(*chart_ == *o.chart_)) throw ChartMismatch(std::string(where) + ": different charts");
    require_same(R_, o.R_, where);
}

MonomialElement MonomialElement::operator+(const MonomialElement& o) const {
    check_compatible(o, "MonomialElement+");
    MonomialElement r = *this;
    r.D_ = D_.min(o.D_);
    r.exact_ = exact_.min(o.exact_);
    for (const auto& [e, c] : o.t_) r.add_term(e, c);
    return r;
}

MonomialElement MonomialElement::operator-(const MonomialElement& o) const { return *this + o.scaled(-1); }

MonomialElement MonomialElement::operator*(const MonomialElement& o) const {
    check_compatible(o, "MonomialElement*");
    MonomialElement r(chart_, R_, D_.min(o.D_));
    // exponents are non-negative off laurent variables, so degrees only grow there;
    // the product is exact below the smaller of the two windows
    r.exact_ = exact_.min(o.exact_);
    for (const auto& [a, x] : t_)
        for (const auto& [b, y] : o.t_) r.add_term(a + b, R_.mul(x, y));
    return r;
}

MonomialElement MonomialElement::scaled(i64 c) const {
    MonomialElement r(chart_, R_, D_);
    r.exact_ = exact_;
    u64 s = R_.from_int(c);
    for (const auto& [e, x] : t_) r.add_term(e, R_.mul(x, s));
    return r;
}

MonomialElement MonomialElement::pow(u64 k) const {
    MonomialElement r = constant(chart_, R_, D_, 1);
    r.exact_ = exact_;
    for (u64 i = 0; i < k; ++i) r = r * *this;
    return r;
}

MonomialElement MonomialElement::frobenius() const {
    MonomialElement r(chart_, R_, D_);
    r.exact_ = exact_;
    r.exact_.den += 1;
    for (const auto& [e, x] : t_) r.add_term(e.times_p(), x);
    return r;
}

bool MonomialElement::operator==(const MonomialElement& o) const {
    return *chart_ == *o.chart_ && R_ == o.R_ && t_ == o.t_;
}

std::string MonomialElement::to_string() const {
    if (t_.empty()) return "0";
    std::vector<ExponentVector> keys;
    for (const auto& [e, c] : t_) keys.push_back(e);
    std::sort(keys.begin(), keys.end(), ExponentVector::lex_less);
    std::ostringstream os;
    for (size_t i = 0; i < keys.size(); ++i) {
        if (i) os << " + ";
        u64 c = t_.at(keys[i]);
        if (c != 1) os << c << "*";
        os << keys[i].to_string(*chart_);
    }
    return os.str();
}

// ---- basis enumeration ----

std::vector<ExponentVector> enumerate_basis(const LogChart& chart, int M, i64 D, i64 L) {
    const int p = chart.p();
    const i64 scale = ipow(p, M);
    const i64 budget = D * scale;
    std::vector<ExponentVector> out;
    std::vector<i64> cur(chart.nvars(), 0);
    auto rec = [&](auto&& self, size_t v, i64 left) -> void {
        if (v == chart.nvars()) {
            ExponentVector e(p, cur, M);
            if (!e.vanishes(chart)) out.push_back(e);
            return;
        }
        i64 lo = 0, hi = left;
        if (chart.is_laurent(v)) {
            hi = std::min(left, L * scale);
            lo = -hi;
        }
        for (i64 x = lo; x <= hi; ++x) {
            cur[v] = x;
            self(self, v + 1, left - std::abs(x));
        }
        cur[v] = 0;
    };
    rec(rec, 0, budget);
    std::sort(out.begin(), out.end(), [](const ExponentVector& a, const ExponentVector& b) {
        PRat da = a.degree(), db = b.degree();
        if (!(da == db)) return da < db;
        return ExponentVector::lex_less(b, a);
    });
    return out;
}

}  // namespace drw
