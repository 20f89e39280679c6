#pragma once

// Semistable monomial charts and truncated monomial algebras with p-power
// denominators in the exponents.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "drw/padic_linalg.hpp"
#include "json.hpp"

namespace drw {

struct ChartError : std::runtime_error {
    explicit ChartError(const std::string& what) : std::runtime_error(what) {}
};
struct ChartMismatch : std::logic_error {
    explicit ChartMismatch(const std::string& what) : std::logic_error(what) {}
};

struct SmoothVar {
    std::string name;
    bool laurent = false;
    bool operator==(const SmoothVar& o) const { return name == o.name && laurent == o.laurent; }
};

// Variables are indexed block by block, then the smooth variables.
class LogChart {
public:
    LogChart() = default;
    LogChart(int p, std::vector<std::vector<std::string>> blocks, std::vector<SmoothVar> smooth);

    static LogChart from_json(const nlohmann::json& j);
    static LogChart load(const std::string& path);
    nlohmann::json to_json() const;

    int p() const { return p_; }
    size_t nvars() const { return names_.size(); }
    const std::vector<std::vector<std::string>>& blocks() const { return blocks_; }
    const std::vector<SmoothVar>& smooth() const { return smooth_; }
    const std::string& name(size_t v) const { return names_[v]; }
    int block_of(size_t v) const { return block_of_[v]; }  // -1 for smooth variables
    size_t block_var(size_t h, size_t i) const { return block_start_[h] + i; }
    bool is_smooth(size_t v) const { return block_of_[v] < 0; }
    bool is_laurent(size_t v) const;
    bool is_log(size_t v) const { return !is_smooth(v) || is_laurent(v); }
    bool has_nonlog_smooth() const;
    std::optional<size_t> index(const std::string& name) const;
    LogChart with_prime(int p) const { return LogChart(p, blocks_, smooth_); }

    bool operator==(const LogChart& o) const {
        return p_ == o.p_ && blocks_ == o.blocks_ && smooth_ == o.smooth_;
    }

private:
    int p_ = 2;
    std::vector<std::vector<std::string>> blocks_;
    std::vector<SmoothVar> smooth_;
    std::vector<std::string> names_;
    std::vector<int> block_of_;
    std::vector<size_t> block_start_;
};

// Non-negative rational with a p-power denominator, num / p^den.
struct PRat {
    i64 num = 0;
    int den = 0;
    i64 p = 2;
    static PRat integer(i64 n, int p) { return PRat{n, 0, p}; }
    bool operator<=(const PRat& o) const;
    bool operator<(const PRat& o) const;
    bool operator==(const PRat& o) const { return !(*this < o) && !(o < *this); }
    PRat min(const PRat& o) const { return *this <= o ? *this : o; }
};

// Exponents (numerator_i / p^depth), normalized to the smallest depth.
class ExponentVector {
public:
    ExponentVector() = default;
    ExponentVector(int p, std::vector<i64> num, int depth = 0);
    static ExponentVector zero(int p, size_t n) { return ExponentVector(p, std::vector<i64>(n, 0), 0); }
    static ExponentVector unit(int p, size_t n, size_t i, i64 m = 1);

    int p() const { return p_; }
    size_t size() const { return num_.size(); }
    int depth() const { return depth_; }
    i64 num(size_t i) const { return num_[i]; }
    const std::vector<i64>& nums() const { return num_; }
    bool is_integral() const { return depth_ == 0; }
    bool is_zero() const;
    // numerator of coordinate i at the given (>= depth) scale
    i64 num_at(size_t i, int scale) const;
    // sign of coordinate i
    int sign(size_t i) const { return (num_[i] > 0) - (num_[i] < 0); }

    ExponentVector operator+(const ExponentVector& o) const;
    ExponentVector operator-(const ExponentVector& o) const;
    ExponentVector times_p(int k = 1) const;
    ExponentVector div_p(int k = 1) const;
    ExponentVector scaled(i64 m) const;

    PRat degree() const;  // sum of |exponents|
    bool degree_le(const PRat& D) const { return degree() <= D; }
    bool vanishes(const LogChart& c) const;
    bool admissible(const LogChart& c) const;  // non-negative off laurent variables
    bool in_window(const LogChart& c, const PRat& D, i64 L) const;
    std::string to_string(const LogChart& c) const;

    bool operator==(const ExponentVector& o) const { return depth_ == o.depth_ && num_ == o.num_; }
    bool operator!=(const ExponentVector& o) const { return !(*this == o); }
    bool operator<(const ExponentVector& o) const;  // storage order
    static bool lex_less(const ExponentVector& a, const ExponentVector& b);  // rational lexicographic

private:
    void normalize();
    int p_ = 2;
    std::vector<i64> num_;
    int depth_ = 0;
};

// Element of the truncated monomial algebra: monomials above the degree bound are discarded.
class MonomialElement {
public:
    MonomialElement() = default;
    MonomialElement(std::shared_ptr<const LogChart> chart, Zmod R, PRat D);
    static MonomialElement monomial(std::shared_ptr<const LogChart> chart, Zmod R, PRat D,
                                    const ExponentVector& e, i64 coef = 1);
    static MonomialElement constant(std::shared_ptr<const LogChart> chart, Zmod R, PRat D, i64 c);

    const LogChart& chart() const { return *chart_; }
    std::shared_ptr<const LogChart> chart_ptr() const { return chart_; }
    const Zmod& ring() const { return R_; }
    PRat bound() const { return D_; }
    PRat exact_below() const { return exact_; }
    const std::map<ExponentVector, u64>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    u64 coefficient(const ExponentVector& e) const;

    void add_term(const ExponentVector& e, u64 c);
    MonomialElement operator+(const MonomialElement& o) const;
    MonomialElement operator-(const MonomialElement& o) const;
    MonomialElement operator*(const MonomialElement& o) const;
    MonomialElement scaled(i64 c) const;
    MonomialElement pow(u64 k) const;
    // exponents multiplied by p, coefficients untouched; exact below D/p
    MonomialElement frobenius() const;
    bool operator==(const MonomialElement& o) const;
    std::string to_string() const;

private:
    void check_compatible(const MonomialElement& o, const char* where) const;
    std::shared_ptr<const LogChart> chart_;
    Zmod R_;
    PRat D_;
    PRat exact_;
    std::map<ExponentVector, u64> t_;
};

// Non-vanishing admissible monomials with denominators dividing p^M, degree <= D, laurent
// exponents in [-L, L]; ordered by degree, then lexicographically.
std::vector<ExponentVector> enumerate_basis(const LogChart& chart, int M, i64 D, i64 L);

}  // namespace drw
