#pragma once

// Truncated p-typical Witt vectors of monomial F_p-algebras.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "drw/monomial.hpp"

namespace drw {

struct LengthMismatch : std::invalid_argument {
    explicit LengthMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Polynomial in at most 8 variables with exponents < 256, coefficients in Z/p^n.
class WittPoly {
public:
    using Key = std::uint64_t;
    WittPoly() = default;
    WittPoly(Zmod R, int nvars) : R_(R), nvars_(nvars) {}
    static WittPoly variable(Zmod R, int nvars, int v);
    static WittPoly constant(Zmod R, int nvars, i64 c);

    static int exponent(Key k, int v) { return static_cast<int>((k >> (8 * v)) & 0xff); }
    const std::unordered_map<Key, u64>& terms() const { return t_; }
    int nvars() const { return nvars_; }
    const Zmod& ring() const { return R_; }

    WittPoly operator+(const WittPoly& o) const;
    WittPoly operator-(const WittPoly& o) const;
    WittPoly operator*(const WittPoly& o) const;
    WittPoly scaled(u64 s) const;
    WittPoly pow(u64 e) const;
    // exact division of every coefficient by p^e (coefficients must be divisible)
    WittPoly div_ppow(int e) const;
    bool is_zero() const { return t_.empty(); }
    bool operator==(const WittPoly& o) const { return t_ == o.t_; }
    size_t size() const { return t_.size(); }

private:
    Zmod R_;
    int nvars_ = 0;
    std::unordered_map<Key, u64> t_;
};

// Sum, product and Frobenius polynomials for W_n, coefficients modulo p^n. This is exactly
// the precision the ghost recursion needs to determine them modulo p. Variables: a_0..a_{n-1}
// are 0..n-1, b_0..b_{n-1} are n..2n-1.
struct WittStructurePolys {
    int p = 2;
    int n = 1;
    std::vector<WittPoly> S, P, F;
    // w_j(a) = sum_i p^i a_i^{p^{j-i}} on the variables starting at offset
    WittPoly ghost(int j, int offset) const;
    // checks w_j(S) = w_j(a) + w_j(b), w_j(P) = w_j(a) w_j(b), w_j(F) = w_{j+1}(a) mod p^n
    bool validate() const;
};

// Cached per (p, n); thread safe.
const WittStructurePolys& witt_polys(int p, int n);

class WittVector {
public:
    WittVector() = default;
    explicit WittVector(std::vector<MonomialElement> coords);
    static WittVector zero(std::shared_ptr<const LogChart> chart, size_t n, PRat D);
    static WittVector integer(std::shared_ptr<const LogChart> chart, size_t n, PRat D, i64 m);

    size_t length() const { return x_.size(); }
    const MonomialElement& operator[](size_t i) const { return x_[i]; }
    const std::vector<MonomialElement>& coords() const { return x_; }
    const LogChart& chart() const { return x_.at(0).chart(); }
    bool operator==(const WittVector& o) const { return x_ == o.x_; }
    std::string to_string() const;

private:
    std::vector<MonomialElement> x_;
};

WittVector witt_add(const WittVector& x, const WittVector& y);
WittVector witt_mul(const WittVector& x, const WittVector& y);
WittVector teichmuller(const MonomialElement& a, size_t n);
WittVector verschiebung(const WittVector& x);
WittVector frobenius_W(const WittVector& x);  // length n-1
WittVector restrict_W(const WittVector& x, size_t m);  // first m coordinates
std::pair<MonomialElement, WittVector> split(const WittVector& x);

// Evaluates a structure polynomial (reduced mod p) at coordinate entries.
MonomialElement evaluate_witt_poly(const WittPoly& f, const std::vector<MonomialElement>& vars);

}  // namespace drw
