#pragma once

// Ghost-lift oracle: lift Witt coordinates to integer polynomials, operate on ghost
// components, and solve back by exact integer division.

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <vector>

#include "drw/witt.hpp"

namespace oracle {

using BigInt = boost::multiprecision::cpp_int;
using ZPoly = std::map<std::vector<drw::i64>, BigInt>;

inline ZPoly zadd(const ZPoly& a, const ZPoly& b, BigInt s = 1) {
    ZPoly r = a;
    for (const auto& [e, c] : b) {
        r[e] += s * c;
        if (r[e] == 0) r.erase(e);
    }
    return r;
}

inline ZPoly zmul(const ZPoly& a, const ZPoly& b) {
    ZPoly r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            std::vector<drw::i64> e(ea.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            r[e] += ca * cb;
        }
    for (auto it = r.begin(); it != r.end();) it = (it->second == 0) ? r.erase(it) : std::next(it);
    return r;
}

inline ZPoly zpow(const ZPoly& a, unsigned e, size_t nv) {
    ZPoly r;
    r[std::vector<drw::i64>(nv, 0)] = 1;
    ZPoly b = a;
    while (e) {
        if (e & 1) r = zmul(r, b);
        e >>= 1;
        if (e) b = zmul(b, b);
    }
    return r;
}

inline ZPoly zscale(const ZPoly& a, const BigInt& s) {
    ZPoly r;
    if (s == 0) return r;
    for (const auto& [e, c] : a) r[e] = c * s;
    return r;
}

inline ZPoly lift(const drw::MonomialElement& m) {
    ZPoly r;
    for (const auto& [e, c] : m.terms()) {
        if (!e.is_integral()) throw std::logic_error("oracle handles integral exponents only");
        r[e.nums()] = BigInt(c);
    }
    return r;
}

inline unsigned upow(unsigned p, int e) {
    unsigned r = 1;
    for (int i = 0; i < e; ++i) r *= p;
    return r;
}

// ghost components w_0..w_{n-1}
inline std::vector<ZPoly> ghosts(const std::vector<ZPoly>& x, unsigned p, size_t nv) {
    std::vector<ZPoly> w;
    for (size_t j = 0; j < x.size(); ++j) {
        ZPoly s;
        for (size_t i = 0; i <= j; ++i) s = zadd(s, zscale(zpow(x[i], upow(p, int(j - i)), nv), BigInt(upow(p, int(i)))));
        w.push_back(s);
    }
    return w;
}

inline std::vector<ZPoly> solve_back(const std::vector<ZPoly>& w, unsigned p, size_t nv) {
    std::vector<ZPoly> x;
    for (size_t j = 0; j < w.size(); ++j) {
        ZPoly num = w[j];
        for (size_t i = 0; i < j; ++i)
            num = zadd(num, zscale(zpow(x[i], upow(p, int(j - i)), nv), BigInt(upow(p, int(i)))), -1);
        BigInt d = upow(p, int(j));
        ZPoly q;
        for (const auto& [e, c] : num) {
            if (c % d != 0) throw std::logic_error("oracle: ghost components not integral");
            q[e] = c / d;
        }
        x.push_back(q);
    }
    return x;
}

// reduce mod p into the monomial algebra (vanishing rule and window applied)
inline drw::WittVector reduce(const std::vector<ZPoly>& x, const drw::WittVector& shape) {
    std::vector<drw::MonomialElement> out;
    const auto& m0 = shape[0];
    unsigned p = unsigned(m0.ring().p());
    for (const auto& xi : x) {
        drw::MonomialElement m(m0.chart_ptr(), m0.ring(), m0.bound());
        for (const auto& [e, c] : xi) {
            BigInt r = c % p;
            if (r < 0) r += p;
            if (r != 0) m.add_term(drw::ExponentVector(int(p), e), static_cast<drw::u64>(r));
        }
        out.push_back(m);
    }
    return drw::WittVector(out);
}

inline std::vector<ZPoly> lift_all(const drw::WittVector& x) {
    std::vector<ZPoly> v;
    for (const auto& c : x.coords()) v.push_back(lift(c));
    return v;
}

inline drw::WittVector add(const drw::WittVector& x, const drw::WittVector& y) {
    unsigned p = unsigned(x.chart().p());
    size_t nv = x.chart().nvars();
    auto gx = ghosts(lift_all(x), p, nv), gy = ghosts(lift_all(y), p, nv);
    std::vector<ZPoly> g;
    for (size_t j = 0; j < gx.size(); ++j) g.push_back(zadd(gx[j], gy[j]));
    return reduce(solve_back(g, p, nv), x);
}

inline drw::WittVector mul(const drw::WittVector& x, const drw::WittVector& y) {
    unsigned p = unsigned(x.chart().p());
    size_t nv = x.chart().nvars();
    auto gx = ghosts(lift_all(x), p, nv), gy = ghosts(lift_all(y), p, nv);
    std::vector<ZPoly> g;
    for (size_t j = 0; j < gx.size(); ++j) g.push_back(zmul(gx[j], gy[j]));
    return reduce(solve_back(g, p, nv), x);
}

inline drw::WittVector frob(const drw::WittVector& x) {
    unsigned p = unsigned(x.chart().p());
    size_t nv = x.chart().nvars();
    auto gx = ghosts(lift_all(x), p, nv);
    std::vector<ZPoly> g(gx.begin() + 1, gx.end());
    return reduce(solve_back(g, p, nv), x);
}

inline drw::WittVector versch(const drw::WittVector& x) {
    unsigned p = unsigned(x.chart().p());
    size_t nv = x.chart().nvars();
    auto gx = ghosts(lift_all(x), p, nv);
    std::vector<ZPoly> g{ZPoly{}};
    for (size_t j = 0; j + 1 < gx.size(); ++j) g.push_back(zscale(gx[j], BigInt(p)));
    return reduce(solve_back(g, p, nv), x);
}

}  // namespace oracle
