#pragma once

// Random free Z_p-complexes with a known cohomology, for the decalage tests.

#include <random>
#include <vector>

#include "drw/dieudonne.hpp"

namespace synth {

struct Complex {
    drw::LatticeComplex C;
    // expected Z_p-cohomology per degree: torsion exponents (sorted) then free summands as N
    std::vector<std::vector<int>> expected;
};

// Each degree is a sum of free summands and of source/target pairs p^e: Z_p -> Z_p, then
// conjugated by random unimodular changes of basis.
inline Complex random_complex(std::mt19937_64& rng, int p, int N, int degrees, int max_gens, int max_e) {
    using namespace drw;
    const Zmod R(static_cast<u64>(p), N);
    std::uniform_int_distribution<int> coin(0, 99);
    std::vector<int> nfree(degrees, 0);
    // pairs[i] = exponents of the blocks d^i: C^i -> C^{i+1}
    std::vector<std::vector<int>> pairs(degrees > 0 ? degrees - 1 : 0);
    std::vector<int> dim(degrees, 0);
    for (int i = 0; i < degrees; ++i) {
        int budget = 1 + static_cast<int>(rng() % static_cast<u64>(max_gens));
        while (dim[i] < budget) {
            int choice = coin(rng);
            if (i + 1 < degrees && choice < 55 && dim[i + 1] < max_gens) {
                pairs[i].push_back(static_cast<int>(rng() % static_cast<u64>(max_e + 1)));
                ++dim[i];
                ++dim[i + 1];
            } else {
                ++nfree[i];
                ++dim[i];
            }
        }
    }
    // basis order in each degree: targets of d^{i-1}, sources of d^i, free
    std::vector<std::vector<std::vector<i64>>> D;
    for (int i = 0; i + 1 < degrees; ++i) {
        size_t tgt_prev = i > 0 ? pairs[i - 1].size() : 0;
        std::vector<std::vector<i64>> m(static_cast<size_t>(dim[i + 1]), std::vector<i64>(static_cast<size_t>(dim[i]), 0));
        for (size_t b = 0; b < pairs[i].size(); ++b) {
            i64 v = 1;
            for (int e = 0; e < pairs[i][b]; ++e) v *= p;
            m[b][tgt_prev + b] = v;
        }
        D.push_back(m);
    }
    // random unimodular P_i with inverse
    auto unimodular = [&](int n, Matrix& P, Matrix& Pinv) {
        P = Matrix::identity(R, static_cast<size_t>(n));
        Pinv = Matrix::identity(R, static_cast<size_t>(n));
        if (n < 2) return;
        for (int t = 0; t < 3 * n; ++t) {
            size_t a = rng() % static_cast<u64>(n), b = rng() % static_cast<u64>(n);
            if (a == b) continue;
            i64 c = static_cast<i64>(rng() % 7) - 3;
            Matrix E = Matrix::identity(R, static_cast<size_t>(n)), Ei = Matrix::identity(R, static_cast<size_t>(n));
            E.set(a, b, c);
            Ei.set(a, b, -c);
            P = E * P;
            Pinv = Pinv * Ei;
        }
    };
    std::vector<Matrix> P(static_cast<size_t>(degrees)), Pi(static_cast<size_t>(degrees));
    for (int i = 0; i < degrees; ++i) unimodular(dim[i], P[i], Pi[i]);
    std::vector<RationalMap> d;
    for (int i = 0; i + 1 < degrees; ++i) {
        Matrix m = Matrix::from_rows(R, D[i], static_cast<size_t>(dim[i]));
        if (m.rows() != static_cast<size_t>(dim[i + 1])) m = Matrix(R, static_cast<size_t>(dim[i + 1]), static_cast<size_t>(dim[i]));
        d.push_back({P[i + 1] * m * Pi[i], 0});
    }
    std::vector<size_t> dims;
    for (int x : dim) dims.push_back(static_cast<size_t>(x));
    Complex out{LatticeComplex::free(R, dims, d), {}};
    for (int i = 0; i < degrees; ++i) {
        std::vector<int> e;
        if (i > 0)
            for (int x : pairs[i - 1])
                if (x >= 1) e.push_back(x);
        std::sort(e.begin(), e.end());
        // blocks with e = 0 are acyclic; a zero block (never produced) would need care
        for (int f = 0; f < nfree[i]; ++f) e.push_back(N);
        out.expected.push_back(e);
    }
    return out;
}

// H^i(M)/H^i(M)[p]: each Z/p^e becomes Z/p^{e-1}
inline std::vector<int> kill_p_torsion(const std::vector<int>& divs, int N) {
    std::vector<int> out;
    for (int e : divs) {
        if (e >= N) out.push_back(e);
        else if (e - 1 >= 1) out.push_back(e - 1);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace synth
