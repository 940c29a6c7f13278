// Test-side brute-force oracles, independent of the closed-form formulas.
#pragma once

#include <map>

#include "cbm/hilbert.hpp"

namespace cbm_test {

using cbm::Int;
using cbm::Place;
using cbm::Rat;

// Brute-force solvability of x^2 - a y^2 - b z^2 = 0 over Q_v: search
// primitive solutions (one coordinate scaled to 1) modulo p^N and certify
// lifting by the Hensel slope criterion. Memoized on square-class pairs.
inline int hilbert_oracle(const Rat& a, const Rat& b, const Place& v) {
    if (v.real) return (a < 0 && b < 0) ? -1 : 1;
    uint64_t p = v.p;
    int N = (p == 2) ? 6 : 3;
    uint64_t M = 1;
    for (int i = 0; i < N; ++i) M *= p;

    static std::map<std::tuple<uint64_t, int, int, int, int>, int> cache;
    cbm::SquareClassQv ca = cbm::square_class(a, v), cb = cbm::square_class(b, v);
    auto key = std::make_tuple(p, ca.val_parity, ca.unit, cb.val_parity, cb.unit);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    // same square class, denominators cleared
    uint64_t A = cbm::to_mod(cbm::numerator(a) * cbm::denominator(a), M);
    uint64_t B = cbm::to_mod(cbm::numerator(b) * cbm::denominator(b), M);

    auto valp = [&](uint64_t x) {
        if (x == 0) return N;
        int r = 0;
        while (x % p == 0) { x /= p; ++r; }
        return r;
    };
    auto slope_ok = [&](uint64_t x, uint64_t y, uint64_t z) {
        uint64_t f = cbm::addmod(
            cbm::mulmod(x, x, M),
            M - cbm::addmod(cbm::mulmod(A, cbm::mulmod(y, y, M), M),
                            cbm::mulmod(B, cbm::mulmod(z, z, M), M), M),
            M);
        if (f != 0) return false;
        int g = std::min({valp(cbm::mulmod(2, x, M)),
                          valp(cbm::mulmod(2, cbm::mulmod(A, y, M), M)),
                          valp(cbm::mulmod(2, cbm::mulmod(B, z, M), M))});
        return 2 * g < N;
    };

    int result = -1;
    for (uint64_t s = 0; s < M && result < 0; ++s)
        for (uint64_t t = 0; t < M; ++t) {
            if (slope_ok(1, s, t) || slope_ok(s, 1, t) || slope_ok(s, t, 1)) {
                result = 1;
                break;
            }
        }
    cache[key] = result;
    return result;
}

inline std::vector<int> squarefree_values(int bound) {
    std::vector<int> out;
    for (int m = 1; m <= bound; ++m) {
        bool sf = true;
        for (int d = 2; d * d <= m; ++d)
            if (m % (d * d) == 0) { sf = false; break; }
        if (sf) {
            out.push_back(m);
            out.push_back(-m);
        }
    }
    return out;
}

}  // namespace cbm_test
