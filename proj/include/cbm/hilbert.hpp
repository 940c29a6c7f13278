// Hilbert symbols (a,b)_v over Q_v, local invariants in (1/2)Z/Z, conic
// solvability, and the product-formula checker.
#pragma once

#include <map>
#include <sstream>
#include <vector>

#include "cbm/arith.hpp"

namespace cbm {

// Invariant of a quaternion class: 0 or 1/2, stored as 0 or 1 half-units.
struct HalfInv {
    int half = 0;  // 0 or 1

    HalfInv operator+(const HalfInv& o) const { return HalfInv{(half + o.half) & 1}; }
    bool operator==(const HalfInv&) const = default;
    bool is_zero() const { return half == 0; }
};

namespace detail {

// Components of the mod-8 unit formulas at p = 2.
inline int eps2(uint64_t u) { return int(((u % 8) - 1) / 2) & 1; }   // (u-1)/2 mod 2
inline int omega2(uint64_t u) { return (u % 8 == 1 || u % 8 == 7) ? 0 : 1; }  // (u^2-1)/8 mod 2

}  // namespace detail

// Hilbert symbol (a,b)_v: +1 iff x^2 - a y^2 - b z^2 = 0 has a nonzero
// Q_v-solution. Closed-form local formulas for every place.
inline int hilbert_symbol(const Rat& a, const Rat& b, const Place& v) {
    if (a == 0 || b == 0) throw std::invalid_argument("hilbert_symbol: zero argument");
    if (v.real) return (a < 0 && b < 0) ? -1 : 1;
    uint64_t p = v.p;
    int64_t alpha = val_p(a, p), beta = val_p(b, p);
    if (p != 2) {
        uint64_t u = unit_part_mod(a, p, p);
        uint64_t w = unit_part_mod(b, p, p);
        int s = 1;
        if ((alpha & 1) && (beta & 1) && ((p - 1) / 2) % 2 == 1) s = -s;  // (-1)^(ab eps(p))
        if (beta & 1) s *= legendre(Int(u), p);
        if (alpha & 1) s *= legendre(Int(w), p);
        return s;
    }
    uint64_t u = unit_part_mod(a, 2, 8);
    uint64_t w = unit_part_mod(b, 2, 8);
    int e = detail::eps2(u) * detail::eps2(w);
    e += int(alpha & 1) * detail::omega2(w);
    e += int(beta & 1) * detail::omega2(u);
    return (e & 1) ? -1 : 1;
}

inline HalfInv inv(const Rat& a, const Rat& b, const Place& v) {
    return HalfInv{hilbert_symbol(a, b, v) == 1 ? 0 : 1};
}

// Symbol from precomputed square classes (both at the same place).
inline int hilbert_symbol(const SquareClassQv& a, const SquareClassQv& b) {
    if (!(a.place == b.place)) throw std::invalid_argument("hilbert_symbol: place mismatch");
    const Place& v = a.place;
    if (v.real) return (a.unit < 0 && b.unit < 0) ? -1 : 1;
    if (v.p != 2) {
        int s = 1;
        if (a.val_parity && b.val_parity && ((v.p - 1) / 2) % 2 == 1) s = -s;
        if (b.val_parity && a.unit == -1) s = -s;
        if (a.val_parity && b.unit == -1) s = -s;
        return s;
    }
    int e = detail::eps2(a.unit) * detail::eps2(b.unit);
    e += a.val_parity * detail::omega2(b.unit);
    e += b.val_parity * detail::omega2(a.unit);
    return (e & 1) ? -1 : 1;
}

inline HalfInv inv(const SquareClassQv& a, const SquareClassQv& b) {
    return HalfInv{hilbert_symbol(a, b) == 1 ? 0 : 1};
}

// true iff y^2 - a z^2 = b has a Q_v-point.
inline bool conic_has_local_point(const Rat& a, const Rat& b, const Place& v) {
    return hilbert_symbol(a, b, v) == 1;
}

// ---------------------------------------------------------------------------
// Product formula over the relevant places: real, 2, and primes dividing
// the numerator or denominator of a or b. Symbols are +1 everywhere else.

struct ProductFormulaReport {
    std::vector<std::pair<Place, HalfInv>> table;
    int sum_halves = 0;  // total in half-units mod 2; must be 0
    bool ok() const { return sum_halves == 0; }

    std::string str() const {
        std::ostringstream os;
        for (auto& [v, h] : table) {
            if (v.real) os << "real";
            else os << v.p;
            os << ": " << (h.half ? "1/2" : "0") << "\n";
        }
        os << "sum: " << (sum_halves ? "1/2" : "0") << "\n";
        return os.str();
    }
};

inline std::vector<uint64_t> prime_support(const Rat& x) {
    std::vector<uint64_t> out;
    for (Int n : {Int(abs(numerator(x))), denominator(x)}) {
        for (uint64_t p = 2; Int(p) * p <= n; p = (p == 2 ? 3 : p + 2)) {
            if (n % p == 0) {
                out.push_back(p);
                while (n % p == 0) n /= p;
            }
        }
        if (n > 1) out.push_back(n.convert_to<uint64_t>());
    }
    return out;
}

inline ProductFormulaReport check_product_formula(const Rat& a, const Rat& b) {
    if (a == 0 || b == 0) throw std::invalid_argument("check_product_formula: zero argument");
    std::vector<uint64_t> primes{2};
    for (const Rat& x : {a, b})
        for (uint64_t p : prime_support(x)) primes.push_back(p);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());

    ProductFormulaReport rep;
    HalfInv total;
    HalfInv hr = inv(a, b, Place::make_real());
    rep.table.emplace_back(Place::make_real(), hr);
    total = total + hr;
    for (uint64_t p : primes) {
        Place v = Place::prime(p);
        HalfInv h = inv(a, b, v);
        rep.table.emplace_back(v, h);
        total = total + h;
    }
    rep.sum_halves = total.half;
    if (!rep.ok())
        throw std::logic_error("product formula violated (implementation bug):\n" + rep.str());
    return rep;
}

}  // namespace cbm
