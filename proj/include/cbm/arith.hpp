// Exact modular arithmetic primitives: primality, Legendre symbols,
// modular square roots, CRT, and square classes of Q_v^x / Q_v^x2.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cbm {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int numerator(const Rat& x) { return boost::multiprecision::numerator(x); }
inline Int denominator(const Rat& x) { return boost::multiprecision::denominator(x); }

// ---------------------------------------------------------------------------
// 64-bit modular helpers

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

inline uint64_t addmod(uint64_t a, uint64_t b, uint64_t m) {
    a %= m; b %= m;
    uint64_t s = a + b;
    if (s < a || s >= m) s -= m;
    return s;
}

inline uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m) {
    if (m == 1) return 0;
    uint64_t r = 1;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

// Reduce a (possibly negative, possibly large) integer into [0, m).
inline uint64_t to_mod(const Int& a, uint64_t m) {
    Int r = a % Int(m);
    if (r < 0) r += m;
    return r.convert_to<uint64_t>();
}

inline int64_t floor_mod(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// Extended gcd: returns g and sets x with a*x == g (mod m); exact over Int.
inline Int egcd(const Int& a, const Int& b, Int& x, Int& y) {
    if (b == 0) { x = (a < 0) ? -1 : 1; y = 0; return a < 0 ? Int(-a) : a; }
    Int x1, y1;
    Int g = egcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

inline uint64_t invmod(uint64_t a, uint64_t m) {
    Int x, y;
    Int g = egcd(Int(a % m), Int(m), x, y);
    if (g != 1) throw std::invalid_argument("invmod: arguments not coprime");
    return to_mod(x, m);
}

// ---------------------------------------------------------------------------
// Primality: deterministic Miller-Rabin, valid for all inputs < 2^63.

inline bool is_prime(uint64_t m) {
    if (m < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (m == p) return true;
        if (m % p == 0) return false;
    }
    uint64_t d = m - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // Witness set proven sufficient for m < 3.3 * 10^24 (covers 2^63).
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod(a, d, m);
        if (x == 1 || x == m - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, m);
            if (x == m - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

inline uint64_t next_prime(uint64_t m) {
    uint64_t c = m + 1;
    while (!is_prime(c)) ++c;
    return c;
}

// ---------------------------------------------------------------------------
// Legendre symbol (a|p), p an odd prime.

inline int legendre(const Int& a, uint64_t p) {
    if (p == 2 || !is_prime(p)) throw std::invalid_argument("legendre: p must be an odd prime");
    uint64_t r = to_mod(a, p);
    if (r == 0) return 0;
    uint64_t e = powmod(r, (p - 1) / 2, p);
    return e == 1 ? 1 : -1;
}

inline int legendre(int64_t a, uint64_t p) { return legendre(Int(a), p); }

// Tonelli-Shanks; returns the smaller of the two square roots of a mod p,
// or nullopt when a is a nonresidue.
inline std::optional<uint64_t> sqrt_mod(const Int& a, uint64_t p) {
    if (p == 2) {
        uint64_t r = to_mod(a, 2);
        return r;  // 0 or 1, both are their own square
    }
    uint64_t n = to_mod(a, p);
    if (n == 0) return 0;
    if (legendre(Int(n), p) == -1) return std::nullopt;
    uint64_t q = p - 1;
    int s = 0;
    while ((q & 1) == 0) { q >>= 1; ++s; }
    uint64_t root;
    if (s == 1) {
        root = powmod(n, (p + 1) / 4, p);
    } else {
        uint64_t z = 2;
        while (legendre(Int(z), p) != -1) ++z;
        uint64_t c = powmod(z, q, p);
        uint64_t x = powmod(n, (q + 1) / 2, p);
        uint64_t t = powmod(n, q, p);
        int m = s;
        while (t != 1) {
            uint64_t tt = t;
            int i = 0;
            while (tt != 1) { tt = mulmod(tt, tt, p); ++i; }
            uint64_t b = powmod(c, 1ull << (m - i - 1), p);
            x = mulmod(x, b, p);
            c = mulmod(b, b, p);
            t = mulmod(t, c, p);
            m = i;
        }
        root = x;
    }
    return std::min(root, p - root);
}

// ---------------------------------------------------------------------------
// CRT: least nonnegative x with x = r_i mod m_i; moduli pairwise coprime.

inline Int crt(const std::vector<std::pair<Int, Int>>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("crt: empty system");
    Int x = 0, m = 1;
    for (const auto& [r, mi] : pairs) {
        if (mi < 1) throw std::invalid_argument("crt: modulus must be >= 1");
        Int u, v;
        Int g = egcd(m, mi, u, v);
        if (g != 1) throw std::invalid_argument("crt: moduli not pairwise coprime");
        // x' = x + m * ((r - x) * m^-1 mod mi)
        Int t = ((r - x) % mi) * u % mi;
        x += m * t;
        m *= mi;
        x %= m;
        if (x < 0) x += m;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Places of Q and square classes of Q_v^x / Q_v^x2.

struct Place {
    bool real = false;
    uint64_t p = 0;  // valid iff !real

    static Place make_real() { return Place{true, 0}; }
    static Place prime(uint64_t p) {
        if (!is_prime(p)) throw std::invalid_argument("Place: p must be prime");
        return Place{false, p};
    }
    bool operator==(const Place&) const = default;
};

// Canonical square-class data at a place:
//   odd p: val_parity in {0,1}, unit = 1 (residue) or -1 (nonresidue)
//   p = 2: val_parity in {0,1}, unit in {1,3,5,7} (unit part mod 8)
//   real:  unit = sign, val_parity unused (0)
struct SquareClassQv {
    Place place;
    int val_parity = 0;
    int unit = 1;

    bool trivial() const { return val_parity == 0 && unit == 1; }
    bool operator==(const SquareClassQv&) const = default;

    // Group law in Q_v^x / Q_v^x2.
    SquareClassQv operator*(const SquareClassQv& o) const {
        if (!(place == o.place)) throw std::invalid_argument("square class: place mismatch");
        SquareClassQv r{place, 0, 1};
        if (place.real) { r.unit = unit * o.unit; return r; }
        r.val_parity = (val_parity + o.val_parity) & 1;
        if (place.p == 2) r.unit = int((unit * o.unit) % 8);
        else r.unit = unit * o.unit;
        return r;
    }
};

// Valuation of a nonzero rational at p, and its unit part mod p^k.
inline int64_t val_p(const Int& n, uint64_t p) {
    if (n == 0) throw std::invalid_argument("val_p: zero");
    Int m = n;
    int64_t v = 0;
    while (m % p == 0) { m /= p; ++v; }
    return v;
}

inline int64_t val_p(const Rat& x, uint64_t p) {
    return val_p(numerator(x), p) - val_p(denominator(x), p);
}

// Unit part of x at p, reduced mod m (m a power of p is typical; any m
// coprime to the reduced denominator works).
inline uint64_t unit_part_mod(const Rat& x, uint64_t p, uint64_t m) {
    Int nu = numerator(x), de = denominator(x);
    while (nu % p == 0) nu /= p;
    while (de % p == 0) de /= p;
    uint64_t a = to_mod(nu, m);
    uint64_t b = to_mod(de, m);
    return mulmod(a, invmod(b, m), m);
}

inline SquareClassQv square_class(const Rat& x, const Place& v) {
    if (x == 0) throw std::invalid_argument("square_class: zero");
    SquareClassQv c{v, 0, 1};
    if (v.real) {
        c.unit = x > 0 ? 1 : -1;
        return c;
    }
    int64_t val = val_p(x, v.p);
    c.val_parity = int(((val % 2) + 2) % 2);
    if (v.p == 2) {
        c.unit = int(unit_part_mod(x, 2, 8));
    } else {
        uint64_t u = unit_part_mod(x, v.p, v.p);
        c.unit = legendre(Int(u), v.p);
    }
    return c;
}

// Square class of p^val * u where u is a unit known mod p (odd) / mod 8.
inline SquareClassQv square_class_from_parts(const Place& v, int64_t val, uint64_t unit_mod) {
    SquareClassQv c{v, int(((val % 2) + 2) % 2), 1};
    if (v.p == 2) c.unit = int(unit_mod % 8);
    else c.unit = legendre(Int(unit_mod), v.p);
    return c;
}

}  // namespace cbm
