// Exact univariate polynomial arithmetic over Z and F_p: interpolation,
// separability, the Eisenstein criterion, resultants, factorization mod p,
// and Hensel root lifting.
#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbm/arith.hpp"

namespace cbm {

// ---------------------------------------------------------------------------
// IntPoly: dense exact-integer polynomial, coefficients in ascending degree.

struct IntPoly {
    std::vector<Int> c;  // c[i] is the coefficient of x^i; no trailing zeros

    IntPoly() = default;
    explicit IntPoly(std::vector<Int> coeffs) : c(std::move(coeffs)) { trim(); }
    static IntPoly from(std::initializer_list<int64_t> coeffs) {
        std::vector<Int> v;
        for (auto x : coeffs) v.emplace_back(x);
        return IntPoly(std::move(v));
    }
    static IntPoly zero() { return IntPoly{}; }
    static IntPoly constant(const Int& a) { return IntPoly(std::vector<Int>{a}); }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    int degree() const { return int(c.size()) - 1; }  // -1 for zero
    const Int& lead() const {
        if (is_zero()) throw std::logic_error("lead of zero polynomial");
        return c.back();
    }
    Int coeff(size_t i) const { return i < c.size() ? c[i] : Int(0); }

    bool operator==(const IntPoly&) const = default;

    Rat eval(const Rat& x) const {
        Rat r = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
        return r;
    }
    Int eval(const Int& x) const {
        Int r = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
        return r;
    }

    IntPoly derivative() const {
        std::vector<Int> d;
        for (size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * Int(i));
        return IntPoly(std::move(d));
    }

    // x^deg * f(1/x): coefficient reversal.
    IntPoly reversed() const {
        std::vector<Int> r(c.rbegin(), c.rend());
        return IntPoly(std::move(r));
    }

    friend IntPoly operator+(const IntPoly& a, const IntPoly& b) {
        std::vector<Int> r(std::max(a.c.size(), b.c.size()), Int(0));
        for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
        return IntPoly(std::move(r));
    }
    friend IntPoly operator-(const IntPoly& a, const IntPoly& b) {
        std::vector<Int> r(std::max(a.c.size(), b.c.size()), Int(0));
        for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
        return IntPoly(std::move(r));
    }
    friend IntPoly operator*(const IntPoly& a, const IntPoly& b) {
        if (a.is_zero() || b.is_zero()) return IntPoly{};
        std::vector<Int> r(a.c.size() + b.c.size() - 1, Int(0));
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return IntPoly(std::move(r));
    }
    friend IntPoly operator*(const Int& s, const IntPoly& a) {
        std::vector<Int> r = a.c;
        for (auto& x : r) x *= s;
        return IntPoly(std::move(r));
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::string s;
        for (int i = degree(); i >= 0; --i) {
            if (c[i] == 0) continue;
            if (!s.empty()) s += c[i] > 0 ? " + " : " - ";
            else if (c[i] < 0) s += "-";
            Int a = abs(c[i]);
            if (a != 1 || i == 0) s += a.str();
            if (i > 0) s += "u";
            if (i > 1) s += "^" + std::to_string(i);
        }
        return s;
    }
};

inline Int content(const IntPoly& f) {
    Int g = 0;
    for (const auto& x : f.c) g = gcd(g, x);
    return g;
}

// Pseudo-remainder based primitive PRS gcd over Z (result primitive, positive lead).
inline IntPoly gcd_poly(IntPoly a, IntPoly b) {
    auto primitive = [](IntPoly f) {
        if (f.is_zero()) return f;
        Int ct = content(f);
        if (f.lead() < 0) ct = -ct;
        for (auto& x : f.c) x /= ct;
        return f;
    };
    a = primitive(std::move(a));
    b = primitive(std::move(b));
    while (!b.is_zero()) {
        // pseudo-remainder of a by b
        IntPoly r = a;
        Int lb = b.lead();
        int db = b.degree();
        while (!r.is_zero() && r.degree() >= db) {
            Int lr = r.lead();
            int dr = r.degree();
            // r = lb * r - lr * x^(dr-db) * b
            std::vector<Int> t(r.c.size(), Int(0));
            for (size_t i = 0; i < r.c.size(); ++i) t[i] = lb * r.c[i];
            for (size_t i = 0; i < b.c.size(); ++i) t[i + dr - db] -= lr * b.c[i];
            r = IntPoly(std::move(t));
            if (!r.is_zero() && r.degree() == dr) throw std::logic_error("pseudo-division failed");
        }
        a = b;
        b = primitive(std::move(r));
    }
    return a;
}

// true iff gcd(f, f') is constant, i.e. f has no repeated roots over Q-bar.
inline bool is_separable(const IntPoly& f) {
    if (f.is_zero()) throw std::invalid_argument("is_separable: zero polynomial");
    if (f.degree() == 0) return true;
    return gcd_poly(f, f.derivative()).degree() == 0;
}

// Eisenstein criterion at a prime l; true certifies irreducibility over Q.
inline bool eisenstein_at(const IntPoly& f, uint64_t l) {
    if (f.degree() < 1) throw std::invalid_argument("eisenstein_at: constant polynomial");
    if (f.lead() % l == 0) return false;
    for (int i = 0; i < f.degree(); ++i)
        if (f.coeff(i) % l != 0) return false;
    return f.coeff(0) % Int(Int(l) * l) != 0;
}

// Resultant via fraction-free (Bareiss) elimination of the Sylvester matrix.
// Convention: Res(f,g) = lead(f)^deg(g) * prod g(alpha_i) over roots of f.
inline Int resultant(const IntPoly& f, const IntPoly& g) {
    if (f.is_zero() || g.is_zero()) throw std::invalid_argument("resultant: zero polynomial");
    int m = f.degree(), n = g.degree();
    if (m == 0) return pow(f.c[0], n);
    if (n == 0) return pow(g.c[0], m);
    int N = m + n;
    std::vector<std::vector<Int>> a(N, std::vector<Int>(N, Int(0)));
    for (int r = 0; r < n; ++r)
        for (int i = 0; i <= m; ++i) a[r][r + i] = f.c[m - i];
    for (int r = 0; r < m; ++r)
        for (int i = 0; i <= n; ++i) a[n + r][r + i] = g.c[n - i];
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < N - 1; ++k) {
        if (a[k][k] == 0) {
            int s = -1;
            for (int r = k + 1; r < N; ++r)
                if (a[r][k] != 0) { s = r; break; }
            if (s < 0) return 0;
            std::swap(a[k], a[s]);
            sign = -sign;
        }
        for (int i = k + 1; i < N; ++i) {
            for (int j = k + 1; j < N; ++j) {
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    return sign * a[N - 1][N - 1];
}

// ---------------------------------------------------------------------------
// FpPoly: dense polynomial over F_p, p an odd prime (p = 2 allowed for
// internal use), coefficients in [0, p).

struct FpPoly {
    uint64_t p = 0;
    std::vector<uint64_t> c;

    FpPoly() = default;
    FpPoly(uint64_t p_, std::vector<uint64_t> coeffs) : p(p_), c(std::move(coeffs)) {
        for (auto& x : c) x %= p;
        trim();
    }
    static FpPoly zero(uint64_t p) { return FpPoly(p, {}); }
    static FpPoly xpoly(uint64_t p) { return FpPoly(p, {0, 1}); }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    int degree() const { return int(c.size()) - 1; }
    uint64_t coeff(size_t i) const { return i < c.size() ? c[i] : 0; }
    uint64_t lead() const { return c.back(); }

    bool operator==(const FpPoly&) const = default;
    // deterministic order: by degree, then lexicographic on coefficients
    bool operator<(const FpPoly& o) const {
        if (degree() != o.degree()) return degree() < o.degree();
        return c < o.c;
    }

    uint64_t eval(uint64_t x) const {
        uint64_t r = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) r = addmod(mulmod(r, x, p), *it, p);
        return r;
    }

    FpPoly derivative() const {
        std::vector<uint64_t> d;
        for (size_t i = 1; i < c.size(); ++i) d.push_back(mulmod(c[i], i % p, p));
        return FpPoly(p, std::move(d));
    }

    FpPoly monic() const {
        if (is_zero() || lead() == 1) return *this;
        uint64_t inv = invmod(lead(), p);
        std::vector<uint64_t> r = c;
        for (auto& x : r) x = mulmod(x, inv, p);
        return FpPoly(p, std::move(r));
    }

    friend FpPoly operator+(const FpPoly& a, const FpPoly& b) {
        std::vector<uint64_t> r(std::max(a.c.size(), b.c.size()), 0);
        for (size_t i = 0; i < a.c.size(); ++i) r[i] = a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] = addmod(r[i], b.c[i], a.p ? a.p : b.p);
        return FpPoly(a.p ? a.p : b.p, std::move(r));
    }
    friend FpPoly operator-(const FpPoly& a, const FpPoly& b) {
        uint64_t p = a.p ? a.p : b.p;
        std::vector<uint64_t> r(std::max(a.c.size(), b.c.size()), 0);
        for (size_t i = 0; i < a.c.size(); ++i) r[i] = a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] = addmod(r[i], p - b.c[i] % p, p);
        return FpPoly(p, std::move(r));
    }
    friend FpPoly operator*(const FpPoly& a, const FpPoly& b) {
        if (a.is_zero() || b.is_zero()) return FpPoly::zero(a.p ? a.p : b.p);
        uint64_t p = a.p;
        std::vector<uint64_t> r(a.c.size() + b.c.size() - 1, 0);
        for (size_t i = 0; i < a.c.size(); ++i) {
            if (a.c[i] == 0) continue;
            for (size_t j = 0; j < b.c.size(); ++j)
                r[i + j] = addmod(r[i + j], mulmod(a.c[i], b.c[j], p), p);
        }
        return FpPoly(p, std::move(r));
    }
};

inline std::pair<FpPoly, FpPoly> divmod(const FpPoly& a, const FpPoly& b) {
    if (b.is_zero()) throw std::invalid_argument("FpPoly divmod by zero");
    uint64_t p = b.p;
    std::vector<uint64_t> r = a.c;
    int db = b.degree();
    if (a.degree() < db) return {FpPoly::zero(p), a};
    std::vector<uint64_t> q(a.degree() - db + 1, 0);
    uint64_t inv = invmod(b.lead(), p);
    for (int i = a.degree(); i >= db; --i) {
        uint64_t f = mulmod(r[i], inv, p);
        q[i - db] = f;
        if (f == 0) continue;
        for (int j = 0; j <= db; ++j)
            r[i - db + j] = addmod(r[i - db + j], p - mulmod(f, b.c[j], p) % p, p);
    }
    return {FpPoly(p, std::move(q)), FpPoly(p, std::move(r))};
}

inline FpPoly gcd_fp(FpPoly a, FpPoly b) {
    while (!b.is_zero()) {
        auto [q, r] = divmod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

inline FpPoly mulmod_fp(const FpPoly& a, const FpPoly& b, const FpPoly& mod) {
    return divmod(a * b, mod).second;
}

inline FpPoly powmod_fp(FpPoly base, Int exp, const FpPoly& mod) {
    FpPoly r(mod.p, {1});
    base = divmod(base, mod).second;
    while (exp > 0) {
        if ((exp & 1) != 0) r = mulmod_fp(r, base, mod);
        base = mulmod_fp(base, base, mod);
        exp >>= 1;
    }
    return r;
}

// Monic degree-n polynomial agreeing with `values` on all of F_p (n >= p).
// Built as x^n + Lagrange interpolant of values(c) - c^n.
inline FpPoly interpolate_monic(const std::vector<uint64_t>& values, uint64_t n) {
    uint64_t p = values.size();
    if (n < p) throw std::invalid_argument("interpolate_monic: need n >= p");
    if (!is_prime(p)) throw std::invalid_argument("interpolate_monic: #values must be prime");
    // Newton's divided differences on nodes 0,1,...,p-1.
    std::vector<uint64_t> d(p);
    for (uint64_t c = 0; c < p; ++c) {
        uint64_t cn = powmod(c, n, p);
        d[c] = addmod(values[c], p - cn, p);
    }
    std::vector<uint64_t> invs(p);
    for (uint64_t i = 1; i < p; ++i) invs[i] = invmod(i, p);
    for (uint64_t k = 1; k < p; ++k)
        for (uint64_t i = p - 1; i >= k; --i)
            d[i] = mulmod(addmod(d[i], p - d[i - 1], p), invs[k], p);
    // h(x) = sum d[k] * prod_{j<k} (x - j), accumulated by Horner on nodes.
    FpPoly h(p, {});
    for (uint64_t k = p; k-- > 0;) {
        // h = h * (x - k) + d[k]
        std::vector<uint64_t> r(h.c.size() + 1, 0);
        for (size_t i = 0; i < h.c.size(); ++i) {
            r[i + 1] = addmod(r[i + 1], h.c[i], p);
            r[i] = addmod(r[i], p - mulmod(h.c[i], k % p, p) % p, p);
        }
        r[0] = addmod(r[0], d[k], p);
        h = FpPoly(p, std::move(r));
    }
    std::vector<uint64_t> f(n + 1, 0);
    for (size_t i = 0; i < h.c.size(); ++i) f[i] = h.c[i];
    f[n] = addmod(f[n], 1, p);
    FpPoly out(p, std::move(f));
    if (out.degree() != int(n)) throw std::logic_error("interpolate_monic: degree lost");
    return out;
}

// ---------------------------------------------------------------------------
// Factorization over F_p (odd p): squarefree -> distinct-degree -> equal-degree.
// Deterministic: equal-degree splitting tries x+a for a = 0, 1, 2, ...

namespace detail {

inline void equal_degree_split(const FpPoly& f, int d, std::vector<FpPoly>& out) {
    uint64_t p = f.p;
    if (f.degree() == d) { out.push_back(f.monic()); return; }
    Int e = (pow(Int(p), d) - 1) / 2;
    for (uint64_t a = 0;; ++a) {
        FpPoly base(p, {a, 1});
        FpPoly t = powmod_fp(base, e, f);
        t = t - FpPoly(p, {1});
        FpPoly g = gcd_fp(t, f);
        if (g.degree() > 0 && g.degree() < f.degree()) {
            equal_degree_split(g, d, out);
            equal_degree_split(divmod(f, g).first, d, out);
            return;
        }
        if (a > 4 * p + 100) throw std::logic_error("equal_degree_split: no splitter found");
    }
}

}  // namespace detail

// Complete factorization into (monic irreducible, multiplicity), output
// ordered by degree then lexicographically; leading coefficient reported
// separately by callers via f.lead().
inline std::vector<std::pair<FpPoly, int>> factor_mod_p(const FpPoly& f_in) {
    if (f_in.is_zero()) throw std::invalid_argument("factor_mod_p: zero polynomial");
    uint64_t p = f_in.p;
    std::map<FpPoly, int> mult;
    std::vector<FpPoly> stack{f_in.monic()};
    while (!stack.empty()) {
        FpPoly f = stack.back();
        stack.pop_back();
        if (f.degree() <= 0) continue;
        FpPoly der = f.derivative();
        if (der.is_zero()) {
            // f = g(x^p); over F_p, g(x^p) = g(x)^p
            std::vector<uint64_t> g;
            for (size_t i = 0; i < f.c.size(); i += p) g.push_back(f.c[i]);
            FpPoly gg(p, std::move(g));
            for (uint64_t k = 0; k < p; ++k) stack.push_back(gg);
            continue;
        }
        FpPoly sf = divmod(f, gcd_fp(f, der)).first;  // squarefree part
        // distinct-degree on sf
        FpPoly x = FpPoly::xpoly(p);
        FpPoly xq = x;
        FpPoly rem = sf;
        for (int d = 1; rem.degree() > 0; ++d) {
            if (2 * d > rem.degree()) {
                std::vector<FpPoly> irr;
                irr.push_back(rem.monic());
                for (auto& h : irr) {
                    int m = 0;
                    FpPoly t = f;
                    for (;;) {
                        auto [q, r] = divmod(t, h);
                        if (!r.is_zero()) break;
                        t = q;
                        ++m;
                    }
                    mult[h] += m;
                }
                break;
            }
            xq = powmod_fp(xq, Int(p), rem);
            FpPoly g = gcd_fp(xq - x, rem);
            if (g.degree() > 0) {
                std::vector<FpPoly> irr;
                detail::equal_degree_split(g, d, irr);
                for (auto& h : irr) {
                    int m = 0;
                    FpPoly t = f;
                    for (;;) {
                        auto [q, r] = divmod(t, h);
                        if (!r.is_zero()) break;
                        t = q;
                        ++m;
                    }
                    mult[h] += m;
                }
                rem = divmod(rem, g).first;
                xq = divmod(xq, rem).second;
            }
        }
    }
    // collapse duplicate counting from the g(x^p) branch
    std::map<FpPoly, int> result;
    FpPoly check(p, {f_in.lead()});
    for (auto& [h, m] : mult) {
        // recount directly against f_in for robustness
        int k = 0;
        FpPoly t = f_in;
        for (;;) {
            auto [q, r] = divmod(t, h);
            if (!r.is_zero()) break;
            t = q;
            ++k;
        }
        if (k > 0) result[h] = k;
    }
    std::vector<std::pair<FpPoly, int>> out(result.begin(), result.end());
    // verify completeness
    FpPoly prod(p, {f_in.lead()});
    for (auto& [h, m] : out)
        for (int i = 0; i < m; ++i) prod = prod * h;
    if (!(prod == f_in)) throw std::logic_error("factor_mod_p: incomplete factorization");
    return out;
}

// ---------------------------------------------------------------------------
// Hensel lifting of simple residue roots.

struct HenselResult {
    std::vector<uint64_t> roots;         // one representative per simple root, mod p^precision
    std::vector<uint64_t> non_liftable;  // residues r mod p with f(r) = f'(r) = 0 mod p
    uint64_t modulus = 0;                // p^precision
};

// Requires p^precision < 2^63.
inline HenselResult hensel_roots(const IntPoly& f, uint64_t p, int precision) {
    if (f.is_zero()) throw std::invalid_argument("hensel_roots: zero polynomial");
    if (precision < 1) throw std::invalid_argument("hensel_roots: precision >= 1 required");
    uint64_t M = 1;
    for (int i = 0; i < precision; ++i) {
        if (M > (uint64_t(1) << 62) / p) throw std::invalid_argument("hensel_roots: p^precision too large");
        M *= p;
    }
    std::vector<uint64_t> fc, dc;
    for (auto& x : f.c) fc.push_back(to_mod(x, M));
    IntPoly d = f.derivative();
    for (auto& x : d.c) dc.push_back(to_mod(x, M));
    auto eval_mod = [&](const std::vector<uint64_t>& cs, uint64_t x, uint64_t m) {
        uint64_t r = 0;
        for (auto it = cs.rbegin(); it != cs.rend(); ++it) r = addmod(mulmod(r, x, m), *it, m);
        return r;
    };
    bool all_zero_mod_p = true;
    for (auto& x : fc)
        if (x % p != 0) { all_zero_mod_p = false; break; }
    if (all_zero_mod_p) throw std::invalid_argument("hensel_roots: f vanishes identically mod p");

    HenselResult res;
    res.modulus = M;
    for (uint64_t r = 0; r < p; ++r) {
        if (eval_mod(fc, r, p) != 0) continue;
        uint64_t dr = eval_mod(dc, r, p);
        if (dr == 0) { res.non_liftable.push_back(r); continue; }
        // Newton iteration with modulus doubling
        uint64_t x = r, m = p;
        while (m < M) {
            uint64_t m2 = (M / m >= m) ? m * m : M;
            uint64_t fx = eval_mod(fc, x, m2);
            uint64_t dfx = eval_mod(dc, x, m2);
            uint64_t inv = invmod(dfx % m2, m2);  // dfx is a unit mod p
            x = addmod(x, m2 - mulmod(fx, inv, m2), m2);
            m = m2;
        }
        res.roots.push_back(x % M);
    }
    std::sort(res.roots.begin(), res.roots.end());
    return res;
}

// ---------------------------------------------------------------------------
// Fast repeated evaluation mod m: coefficients reduced once.

struct ModPoly {
    uint64_t m = 1;
    std::vector<uint64_t> c;

    ModPoly() = default;
    ModPoly(const IntPoly& f, uint64_t mod) : m(mod) {
        c.reserve(f.c.size());
        for (auto& x : f.c) c.push_back(to_mod(x, m));
    }
    uint64_t eval(uint64_t x) const {
        uint64_t r = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) r = addmod(mulmod(r, x % m, m), *it, m);
        return r;
    }
};

}  // namespace cbm
