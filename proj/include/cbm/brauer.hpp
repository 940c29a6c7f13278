// The conic bundle X_{a,f} = { y^2 - a z^2 = f(u) } over P^1, its degeneracy
// locus, the F_2-basis of the reduced Brauer group, residues, and pointwise
// evaluation of the basis classes.
#pragma once

#include <optional>
#include <sstream>
#include <vector>

#include "cbm/arith.hpp"
#include "cbm/hilbert.hpp"
#include "cbm/polyarith.hpp"

namespace cbm {

// ---------------------------------------------------------------------------
// Separability / coprimality certificates that stay cheap for degrees ~2000:
// a single prime l with f mod l squarefree proves f squarefree over Q.

inline std::optional<uint64_t> separability_prime(const std::vector<IntPoly>& factors,
                                                  uint64_t bound = 100000) {
    for (uint64_t l = 3; l <= bound; l = next_prime(l)) {
        bool bad = false;
        for (auto& f : factors)
            if (f.lead() % l == 0) { bad = true; break; }
        if (bad) continue;
        FpPoly prod(l, {1});
        for (auto& f : factors) {
            std::vector<uint64_t> c;
            c.reserve(f.c.size());
            for (auto& x : f.c) c.push_back(to_mod(x, l));
            prod = prod * FpPoly(l, std::move(c));
        }
        if (gcd_fp(prod, prod.derivative()).degree() == 0) return l;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

struct ConicBundle {
    Rat a;                         // quadratic-twist parameter, nonzero nonsquare
    std::vector<IntPoly> factors;  // f_0, ..., f_n, pairwise distinct irreducibles
    int n = 0;                     // number of basis classes = #factors - 1
    int total_degree = 0;
    Int lead_product;              // leading coefficient of f = prod f_i
    uint64_t sep_prime = 0;        // witness prime: f mod sep_prime squarefree

    static ConicBundle make(Rat a, std::vector<IntPoly> factors) {
        if (a == 0) throw std::invalid_argument("ConicBundle: a must be nonzero");
        if (factors.empty()) throw std::invalid_argument("ConicBundle: no factors");
        ConicBundle X;
        X.a = std::move(a);
        X.n = int(factors.size()) - 1;
        X.total_degree = 0;
        X.lead_product = 1;
        for (size_t i = 0; i < factors.size(); ++i) {
            if (factors[i].degree() < 1)
                throw std::invalid_argument("ConicBundle: constant factor");
            for (size_t j = i + 1; j < factors.size(); ++j)
                if (factors[i] == factors[j])
                    throw std::invalid_argument("ConicBundle: repeated factor");
            X.total_degree += factors[i].degree();
            X.lead_product *= factors[i].lead();
        }
        auto sp = separability_prime(factors);
        if (!sp) throw std::invalid_argument("ConicBundle: no separability certificate found");
        X.sep_prime = *sp;
        X.factors = std::move(factors);
        return X;
    }

    bool infinity_degenerate() const { return total_degree % 2 != 0; }
};

struct BrauerClass {
    int index;  // i in {1,...,n}, identifying alpha_i = (a, f_i)
};

// Element of B-hat, i.e. F_2^n; bit i-1 <-> pairing against alpha_i.
struct CharVector {
    int n = 0;
    uint32_t bits = 0;
    bool operator==(const CharVector&) const = default;
    bool operator<(const CharVector& o) const { return bits < o.bits; }
};

// ---------------------------------------------------------------------------
// Degeneracy locus: the closed points of P^1 with singular fiber.

struct DegeneracyLocus {
    std::vector<std::pair<IntPoly, int>> points;  // (defining polynomial, degree)
    bool infinity_in_locus = false;
};

inline DegeneracyLocus degeneracy_locus(const ConicBundle& X) {
    DegeneracyLocus D;
    for (auto& f : X.factors) D.points.emplace_back(f, f.degree());
    D.infinity_in_locus = X.infinity_degenerate();
    return D;
}

// ---------------------------------------------------------------------------
// Certified nonsquareness of a in the residue field Q[u]/(f).

struct NonsquareCert {
    enum class Method { local_witness, eisenstein_split };
    Method method;
    uint64_t ell = 0;   // witness prime
    uint64_t root = 0;  // simple root of f mod ell (local_witness only)

    std::string str() const {
        std::ostringstream os;
        if (method == Method::local_witness)
            os << "local witness: simple root " << root << " of f mod " << ell
               << ", a nonsquare mod " << ell;
        else
            os << "Eisenstein at " << ell << " with a a square in Q_" << ell;
        return os.str();
    }
};

struct NonsquareOptions {
    uint64_t witness_bound = 2000;
    std::vector<uint64_t> eisenstein_primes{2, 3, 5, 7};
};

inline bool is_rational_square(const Rat& x) {
    if (x < 0) return false;
    Int nu = numerator(x), de = denominator(x);
    Int rn = sqrt(nu), rd = sqrt(de);
    return rn * rn == nu && rd * rd == de;
}

// Sound, possibly inconclusive: a witness prime ell with f mod ell separable
// and admitting a root, with a a nonsquare mod ell. By Dedekind, the root
// gives a degree-1 prime of Q[u]/(f) with residue field F_ell; a square in
// the field would reduce to a square there.
inline std::optional<NonsquareCert> certify_nonsquare(const Rat& a, const IntPoly& f,
                                                      const NonsquareOptions& opts = {}) {
    if (a == 0) throw std::invalid_argument("certify_nonsquare: a = 0");
    if (is_rational_square(a)) return std::nullopt;  // squares defeat every witness
    Int bad = abs(numerator(a)) * denominator(a) * f.lead();
    for (uint64_t l = 3; l <= opts.witness_bound; l = next_prime(l)) {
        if (bad % l == 0) continue;
        if (legendre(Int(to_mod(numerator(a), l)) * Int(to_mod(denominator(a), l)), l) != -1)
            continue;
        std::vector<uint64_t> c;
        c.reserve(f.c.size());
        for (auto& x : f.c) c.push_back(to_mod(x, l));
        FpPoly fl(l, std::move(c));
        if (gcd_fp(fl, fl.derivative()).degree() != 0) continue;
        for (uint64_t r = 0; r < l; ++r) {
            if (fl.eval(r) == 0)
                return NonsquareCert{NonsquareCert::Method::local_witness, l, r};
        }
    }
    // Fallback: f Eisenstein at e and a in Q_e^x2 make Q(sqrt(a)) split at e,
    // which is impossible inside the totally ramified field Q_e[u]/(f).
    for (uint64_t e : opts.eisenstein_primes) {
        if (f.degree() < 1 || !eisenstein_at(f, e)) continue;
        if (square_class(a, Place::prime(e)).trivial())
            return NonsquareCert{NonsquareCert::Method::eisenstein_split, e, 0};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// The F_2-basis alpha_1, ..., alpha_n of the reduced Brauer group.

struct BrauerBasis {
    std::vector<BrauerClass> classes;              // indices 1..n
    std::vector<NonsquareCert> certificates;       // one per factor f_0..f_n
    // The single relation: alpha_0 + alpha_1 + ... + alpha_n = 0.
    std::string relation = "sum of (a,f_i) over i = 0..n is 0";
};

inline BrauerBasis brauer_basis(const ConicBundle& X, const NonsquareOptions& opts = {}) {
    BrauerBasis B;
    for (auto& f : X.factors) {
        if (f.degree() % 2 != 0)
            throw std::invalid_argument("brauer_basis: factor of odd degree");
        auto cert = certify_nonsquare(X.a, f, opts);
        if (!cert)
            throw std::invalid_argument("brauer_basis: missing nonsquare certificate for a factor");
        B.certificates.push_back(*cert);
    }
    for (int i = 1; i <= X.n; ++i) B.classes.push_back(BrauerClass{i});
    return B;
}

// ---------------------------------------------------------------------------
// Residue of (a, g) at a closed point t of A^1: the class of a^{v_t(g)}.

struct ResidueClass {
    int val_parity = 0;  // v_t(g) mod 2
    std::optional<NonsquareCert> nonsquare_at_t;  // certificate for a in k(t)
    bool nontrivial() const { return val_parity == 1 && nonsquare_at_t.has_value(); }
};

// Multiplicity of the irreducible t in a nonzero integer polynomial,
// by exact division over Q.
inline int multiplicity(const IntPoly& g, const IntPoly& t) {
    if (g.is_zero()) throw std::invalid_argument("multiplicity: zero polynomial");
    // rational-coefficient long division; exact when remainder vanishes
    auto try_divide = [&](const std::vector<Rat>& num) -> std::optional<std::vector<Rat>> {
        std::vector<Rat> r = num;
        int dt = t.degree();
        if (int(r.size()) - 1 < dt) return std::nullopt;
        std::vector<Rat> q(r.size() - dt, Rat(0));
        Rat lt(t.lead());
        for (int i = int(r.size()) - 1; i >= dt; --i) {
            Rat f = r[i] / lt;
            q[i - dt] = f;
            if (f == 0) continue;
            for (int j = 0; j <= dt; ++j) r[i - dt + j] -= f * Rat(t.coeff(j));
        }
        for (int j = 0; j < dt; ++j)
            if (r[j] != 0) return std::nullopt;
        return q;
    };
    std::vector<Rat> cur;
    for (auto& x : g.c) cur.emplace_back(x);
    int m = 0;
    for (;;) {
        auto q = try_divide(cur);
        if (!q) return m;
        cur = *q;
        while (!cur.empty() && cur.back() == 0) cur.pop_back();
        ++m;
        if (cur.empty()) throw std::logic_error("multiplicity: division degenerated");
    }
}

inline ResidueClass residue_at(const Rat& a, const IntPoly& g_num, const IntPoly& g_den,
                               const IntPoly& t, const NonsquareOptions& opts = {}) {
    if (g_num.is_zero() || g_den.is_zero())
        throw std::invalid_argument("residue_at: zero rational function");
    int v = multiplicity(g_num, t) - multiplicity(g_den, t);
    ResidueClass r;
    r.val_parity = ((v % 2) + 2) % 2;
    if (r.val_parity) r.nonsquare_at_t = certify_nonsquare(a, t, opts);
    return r;
}

// ---------------------------------------------------------------------------
// Pointwise evaluation of alpha_i at a smooth fiber over P^1(Q_v).
// c = nullopt encodes the point at infinity.

inline HalfInv evaluate_class(const ConicBundle& X, int i, const std::optional<Rat>& c,
                              const Place& v) {
    if (i < 1 || i > X.n) throw std::invalid_argument("evaluate_class: index out of range");
    const IntPoly& fi = X.factors[i];
    if (!c) {
        if (X.infinity_degenerate())
            throw std::invalid_argument("evaluate_class: fiber at infinity is degenerate");
        if (fi.degree() % 2 != 0)
            throw std::invalid_argument("evaluate_class: odd-degree factor at infinity");
        return inv(X.a, Rat(fi.lead()), v);
    }
    for (auto& f : X.factors)
        if (f.eval(*c) == 0)
            throw std::invalid_argument("evaluate_class: point on degenerate fiber");
    return inv(X.a, fi.eval(*c), v);
}

// Full character vector at a smooth-fiber point, with the norm relation
// sum_{i=0..n} inv(a, f_i(c)) = 0 asserted whenever the fiber is solvable.
// Returns nullopt when the fiber has no Q_v-point.
inline std::optional<CharVector> evaluate_vector(const ConicBundle& X, const std::optional<Rat>& c,
                                                 const Place& v) {
    std::vector<HalfInv> invs;
    HalfInv total;
    if (!c) {
        if (X.infinity_degenerate())
            throw std::invalid_argument("evaluate_vector: fiber at infinity is degenerate");
        for (auto& f : X.factors) {
            if (f.degree() % 2 != 0)
                throw std::invalid_argument("evaluate_vector: odd-degree factor at infinity");
            invs.push_back(inv(X.a, Rat(f.lead()), v));
            total = total + invs.back();
        }
    } else {
        for (auto& f : X.factors) {
            Rat val = f.eval(*c);
            if (val == 0) throw std::invalid_argument("evaluate_vector: point on degenerate fiber");
            invs.push_back(inv(X.a, val, v));
            total = total + invs.back();
        }
    }
    // fiber solvable iff (a, f(c))_v = +1, i.e. the total invariant vanishes
    if (!total.is_zero()) return std::nullopt;
    CharVector cv{X.n, 0};
    for (int i = 1; i <= X.n; ++i)
        if (invs[i].half) cv.bits |= 1u << (i - 1);
    return cv;
}

}  // namespace cbm
