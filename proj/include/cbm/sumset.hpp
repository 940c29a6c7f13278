// F_2^n combinatorics: Minkowski sums, the obstruction dictionary,
// independent transversals (Rado), subspace sums, and the sharpness example.
#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cbm/arith.hpp"

namespace cbm {

// Subset of F_2^n; vectors encoded as bitmasks (coordinate i <-> bit i),
// kept sorted for deterministic serialization.
struct F2Subset {
    int n = 0;
    std::vector<uint32_t> members;

    F2Subset() = default;
    F2Subset(int n_, std::vector<uint32_t> m) : n(n_), members(std::move(m)) {
        normalize();
    }
    void normalize() {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        for (uint32_t v : members)
            if (n < 32 && (v >> n) != 0) throw std::invalid_argument("F2Subset: vector out of range");
    }
    bool contains(uint32_t v) const {
        return std::binary_search(members.begin(), members.end(), v);
    }
    size_t size() const { return members.size(); }
    bool operator==(const F2Subset&) const = default;
};

inline int f2_rank(const std::vector<uint32_t>& vecs) {
    std::vector<uint32_t> basis;
    for (uint32_t v : vecs) {
        for (uint32_t b : basis) v = std::min(v, v ^ b);
        if (v) basis.push_back(v);
    }
    return int(basis.size());
}

inline F2Subset minkowski_sum(const std::vector<F2Subset>& sets) {
    if (sets.empty()) throw std::invalid_argument("minkowski_sum: empty list");
    int n = sets[0].n;
    for (auto& s : sets)
        if (s.n != n) throw std::invalid_argument("minkowski_sum: dimension mismatch");
    std::vector<char> cur(size_t(1) << n, 0), next;
    cur[0] = 1;
    bool first = true;
    for (auto& s : sets) {
        if (first) {
            std::fill(cur.begin(), cur.end(), 0);
            for (uint32_t v : s.members) cur[v] = 1;
            first = false;
            continue;
        }
        next.assign(size_t(1) << n, 0);
        for (uint32_t x = 0; x < (uint32_t(1) << n); ++x) {
            if (!cur[x]) continue;
            for (uint32_t v : s.members) next[x ^ v] = 1;
        }
        cur.swap(next);
    }
    std::vector<uint32_t> out;
    for (uint32_t x = 0; x < (uint32_t(1) << n); ++x)
        if (cur[x]) out.push_back(x);
    return F2Subset(n, std::move(out));
}

// ---------------------------------------------------------------------------
// Subspace enumeration via reduced row echelon generator matrices, n <= 8.
// Returned as basis lists, lexicographic by (dimension, pivot set, entries).

inline void enumerate_subspaces(int n, const std::function<void(const std::vector<uint32_t>&)>& emit) {
    if (n > 8) throw std::invalid_argument("subspace enumeration bounded to n <= 8");
    // pivot sets as bitmask over columns 0..n-1 (column i <-> bit i)
    for (uint32_t piv = 0; piv < (uint32_t(1) << n); ++piv) {
        std::vector<int> pivots;
        for (int i = 0; i < n; ++i)
            if (piv & (1u << i)) pivots.push_back(i);
        int k = int(pivots.size());
        if (k == 0) { std::vector<uint32_t> empty; emit(empty); continue; }
        // free positions: row r may have entries in columns > pivots[r], non-pivot
        std::vector<std::pair<int, int>> free_pos;  // (row, column)
        for (int r = 0; r < k; ++r)
            for (int col = pivots[r] + 1; col < n; ++col)
                if (!(piv & (1u << col))) free_pos.emplace_back(r, col);
        uint64_t total = uint64_t(1) << free_pos.size();
        for (uint64_t mask = 0; mask < total; ++mask) {
            std::vector<uint32_t> basis(k, 0);
            for (int r = 0; r < k; ++r) basis[r] = 1u << pivots[r];
            for (size_t t = 0; t < free_pos.size(); ++t)
                if (mask & (uint64_t(1) << t)) basis[free_pos[t].first] |= 1u << free_pos[t].second;
            emit(basis);
        }
    }
}

inline std::vector<uint32_t> span_of(const std::vector<uint32_t>& basis) {
    std::vector<uint32_t> span{0};
    for (uint32_t b : basis) {
        size_t sz = span.size();
        for (size_t i = 0; i < sz; ++i) span.push_back(span[i] ^ b);
    }
    std::sort(span.begin(), span.end());
    return span;
}

// ---------------------------------------------------------------------------
// Obstruction dictionary.

struct ObstructionReport {
    bool obstructed = false;              // 0 not in S
    bool full_group_required = false;     // S = F_2^n \ {0}
    std::vector<std::vector<uint32_t>> disjoint_subspaces;  // nontrivial H with H /\ S empty, as spans
    int min_generators = 0;               // n - max dim of subspace disjoint from S (0 if not obstructed)
};

inline ObstructionReport obstruction_verdict(const F2Subset& S) {
    if (S.members.empty()) throw std::invalid_argument("obstruction_verdict: empty S");
    if (S.n > 8) throw std::invalid_argument("obstruction_verdict: n > 8 refused");
    ObstructionReport rep;
    rep.obstructed = !S.contains(0);
    rep.full_group_required = (S.size() == (size_t(1) << S.n) - 1) && rep.obstructed;
    int max_disjoint_dim = -1;
    enumerate_subspaces(S.n, [&](const std::vector<uint32_t>& basis) {
        auto span = span_of(basis);
        bool disjoint = true;
        for (uint32_t v : span)
            if (S.contains(v)) { disjoint = false; break; }
        if (disjoint) {
            if (int(basis.size()) > max_disjoint_dim) max_disjoint_dim = int(basis.size());
            if (!basis.empty()) rep.disjoint_subspaces.push_back(span);
        }
    });
    if (rep.obstructed) {
        // {0} itself is disjoint from S here, so max_disjoint_dim >= 0
        rep.min_generators = S.n - max_disjoint_dim;
    }
    std::sort(rep.disjoint_subspaces.begin(), rep.disjoint_subspaces.end());
    return rep;
}

// ---------------------------------------------------------------------------
// Rado transversals and subspace sums.

// Backtracking with rank pruning for a tuple (v_i in S_i) of linearly
// independent vectors.
inline std::optional<std::vector<uint32_t>> independent_transversal(const std::vector<F2Subset>& sets) {
    size_t t = sets.size();
    std::vector<uint32_t> chosen(t, 0), reduced;  // reduced echelon basis of chosen
    std::function<bool(size_t)> rec = [&](size_t i) -> bool {
        if (i == t) return true;
        for (uint32_t v : sets[i].members) {
            uint32_t r = v;
            for (uint32_t b : reduced) r = std::min(r, r ^ b);
            if (r == 0) continue;
            reduced.push_back(r);
            chosen[i] = v;
            if (rec(i + 1)) return true;
            reduced.pop_back();
        }
        return false;
    };
    for (auto& s : sets)
        if (s.members.empty()) throw std::invalid_argument("independent_transversal: empty set");
    if (rec(0)) return chosen;
    return std::nullopt;
}

inline bool is_subspace(const F2Subset& S) {
    if (!S.contains(0)) return false;
    for (uint32_t a : S.members)
        for (uint32_t b : S.members)
            if (!S.contains(a ^ b)) return false;
    return true;
}

struct SubspaceSum {
    std::vector<size_t> J;  // indices into the input family
    F2Subset subspace;
};

// Dichotomy partner of independent_transversal: when every transversal is
// dependent, some subfamily sums to a nontrivial subspace. Searches J by
// increasing size, then lexicographically.
inline std::optional<SubspaceSum> find_subspace_sum(const std::vector<F2Subset>& sets) {
    for (auto& s : sets) {
        if (!s.contains(0) || s.size() < 2)
            throw std::invalid_argument("find_subspace_sum: need 0 in S_i and #S_i >= 2");
    }
    if (independent_transversal(sets)) return std::nullopt;
    size_t t = sets.size();
    std::vector<size_t> J;
    std::function<std::optional<SubspaceSum>(size_t, size_t)> rec =
        [&](size_t start, size_t remaining) -> std::optional<SubspaceSum> {
        if (remaining == 0) {
            std::vector<F2Subset> fam;
            for (size_t j : J) fam.push_back(sets[j]);
            F2Subset sum = minkowski_sum(fam);
            if (sum.size() >= 2 && is_subspace(sum)) return SubspaceSum{J, sum};
            return std::nullopt;
        }
        for (size_t i = start; i + remaining <= t + 0 && i < t; ++i) {
            J.push_back(i);
            if (auto r = rec(i + 1, remaining - 1)) return r;
            J.pop_back();
        }
        return std::nullopt;
    };
    for (size_t sz = 1; sz <= t; ++sz) {
        J.clear();
        if (auto r = rec(0, sz)) return r;
    }
    // The proposition guarantees existence; reaching here is a bug.
    throw std::logic_error("find_subspace_sum: dichotomy violated");
}

// ---------------------------------------------------------------------------
// The sharpness example: n-1 copies of {0, e_1, ..., e_n} sum to
// F_2^n minus the all-ones vector.

struct SharpExample {
    std::vector<F2Subset> sets;
    uint32_t excluded;
};

inline SharpExample sharp_example(int n) {
    if (n < 1 || n > 16) throw std::invalid_argument("sharp_example: need 1 <= n <= 16");
    std::vector<uint32_t> base{0};
    for (int i = 0; i < n; ++i) base.push_back(1u << i);
    F2Subset S(n, base);
    SharpExample ex;
    for (int i = 0; i < n - 1; ++i) ex.sets.push_back(S);
    ex.excluded = (n < 32) ? ((uint32_t(1) << n) - 1) : ~uint32_t(0);
    // self-verify (degenerate t = 0: empty sum is {0} = F_2^1 minus {1})
    std::vector<char> sum(size_t(1) << n, 0);
    sum[0] = 1;
    for (auto& s : ex.sets) {
        std::vector<char> next(size_t(1) << n, 0);
        for (uint32_t x = 0; x < (uint32_t(1) << n); ++x) {
            if (!sum[x]) continue;
            for (uint32_t v : s.members) next[x ^ v] = 1;
        }
        sum.swap(next);
    }
    for (uint32_t x = 0; x < (uint32_t(1) << n); ++x) {
        bool expect = (x != ex.excluded);
        if (bool(sum[x]) != expect) throw std::logic_error("sharp_example: self-verification failed");
    }
    return ex;
}

// Checks the implication: sum of the S_i = F_2^n \ {v}  =>  t <= n-1.
// A false return indicates a bug, since the bound is a theorem.
inline bool verify_sharp_bound(const std::vector<F2Subset>& sets, uint32_t v) {
    for (auto& s : sets)
        if (s.size() < 2) throw std::invalid_argument("verify_sharp_bound: need #S_i >= 2");
    if (sets.empty()) return true;
    F2Subset sum = minkowski_sum(sets);
    int n = sets[0].n;
    bool antecedent = sum.size() == (size_t(1) << n) - 1 && !sum.contains(v);
    if (!antecedent) return true;
    return int(sets.size()) <= n - 1;
}

}  // namespace cbm
