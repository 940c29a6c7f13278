// Local evaluation images S_v of a conic bundle: full enumeration at v = p,
// sign analysis at the real place, and an adaptive residue-disk algorithm at
// other finite places; plus the Brauer-Manin verdict.
#pragma once

#include <deque>
#include <set>
#include <sstream>

#include "cbm/brauer.hpp"
#include "cbm/sumset.hpp"

namespace cbm {

struct ResidueDisk {
    bool infinity_chart = false;  // chart B: u = 1/w, w in l Z_l
    uint64_t center = 0;          // mod l^level
    int level = 0;

    std::string str() const {
        std::ostringstream os;
        os << (infinity_chart ? "inf-chart w=" : "u=") << center << " + l^" << level;
        return os.str();
    }
};

enum class ImageMethod { enumeration, disk_subdivision, closed_form_case_analysis };

inline const char* method_name(ImageMethod m) {
    switch (m) {
        case ImageMethod::enumeration: return "enumeration";
        case ImageMethod::disk_subdivision: return "disk-subdivision";
        default: return "closed-form-case-analysis";
    }
}

struct LocalImage {
    Place place;
    int n = 0;
    std::vector<uint32_t> vectors;  // sorted CharVector bitmasks
    ImageMethod method = ImageMethod::closed_form_case_analysis;
    int depth_used = 0;

    bool contains(uint32_t v) const {
        return std::binary_search(vectors.begin(), vectors.end(), v);
    }
};

struct InconclusiveError : std::runtime_error {
    std::vector<std::string> details;
    explicit InconclusiveError(const std::string& what, std::vector<std::string> d = {})
        : std::runtime_error(what), details(std::move(d)) {}
};

// ---------------------------------------------------------------------------
// Fiber solvability at a point of P^1(Q_v), degenerate fibers rejected.

inline bool fiber_solvable(const ConicBundle& X, const std::optional<Rat>& c, const Place& v) {
    HalfInv total;
    if (!c) {
        if (X.infinity_degenerate())
            throw std::invalid_argument("fiber_solvable: fiber at infinity is degenerate");
        // even total degree: class of f(1/w) near w=0 is the leading coefficient
        return hilbert_symbol(X.a, Rat(X.lead_product), v) == 1;
    }
    for (auto& f : X.factors) {
        Rat val = f.eval(*c);
        if (val == 0) throw std::invalid_argument("fiber_solvable: root of f");
        total = total + inv(X.a, val, v);
    }
    return total.is_zero();
}

// ---------------------------------------------------------------------------
// Full enumeration at an odd place p where every f_i is a p-adic unit on Z_p
// (the explicit-construction situation): S_p from the residue classes mod p.

inline LocalImage local_image_enumerate_p(const ConicBundle& X, uint64_t p) {
    if (!is_prime(p) || p == 2) throw std::invalid_argument("local_image_enumerate_p: odd prime required");
    Place v = Place::prime(p);
    LocalImage img;
    img.place = v;
    img.n = X.n;
    img.method = ImageMethod::enumeration;
    img.depth_used = 1;

    SquareClassQv a_cls = square_class(X.a, v);
    std::vector<ModPoly> mods;
    for (auto& f : X.factors) mods.emplace_back(f, p);
    // squares table of F_p^x
    std::vector<char> is_sq(p, 0);
    for (uint64_t t = 1; t < p; ++t) is_sq[mulmod(t, t, p)] = 1;

    std::set<uint32_t> out;
    for (uint64_t c = 0; c < p; ++c) {
        uint32_t bits = 0;
        HalfInv total;
        int parity = 0;
        for (size_t i = 0; i < mods.size(); ++i) {
            uint64_t val = mods[i].eval(c);
            if (val == 0)
                throw std::logic_error("local_image_enumerate_p: f_i vanishes mod p at c=" + std::to_string(c));
            SquareClassQv cls{v, 0, is_sq[val] ? 1 : -1};
            HalfInv h = inv(a_cls, cls);
            if (cls.unit == -1) parity ^= 1;
            total = total + h;
            if (i >= 1 && h.half) bits |= 1u << (i - 1);
        }
        // norm relation: product of the f_i(c) is a unit square, so the
        // total invariant must vanish and every fiber over Z_p is solvable
        if (parity != 0)
            throw std::logic_error("local_image_enumerate_p: product of square classes nontrivial at c=" +
                                   std::to_string(c));
        if (!total.is_zero())
            throw std::logic_error("local_image_enumerate_p: unsolvable unit fiber at c=" + std::to_string(c));
        out.insert(bits);
    }
    // remaining P^1(Q_p) points: infinity and negative valuation; record
    // whether they contribute (for the explicit construction they do not)
    if (!X.infinity_degenerate()) {
        if (hilbert_symbol(X.a, Rat(X.lead_product), v) == 1) {
            // infinity fiber solvable: its vector is the leading-coefficient vector
            uint32_t bits = 0;
            for (int i = 1; i <= X.n; ++i)
                if (inv(X.a, Rat(X.factors[i].lead()), v).half) bits |= 1u << (i - 1);
            out.insert(bits);
        }
        // c with v_p(c) < 0: each f_i(c) ~ lead_i * c^{deg_i} up to 1 + p Z_p,
        // requires deg parity bookkeeping; with all degrees even the class of
        // f(c) is that of the leading product
        bool all_even = true;
        for (auto& f : X.factors)
            if (f.degree() % 2) all_even = false;
        if (all_even) {
            if (hilbert_symbol(X.a, Rat(X.lead_product), v) == 1) {
                uint32_t bits = 0;
                for (int i = 1; i <= X.n; ++i)
                    if (inv(X.a, Rat(X.factors[i].lead()), v).half) bits |= 1u << (i - 1);
                out.insert(bits);
            }
        } else {
            throw std::invalid_argument("local_image_enumerate_p: odd-degree factor unsupported");
        }
    } else {
        throw std::invalid_argument("local_image_enumerate_p: degenerate infinity fiber unsupported");
    }
    img.vectors.assign(out.begin(), out.end());
    return img;
}

// ---------------------------------------------------------------------------
// Adaptive residue-disk engine at a finite place.

namespace detail {

struct LiftedRoot {
    size_t factor;   // index into chart polynomial list
    uint64_t value;  // mod l^prec
    int prec;
};

struct ChartData {
    std::vector<ModPoly> polys;   // evaluation polynomials mod l^N
    std::vector<ModPoly> derivs;
    std::vector<LiftedRoot> roots;
};

inline int val_of(uint64_t x, uint64_t l, int cap) {
    if (x == 0) return cap;  // valuation >= cap
    int v = 0;
    while (x % l == 0) { x /= l; ++v; }
    return v;
}

// All Z_l roots of the polynomial behind `mp` (values only needed mod l^N).
// Throws InconclusiveError if isolation exceeds the depth cap.
inline std::vector<LiftedRoot> isolate_roots(const ModPoly& mp, const ModPoly& dmp, size_t factor,
                                             uint64_t l, int N, int iso_cap) {
    std::vector<LiftedRoot> roots;
    std::deque<std::pair<uint64_t, int>> queue;  // (center mod l^e, e)
    for (uint64_t r = 0; r < l && r < mp.m; ++r)
        if (mp.eval(r) % l == 0) queue.emplace_back(r, 1);
    std::vector<uint64_t> lpow(N + 1, 1);
    for (int i = 1; i <= N; ++i) lpow[i] = lpow[i - 1] * l;
    while (!queue.empty()) {
        auto [c0, e] = queue.front();
        queue.pop_front();
        if (e > iso_cap)
            throw InconclusiveError("root isolation exceeded depth cap at place " + std::to_string(l));
        uint64_t fx = mp.eval(c0);
        int kf = val_of(fx, l, N);
        int t = val_of(dmp.eval(c0), l, N);
        if (t < N && e > 2 * t && kf >= e) {
            // at most one root in this class; Newton-lift from the center
            int prec = N - 2 * t - 1;
            if (prec < e) prec = e;
            uint64_t x = c0;
            for (int iter = 0; iter < 2 * N + 8; ++iter) {
                uint64_t fv = mp.eval(x);
                if (val_of(fv, l, N) >= prec + t) break;
                uint64_t mq = lpow[N - t];
                uint64_t fdiv = (fv / lpow[t]) % mq;
                uint64_t ddiv = (dmp.eval(x) / lpow[t]) % mq;
                uint64_t delta = mulmod(fdiv, invmod(ddiv, mq), mq);
                x = addmod(x, mq - delta, mq);
            }
            uint64_t xr = x % lpow[prec];
            // the Hensel ball around c0 may have its root in a sibling class;
            // keep the root only when it lies in this one, and never twice
            if (xr % lpow[e] == c0 % lpow[e]) {
                bool dup = false;
                for (auto& rt : roots)
                    if (rt.value == xr && rt.prec == prec) dup = true;
                if (!dup) roots.push_back(LiftedRoot{factor, xr, prec});
            }
            continue;
        }
        for (uint64_t j = 0; j < l; ++j) {
            uint64_t c = c0 + j * lpow[e];
            if (val_of(mp.eval(c), l, N) >= e + 1) queue.emplace_back(c, e + 1);
        }
    }
    return roots;
}

}  // namespace detail

// Local image via adaptive subdivision of P^1(Q_v) into residue disks.
// Certification rule: on a disk of radius l^-e the square class of f_i is
// pinned once v(f_i) < e (odd l) or v(f_i) <= e-3 (l = 2); near a simple
// Z_l-root of some f_i the factor splits as (u - r) * unit and the class of
// (u - r) ranges over all square classes on the punctured disk.
inline LocalImage local_image_disks(const ConicBundle& X, const Place& v, int max_depth = 64) {
    if (v.real) throw std::invalid_argument("local_image_disks: finite place required");
    uint64_t l = v.p;
    LocalImage img;
    img.place = v;
    img.n = X.n;
    img.method = ImageMethod::disk_subdivision;

    for (auto& f : X.factors)
        if (f.degree() % 2 != 0)
            throw std::invalid_argument("local_image_disks: odd-degree factors unsupported");

    // precision cap: largest N with l^N < 2^62
    int N = 0;
    {
        uint64_t m = 1;
        while (m < (uint64_t(1) << 62) / l) { m *= l; ++N; }
    }
    int margin = (l == 2) ? 3 : 1;
    if (max_depth > N - margin) max_depth = N - margin;
    uint64_t M = 1;
    for (int i = 0; i < N; ++i) M *= l;
    std::vector<uint64_t> lpow(N + 1, 1);
    for (int i = 1; i <= N; ++i) lpow[i] = lpow[i - 1] * l;

    SquareClassQv a_cls = square_class(X.a, v);

    // chart A: polynomials f_i on Z_l; chart B: reversed polynomials on l Z_l
    detail::ChartData charts[2];
    for (auto& f : X.factors) {
        charts[0].polys.emplace_back(f, M);
        charts[0].derivs.emplace_back(f.derivative(), M);
        IntPoly rev = f.reversed();
        charts[1].polys.emplace_back(rev, M);
        charts[1].derivs.emplace_back(rev.derivative(), M);
    }
    for (int ch = 0; ch < 2; ++ch)
        for (size_t i = 0; i < charts[ch].polys.size(); ++i) {
            auto rs = detail::isolate_roots(charts[ch].polys[i], charts[ch].derivs[i], i, l, N,
                                            max_depth + margin);
            for (auto& r : rs) charts[ch].roots.push_back(r);
        }

    // square classes of Q_l^x for the root branch
    std::vector<SquareClassQv> all_classes;
    if (l == 2) {
        for (int par : {0, 1})
            for (int u : {1, 3, 5, 7}) all_classes.push_back(SquareClassQv{v, par, u});
    } else {
        for (int par : {0, 1})
            for (int u : {1, -1}) all_classes.push_back(SquareClassQv{v, par, u});
    }

    std::set<uint32_t> out;
    std::vector<std::string> undecided;
    int depth_used = 0;

    std::deque<ResidueDisk> queue;
    queue.push_back(ResidueDisk{false, 0, 0});  // chart A: all of Z_l
    queue.push_back(ResidueDisk{true, 0, 1});   // chart B: w in l Z_l, includes infinity

    auto emit = [&](const std::vector<SquareClassQv>& classes) {
        HalfInv total;
        uint32_t bits = 0;
        for (size_t i = 0; i < classes.size(); ++i) {
            HalfInv h = inv(a_cls, classes[i]);
            total = total + h;
            if (i >= 1 && h.half) bits |= 1u << (i - 1);
        }
        if (total.is_zero()) out.insert(bits);
    };

    while (!queue.empty()) {
        ResidueDisk d = queue.front();
        queue.pop_front();
        depth_used = std::max(depth_used, d.level);
        const detail::ChartData& chart = charts[d.infinity_chart ? 1 : 0];
        int e = d.level;

        // roots inside this disk
        std::vector<const detail::LiftedRoot*> here;
        for (auto& r : chart.roots)
            if (e <= r.prec && (r.value % lpow[e]) == (d.center % lpow[e])) here.push_back(&r);

        bool certifiable = true;
        std::vector<SquareClassQv> classes;
        std::vector<int> vals(chart.polys.size(), 0);
        for (size_t i = 0; i < chart.polys.size() && certifiable; ++i) {
            uint64_t x = chart.polys[i].eval(d.center);
            int m = detail::val_of(x, l, N);
            vals[i] = m;
            if (m > e - margin) { certifiable = false; break; }
            uint64_t unit = (x / lpow[m]) % (l == 2 ? 8 : l);
            classes.push_back(square_class_from_parts(v, m, unit));
        }

        if (certifiable && e >= 1) {
            emit(classes);
            continue;
        }

        // root branch: exactly one lifted root in the disk, all other factors pinned
        if (here.size() == 1 && e >= 1) {
            const detail::LiftedRoot& r = *here[0];
            bool others_ok = true;
            std::vector<SquareClassQv> fixed(chart.polys.size(), SquareClassQv{v, 0, 1});
            for (size_t i = 0; i < chart.polys.size() && others_ok; ++i) {
                if (i == r.factor) continue;
                uint64_t x = chart.polys[i].eval(d.center);
                int m = detail::val_of(x, l, N);
                if (m > e - margin) { others_ok = false; break; }
                uint64_t unit = (x / lpow[m]) % (l == 2 ? 8 : l);
                fixed[i] = square_class_from_parts(v, m, unit);
            }
            if (others_ok) {
                // cofactor h with f(x) = (x - r) h(x); synthetic division by
                // (x - r) gives h's coefficients, then Horner at r
                const ModPoly& mp = chart.polys[r.factor];
                uint64_t mq = lpow[r.prec];
                uint64_t rr = r.value % mq;
                uint64_t h = 0;
                {
                    std::vector<uint64_t> b(mp.c.size() > 0 ? mp.c.size() - 1 : 0, 0);
                    uint64_t carry = 0;
                    for (size_t k = mp.c.size(); k-- > 1;) {
                        carry = addmod(mp.c[k] % mq, mulmod(rr, carry, mq), mq);
                        b[k - 1] = carry;
                    }
                    for (size_t k = b.size(); k-- > 0;) h = addmod(mulmod(h, rr, mq), b[k], mq);
                }
                int mh = detail::val_of(h, l, r.prec);
                if (mh <= e - margin && 2 * mh + 2 < r.prec) {
                    uint64_t unit = (h / lpow[mh]) % (l == 2 ? 8 : l);
                    SquareClassQv h_cls = square_class_from_parts(v, mh, unit);
                    for (const auto& s : all_classes) {
                        std::vector<SquareClassQv> cl = fixed;
                        cl[r.factor] = s * h_cls;
                        emit(cl);
                    }
                    continue;
                }
            }
        }

        if (e >= max_depth) {
            undecided.push_back(d.str());
            continue;
        }
        for (uint64_t j = 0; j < l; ++j) {
            ResidueDisk child{d.infinity_chart, d.center + j * lpow[e], e + 1};
            queue.push_back(child);
        }
    }

    if (!undecided.empty())
        throw InconclusiveError("local_image_disks: undecided at max_depth at place " + std::to_string(l),
                                undecided);
    img.vectors.assign(out.begin(), out.end());
    img.depth_used = depth_used;
    return img;
}

// Short-circuit: when a is a square in Q_v every symbol vanishes, so the
// image is {0} as soon as X(Q_v) is nonempty.
inline std::optional<LocalImage> local_image_square_shortcut(const ConicBundle& X, const Place& v) {
    if (!square_class(X.a, v).trivial()) return std::nullopt;
    LocalImage img;
    img.place = v;
    img.n = X.n;
    img.method = ImageMethod::closed_form_case_analysis;
    img.vectors = {0};  // split conic: every fiber over a non-root is solvable
    return img;
}

// ---------------------------------------------------------------------------
// Real place: sign analysis via Sturm sequences.

namespace detail {

using RatPoly = std::vector<Rat>;  // ascending coefficients

inline void rp_trim(RatPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

inline Rat rp_eval(const RatPoly& f, const Rat& x) {
    Rat r = 0;
    for (auto it = f.rbegin(); it != f.rend(); ++it) r = r * x + *it;
    return r;
}

inline RatPoly rp_rem(RatPoly a, const RatPoly& b) {
    int db = int(b.size()) - 1;
    while (int(a.size()) - 1 >= db && !a.empty()) {
        Rat f = a.back() / b.back();
        int shift = int(a.size()) - 1 - db;
        for (int j = 0; j <= db; ++j) a[shift + j] -= f * b[j];
        rp_trim(a);
        if (!a.empty() && int(a.size()) - 1 == db + shift) throw std::logic_error("rp_rem");
    }
    return a;
}

inline std::vector<RatPoly> sturm_chain(RatPoly f) {
    std::vector<RatPoly> chain;
    rp_trim(f);
    chain.push_back(f);
    RatPoly d;
    for (size_t i = 1; i < f.size(); ++i) d.push_back(f[i] * Rat(int(i)));
    rp_trim(d);
    if (d.empty()) return chain;
    chain.push_back(d);
    while (true) {
        const RatPoly& a = chain[chain.size() - 2];
        const RatPoly& b = chain[chain.size() - 1];
        RatPoly r = rp_rem(a, b);
        if (r.empty()) break;
        for (auto& x : r) x = -x;
        chain.push_back(r);
        if (chain.back().size() == 1) break;
    }
    return chain;
}

inline int sign_variations(const std::vector<RatPoly>& chain, const Rat& x) {
    int var = 0, last = 0;
    for (auto& f : chain) {
        Rat v = rp_eval(f, x);
        int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++var;
        last = s;
    }
    return var;
}

}  // namespace detail

inline LocalImage local_image_real(const ConicBundle& X) {
    LocalImage img;
    img.place = Place::make_real();
    img.n = X.n;
    if (X.a > 0) {
        // y^2 - a z^2 is indefinite: every fiber over a non-root is solvable
        img.method = ImageMethod::closed_form_case_analysis;
        img.vectors = {0};
        return img;
    }
    img.method = ImageMethod::enumeration;  // interval sign enumeration

    // product polynomial and its real roots
    IntPoly prod = IntPoly::constant(1);
    for (auto& f : X.factors) prod = prod * f;
    detail::RatPoly P;
    for (auto& c : prod.c) P.emplace_back(c);
    // squarefree part for Sturm (prod is separable by construction, so P works)
    auto chain = detail::sturm_chain(P);
    // Cauchy bound
    Rat Mb = 0;
    for (auto& c : prod.c) {
        Rat t = abs(Rat(c) / Rat(prod.lead()));
        if (t > Mb) Mb = t;
    }
    Mb += 2;
    // isolate roots by bisection until each interval holds at most one root
    std::vector<std::pair<Rat, Rat>> intervals;
    std::function<void(Rat, Rat, int)> isolate = [&](Rat lo, Rat hi, int nroots) {
        if (nroots == 0) return;
        if (nroots == 1) { intervals.emplace_back(lo, hi); return; }
        Rat mid = (lo + hi) / 2;
        while (prod.eval(mid) == 0) mid = (lo + mid) / 2;  // avoid landing on a root
        int left = detail::sign_variations(chain, lo) - detail::sign_variations(chain, mid);
        isolate(lo, mid, left);
        isolate(mid, hi, nroots - left);
    };
    int total = detail::sign_variations(chain, -Mb) - detail::sign_variations(chain, Mb);
    isolate(-Mb, Mb, total);
    std::sort(intervals.begin(), intervals.end(),
              [](auto& a, auto& b) { return a.first < b.first; });
    // refine until intervals are pairwise disjoint
    auto count_in = [&](const Rat& lo, const Rat& hi) {
        return detail::sign_variations(chain, lo) - detail::sign_variations(chain, hi);
    };
    for (size_t i = 0; i + 1 < intervals.size(); ++i) {
        while (intervals[i].second > intervals[i + 1].first) {
            for (size_t j : {i, i + 1}) {
                Rat mid = (intervals[j].first + intervals[j].second) / 2;
                while (prod.eval(mid) == 0) mid = (intervals[j].first + mid) / 2;
                if (count_in(intervals[j].first, mid) == 1) intervals[j].second = mid;
                else intervals[j].first = mid;
            }
        }
    }
    // sample points: one per open interval of the root complement
    std::vector<Rat> samples;
    samples.push_back(-Mb);
    for (size_t i = 0; i + 1 < intervals.size(); ++i)
        samples.push_back((intervals[i].second + intervals[i + 1].first) / 2);
    if (!intervals.empty()) {
        // also between -Mb and the first interval, and after the last
        samples.push_back((intervals[0].first + (-Mb)) / 2);
        samples.push_back((intervals.back().second + Mb) / 2);
    }
    samples.push_back(Mb);

    std::set<uint32_t> out;
    for (const Rat& c : samples) {
        Rat pv = prod.eval(c);
        if (pv == 0) continue;
        if (pv < 0) continue;  // fiber y^2 + |a| z^2 = f(c) < 0 unsolvable
        uint32_t bits = 0;
        for (int i = 1; i <= X.n; ++i)
            if (X.factors[i].eval(c) < 0) bits |= 1u << (i - 1);
        out.insert(bits);
    }
    // point at infinity (when non-degenerate): classes of leading coefficients
    if (!X.infinity_degenerate()) {
        bool all_even = true;
        for (auto& f : X.factors)
            if (f.degree() % 2) all_even = false;
        if (all_even && X.lead_product > 0) {
            uint32_t bits = 0;
            for (int i = 1; i <= X.n; ++i)
                if (X.factors[i].lead() < 0) bits |= 1u << (i - 1);
            out.insert(bits);
        }
    }
    img.vectors.assign(out.begin(), out.end());
    return img;
}

// ---------------------------------------------------------------------------
// The Brauer-Manin verdict from a family of local images.

struct VerdictReport {
    bool obstructed = false;
    bool full_group_required = false;
    int min_generators = 0;
    F2Subset total_image;  // S = sum of the S_v
    std::vector<std::vector<uint32_t>> disjoint_subspaces;
};

inline VerdictReport brauer_manin_verdict(const std::vector<LocalImage>& images, int n) {
    if (n > 8) throw std::invalid_argument("brauer_manin_verdict: n > 8 refused");
    bool any_empty = false, any_nonempty = false;
    for (auto& im : images) (im.vectors.empty() ? any_empty : any_nonempty) = true;
    if (any_empty && any_nonempty)
        throw std::invalid_argument("brauer_manin_verdict: some S_v empty while others are not");
    if (any_empty)
        throw std::invalid_argument("brauer_manin_verdict: no adelic points (empty S_v)");

    std::vector<F2Subset> sets;
    for (auto& im : images) sets.emplace_back(n, im.vectors);
    if (sets.empty()) sets.emplace_back(n, std::vector<uint32_t>{0});
    F2Subset S = minkowski_sum(sets);

    ObstructionReport rep = obstruction_verdict(S);
    VerdictReport out;
    out.obstructed = rep.obstructed;
    out.full_group_required = rep.full_group_required;
    out.min_generators = rep.min_generators;
    out.total_image = S;
    out.disjoint_subspaces = rep.disjoint_subspaces;

    // sharp-bound sanity: a minimal obstruction needing all n generators can
    // involve at most n-1 places with #S_v >= 2
    if (out.obstructed && out.min_generators == n) {
        int big = 0;
        for (auto& im : images)
            if (im.vectors.size() >= 2) ++big;
        if (big > n - 1)
            throw std::logic_error("brauer_manin_verdict: sharp bound violated (implementation bug)");
    }
    return out;
}

}  // namespace cbm
