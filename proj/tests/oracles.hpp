#pragma once

// Independent brute-force references for the test suites. Nothing here calls
// the library's echelon, colon, family or enumeration code: subspaces are
// explicit element sets, colons are membership sweeps, closure maps are
// found by trying every self-map.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <boost/rational.hpp>

#include "multclose/finring.hpp"
#include "multclose/valuation.hpp"

namespace oracle {

using multclose::FiniteRing;
using multclose::FpVec;
using multclose::Residue;
using multclose::Subspace;

/// Elements of F_p^n encoded base p, coordinate 0 most significant.
using Code = std::uint32_t;
using ElemSet = std::vector<Code>;  // sorted

inline Code encode(const FpVec& v) {
    Code c = 0;
    for (std::size_t i = 0; i < v.size(); ++i) c = c * v.p() + v[i];
    return c;
}

inline FpVec decode(Code c, std::uint32_t p, std::size_t n) {
    std::vector<Residue> coords(n);
    for (std::size_t i = n; i-- > 0;) {
        coords[i] = c % p;
        c /= p;
    }
    return FpVec(p, coords);
}

inline Code ipow(std::uint32_t p, std::size_t n) {
    Code r = 1;
    for (std::size_t i = 0; i < n; ++i) r *= p;
    return r;
}

/// All F_p-combinations of the stored rows.
inline ElemSet elements(const Subspace& s) {
    const std::uint32_t p = s.p();
    const std::size_t n = s.ambient_dim(), r = s.rank();
    std::set<Code> out;
    std::vector<Residue> coef(r, 0);
    for (Code t = 0; t < ipow(p, r); ++t) {
        Code x = t;
        for (std::size_t k = 0; k < r; ++k) {
            coef[k] = x % p;
            x /= p;
        }
        std::vector<Residue> v(n, 0);
        for (std::size_t k = 0; k < r; ++k)
            for (std::size_t i = 0; i < n; ++i) v[i] = (v[i] + coef[k] * s.row(k)[i]) % p;
        out.insert(encode(FpVec(p, v)));
    }
    return {out.begin(), out.end()};
}

/// Every additive subgroup of F_p^n (closed under + and scalars), found by
/// closing subsets of generators. Only for p^n <= 16.
inline std::set<ElemSet> all_subgroups(std::uint32_t p, std::size_t n) {
    const Code size = ipow(p, n);
    auto add = [&](Code a, Code b) { return encode(decode(a, p, n) + decode(b, p, n)); };
    auto close = [&](std::set<Code> s) {
        for (bool grown = true; grown;) {
            grown = false;
            std::vector<Code> cur(s.begin(), s.end());
            for (Code a : cur)
                for (Code b : cur)
                    if (s.insert(add(a, b)).second) grown = true;
        }
        return s;
    };
    std::set<ElemSet> out;
    std::function<void(std::set<Code>, Code)> grow = [&](std::set<Code> s, Code from) {
        out.insert(ElemSet(s.begin(), s.end()));
        for (Code c = from; c < size; ++c)
            if (!s.count(c)) grow(close([&] { auto t = s; t.insert(c); return t; }()), c + 1);
    };
    grow({0}, 1);
    return out;
}

/// Σ_k [n choose k]_p, evaluated as exact rationals.
inline std::uint64_t gaussian_sum(std::uint32_t p, std::size_t n) {
    using Q = boost::rational<std::int64_t>;
    std::int64_t total = 0;
    for (std::size_t k = 0; k <= n; ++k) {
        Q g = 1;
        for (std::size_t i = 0; i < k; ++i)
            g *= Q(static_cast<std::int64_t>(ipow(p, n - i)) - 1, static_cast<std::int64_t>(ipow(p, i + 1)) - 1);
        if (g.denominator() != 1) return 0;
        total += g.numerator();
    }
    return static_cast<std::uint64_t>(total);
}

/// Multiplication of encoded elements via the ring's own product.
struct RingOracle {
    FiniteRing ring;
    std::uint32_t p;
    std::size_t n;
    Code size;
    std::vector<Code> table;  // a * size + b

    explicit RingOracle(const FiniteRing& r) : ring(r), p(r.p()), n(r.dim()), size(ipow(r.p(), r.dim())) {
        table.resize(static_cast<std::size_t>(size) * size);
        for (Code a = 0; a < size; ++a)
            for (Code b = 0; b < size; ++b)
                table[a * size + b] = encode(r.mul(decode(a, p, n), decode(b, p, n)));
    }
    Code mul(Code a, Code b) const { return table[a * size + b]; }

    /// {c : c J ⊆ I}
    ElemSet colon(const ElemSet& i, const ElemSet& j) const {
        ElemSet out;
        for (Code c = 0; c < size; ++c) {
            bool ok = true;
            for (Code x : j)
                if (!std::binary_search(i.begin(), i.end(), mul(c, x))) {
                    ok = false;
                    break;
                }
            if (ok) out.push_back(c);
        }
        return out;
    }
    ElemSet colon_elem(const ElemSet& i, Code b) const { return colon(i, ElemSet{b}); }
};

inline bool subset(const ElemSet& a, const ElemSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

/// (I:b)* ⊆ (I*:b) whenever (I:b) is a member.
inline bool colon_condition(const RingOracle& r, const std::vector<ElemSet>& family,
                            const std::vector<std::size_t>& img) {
    std::map<ElemSet, std::size_t> pos;
    for (std::size_t k = 0; k < family.size(); ++k) pos[family[k]] = k;
    for (std::size_t i = 0; i < family.size(); ++i)
        for (Code b = 0; b < r.size; ++b) {
            auto it = pos.find(r.colon_elem(family[i], b));
            if (it == pos.end()) continue;
            if (!subset(family[img[it->second]], r.colon_elem(family[img[i]], b))) return false;
        }
    return true;
}

/// b I* ⊆ (bI)* whenever bI is a member.
inline bool product_condition(const RingOracle& r, const std::vector<ElemSet>& family,
                              const std::vector<std::size_t>& img) {
    std::map<ElemSet, std::size_t> pos;
    for (std::size_t k = 0; k < family.size(); ++k) pos[family[k]] = k;
    auto times = [&](Code b, const ElemSet& s) {
        std::set<Code> out;
        for (Code x : s) out.insert(r.mul(b, x));
        return ElemSet(out.begin(), out.end());
    };
    for (std::size_t i = 0; i < family.size(); ++i)
        for (Code b = 0; b < r.size; ++b) {
            auto it = pos.find(times(b, family[i]));
            if (it == pos.end()) continue;
            if (!subset(times(b, family[img[i]]), family[img[it->second]])) return false;
        }
    return true;
}

/// Every extensive, monotone, idempotent self-map of `family` as an image
/// table, in lexicographic order. With `multiplicative` only those passing
/// colon_condition are kept.
inline std::vector<std::vector<std::size_t>> closure_maps(const RingOracle& r, const std::vector<ElemSet>& family,
                                                          bool multiplicative) {
    const std::size_t m = family.size();
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> img(m, 0);
    auto is_closure = [&] {
        for (std::size_t i = 0; i < m; ++i) {
            if (img[img[i]] != img[i]) return false;
            for (std::size_t j = 0; j < m; ++j)
                if (subset(family[i], family[j]) && !subset(family[img[i]], family[img[j]])) return false;
        }
        return true;
    };
    std::function<void(std::size_t)> go = [&](std::size_t k) {
        if (k == m) {
            if (is_closure() && (!multiplicative || colon_condition(r, family, img))) out.push_back(img);
            return;
        }
        for (std::size_t t = 0; t < m; ++t) {
            if (!subset(family[k], family[t])) continue;  // extensivity prunes early
            img[k] = t;
            go(k + 1);
        }
    };
    go(0);
    return out;
}

inline std::vector<std::vector<std::size_t>> multiplicative_maps(const RingOracle& r,
                                                                  const std::vector<ElemSet>& family) {
    return closure_maps(r, family, true);
}

/// Multisets of (e, f) with Σ e f = n, from all ordered tuples.
inline std::set<std::vector<std::pair<std::size_t, std::size_t>>> shapes_brute(std::size_t n) {
    std::set<std::vector<std::pair<std::size_t, std::size_t>>> out;
    std::vector<std::pair<std::size_t, std::size_t>> cur;
    std::function<void(std::size_t)> go = [&](std::size_t left) {
        if (left == 0) {
            auto s = cur;
            std::sort(s.begin(), s.end());
            out.insert(s);
            return;
        }
        for (std::size_t e = 1; e <= left; ++e)
            for (std::size_t f = 1; e * f <= left; ++f) {
                cur.emplace_back(e, f);
                go(left - e * f);
                cur.pop_back();
            }
    };
    go(n);
    return out;
}

// ---------------------------------------------------------------------------
// Valuation ideals by membership of values.

using multclose::Rational;
using multclose::ValIdeal;

/// Does an element of value s lie in I? (s finite, so never in (0).)
inline bool val_member(const ValIdeal& i, const Rational& s) {
    switch (i.kind) {
    case ValIdeal::Kind::P: return s >= i.delta;
    case ValIdeal::Kind::J: return s > i.delta;
    case ValIdeal::Kind::ZERO: return false;
    }
    return false;
}

/// (I:J) membership for an element of value s, quantifying over values t
/// of J on a grid of step `fine`, up to `reach`. Γ = Q.
inline bool colon_member(const ValIdeal& i, const ValIdeal& j, const Rational& s, const Rational& fine,
                         const Rational& reach) {
    for (Rational t = 0; t <= reach; t += fine)
        if (val_member(j, t) && !val_member(i, s + t)) return false;
    return true;
}

/// Compares a claimed colon against the definition on a coarse grid while
/// quantifying over a grid 16 times finer; the thresholds involved lie on
/// the coarse grid, so grid artifacts (at distance `fine`) never land on a
/// tested point.
inline bool colon_matches(const ValIdeal& i, const ValIdeal& j, const ValIdeal& claimed, const Rational& coarse) {
    Rational fine = coarse / 16;
    Rational top = std::max(i.delta, j.delta) + 2;
    for (Rational s = 0; s <= top; s += coarse) {
        bool expect = claimed.is_zero() ? false : val_member(claimed, s);
        if (colon_member(i, j, s, fine, top + 2) != expect) return false;
    }
    return true;
}

}  // namespace oracle
