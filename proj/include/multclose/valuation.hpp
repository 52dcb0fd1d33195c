#pragma once

// Symbolic ideals of a one-dimensional valuation domain V with value group
// Γ ⊆ Q, and the semiprime operations on them.
//
// P(d) = {v >= d}, J(d) = {v > d}. J(d) = P(d) when d is not in Γ, so
// ideals are kept normalized: J only for d in Γ, and for discrete Γ = gZ
// only P(d) with d in gZ.
//
// J(a) ⪯ P(b) never holds when J(a) != P(a): the colon table gives
// (P(b):(P(b):J(a))) = P(a). val_order is computed from the table, not
// assumed.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "multclose/bounds.hpp"

namespace multclose {

using Rational = boost::rational<std::int64_t>;

/// "3/2", "2", "-1/3"; InputError on garbage.
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& q);

enum class GammaKind { Z, DENSE_Q, Z_LOC_P };

struct ValueGroup {
    GammaKind kind = GammaKind::DENSE_Q;
    Rational gen{1};           // Z: Γ = gen * Z
    std::int64_t prime = 2;    // Z_LOC_P: denominators are powers of prime

    static ValueGroup integers(Rational g = 1);
    static ValueGroup rationals();
    static ValueGroup localized(std::int64_t p);

    bool discrete() const { return kind == GammaKind::Z; }
    bool contains(const Rational& q) const;
    std::string to_string() const;
};

/// "z", "z:<g>", "dense", "zlocp:<p>".
ValueGroup parse_value_group(const std::string& s);

struct ValIdeal {
    enum class Kind { P, J, ZERO };
    Kind kind = Kind::P;
    Rational delta{0};

    static ValIdeal p(Rational d) { return {Kind::P, d}; }
    static ValIdeal j(Rational d) { return {Kind::J, d}; }
    static ValIdeal zero() { return {Kind::ZERO, 0}; }
    static ValIdeal whole() { return p(0); }

    bool is_zero() const { return kind == Kind::ZERO; }
    std::string to_string() const;
    bool operator==(const ValIdeal& o) const {
        return kind == o.kind && (kind == Kind::ZERO || delta == o.delta);
    }
};

/// "P:3/2", "J:1", "0". InputError for negative thresholds.
ValIdeal parse_val_ideal(const std::string& s);
ValIdeal normalize(const ValIdeal& i, const ValueGroup& g);
/// b ⊆ a.
bool val_includes(const ValIdeal& a, const ValIdeal& b, const ValueGroup& g);

ValIdeal val_colon(const ValIdeal& i, const ValIdeal& j, const ValueGroup& g);
/// i ⪯ j  <=>  (j:(j:i)) = i.
bool val_order(const ValIdeal& i, const ValIdeal& j, const ValueGroup& g);

/// Q ∪ {-inf, +inf}.
struct ExtRational {
    int inf = 0;  // -1, 0, +1
    Rational q{0};

    static ExtRational finite(Rational v) { return {0, v}; }
    static ExtRational pos_inf() { return {1, 0}; }
    static ExtRational neg_inf() { return {-1, 0}; }
    bool is_finite() const { return inf == 0; }
    std::string to_string() const;
    auto operator<=>(const ExtRational& o) const {
        if (inf != o.inf || inf != 0) return inf <=> o.inf;
        return q < o.q ? std::strong_ordering::less : q == o.q ? std::strong_ordering::equal : std::strong_ordering::greater;
    }
    bool operator==(const ExtRational& o) const { return (*this <=> o) == 0; }
};

ExtRational parse_ext_rational(const std::string& s);

/// A semiprime operation given by its closed ideals:
///   P(a) for a <= rho,
///   J(a) for a < gamma, and J(gamma) too when closes_j_gamma,
///   (0) when closes_zero.
/// Validity: gamma <= rho; closes_j_gamma needs a finite gamma in Γ;
/// rho = inf forces closes_zero; discrete Γ has no J part and rho in gZ.
struct ValOp {
    ExtRational rho = ExtRational::pos_inf();
    ExtRational gamma = ExtRational::neg_inf();
    bool closes_j_gamma = false;
    bool closes_zero = true;

    std::string family_name() const;
    std::string to_string() const;
    bool operator==(const ValOp&) const = default;
};

/// Validates and canonicalizes (gamma = 0 without the flag is gamma = -inf).
ValOp make_val_op(const ValueGroup& g, ExtRational rho, ExtRational gamma, bool closes_j_gamma, bool closes_zero);

bool val_is_closed(const ValOp& op, const ValIdeal& i, const ValueGroup& g);
ValIdeal val_evaluate(const ValOp& op, const ValIdeal& i, const ValueGroup& g);

struct ValFamily {
    std::string name;
    std::string parameters;
    std::string zero_extensions;  // empty unless the zero ideal is included
};

std::vector<ValFamily> classify(const ValueGroup& g, bool include_zero);
std::string format_classification(const ValueGroup& g, bool include_zero);

/// Operations of the discrete model seen through levels 0..e-1:
/// rho in {0, g, ..., (e-2) g} and rho = inf (the identity on nonzero ideals).
std::vector<ValOp> truncated_discrete_ops(const ValueGroup& g, std::size_t e, bool include_zero);

/// The discrete model against the finite chain ring F_p[x]/(x^e) with A = B.
struct DvrCrosscheck {
    std::size_t e = 0;
    std::size_t finite_nonzero_ops = 0;
    std::size_t symbolic_nonzero_ops = 0;
    std::size_t finite_ops_with_zero = 0;
    std::size_t symbolic_ops_with_zero = 0;
    bool prefixes_agree = false;
    /// Zero-ideal extensions per nonzero op, indexed by prefix level.
    std::vector<std::size_t> finite_extensions;
    std::vector<std::size_t> symbolic_extensions;
    bool finite_zero_above_all = false;       // (x^k) ⪯ (0) for every k
    bool symbolic_zero_only_with_whole = false;  // (0) comparable only with V
    std::vector<std::string> lines;
};

DvrCrosscheck dvr_crosscheck(std::size_t e, std::uint32_t p, const Bounds& bounds = {});

}  // namespace multclose
