#include "multclose/valuation.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "multclose/closures.hpp"
#include "multclose/errors.hpp"

namespace multclose {

namespace {

std::int64_t parse_int(std::string_view s, const std::string& whole) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw InputError("not a rational number: '" + whole + "'");
    return v;
}

std::int64_t floor_div(const Rational& q) {
    std::int64_t n = q.numerator(), d = q.denominator();
    return n >= 0 ? n / d : -((-n + d - 1) / d);
}

}  // namespace

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(parse_int(s, s));
    std::int64_t num = parse_int(std::string_view(s).substr(0, slash), s);
    std::int64_t den = parse_int(std::string_view(s).substr(slash + 1), s);
    if (den == 0) throw InputError("zero denominator in '" + s + "'");
    return Rational(num, den);
}

std::string to_string(const Rational& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

// ---------------------------------------------------------------------------

ValueGroup ValueGroup::integers(Rational g) {
    if (g <= Rational(0)) throw InputError("generator of a discrete value group must be positive");
    return {GammaKind::Z, g, 2};
}

ValueGroup ValueGroup::rationals() { return {GammaKind::DENSE_Q, 1, 2}; }

ValueGroup ValueGroup::localized(std::int64_t p) {
    if (p < 2) throw InputError("localizing prime must be at least 2");
    for (std::int64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) throw InputError(std::to_string(p) + " is not prime");
    return {GammaKind::Z_LOC_P, 1, p};
}

bool ValueGroup::contains(const Rational& q) const {
    switch (kind) {
    case GammaKind::Z: return (q / gen).denominator() == 1;
    case GammaKind::DENSE_Q: return true;
    case GammaKind::Z_LOC_P: {
        std::int64_t d = q.denominator();
        while (d % prime == 0) d /= prime;
        return d == 1;
    }
    }
    return false;
}

std::string ValueGroup::to_string() const {
    switch (kind) {
    case GammaKind::Z: return gen == Rational(1) ? "Z" : multclose::to_string(gen) + "Z";
    case GammaKind::DENSE_Q: return "Q";
    case GammaKind::Z_LOC_P: return "Z[1/" + std::to_string(prime) + "]";
    }
    return "?";
}

ValueGroup parse_value_group(const std::string& s) {
    if (s == "z") return ValueGroup::integers();
    if (s.rfind("z:", 0) == 0) return ValueGroup::integers(parse_rational(s.substr(2)));
    if (s == "dense" || s == "q") return ValueGroup::rationals();
    if (s.rfind("zlocp:", 0) == 0) return ValueGroup::localized(parse_int(s.substr(6), s));
    throw InputError("unknown value group '" + s + "' (expected z, z:<g>, dense, zlocp:<p>)");
}

// ---------------------------------------------------------------------------

std::string ValIdeal::to_string() const {
    switch (kind) {
    case Kind::P: return "P(" + multclose::to_string(delta) + ")";
    case Kind::J: return "J(" + multclose::to_string(delta) + ")";
    case Kind::ZERO: return "0";
    }
    return "?";
}

ValIdeal parse_val_ideal(const std::string& s) {
    if (s == "0" || s == "zero") return ValIdeal::zero();
    if (s == "V") return ValIdeal::whole();
    if (s.size() < 3 || s[1] != ':' || (s[0] != 'P' && s[0] != 'J'))
        throw InputError("ideal must look like P:<q>, J:<q> or 0, got '" + s + "'");
    Rational d = parse_rational(s.substr(2));
    if (d < Rational(0)) throw InputError("negative threshold in '" + s + "'");
    return s[0] == 'P' ? ValIdeal::p(d) : ValIdeal::j(d);
}

ValIdeal normalize(const ValIdeal& i, const ValueGroup& g) {
    if (i.is_zero()) return i;
    if (i.delta < Rational(0)) throw InputError("negative threshold " + i.to_string());
    if (g.discrete()) {
        Rational units = i.delta / g.gen;
        std::int64_t fl = floor_div(units);
        std::int64_t level = i.kind == ValIdeal::Kind::J ? fl + 1 : (units.denominator() == 1 ? fl : fl + 1);
        return ValIdeal::p(g.gen * level);
    }
    if (i.kind == ValIdeal::Kind::J && !g.contains(i.delta)) return ValIdeal::p(i.delta);
    return i;
}

bool val_includes(const ValIdeal& a, const ValIdeal& b, const ValueGroup& g) {
    ValIdeal x = normalize(a, g), y = normalize(b, g);
    if (y.is_zero()) return true;
    if (x.is_zero()) return false;
    if (x.delta != y.delta) return x.delta < y.delta;
    return x.kind == ValIdeal::Kind::P || y.kind == ValIdeal::Kind::J;
}

ValIdeal val_colon(const ValIdeal& i, const ValIdeal& j, const ValueGroup& g) {
    ValIdeal a = normalize(i, g), b = normalize(j, g);
    if (b.is_zero()) return ValIdeal::whole();
    if (a.is_zero()) return ValIdeal::zero();
    if (a.delta < b.delta) return ValIdeal::whole();
    Rational d = a.delta - b.delta;
    bool open = a.kind == ValIdeal::Kind::J && b.kind == ValIdeal::Kind::P;
    return normalize(open ? ValIdeal::j(d) : ValIdeal::p(d), g);
}

bool val_order(const ValIdeal& i, const ValIdeal& j, const ValueGroup& g) {
    return val_colon(j, val_colon(j, i, g), g) == normalize(i, g);
}

// ---------------------------------------------------------------------------

std::string ExtRational::to_string() const {
    if (inf > 0) return "inf";
    if (inf < 0) return "-inf";
    return multclose::to_string(q);
}

ExtRational parse_ext_rational(const std::string& s) {
    if (s == "inf" || s == "+inf") return ExtRational::pos_inf();
    if (s == "-inf") return ExtRational::neg_inf();
    return ExtRational::finite(parse_rational(s));
}

std::string ValOp::family_name() const {
    std::string base;
    if (gamma.inf > 0) {
        base = "identity";
    } else if (gamma.inf < 0) {
        base = rho.is_finite() ? "princ_P(" + rho.to_string() + ")" : "v_P";
    } else if (closes_j_gamma) {
        base = "princ_P(" + rho.to_string() + ") ^ princ_J(" + gamma.to_string() + ")";
    } else {
        base = (rho.is_finite() ? "princ_P(" + rho.to_string() + ")" : "v_P") + " ^ d(" + gamma.to_string() + ")";
    }
    if (rho.is_finite() && closes_zero) base += " ^ princ_(0)";
    return base;
}

std::string ValOp::to_string() const {
    return "rho=" + rho.to_string() + " gamma=" + gamma.to_string() + " J(gamma)=" + (closes_j_gamma ? "closed" : "open") +
           " zero=" + (closes_zero ? "closed" : "open") + "  [" + family_name() + "]";
}

ValOp make_val_op(const ValueGroup& g, ExtRational rho, ExtRational gamma, bool closes_j_gamma, bool closes_zero) {
    if (rho.inf < 0 || (rho.is_finite() && rho.q < Rational(0))) throw InputError("rho must be a nonnegative rational or inf");
    if (gamma.is_finite() && gamma.q < Rational(0)) throw InputError("gamma must be -inf, inf or a nonnegative rational");
    if (gamma > rho) throw InputError("gamma must not exceed rho");
    if (closes_j_gamma && (!gamma.is_finite() || !g.contains(gamma.q)))
        throw InputError("closing J(gamma) needs gamma in the value group");
    if (!rho.is_finite() && !closes_zero) throw InputError("rho = inf closes every P, hence their intersection (0)");
    if (g.discrete()) {
        if (gamma.inf >= 0 && !(gamma.is_finite() && gamma.q == Rational(0) && !closes_j_gamma))
            throw InputError("a discrete value group has no J part; gamma must be -inf");
        if (rho.is_finite() && !g.contains(rho.q)) throw InputError("rho must lie in " + g.to_string());
    }
    if (gamma.is_finite() && gamma.q == Rational(0) && !closes_j_gamma) gamma = ExtRational::neg_inf();
    return {rho, gamma, closes_j_gamma, closes_zero};
}

bool val_is_closed(const ValOp& op, const ValIdeal& i, const ValueGroup& g) {
    ValIdeal x = normalize(i, g);
    switch (x.kind) {
    case ValIdeal::Kind::ZERO: return op.closes_zero;
    case ValIdeal::Kind::P: return ExtRational::finite(x.delta) <= op.rho;
    case ValIdeal::Kind::J: {
        auto d = ExtRational::finite(x.delta);
        return d < op.gamma || (op.closes_j_gamma && d == op.gamma);
    }
    }
    return false;
}

ValIdeal val_evaluate(const ValOp& op, const ValIdeal& i, const ValueGroup& g) {
    ValIdeal x = normalize(i, g);
    if (val_is_closed(op, x, g)) return x;
    // P(delta) is the next candidate for a non-closed J(delta)
    if (!x.is_zero() && ExtRational::finite(x.delta) <= op.rho) return ValIdeal::p(x.delta);
    if (!op.rho.is_finite()) throw InvariantError("unclosed ideal under rho = inf: " + x.to_string());
    if (op.closes_j_gamma && op.gamma == op.rho) return ValIdeal::j(op.rho.q);
    return ValIdeal::p(op.rho.q);
}

// ---------------------------------------------------------------------------

std::vector<ValFamily> classify(const ValueGroup& g, bool include_zero) {
    std::vector<ValFamily> out;
    const std::string two = include_zero ? "two: with or without (0)" : "";
    const std::string one = include_zero ? "one: (0) closed" : "";
    if (g.discrete()) {
        out.push_back({"princ_P(rho)", "rho in " + g.to_string() + ", rho >= 0", two});
        out.push_back({"identity", "rho = inf", one});
        return out;
    }
    out.push_back({"princ_P(rho)", "0 <= rho < inf, gamma = -inf", two});
    out.push_back({"v_P", "rho = inf, gamma = -inf", one});
    out.push_back({"princ_P(rho) ^ princ_J(gamma)", "gamma in " + g.to_string() + ", 0 <= gamma <= rho < inf", two});
    out.push_back({"princ_P(rho) ^ d(gamma)", "0 < gamma <= rho <= inf, J(gamma) open", include_zero ? "two if rho < inf, else one" : ""});
    return out;
}

std::string format_classification(const ValueGroup& g, bool include_zero) {
    std::ostringstream out;
    out << "value group " << g.to_string() << (include_zero ? ", zero ideal included" : "") << '\n';
    auto fams = classify(g, include_zero);
    for (const auto& f : fams) {
        out << f.name << "  [" << f.parameters << "]";
        if (!f.zero_extensions.empty()) out << "  extensions: " << f.zero_extensions;
        out << '\n';
    }
    out << "total " << fams.size() << " families\n";
    return out.str();
}

std::vector<ValOp> truncated_discrete_ops(const ValueGroup& g, std::size_t e, bool include_zero) {
    if (!g.discrete()) throw InputError("truncation needs a discrete value group");
    if (e == 0) throw InputError("truncation level must be positive");
    std::vector<ValOp> ops;
    for (std::size_t k = 0; k + 1 < e; ++k) {
        auto rho = ExtRational::finite(g.gen * static_cast<std::int64_t>(k));
        ops.push_back(make_val_op(g, rho, ExtRational::neg_inf(), false, false));
        if (include_zero) ops.push_back(make_val_op(g, rho, ExtRational::neg_inf(), false, true));
    }
    ops.push_back(make_val_op(g, ExtRational::pos_inf(), ExtRational::neg_inf(), false, true));
    return ops;
}

DvrCrosscheck dvr_crosscheck(std::size_t e, std::uint32_t p, const Bounds& bounds) {
    if (e == 0) throw InputError("e must be positive");
    FiniteRing b = chain_ring(p, 1, e);
    std::vector<FpVec> basis;
    for (std::size_t k = 0; k < e; ++k) basis.push_back(b.basis(k));
    auto ext = std::make_shared<const RingExtension>(b, basis);
    auto lattice = SubmoduleLattice::build(ext, bounds);
    auto nonzero = make_family(lattice, FamilyKind::ALL_NONZERO);
    auto ideals = make_family(lattice, FamilyKind::IDEALS);
    auto level = [&](const Subspace& s) { return e - s.rank(); };  // (x^k) has rank e - k; (0) sits at level e

    DvrCrosscheck r;
    r.e = e;
    auto finite_nz = enumerate_ops(nonzero, bounds);
    auto finite_all = enumerate_ops(ideals, bounds);
    r.finite_nonzero_ops = finite_nz.size();
    r.finite_ops_with_zero = finite_all.size();

    const ValueGroup z = ValueGroup::integers();
    auto sym_nz = truncated_discrete_ops(z, e, false);
    auto sym_all = truncated_discrete_ops(z, e, true);
    r.symbolic_nonzero_ops = sym_nz.size();
    r.symbolic_ops_with_zero = sym_all.size();

    auto sym_levels = [&](const ValOp& op) {
        std::set<std::size_t> s;
        for (std::size_t k = 0; k < e; ++k)
            if (val_is_closed(op, ValIdeal::p(static_cast<std::int64_t>(k)), z)) s.insert(k);
        return s;
    };
    std::vector<std::set<std::size_t>> fin_sets, sym_sets;
    for (const auto& op : finite_nz) {
        std::set<std::size_t> s;
        for (auto k : op.closed_indices()) s.insert(level((*nonzero)[k]));
        fin_sets.push_back(s);
    }
    for (const auto& op : sym_nz) sym_sets.push_back(sym_levels(op));
    std::sort(fin_sets.begin(), fin_sets.end());
    std::sort(sym_sets.begin(), sym_sets.end());
    r.prefixes_agree = fin_sets == sym_sets;

    // zero-ideal extensions, indexed by the top closed level of the nonzero op
    r.finite_extensions.assign(e, 0);
    r.symbolic_extensions.assign(e, 0);
    for (const auto& op : finite_all) {
        std::size_t top = 0;
        for (auto k : op.closed_indices()) {
            std::size_t l = level((*ideals)[k]);
            if (l < e) top = std::max(top, l);
        }
        ++r.finite_extensions[top];
    }
    for (const auto& op : sym_all) ++r.symbolic_extensions[*sym_levels(op).rbegin()];

    MultOrder order = mult_order(ideals, bounds);
    std::size_t zero_pos = *ideals->position(lattice->members()[lattice->zero_index()]);
    r.finite_zero_above_all = true;
    for (std::size_t k = 0; k < ideals->size(); ++k) r.finite_zero_above_all &= order.precedes(k, zero_pos);

    r.symbolic_zero_only_with_whole = true;
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(e) + 2; ++k) {
        ValIdeal i = ValIdeal::p(k);
        bool comparable = val_order(i, ValIdeal::zero(), z) || val_order(ValIdeal::zero(), i, z);
        r.symbolic_zero_only_with_whole &= comparable == (k == 0);
    }

    auto yes = [](bool b) { return b ? "yes" : "no"; };
    r.lines.push_back("e = " + std::to_string(e) + ", p = " + std::to_string(p));
    r.lines.push_back("nonzero ideals: finite " + std::to_string(r.finite_nonzero_ops) + " ops, symbolic " +
                      std::to_string(r.symbolic_nonzero_ops) + " ops, prefixes agree: " + yes(r.prefixes_agree));
    r.lines.push_back("with (0): finite " + std::to_string(r.finite_ops_with_zero) + " ops, symbolic " +
                      std::to_string(r.symbolic_ops_with_zero) + " ops");
    for (std::size_t k = 0; k < e; ++k)
        r.lines.push_back("  prefix up to level " + std::to_string(k) + ": finite extensions " +
                          std::to_string(r.finite_extensions[k]) + ", symbolic extensions " +
                          std::to_string(r.symbolic_extensions[k]));
    r.lines.push_back(std::string("finite ring: (x^k) ⪯ (0) for every k: ") + yes(r.finite_zero_above_all));
    r.lines.push_back(std::string("valuation model: (0) comparable only with V: ") + yes(r.symbolic_zero_only_with_whole));
    return r;
}

}  // namespace multclose
