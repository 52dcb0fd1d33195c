#include "multclose/star_bridge.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <tuple>

#include "multclose/detail/parallel.hpp"
#include "multclose/errors.hpp"

namespace multclose {

std::size_t ArtinianShape::n() const {
    std::size_t s = 0;
    for (auto [e, f] : parts) s += e * f;
    return s;
}

std::string ArtinianShape::to_string() const {
    std::string out;
    for (auto [e, f] : parts) out += "(" + std::to_string(e) + "," + std::to_string(f) + ")";
    return out;
}

namespace {

using Part = std::pair<std::size_t, std::size_t>;

auto part_key(const Part& q) { return std::make_tuple(q.first * q.second, q.first, q.second); }
bool part_before(const Part& a, const Part& b) { return part_key(a) > part_key(b); }

}  // namespace

std::vector<ArtinianShape> structure_cases(std::size_t n) {
    if (n == 0) throw InputError("length must be at least 1");
    std::vector<Part> kinds;
    for (std::size_t e = 1; e <= n; ++e)
        for (std::size_t f = 1; e * f <= n; ++f) kinds.emplace_back(e, f);
    std::sort(kinds.begin(), kinds.end(), part_before);

    // multisets as non-increasing sequences in the kinds order
    std::vector<ArtinianShape> out;
    std::vector<Part> cur;
    std::function<void(std::size_t, std::size_t)> go = [&](std::size_t from, std::size_t left) {
        if (left == 0) {
            out.push_back({cur});
            return;
        }
        for (std::size_t k = from; k < kinds.size(); ++k) {
            std::size_t w = kinds[k].first * kinds[k].second;
            if (w > left) continue;
            cur.push_back(kinds[k]);
            go(k, left - w);
            cur.pop_back();
        }
    };
    go(0, n);
    std::stable_sort(out.begin(), out.end(), [](const ArtinianShape& a, const ArtinianShape& b) {
        if (a.t() != b.t()) return a.t() < b.t();
        return std::lexicographical_compare(a.parts.begin(), a.parts.end(), b.parts.begin(), b.parts.end(),
                                            part_before);
    });
    return out;
}

ExtensionPtr realize_shape(const ArtinianShape& shape, std::uint32_t p, const Bounds& bounds) {
    if (shape.parts.empty()) throw InputError("empty shape");
    if (p > bounds.max_prime) throw ResourceError("p = " + std::to_string(p) + " exceeds max prime");
    if (shape.n() > bounds.max_dim)
        throw ResourceError("dimension " + std::to_string(shape.n()) + " exceeds max-dim " +
                            std::to_string(bounds.max_dim));
    std::vector<FiniteRing> factors;
    for (auto [e, f] : shape.parts) factors.push_back(chain_ring(p, f, e));
    return std::make_shared<const RingExtension>(prime_diagonal_extension(product_ring(factors)));
}

FstarSummary fstar_summary(const ExtensionPtr& ext, const Bounds& bounds) {
    auto family = family_f0(SubmoduleLattice::build(ext, bounds));
    auto ops = enumerate_ops(family, bounds);
    auto a = family->position(ext->subring());
    if (!a) throw InvariantError("A is missing from F0");
    FstarSummary s;
    s.members = family->size();
    s.fstar = ops.size();
    s.star = static_cast<std::size_t>(
        std::count_if(ops.begin(), ops.end(), [&](const ClosureOp& op) { return op.is_closed(*a); }));
    return s;
}

std::size_t fstar_count(const ExtensionPtr& ext, const Bounds& bounds) { return fstar_summary(ext, bounds).fstar; }
std::size_t star_count(const ExtensionPtr& ext, const Bounds& bounds) { return fstar_summary(ext, bounds).star; }

TwoextReport verify_twoext(const Bounds& bounds) {
    const FiniteRing b = chain_ring(2, 1, 3);
    auto ext = std::make_shared<const RingExtension>(prime_diagonal_extension(b));
    auto lattice = SubmoduleLattice::build(ext, bounds);
    auto sp = [&](std::initializer_list<std::size_t> idx) {
        std::vector<FpVec> rows;
        for (auto i : idx) rows.push_back(b.basis(i));
        return span_of(rows, 2, 3);
    };
    const Subspace one = sp({0}), x = sp({1}), x2 = sp({2}), i_bar = sp({0, 2}), m = sp({1, 2});

    TwoextReport r;
    r.ok = true;
    auto colon_line = [&](const Subspace& lhs, const Subspace& rhs, const Subspace& expect) {
        Subspace got = colon(b, lhs, rhs);
        std::string line = "(" + b.format(lhs) + " : " + b.format(rhs) + ") = " + b.format(got);
        if (got != expect) {
            line += " (expected " + b.format(expect) + ")";
            r.ok = false;
        }
        r.lines.push_back(line);
    };
    colon_line(one, x, x2);
    colon_line(one, x2, m);
    colon_line(i_bar, x, m);
    colon_line(i_bar, m, m);

    auto all = make_family(lattice, FamilyKind::ALL);
    IndexSet gens(all->size());
    gens.set(*all->position(one));
    gens.set(*all->position(i_bar));
    ClosureOp sharp = generated_op(all, gens);
    const Subspace& j_sharp = sharp.evaluate_module(*all->position(x));
    bool sharp_ok = j_sharp == m && j_sharp != x;
    r.ok = r.ok && sharp_ok;
    r.lines.push_back("J^# = " + b.format(j_sharp) + (j_sharp != x ? " != J: " : " == J: ") + (sharp_ok ? "OK" : "FAIL"));

    auto nonzero = make_family(lattice, FamilyKind::ALL_NONZERO);
    auto f0 = make_family(lattice, FamilyKind::F0);
    ClosureOp princ_m = principal_op(nonzero, *nonzero->position(m));
    ClosureOp top = constant_to_max_op(nonzero);
    bool distinct = !(princ_m == top);
    bool same_restriction = restrict_op(princ_m, f0) == restrict_op(top, f0);
    bool restrict_ok = distinct && same_restriction;
    r.ok = r.ok && restrict_ok;
    r.lines.push_back("restriction all-nonzero -> f0 identifies princ_{" + b.format(m) + "} and constant-to-B: " +
                      (restrict_ok ? "OK" : "FAIL"));
    return r;
}

std::vector<SurveyRow> survey(std::size_t n, std::uint32_t p, const Bounds& bounds) {
    auto shapes = structure_cases(n);
    std::vector<SurveyRow> rows(shapes.size());
    // rows are independent; each runs its own enumeration single-threaded
    Bounds inner = bounds;
    inner.workers = 1;
    detail::parallel_for(shapes.size(), bounds.workers, [&](std::size_t k) {
        rows[k].shape = shapes[k];
        rows[k].dim = shapes[k].n();
        try {
            rows[k].counts = fstar_summary(realize_shape(shapes[k], p, inner), inner);
        } catch (const ResourceError& e) {
            rows[k].skipped = e.what();
        }
    });
    return rows;
}

std::string format_cases(const std::vector<ArtinianShape>& shapes, bool tsv) {
    std::ostringstream out;
    if (tsv) {
        out << "idx\tt\tparts\n";
        for (std::size_t k = 0; k < shapes.size(); ++k)
            out << k << '\t' << shapes[k].t() << '\t' << shapes[k].to_string() << '\n';
    } else {
        out << "idx  t  parts (e,f)\n";
        for (std::size_t k = 0; k < shapes.size(); ++k) {
            std::string idx = std::to_string(k);
            out << idx << std::string(5 - std::min<std::size_t>(4, idx.size()), ' ') << shapes[k].t() << "  "
                << shapes[k].to_string() << '\n';
        }
    }
    out << "total " << shapes.size() << '\n';
    return out.str();
}

std::string format_survey(const std::vector<SurveyRow>& rows, bool tsv) {
    std::vector<std::vector<std::string>> cells{{"shape", "dim", "f0", "fstar", "star"}};
    std::size_t fstar_total = 0, star_total = 0, done = 0;
    for (const auto& row : rows) {
        std::vector<std::string> c{row.shape.to_string(), std::to_string(row.dim)};
        if (row.counts) {
            c.push_back(std::to_string(row.counts->members));
            c.push_back(std::to_string(row.counts->fstar));
            c.push_back(std::to_string(row.counts->star));
            fstar_total += row.counts->fstar;
            star_total += row.counts->star;
            ++done;
        } else {
            c.insert(c.end(), {"skipped", "-", "-"});
        }
        cells.push_back(std::move(c));
    }
    cells.push_back({"total", std::to_string(done) + "/" + std::to_string(rows.size()), "-",
                     std::to_string(fstar_total), std::to_string(star_total)});

    std::ostringstream out;
    std::vector<std::size_t> width(cells[0].size(), 0);
    for (const auto& c : cells)
        for (std::size_t j = 0; j < c.size(); ++j) width[j] = std::max(width[j], c[j].size());
    for (const auto& c : cells) {
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (tsv) {
                out << c[j] << (j + 1 < c.size() ? "\t" : "");
            } else {
                out << c[j];
                if (j + 1 < c.size()) out << std::string(width[j] - c[j].size() + 2, ' ');
            }
        }
        out << '\n';
    }
    for (const auto& row : rows)
        if (!row.counts) out << "# skipped " << row.shape.to_string() << ": " << row.skipped << '\n';
    return out.str();
}

}  // namespace multclose
