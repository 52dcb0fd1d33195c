#include "multclose/closures.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "multclose/detail/parallel.hpp"
#include "multclose/errors.hpp"

namespace multclose {

IndexSet full_set(std::size_t n) {
    IndexSet s(n);
    s.set();
    return s;
}

std::vector<std::size_t> set_indices(const IndexSet& s) {
    std::vector<std::size_t> out;
    for (auto k = s.find_first(); k != IndexSet::npos; k = s.find_next(k)) out.push_back(k);
    return out;
}

// ---------------------------------------------------------------------------

ClosureOp::ClosureOp(FamilyPtr family, IndexSet closed) : family_(std::move(family)), closed_(std::move(closed)) {
    if (!family_) throw InputError("operation without a family");
    const std::size_t n = family_->size();
    if (closed_.size() != n) throw InputError("closed set has the wrong size");
    table_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        IndexSet cand = family_->supersets(k) & closed_;
        std::optional<std::size_t> least;
        for (auto c = cand.find_first(); c != IndexSet::npos; c = cand.find_next(c))
            if (cand.is_subset_of(family_->supersets(c))) {
                least = c;
                break;
            }
        if (!least)
            throw InputError("member " + std::to_string(k) + " has no least closed member above it");
        table_[k] = *least;
    }
}

ClosureOp ClosureOp::from_map(FamilyPtr family, std::span<const std::size_t> image) {
    if (!family || image.size() != family->size()) throw InputError("image table has the wrong size");
    IndexSet fixed(image.size());
    for (std::size_t k = 0; k < image.size(); ++k)
        if (image[k] == k) fixed.set(k);
    ClosureOp op(family, std::move(fixed));
    if (!std::equal(image.begin(), image.end(), op.table_.begin()))
        throw InputError("map is not the closure of its fixed points");
    return op;
}

std::vector<std::size_t> ClosureOp::closed_indices() const { return set_indices(closed_); }

bool op_leq(const ClosureOp& a, const ClosureOp& b) { return b.closed().is_subset_of(a.closed()); }

static bool closed_report_less(const IndexSet& a, const IndexSet& b) {
    if (a.count() != b.count()) return a.count() < b.count();
    auto x = set_indices(a), y = set_indices(b);
    return x < y;
}

bool op_report_less(const ClosureOp& a, const ClosureOp& b) { return closed_report_less(a.closed(), b.closed()); }

ClosureOp identity_op(const FamilyPtr& family) { return ClosureOp(family, full_set(family->size())); }

ClosureOp constant_to_max_op(const FamilyPtr& family) {
    auto m = family->maximum();
    if (!m) throw UnsupportedError("family has no maximum");
    IndexSet s(family->size());
    s.set(*m);
    return ClosureOp(family, std::move(s));
}

// ---------------------------------------------------------------------------

namespace {

AxiomReport fail(std::string axiom, std::size_t module, std::string detail, std::optional<FpVec> b = {}) {
    AxiomReport r;
    r.ok = false;
    r.axiom = std::move(axiom);
    r.module = module;
    r.element = std::move(b);
    r.detail = std::move(detail);
    return r;
}

}  // namespace

AxiomReport check_closure_map(const ModuleFamily& fam, std::span<const std::size_t> image) {
    const std::size_t n = fam.size();
    if (image.size() != n) return fail("well-defined", 0, "image table has the wrong size");
    for (std::size_t k = 0; k < n; ++k)
        if (image[k] >= n) return fail("well-defined", k, "image outside the family");
    for (std::size_t k = 0; k < n; ++k)
        if (!fam.supersets(k).test(image[k])) return fail("extensive", k, "I is not contained in I*");
    for (std::size_t k = 0; k < n; ++k)
        if (image[image[k]] != image[k]) return fail("idempotent", k, "I** != I*");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& up = fam.supersets(i);
        for (auto j = up.find_first(); j != IndexSet::npos; j = up.find_next(j))
            if (!fam.supersets(image[i]).test(image[j]))
                return fail("order-preserving", i, "I ⊆ J but I* ⊄ J* for J = " + std::to_string(j));
    }
    return {};
}

AxiomReport check_multiplicative_map(const ModuleFamily& fam, std::span<const std::size_t> image) {
    AxiomReport r = check_closure_map(fam, image);
    if (!r.ok) return r;
    const auto& lat = *fam.lattice();
    const auto& lines = fam.line_elements();
    for (std::size_t k = 0; k < fam.size(); ++k)
        for (std::size_t e = 0; e < lines.size(); ++e) {
            auto pos = fam.position_of_lattice(fam.element_colon(k, e));
            if (!pos) continue;
            const Subspace& lhs = fam[image[*pos]];
            const Subspace& rhs = lat[fam.element_colon(image[k], e)];
            if (!rhs.contains(lhs))
                return fail("colon condition", k, "(I:b)* is not contained in (I*:b)", lines[e]);
        }
    return {};
}

AxiomReport check_multiplicative(const ClosureOp& op) { return check_multiplicative_map(*op.family(), op.table()); }

AxiomReport check_product_condition(const ModuleFamily& fam, std::span<const std::size_t> image) {
    const FiniteRing& ring = fam.ring();
    for (const auto& b : fam.line_elements()) {
        Subspace bs = rref(std::span<const FpVec>(&b, 1), ring.p(), ring.dim());
        for (std::size_t k = 0; k < fam.size(); ++k) {
            auto pos = fam.position(product(ring, bs, fam[k]));
            if (!pos) continue;
            if (!fam[image[*pos]].contains(product(ring, bs, fam[image[k]])))
                return fail("product condition", k, "b I* is not contained in (bI)*", b);
        }
    }
    return {};
}

// ---------------------------------------------------------------------------

namespace {

void require_upward(const ModuleFamily& fam, const char* what) {
    if (!fam.flags().upward_closed)
        throw UnsupportedError(std::string(what) + " needs an upward closed family (double-dual formula)");
}

/// Memoized I -> (J:(J:I)) for a fixed J.
class DoubleDual {
public:
    DoubleDual(const ModuleFamily& fam, const Subspace& j) : fam_(fam), j_(j) {}

    const Subspace& operator()(const Subspace& i) {
        Subspace first = colon(fam_.ring(), j_, i);
        std::size_t li = fam_.lattice()->require_index(first);
        auto it = memo_.find(li);
        if (it == memo_.end()) it = memo_.emplace(li, colon(fam_.ring(), j_, first)).first;
        return it->second;
    }

private:
    const ModuleFamily& fam_;
    const Subspace& j_;
    std::unordered_map<std::size_t, Subspace> memo_;
};

}  // namespace

ClosureOp generated_op(const FamilyPtr& family, const IndexSet& s) {
    const ModuleFamily& fam = *family;
    const std::size_t n = fam.size();
    if (s.size() != n) throw InputError("generator set has the wrong size");
    if (!fam.flags().upward_closed) {
        // Outside the double-dual setting only an existing closed set is accepted.
        try {
            ClosureOp op(family, s);
            if (check_multiplicative(op).ok && op.closed() == s) return op;
        } catch (const InputError&) {
        }
        throw UnsupportedError("generated operation on a family that is not upward closed");
    }
    const FiniteRing& ring = fam.ring();
    std::vector<Subspace> image(n, Subspace::full(ring.p(), ring.dim()));
    for (auto j = s.find_first(); j != IndexSet::npos; j = s.find_next(j)) {
        DoubleDual dd(fam, fam[j]);
        for (std::size_t k = 0; k < n; ++k) image[k] = subspace_meet(image[k], dd(fam[k]));
    }
    IndexSet closed(n);
    std::vector<std::size_t> table(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto pos = fam.position(image[k]);
        if (!pos) throw InvariantError("double dual left an upward closed family");
        table[k] = *pos;
        if (*pos == k) closed.set(k);
    }
    ClosureOp op(family, std::move(closed));
    if (op.table() != table) throw InvariantError("double-dual map differs from the closure of its fixed points");
    return op;
}

ClosureOp principal_op(const FamilyPtr& family, std::size_t j) {
    require_upward(*family, "principal operation");
    if (j >= family->size()) throw InputError("principal generator outside the family");
    IndexSet s(family->size());
    s.set(j);
    return generated_op(family, s);
}

// ---------------------------------------------------------------------------

MultOrder mult_order(const FamilyPtr& family, const Bounds& bounds) {
    const ModuleFamily& fam = *family;
    require_upward(fam, "multiplicative order");
    const std::size_t n = fam.size();
    // Warm the lazy tables before threads share them.
    (void)fam.supersets(0);

    // column j: which I satisfy (J:(J:I)) = I
    std::vector<IndexSet> col(n, IndexSet(n));
    detail::parallel_for(n, bounds.workers, [&](std::size_t j) {
        DoubleDual dd(fam, fam[j]);
        for (std::size_t i = 0; i < n; ++i)
            if (dd(fam[i]) == fam[i]) col[j].set(i);
    });

    MultOrder order;
    order.family = family;
    order.leq.assign(n, IndexSet(n));
    for (std::size_t j = 0; j < n; ++j)
        for (auto i = col[j].find_first(); i != IndexSet::npos; i = col[j].find_next(i)) order.leq[i].set(j);

    std::vector<std::size_t> provisional(n, n);
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        if (provisional[i] != n) continue;
        provisional[i] = groups.size();
        groups.push_back({i});
        for (std::size_t j = i + 1; j < n; ++j)
            if (provisional[j] == n && order.leq[i].test(j) && order.leq[j].test(i)) {
                provisional[j] = groups.size() - 1;
                groups.back().push_back(j);
            }
    }
    const std::size_t m = groups.size();
    std::vector<std::size_t> below(m, 0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            if (a != b && order.leq[groups[b][0]].test(groups[a][0])) ++below[a];
    std::vector<std::size_t> perm(m);
    for (std::size_t a = 0; a < m; ++a) perm[a] = a;
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) { return below[x] < below[y]; });

    order.classes.resize(m);
    order.class_of.assign(n, 0);
    for (std::size_t c = 0; c < m; ++c) {
        order.classes[c] = groups[perm[c]];
        for (std::size_t i : order.classes[c]) order.class_of[i] = c;
    }
    order.class_leq.assign(m, IndexSet(m));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            if (order.leq[order.classes[a][0]].test(order.classes[b][0])) order.class_leq[a].set(b);
    return order;
}

// ---------------------------------------------------------------------------

namespace {

class DownsetSearch {
public:
    DownsetSearch(const ModuleFamily& fam, const MultOrder& order) : fam_(fam), order_(order) {
        m_ = order.classes.size();
        preds_.resize(m_);
        for (std::size_t c = 0; c < m_; ++c)
            for (std::size_t a = 0; a < c; ++a)
                if (order.class_leq[a].test(c)) preds_[c].push_back(a);
        for (std::size_t c = 0; c < m_; ++c)
            for (std::size_t a = c + 1; a < m_; ++a)
                if (order.class_leq[a].test(c) && !order.class_leq[c].test(a))
                    throw InvariantError("class order is not topologically sorted");
    }

    struct State {
        std::vector<char> status;  // 0 undecided, 1 in, 2 out
        std::vector<std::size_t> forced;
        std::vector<std::size_t> in_members;
        std::vector<std::size_t> forced_log;
    };

    State fresh() const {
        State s;
        s.status.assign(m_, 0);
        s.forced.assign(m_, 0);
        // the class of the maximum (the minimum class) is always closed
        s.forced[order_.class_of[*fam_.maximum()]] = 1;
        return s;
    }

    bool preds_in(const State& s, std::size_t c) const {
        for (std::size_t a : preds_[c])
            if (s.status[a] != 1) return false;
        return true;
    }

    /// Marks class c closed; false (with state restored) on a conflict.
    bool include(State& s, std::size_t c) const {
        const std::size_t log_mark = s.forced_log.size();
        const std::size_t member_mark = s.in_members.size();
        s.status[c] = 1;
        bool ok = true;
        for (std::size_t i : order_.classes[c]) {
            s.in_members.push_back(i);
            for (std::size_t j : s.in_members) {
                std::int32_t mt = fam_.meet(i, j);
                if (mt < 0) continue;
                std::size_t k = order_.class_of[static_cast<std::size_t>(mt)];
                if (s.status[k] == 2) {
                    ok = false;
                    break;
                }
                if (s.status[k] == 0) {
                    ++s.forced[k];
                    s.forced_log.push_back(k);
                }
            }
            if (!ok) break;
        }
        if (!ok) undo(s, c, log_mark, member_mark);
        return ok;
    }

    void undo(State& s, std::size_t c, std::size_t log_mark, std::size_t member_mark) const {
        while (s.forced_log.size() > log_mark) {
            --s.forced[s.forced_log.back()];
            s.forced_log.pop_back();
        }
        s.in_members.resize(member_mark);
        s.status[c] = 0;
    }

    /// Visits every completion of `s` from class `c` on; `emit` may return
    /// false to stop the search.
    bool run(State& s, std::size_t c, std::size_t stop_depth, const std::function<bool(const State&)>& emit) const {
        if (c == stop_depth) return emit(s);
        const bool must = s.forced[c] > 0;
        if (!must) {
            s.status[c] = 2;
            bool go = run(s, c + 1, stop_depth, emit);
            s.status[c] = 0;
            if (!go) return false;
        }
        if (!preds_in(s, c)) return true;
        const std::size_t log_mark = s.forced_log.size();
        const std::size_t member_mark = s.in_members.size();
        if (!include(s, c)) return true;
        bool go = run(s, c + 1, stop_depth, emit);
        undo(s, c, log_mark, member_mark);
        return go;
    }

    std::size_t classes() const { return m_; }

    IndexSet closed_set(const State& s) const {
        IndexSet out(fam_.size());
        for (std::size_t i : s.in_members) out.set(i);
        return out;
    }

private:
    const ModuleFamily& fam_;
    const MultOrder& order_;
    std::size_t m_ = 0;
    std::vector<std::vector<std::size_t>> preds_;
};

}  // namespace

std::vector<ClosureOp> enumerate_ops(const FamilyPtr& family, const Bounds& bounds) {
    const ModuleFamily& fam = *family;
    if (!fam.flags().upward_closed)
        throw UnsupportedError("enumerate_ops needs an upward closed family; use the oracle instead");
    MultOrder order = mult_order(family, bounds);
    (void)fam.meet(0, 0);
    DownsetSearch search(fam, order);
    const std::size_t m = search.classes();

    std::vector<IndexSet> found;
    std::mutex found_mutex;
    std::atomic<std::size_t> count{0};
    std::atomic<bool> overflow{false};
    auto keep = [&](std::vector<IndexSet>& local, const DownsetSearch::State& s) {
        if (count.fetch_add(1) >= bounds.max_ops) {
            overflow = true;
            return false;
        }
        local.push_back(search.closed_set(s));
        return !overflow.load();
    };

    const unsigned workers = std::max(1u, bounds.workers);
    if (workers == 1) {
        auto s = search.fresh();
        search.run(s, 0, m, [&](const DownsetSearch::State& st) { return keep(found, st); });
    } else {
        // Split the tree at the first depth with enough open prefixes.
        std::size_t depth = 0;
        std::vector<std::vector<char>> prefixes;
        while (true) {
            prefixes.clear();
            auto s = search.fresh();
            search.run(s, 0, depth, [&](const DownsetSearch::State& st) {
                prefixes.emplace_back(st.status.begin(), st.status.begin() + depth);
                return true;
            });
            if (depth == m || prefixes.size() >= 8 * workers) break;
            ++depth;
        }
        detail::parallel_for(prefixes.size(), workers, [&](std::size_t k) {
            if (overflow) return;
            auto s = search.fresh();
            for (std::size_t c = 0; c < depth; ++c) {
                if (prefixes[k][c] == 1) {
                    if (!search.include(s, c)) throw InvariantError("replayed prefix conflicts");
                } else {
                    s.status[c] = 2;
                }
            }
            std::vector<IndexSet> local;
            search.run(s, depth, m, [&](const DownsetSearch::State& st) { return keep(local, st); });
            std::lock_guard<std::mutex> lock(found_mutex);
            for (auto& x : local) found.push_back(std::move(x));
        });
    }
    if (overflow)
        throw ResourceError("more than " + std::to_string(bounds.max_ops) + " operations; raise the bound");

    std::sort(found.begin(), found.end(), closed_report_less);
    std::vector<ClosureOp> ops;
    ops.reserve(found.size());
    for (auto& s : found) ops.emplace_back(family, std::move(s));
    return ops;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> oracle_enumerate(const FamilyPtr& family, const Bounds& bounds) {
    const ModuleFamily& fam = *family;
    const std::size_t n = fam.size();
    if (n > bounds.oracle_max)
        throw ResourceError("family has " + std::to_string(n) + " members; the oracle accepts at most " +
                            std::to_string(bounds.oracle_max));
    const auto& lat = *fam.lattice();
    const auto& lines = fam.line_elements();
    const std::size_t nl = lines.size();

    // cpos[k*nl+e]: family position of (I_k : b_e), or -1
    std::vector<std::int64_t> cpos(n * nl, -1);
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> rev(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t e = 0; e < nl; ++e)
            if (auto p = fam.position_of_lattice(fam.element_colon(k, e))) {
                cpos[k * nl + e] = static_cast<std::int64_t>(*p);
                rev[*p].emplace_back(k, e);
            }

    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fam[a].rank() > fam[b].rank(); });

    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> image(n, unset);
    std::vector<std::size_t> image_count(n, 0);  // how many members map to x
    std::vector<std::vector<std::size_t>> results;

    auto dagger_ok = [&](std::size_t k, std::size_t e) {
        std::int64_t c = cpos[k * nl + e];
        if (c < 0 || image[k] == unset || image[static_cast<std::size_t>(c)] == unset) return true;
        const Subspace& lhs = fam[image[static_cast<std::size_t>(c)]];
        return lat[fam.element_colon(image[k], e)].contains(lhs);
    };

    auto consistent = [&](std::size_t x, std::size_t j) {
        // idempotence
        if (j != x && image[j] != unset && image[j] != j) return false;
        if (j != x && image_count[x] > 0) return false;
        // monotonicity against assigned members
        for (std::size_t y = 0; y < n; ++y) {
            if (image[y] == unset || y == x) continue;
            if (fam.supersets(y).test(x) && !fam.supersets(image[y]).test(j)) return false;
            if (fam.supersets(x).test(y) && !fam.supersets(j).test(image[y])) return false;
        }
        return true;
    };

    std::function<void(std::size_t)> dfs = [&](std::size_t depth) {
        if (depth == n) {
            if (!check_multiplicative_map(fam, image).ok)
                throw InvariantError("oracle produced a map failing the axiom sweep");
            results.push_back(image);
            return;
        }
        const std::size_t x = order[depth];
        const auto& up = fam.supersets(x);
        for (auto j = up.find_first(); j != IndexSet::npos; j = up.find_next(j)) {
            if (!consistent(x, j)) continue;
            image[x] = j;
            ++image_count[j];
            bool ok = true;
            for (std::size_t e = 0; e < nl && ok; ++e) ok = dagger_ok(x, e);
            for (std::size_t t = 0; t < rev[x].size() && ok; ++t) ok = dagger_ok(rev[x][t].first, rev[x][t].second);
            if (ok) dfs(depth + 1);
            --image_count[j];
            image[x] = unset;
        }
    };
    dfs(0);

    auto fixed = [](const std::vector<std::size_t>& img) {
        IndexSet s(img.size());
        for (std::size_t k = 0; k < img.size(); ++k)
            if (img[k] == k) s.set(k);
        return s;
    };
    std::sort(results.begin(), results.end(),
              [&](const auto& a, const auto& b) { return closed_report_less(fixed(a), fixed(b)); });
    return results;
}

// ---------------------------------------------------------------------------

namespace {

const FamilyPtr& common_family(std::span<const ClosureOp> ops) {
    if (ops.empty()) throw InputError("need at least one operation");
    for (const auto& op : ops)
        if (!(*op.family() == *ops[0].family())) throw InputError("operations live on different families");
    return ops[0].family();
}

ClosureOp verified(ClosureOp op, const char* what) {
    auto r = check_multiplicative(op);
    if (!r.ok) throw InvariantError(std::string(what) + " is not multiplicative: " + r.axiom);
    return op;
}

}  // namespace

ClosureOp inf_op(std::span<const ClosureOp> ops) {
    const FamilyPtr& family = common_family(ops);
    const ModuleFamily& fam = *family;
    if (!fam.flags().interval) throw UnsupportedError("infimum needs an interval family");
    std::vector<std::size_t> image(fam.size());
    for (std::size_t k = 0; k < fam.size(); ++k) {
        Subspace m = ops[0].evaluate_module(k);
        for (const auto& op : ops.subspan(1)) m = subspace_meet(m, op.evaluate_module(k));
        auto pos = fam.position(m);
        if (!pos) throw InvariantError("pointwise intersection left an interval family");
        image[k] = *pos;
    }
    return verified(ClosureOp::from_map(family, image), "infimum");
}

ClosureOp sup_op(std::span<const ClosureOp> ops) {
    const FamilyPtr& family = common_family(ops);
    const ModuleFamily& fam = *family;
    if (!fam.flags().interval) throw UnsupportedError("supremum needs an interval family");
    IndexSet closed = ops[0].closed();
    for (const auto& op : ops.subspan(1)) closed &= op.closed();
    for (std::size_t k = 0; k < fam.size(); ++k)
        if (!fam.supersets(k).intersects(closed))
            throw UnsupportedError("member " + std::to_string(k) + " lies below no commonly closed member");
    try {
        return verified(ClosureOp(family, std::move(closed)), "supremum");
    } catch (const InputError& e) {
        throw InvariantError(std::string("supremum is not a closure: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

namespace {

ClosureOp stable_like(const ClosureOp& op, const char* what) {
    const FamilyPtr& family = op.family();
    const ModuleFamily& fam = *family;
    if (!fam.flags().downward_closed) throw UnsupportedError(std::string(what) + " needs a downward closed family");
    auto a_pos = fam.position(fam.ext()->subring());
    if (!a_pos) throw UnsupportedError(std::string(what) + " needs A in the family");
    const std::size_t a_star = op.evaluate(*a_pos);
    std::vector<std::size_t> es;
    for (std::size_t k = 0; k < fam.size(); ++k)
        if (op.evaluate(k) == a_star) es.push_back(k);

    const FiniteRing& ring = fam.ring();
    std::vector<std::size_t> image(fam.size());
    for (std::size_t k = 0; k < fam.size(); ++k) {
        Subspace total(ring.p(), ring.dim());
        Subspace largest(ring.p(), ring.dim());
        for (std::size_t e : es) {
            Subspace term = colon(ring, fam[k], fam[e]);
            total = subspace_sum(total, term);
            if (term.contains(largest)) largest = term;
        }
        // the union of the residuals is a module only if one of them contains the rest
        if (total != largest)
            throw UnsupportedError(std::string(what) + ": the residuals of member " + std::to_string(k) +
                                   " have no largest element, so their union is not a module");
        auto pos = fam.position(total);
        if (!pos) throw InvariantError(std::string(what) + " left the family");
        image[k] = *pos;
    }
    return verified(ClosureOp::from_map(family, image), what);
}

}  // namespace

ClosureOp stable_closure(const ClosureOp& op) { return stable_like(op, "stable closure"); }

ClosureOp w_closure(const ClosureOp& op) {
    ClosureOp w = stable_like(op, "w-closure");
    if (!(w == stable_closure(op))) throw InvariantError("w-closure differs from the stable closure on a finite ring");
    return w;
}

ClosureOp finite_type(const ClosureOp& op) {
    const ModuleFamily& fam = *op.family();
    if (!fam.flags().downward_closed) throw UnsupportedError("finite-type closure needs a downward closed family");
    const FiniteRing& ring = fam.ring();
    for (std::size_t k = 0; k < fam.size(); ++k) {
        Subspace total(ring.p(), ring.dim());
        for (std::size_t j = 0; j < fam.size(); ++j)
            if (fam.supersets(j).test(k)) total = subspace_sum(total, op.evaluate_module(j));
        if (total != op.evaluate_module(k)) throw InvariantError("finite-type closure differs on a finite family");
    }
    return op;
}

bool is_stable(const ClosureOp& op) {
    const ModuleFamily& fam = *op.family();
    for (std::size_t i = 0; i < fam.size(); ++i)
        for (std::size_t j = i + 1; j < fam.size(); ++j) {
            std::int32_t m = fam.meet(i, j);
            if (m < 0) continue;
            if (op.evaluate_module(static_cast<std::size_t>(m)) !=
                subspace_meet(op.evaluate_module(i), op.evaluate_module(j)))
                return false;
        }
    return true;
}

// ---------------------------------------------------------------------------

ClosureOp restrict_op(const ClosureOp& op, const FamilyPtr& smaller) {
    const ModuleFamily& big = *op.family();
    const ModuleFamily& small = *smaller;
    if (big.lattice() != small.lattice()) throw InputError("families live on different lattices");
    if (!small.flags().interval) throw UnsupportedError("restriction needs an interval subfamily");
    if (!big.maximum() || !small.maximum() ||
        big.lattice_index(*big.maximum()) != small.lattice_index(*small.maximum()))
        throw UnsupportedError("restriction needs a common maximum");
    std::vector<std::size_t> image(small.size());
    for (std::size_t k = 0; k < small.size(); ++k) {
        auto pos = big.position_of_lattice(small.lattice_index(k));
        if (!pos) throw InputError("subfamily is not contained in the family of the operation");
        auto img = small.position_of_lattice(big.lattice_index(op.evaluate(*pos)));
        if (!img) throw InvariantError("restriction does not stay inside the subfamily");
        image[k] = *img;
    }
    return ClosureOp::from_map(smaller, image);
}

ClosureOp extend_op(const ClosureOp& op, const FamilyPtr& larger) {
    const ModuleFamily& small = *op.family();
    const ModuleFamily& big = *larger;
    if (big.lattice() != small.lattice()) throw InputError("families live on different lattices");
    if (!small.flags().upward_closed || !big.flags().upward_closed)
        throw UnsupportedError("extension needs upward closed families");
    IndexSet s(big.size());
    for (std::size_t k : op.closed_indices()) {
        auto pos = big.position_of_lattice(small.lattice_index(k));
        if (!pos) throw InputError("family of the operation is not contained in the larger family");
        s.set(*pos);
    }
    return generated_op(larger, s);
}

std::optional<std::size_t> canonical_ideal(const FamilyPtr& family, const Bounds& bounds) {
    MultOrder order = mult_order(family, bounds);
    const std::size_t m = order.classes.size();
    for (std::size_t c = 0; c < m; ++c) {
        bool top = true;
        for (std::size_t a = 0; a < m && top; ++a) top = order.class_leq[a].test(c);
        if (!top) continue;
        std::size_t omega = order.classes[c].front();
        if (principal_op(family, omega).closed().count() != family->size())
            throw InvariantError("principal operation of a canonical ideal is not the identity");
        return omega;
    }
    return std::nullopt;
}

std::string format_op(const ClosureOp& op, std::size_t k) {
    std::ostringstream out;
    out << "op " << k << ": closed = {";
    auto idx = op.closed_indices();
    for (std::size_t t = 0; t < idx.size(); ++t) out << (t ? ", " : "") << idx[t];
    out << "}\n";
    for (std::size_t i = 0; i < op.table().size(); ++i) out << "  " << i << " -> " << op.evaluate(i) << '\n';
    return out.str();
}

}  // namespace multclose
