#pragma once

// Multiplicative operations on (A, B, G), represented by their closed sets.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "multclose/bounds.hpp"
#include "multclose/submodules.hpp"

namespace multclose {

using IndexSet = boost::dynamic_bitset<>;

/// A closure operation on a family, stored as its closed members. I* is the
/// least closed member containing I; construction fails (InputError) when
/// some member has no such least element.
class ClosureOp {
public:
    ClosureOp(FamilyPtr family, IndexSet closed);
    /// The closure given by an explicit image table; InputError unless the
    /// table is exactly the closure of its own fixed points.
    static ClosureOp from_map(FamilyPtr family, std::span<const std::size_t> image);

    const FamilyPtr& family() const { return family_; }
    const IndexSet& closed() const { return closed_; }
    bool is_closed(std::size_t k) const { return closed_.test(k); }
    std::size_t evaluate(std::size_t k) const { return table_[k]; }
    const Subspace& evaluate_module(std::size_t k) const { return (*family_)[table_[k]]; }
    const std::vector<std::size_t>& table() const { return table_; }
    std::vector<std::size_t> closed_indices() const;

    bool operator==(const ClosureOp& o) const { return *family_ == *o.family_ && closed_ == o.closed_; }

private:
    FamilyPtr family_;
    IndexSet closed_;
    std::vector<std::size_t> table_;
};

/// a <= b pointwise, i.e. every b-closed member is a-closed.
bool op_leq(const ClosureOp& a, const ClosureOp& b);
/// Report order: by number of closed members, then lexicographic index lists.
bool op_report_less(const ClosureOp& a, const ClosureOp& b);

IndexSet full_set(std::size_t n);
std::vector<std::size_t> set_indices(const IndexSet& s);

ClosureOp identity_op(const FamilyPtr& family);
/// Sends everything to the maximum; UnsupportedError when there is none.
ClosureOp constant_to_max_op(const FamilyPtr& family);

/// Outcome of an axiom check. On failure `axiom` names the first violated
/// law, `module` the family position of the witness I and `element` the
/// witness b for the colon condition.
struct AxiomReport {
    bool ok = true;
    std::string axiom;
    std::optional<std::size_t> module;
    std::optional<FpVec> element;
    std::string detail;
};

/// Extensive, order preserving and idempotent.
AxiomReport check_closure_map(const ModuleFamily& family, std::span<const std::size_t> image);
/// Closure axioms plus (I:b)* ⊆ (I*:b) whenever (I:b) is in the family,
/// swept over I in family order and b in all_vectors order.
AxiomReport check_multiplicative_map(const ModuleFamily& family, std::span<const std::size_t> image);
AxiomReport check_multiplicative(const ClosureOp& op);
/// b I* ⊆ (bI)* for every I and b with bI in the family.
AxiomReport check_product_condition(const ModuleFamily& family, std::span<const std::size_t> image);

/// I -> (J:(J:I)). UnsupportedError unless the family is upward closed.
ClosureOp principal_op(const FamilyPtr& family, std::size_t j);
/// I -> ∩_{J in S} (J:(J:I)) on upward closed families. On other families
/// S is accepted only when it already is the closed set of a
/// multiplicative operation.
ClosureOp generated_op(const FamilyPtr& family, const IndexSet& s);

/// The preorder I ⪯ J  <=>  (J:(J:I)) = I, with its classes.
struct MultOrder {
    FamilyPtr family;
    std::vector<IndexSet> leq;                    // leq[i][j]: i ⪯ j
    std::vector<std::size_t> class_of;
    std::vector<std::vector<std::size_t>> classes;  // topologically sorted
    std::vector<IndexSet> class_leq;              // over class ids

    bool precedes(std::size_t i, std::size_t j) const { return leq[i].test(j); }
};

MultOrder mult_order(const FamilyPtr& family, const Bounds& bounds = {});

/// Every multiplicative operation on an upward closed family: the
/// ⪯-downsets containing the maximum that are closed under pairwise
/// intersections landing in the family. Sorted by op_report_less.
std::vector<ClosureOp> enumerate_ops(const FamilyPtr& family, const Bounds& bounds = {});

/// Brute force: every self-map passing check_multiplicative_map, as image
/// tables, sorted by the closed-set report order. Test-only verifier.
std::vector<std::vector<std::size_t>> oracle_enumerate(const FamilyPtr& family, const Bounds& bounds = {});

/// Pointwise intersection; the family must be an interval.
ClosureOp inf_op(std::span<const ClosureOp> ops);
/// Closed set = intersection of the closed sets.
ClosureOp sup_op(std::span<const ClosureOp> ops);

/// I -> ∪ {(I:E) : E* = A*}, for downward closed families containing A.
ClosureOp stable_closure(const ClosureOp& op);
/// Same with E finitely generated; every module of a finite ring is.
ClosureOp w_closure(const ClosureOp& op);
/// I -> ∪ {J* : J ⊆ I finitely generated}; equal to op on finite families.
ClosureOp finite_type(const ClosureOp& op);
bool is_stable(const ClosureOp& op);

/// Restriction to a sub-interval sharing the maximum.
ClosureOp restrict_op(const ClosureOp& op, const FamilyPtr& smaller);
/// Extension to an upward closed superfamily via the operation generated by
/// the closed members.
ClosureOp extend_op(const ClosureOp& op, const FamilyPtr& larger);

/// A member of the maximum ⪯-class, if there is one.
std::optional<std::size_t> canonical_ideal(const FamilyPtr& family, const Bounds& bounds = {});

/// "op <k>: closed = {...}" followed by "  i -> j" rows.
std::string format_op(const ClosureOp& op, std::size_t k);

}  // namespace multclose
