#pragma once

// A-submodules of B, colon arithmetic and the families G the closure code
// works on.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "multclose/bounds.hpp"
#include "multclose/finring.hpp"
#include "multclose/gfp_linalg.hpp"

namespace multclose {

using ExtensionPtr = std::shared_ptr<const RingExtension>;

/// (I :_B J) = {b in B : bJ ⊆ I} for arbitrary subspaces of B.
Subspace colon(const FiniteRing& b, const Subspace& i, const Subspace& j);
/// {c in B : cb in I}
Subspace colon(const FiniteRing& b, const Subspace& i, const FpVec& elem);
/// Span of all pairwise products.
Subspace product(const FiniteRing& b, const Subspace& i, const Subspace& j);

/// An A-stable subspace of B tied to its extension.
class Submodule {
public:
    /// Throws InputError when `space` is not A-stable.
    Submodule(ExtensionPtr ext, Subspace space);

    const ExtensionPtr& ext() const { return ext_; }
    const Subspace& space() const { return space_; }
    bool operator==(const Submodule& o) const { return *ext_ == *o.ext_ && space_ == o.space_; }

private:
    ExtensionPtr ext_;
    Subspace space_;
};

/// The module (I : J); throws InvariantError if the result is not A-stable.
Submodule colon_module(const Submodule& i, const Submodule& j);
Submodule colon_element(const Submodule& i, const FpVec& b);
Submodule module_product(const Submodule& i, const Submodule& j);

/// Every A-submodule of B in canonical order, with the covering edges
/// I -> I + A v used for the closure tests on families.
class SubmoduleLattice {
public:
    static std::shared_ptr<const SubmoduleLattice> build(ExtensionPtr ext, const Bounds& bounds = {});

    const ExtensionPtr& ext() const { return ext_; }
    const FiniteRing& ring() const { return ext_->ring(); }
    std::size_t size() const { return members_.size(); }
    const Subspace& operator[](std::size_t i) const { return members_[i]; }
    const std::vector<Subspace>& members() const { return members_; }
    std::optional<std::size_t> index_of(const Subspace& s) const;
    /// Like index_of, but a missing module is an InvariantError.
    std::size_t require_index(const Subspace& s) const;
    std::size_t whole_index() const { return whole_; }
    std::size_t zero_index() const { return 0; }

    /// Indices of I + A v for v outside I (one generator per step). Every
    /// superset of I is reachable through these edges.
    const std::vector<std::size_t>& up(std::size_t i) const { return up_[i]; }
    const std::vector<std::size_t>& down(std::size_t i) const { return down_[i]; }

private:
    SubmoduleLattice() = default;
    ExtensionPtr ext_;
    std::vector<Subspace> members_;
    std::unordered_map<Subspace, std::size_t, SubspaceHash> index_;
    std::vector<std::vector<std::size_t>> up_, down_;
    std::size_t whole_ = 0;
};

using LatticePtr = std::shared_ptr<const SubmoduleLattice>;

enum class FamilyKind { F0, ALL, ALL_NONZERO, IDEALS, CUSTOM };
std::string to_string(FamilyKind k);
/// "f0", "all", "all-nonzero", "ideals"
FamilyKind parse_family_kind(const std::string& s);

struct FamilyFlags {
    bool upward_closed = false;
    bool downward_closed = false;
    bool interval = false;
    bool has_maximum = false;
    bool has_minimum = false;
};

class ModuleFamily {
public:
    /// `lattice_indices` are deduplicated and sorted; flags are computed.
    ModuleFamily(LatticePtr lattice, std::vector<std::size_t> lattice_indices, FamilyKind kind);

    const LatticePtr& lattice() const { return lattice_; }
    const ExtensionPtr& ext() const { return lattice_->ext(); }
    const FiniteRing& ring() const { return lattice_->ring(); }
    FamilyKind kind() const { return kind_; }
    const FamilyFlags& flags() const { return flags_; }

    std::size_t size() const { return members_.size(); }
    const Subspace& operator[](std::size_t k) const { return (*lattice_)[members_[k]]; }
    std::size_t lattice_index(std::size_t k) const { return members_[k]; }
    const std::vector<std::size_t>& lattice_indices() const { return members_; }
    /// Family position of a lattice index, if it belongs to the family.
    std::optional<std::size_t> position_of_lattice(std::size_t li) const {
        return pos_[li] < 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(pos_[li]));
    }
    std::optional<std::size_t> position(const Subspace& s) const;
    bool contains(const Subspace& s) const { return position(s).has_value(); }
    std::optional<std::size_t> maximum() const { return max_; }
    std::optional<std::size_t> minimum() const { return min_; }

    /// Members satisfying `keep`, as a CUSTOM family on the same lattice.
    template <class Pred>
    ModuleFamily filter(Pred keep) const {
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < size(); ++k)
            if (keep((*this)[k])) idx.push_back(members_[k]);
        return ModuleFamily(lattice_, std::move(idx), FamilyKind::CUSTOM);
    }

    bool operator==(const ModuleFamily& o) const { return lattice_ == o.lattice_ && members_ == o.members_; }

    // Lazily built tables shared by the closure algorithms.

    /// Positions j with member k ⊆ member j.
    const boost::dynamic_bitset<>& supersets(std::size_t k) const;
    /// Position of member k ∩ member j, or -1 when it is not in the family.
    std::int32_t meet(std::size_t k, std::size_t j) const;
    /// One nonzero element of B per F_p-line (first nonzero coordinate 1),
    /// in all_vectors order. Scalars do not change (I:b), so these suffice.
    const std::vector<FpVec>& line_elements() const;
    /// Lattice index of (member k : line_elements()[e]).
    std::size_t element_colon(std::size_t k, std::size_t e) const;

private:
    struct Tables {
        std::once_flag order_once, colon_once;
        std::vector<boost::dynamic_bitset<>> supersets;
        std::vector<std::int32_t> meet;
        std::vector<FpVec> lines;
        std::vector<std::size_t> colons;
    };
    void build_order_tables() const;
    void build_colon_tables() const;
    std::shared_ptr<Tables> tables_ = std::make_shared<Tables>();

    LatticePtr lattice_;
    std::vector<std::size_t> members_;
    std::vector<std::int32_t> pos_;
    FamilyKind kind_;
    FamilyFlags flags_;
    std::optional<std::size_t> max_, min_;
};

using FamilyPtr = std::shared_ptr<const ModuleFamily>;

FamilyPtr enumerate_submodules(const LatticePtr& lattice);
FamilyPtr family_all_nonzero(const LatticePtr& lattice);
FamilyPtr family_f0(const LatticePtr& lattice);
/// Requires A = B.
FamilyPtr family_ideals(const LatticePtr& lattice);
FamilyPtr make_family(const LatticePtr& lattice, FamilyKind kind);
/// Explicit member list; every subspace must be an A-submodule.
FamilyPtr custom_family(const LatticePtr& lattice, std::span<const Subspace> members);

/// "idx\trank\tserialized" per member.
std::string format_family(const ModuleFamily& fam);

}  // namespace multclose
