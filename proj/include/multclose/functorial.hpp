#pragma once

// Moving multiplicative operations along a surjection of extensions
// phi: (A ⊆ B) -> (A' ⊆ B').

#include <cstddef>
#include <utility>
#include <vector>

#include "multclose/closures.hpp"

namespace multclose {

/// phi surjective with phi(A) = A'. The textbook notion also asks
/// phi^{-1}(A') = A, i.e. ker phi ⊆ A; that stronger property is reported
/// by is_strict() but not required, since the constructions below only use
/// phi(A) = A'.
class ExtensionQuotient {
public:
    ExtensionQuotient(ExtensionPtr source, ExtensionPtr target, RingSurjection phi, const Bounds& bounds = {});

    const ExtensionPtr& source() const { return source_; }
    const ExtensionPtr& target() const { return target_; }
    const RingSurjection& phi() const { return phi_; }
    const LatticePtr& source_lattice() const { return source_lattice_; }
    const LatticePtr& target_lattice() const { return target_lattice_; }
    bool is_strict() const { return source_->subring().contains(phi_.kernel()); }

    /// A'-submodule generated by phi(I).
    Subspace push(const Subspace& i) const;
    Subspace pull(const Subspace& j) const { return phi_.preimage(j); }

private:
    ExtensionPtr source_, target_;
    RingSurjection phi_;
    LatticePtr source_lattice_, target_lattice_;
};

/// B -> B/ideal with A' = phi(A).
ExtensionQuotient quotient_of(const ExtensionPtr& ext, const Subspace& ideal, const Bounds& bounds = {});

enum class PullbackDomain {
    /// every I with phi(I)A' in G'
    broad,
    /// only the preimages phi^{-1}(J), J in G'
    saturated,
};

FamilyPtr pullback_family(const ExtensionQuotient& q, const FamilyPtr& target_family,
                          PullbackDomain domain = PullbackDomain::broad);
FamilyPtr pushforward_family(const ExtensionQuotient& q, const FamilyPtr& source_family);

/// I -> phi^{-1}((phi(I)A')*). The target family must be upward closed.
ClosureOp pullback_op(const ExtensionQuotient& q, const ClosureOp& op, PullbackDomain domain = PullbackDomain::broad);
/// I' -> phi(phi^{-1}(I')*). The source family must be upward closed or
/// have every member containing ker phi.
ClosureOp pushforward_op(const ExtensionQuotient& q, const ClosureOp& op);

struct QuotientIsoReport {
    bool ok = false;
    std::size_t source_count = 0;
    std::size_t target_count = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // source op -> target op
    std::string detail;
};

/// Enumerates both sides and checks that pushforward is an order
/// isomorphism. Every member of the family must contain ker phi.
QuotientIsoReport quotient_iso_check(const ExtensionQuotient& q, const FamilyPtr& family, const Bounds& bounds = {});

}  // namespace multclose
