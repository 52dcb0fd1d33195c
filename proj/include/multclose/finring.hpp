#pragma once

// Finite commutative rings presented as F_p-algebras by structure constants,
// the standard constructors (chain rings, products), ring extensions A ⊆ B
// and ring surjections.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "multclose/gfp_linalg.hpp"

namespace multclose {

class FiniteRing {
public:
    /// `products[i*dim + j]` is e_i * e_j. Commutativity, associativity on
    /// all basis triples and the identity law are verified here; a violation
    /// throws InputError. The zero ring is rejected.
    FiniteRing(std::uint32_t p, std::size_t dim, std::vector<FpVec> products, FpVec one,
               std::vector<std::string> labels = {});

    std::uint32_t p() const { return p_; }
    std::size_t dim() const { return dim_; }
    const FpVec& one() const { return one_; }
    const std::vector<std::string>& labels() const { return labels_; }
    FpVec basis(std::size_t i) const { return FpVec::unit(p_, dim_, i); }
    FpVec product(std::size_t i, std::size_t j) const;

    FpVec mul(const FpVec& a, const FpVec& b) const;
    /// out = a * b on raw coordinates; `out` must not alias the inputs.
    void mul_into(std::span<const Residue> a, std::span<const Residue> b, std::span<Residue> out) const;

    /// Row-major dim x dim matrix whose k-th row is e_k * v.
    std::vector<Residue> multiplication_rows(std::span<const Residue> v) const;
    bool is_unit(const FpVec& v) const;

    /// "1+x^2", "2*w*x", "0"
    std::string format(const FpVec& v) const;
    /// "span{1,x^2}" using the reduced echelon rows.
    std::string format(const Subspace& s) const;

    bool operator==(const FiniteRing& o) const {
        return p_ == o.p_ && dim_ == o.dim_ && table_ == o.table_ && one_ == o.one_;
    }

private:
    std::uint32_t p_;
    std::size_t dim_;
    std::vector<Residue> table_;  // (i*dim + j)*dim + k : coefficient of e_k in e_i e_j
    FpVec one_;
    std::vector<std::string> labels_;
};

/// Lexicographically smallest monic irreducible polynomial of degree f over
/// F_p, coefficients compared from the constant term upward. Returned as
/// c_0..c_{f-1} (the leading 1 is implicit).
std::vector<Residue> smallest_irreducible(std::uint32_t p, std::size_t f);

/// GF(p^f)[x]/(x^e) with basis w^a x^b stored at index b*f + a.
FiniteRing chain_ring(std::uint32_t p, std::size_t f, std::size_t e);

/// Direct product; the identity is the concatenation of the factor identities.
FiniteRing product_ring(std::span<const FiniteRing> factors);

/// A ⊆ B with A given by an F_p-basis inside B.
class RingExtension {
public:
    /// Throws InputError unless the span of `subring_basis` is a unital
    /// subring (contains one, closed under products) and the basis is free.
    RingExtension(FiniteRing ring, std::span<const FpVec> subring_basis);

    const FiniteRing& ring() const { return ring_; }
    const Subspace& subring() const { return subring_; }
    std::uint32_t p() const { return ring_.p(); }
    std::size_t dim() const { return ring_.dim(); }

    /// True iff a*U ⊆ U for every a in A.
    bool is_stable(const Subspace& u) const;
    /// A-submodule generated by the rows of `u`.
    Subspace stable_hull(const Subspace& u) const;
    Subspace whole() const { return Subspace::full(p(), dim()); }

    bool operator==(const RingExtension& o) const { return ring_ == o.ring_ && subring_ == o.subring_; }

private:
    FiniteRing ring_;
    Subspace subring_;
};

RingExtension prime_diagonal_extension(const FiniteRing& b);
RingExtension generated_subring(const FiniteRing& b, std::span<const FpVec> gens);

/// Surjective ring homomorphism given by the images of the source basis.
class RingSurjection {
public:
    /// `images[k]` is the image of e_k. Verified: multiplicative on basis
    /// pairs, one maps to one, surjective.
    RingSurjection(FiniteRing source, FiniteRing target, std::vector<FpVec> images);

    const FiniteRing& source() const { return source_; }
    const FiniteRing& target() const { return target_; }
    const Subspace& kernel() const { return kernel_; }
    const std::vector<FpVec>& images() const { return images_; }

    FpVec apply(const FpVec& v) const;
    void apply_into(std::span<const Residue> v, std::span<Residue> out) const;
    Subspace image(const Subspace& u) const;
    Subspace preimage(const Subspace& u) const;

private:
    FiniteRing source_;
    FiniteRing target_;
    std::vector<FpVec> images_;
    Subspace kernel_;
};

/// B -> B/ideal. The ideal must be B-stable and proper (the zero ring is
/// rejected); target coordinates are the non-pivot columns of the ideal's
/// echelon form.
RingSurjection quotient_surjection(const FiniteRing& b, const Subspace& ideal);

}  // namespace multclose
