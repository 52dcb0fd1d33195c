#pragma once

// Exact linear algebra over prime fields F_p.
//
// A Subspace is always stored in reduced row-echelon form with rows ordered
// by pivot column, so equality of subspaces is equality of the stored data.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "multclose/bounds.hpp"

namespace multclose {

using Residue = std::uint32_t;

bool is_prime(std::uint64_t n);

/// Arithmetic in Z/p for a (small) prime p.
class PrimeField {
public:
    explicit PrimeField(std::uint32_t p);

    std::uint32_t p() const { return p_; }
    Residue add(Residue a, Residue b) const { return (a + b) % p_; }
    Residue sub(Residue a, Residue b) const { return (a + p_ - b) % p_; }
    Residue mul(Residue a, Residue b) const {
        return static_cast<Residue>((std::uint64_t{a} * b) % p_);
    }
    Residue neg(Residue a) const { return a == 0 ? 0 : p_ - a; }
    Residue inv(Residue a) const;
    Residue reduce(std::int64_t v) const;

private:
    std::uint32_t p_;
};

/// A vector of F_p^n; coordinates are always reduced.
class FpVec {
public:
    FpVec() = default;
    FpVec(std::uint32_t p, std::vector<Residue> coords);
    static FpVec zero(std::uint32_t p, std::size_t n);
    static FpVec unit(std::uint32_t p, std::size_t n, std::size_t k);

    std::uint32_t p() const { return p_; }
    std::size_t size() const { return coords_.size(); }
    Residue operator[](std::size_t i) const { return coords_[i]; }
    const std::vector<Residue>& coords() const { return coords_; }
    bool is_zero() const;

    FpVec operator+(const FpVec& o) const;
    FpVec operator-(const FpVec& o) const;
    FpVec scaled(Residue c) const;

    bool operator==(const FpVec&) const = default;
    auto operator<=>(const FpVec&) const = default;

    std::string to_string() const;  // "1 0 1"

private:
    std::uint32_t p_ = 2;
    std::vector<Residue> coords_;
};

/// Canonical (reduced row-echelon) representative of a subspace of F_p^n.
class Subspace {
public:
    Subspace() = default;
    /// The zero subspace of F_p^n.
    Subspace(std::uint32_t p, std::size_t n);
    static Subspace full(std::uint32_t p, std::size_t n);

    std::uint32_t p() const { return p_; }
    std::size_t ambient_dim() const { return n_; }
    std::size_t rank() const { return pivots_.size(); }
    bool is_zero() const { return pivots_.empty(); }
    bool is_full() const { return pivots_.size() == n_; }

    std::span<const Residue> row(std::size_t i) const {
        return {rows_.data() + i * n_, n_};
    }
    FpVec row_vec(std::size_t i) const;
    std::vector<FpVec> basis() const;
    const std::vector<std::size_t>& pivots() const { return pivots_; }
    const std::vector<Residue>& flat_rows() const { return rows_; }

    /// Normal form of v modulo this subspace (zero in every pivot column).
    void reduce_in_place(std::span<Residue> v) const;
    FpVec reduce(const FpVec& v) const;
    bool contains(const FpVec& v) const;
    bool contains(std::span<const Residue> v) const;
    bool contains(const Subspace& other) const;

    /// "1 0 1;0 1 0", or "0" for the zero space.
    std::string serialize() const;
    static Subspace deserialize(std::uint32_t p, std::size_t n, const std::string& text);

    bool operator==(const Subspace&) const = default;
    /// Rank-major, then lexicographic on the flattened rows.
    friend bool canonical_less(const Subspace& a, const Subspace& b);

    std::size_t hash() const;

private:
    friend Subspace rref_flat(std::uint32_t p, std::size_t n, std::vector<Residue> m);
    friend Subspace subspace_from_rref(std::uint32_t p, std::size_t n,
                                       std::vector<Residue> rows,
                                       std::vector<std::size_t> pivots);

    std::uint32_t p_ = 2;
    std::size_t n_ = 0;
    std::vector<Residue> rows_;          // rank x n, row-major
    std::vector<std::size_t> pivots_;    // strictly increasing
};

bool canonical_less(const Subspace& a, const Subspace& b);

struct SubspaceHash {
    std::size_t operator()(const Subspace& s) const { return s.hash(); }
};

/// Row-echelon canonical form of the span of a row-major matrix with n columns.
Subspace rref_flat(std::uint32_t p, std::size_t n, std::vector<Residue> m);

/// Canonical basis of the row span. Throws InputError on mixed moduli or
/// lengths; `n` gives the ambient dimension when `rows` is empty.
Subspace rref(std::span<const FpVec> rows, std::uint32_t p, std::size_t n);
Subspace span_of(std::span<const FpVec> rows, std::uint32_t p, std::size_t n);

Subspace subspace_meet(const Subspace& u, const Subspace& v);
Subspace subspace_sum(const Subspace& u, const Subspace& v);
bool contains(const Subspace& u, const Subspace& v);

/// Kernel of the linear map F_p^src -> F_p^dst whose k-th basis image is
/// images[k*dst .. k*dst+dst).
Subspace linear_kernel(std::uint32_t p, std::size_t src, std::size_t dst,
                       std::span<const Residue> images);

/// Number of subspaces of F_p^n (sum of Gaussian binomials), saturating at
/// UINT64_MAX.
std::uint64_t count_subspaces(std::uint32_t p, std::size_t n);

/// Calls `emit` once per subspace of F_p^n in canonical order. Throws
/// ResourceError when the count exceeds `bounds.max_subspaces`.
void enumerate_subspaces(std::uint32_t p, std::size_t n,
                         const std::function<void(const Subspace&)>& emit,
                         const Bounds& bounds = {});
std::vector<Subspace> all_subspaces(std::uint32_t p, std::size_t n, const Bounds& bounds = {});

/// Every vector of F_p^n in lexicographic coordinate order (coordinate 0
/// varies slowest).
std::vector<FpVec> all_vectors(std::uint32_t p, std::size_t n);

}  // namespace multclose

template <>
struct std::hash<multclose::Subspace> {
    std::size_t operator()(const multclose::Subspace& s) const { return s.hash(); }
};
