#pragma once

// Finite side of star-operation counting for one-dimensional Noetherian
// domains: the conductor quotient A ⊆ B is a finite extension, and star /
// fractional star operations correspond to multiplicative operations on
// F0(A, B). Shapes B = Π GF(p^f)[x]/(x^e) with Σ e f = n are enumerated here.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multclose/closures.hpp"

namespace multclose {

struct ArtinianShape {
    std::vector<std::pair<std::size_t, std::size_t>> parts;  // (e, f)

    std::size_t t() const { return parts.size(); }
    std::size_t n() const;
    /// "(3,1)" or "(2,1)(1,1)".
    std::string to_string() const;
    bool operator==(const ArtinianShape&) const = default;
};

/// Every multiset of (e, f) with Σ e f = n. Ordered by t, then by the parts
/// compared with the key (e f, e, f) descending.
std::vector<ArtinianShape> structure_cases(std::size_t n);

/// A = F_p inside Π GF(p^f)[x]/(x^e).
ExtensionPtr realize_shape(const ArtinianShape& shape, std::uint32_t p, const Bounds& bounds = {});

/// Number of multiplicative operations on F0(A, B).
std::size_t fstar_count(const ExtensionPtr& ext, const Bounds& bounds = {});
/// Those that close A itself.
std::size_t star_count(const ExtensionPtr& ext, const Bounds& bounds = {});

struct FstarSummary {
    std::size_t members = 0;
    std::size_t fstar = 0;
    std::size_t star = 0;
};
/// Both counts from one enumeration.
FstarSummary fstar_summary(const ExtensionPtr& ext, const Bounds& bounds = {});

struct TwoextReport {
    bool ok = false;
    std::vector<std::string> lines;
};

/// The two-generator example in F_2 ⊆ F_2[x]/(x^3): colon chain, the op
/// generated by span{1} and span{1,x^2}, and a pair of distinct ops on
/// ALL_NONZERO with the same restriction to F0.
TwoextReport verify_twoext(const Bounds& bounds = {});

struct SurveyRow {
    ArtinianShape shape;
    std::size_t dim = 0;
    std::optional<FstarSummary> counts;  // empty when skipped
    std::string skipped;
};

/// One row per shape of structure_cases(n); rows beyond the bounds are
/// skipped, not fatal. Rows are computed in parallel, order is fixed.
std::vector<SurveyRow> survey(std::size_t n, std::uint32_t p, const Bounds& bounds = {});
std::string format_survey(const std::vector<SurveyRow>& rows, bool tsv);
std::string format_cases(const std::vector<ArtinianShape>& shapes, bool tsv);

}  // namespace multclose
