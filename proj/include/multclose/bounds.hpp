#pragma once

#include <cstddef>
#include <cstdint>

namespace multclose {

/// Safety limits for the exhaustive parts of the library.
///
/// Subspace counts grow like p^(d^2/4), so every enumerating entry point
/// takes a Bounds and refuses (ResourceError) rather than running away.
struct Bounds {
    std::size_t max_dim = 8;            // ambient F_p-dimension of B
    std::uint32_t max_prime = 5;
    std::size_t max_subspaces = 2'000'000;
    std::size_t max_ops = 1'000'000;    // operations kept by enumerate_ops
    std::size_t oracle_max = 12;        // family size accepted by the oracle
    unsigned workers = 1;

    /// Defaults, with MULTCLOSE_MAX_DIM applied when set.
    static Bounds from_environment();
};

}  // namespace multclose
