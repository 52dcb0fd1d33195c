#pragma once

// Configuration files and the command-line driver behind the `multclose`
// executable.
//
// Config format (key = value, '#' starts a comment):
//   p = 2
//   factors = (f=2,e=1) (f=1,e=3)
//   subring = prime | gens: 1 0 0;0 0 1
//   family = f0 | all | all-nonzero | ideals | custom: <subspace> | <subspace> ...
// A custom member is a serialized subspace: rows of residues joined by ';'.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multclose/bounds.hpp"
#include "multclose/submodules.hpp"

namespace multclose {

struct RunConfig {
    std::uint32_t p = 2;
    std::vector<std::pair<std::size_t, std::size_t>> factors;  // (f, e)
    std::optional<std::vector<std::string>> subring_gens;       // empty optional: prime subring
    std::optional<std::string> family;
    std::vector<std::string> custom_members;
};

/// InputError on unknown keys, duplicates, or malformed values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

ExtensionPtr build_extension(const RunConfig& config);
/// `selector` overrides the family of the config when given.
FamilyPtr build_family(const LatticePtr& lattice, const RunConfig& config, const std::optional<std::string>& selector);

/// Runs one command line (without the program name). Returns the exit code:
/// 0 success, 1 input error, 2 resource bound, 3 internal invariant failure.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace multclose
