#pragma once

#include "smx/models.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace smx {

struct VerifyOptions {
    double tolerance = 1e-6;   // relative increment bound of the direct limit, pairing agreement
    double fit_tolerance = 1e-8;
    double extraction_tolerance = 1e-3;
    std::uint64_t seed = 1;
    unsigned cases = 120;      // randomized cases per seeded suite
};

/// Numeric suites in the Euclidean backend. Each returns one line per check.
CheckReport verify_direct_limit(const VerifyOptions& o = {});
CheckReport verify_scaling_fit(const VerifyOptions& o = {});
/// Both sides of the restriction identities of the Euclidean setting-sun
/// extension, paired with a test function supported away from the origin.
CheckReport verify_pairing_oracle(const VerifyOptions& o = {});
/// Planted coefficients drawn from `seed`, recovered from mass samples.
CheckReport verify_extraction(const VerifyOptions& o = {});

/// Seeded symbolic properties: restriction identity of every extension,
/// moment-solver certificates, sm_product degree additivity and
/// associativity, growth of the homogeneity power by at most 1.
CheckReport verify_symbolic_properties(const VerifyOptions& o = {});
/// Seeded dimreg properties: joint homogeneity of truncated products,
/// exact projection of planted mixtures, no p = 0 bin with c != 0.
CheckReport verify_dimreg_properties(const VerifyOptions& o = {});

/// direct-limit, scaling-fit, pairing-oracle, extraction, properties, dimreg
const std::vector<std::string>& verify_suite_names();
/// Throws InvalidArgument for an unknown name; "all" concatenates every suite.
CheckReport verify_suite(const std::string& name, const VerifyOptions& o = {});

} // namespace smx
