#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttkry/tt_tensor.hpp"

namespace ttkry::proptests {

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;  // counterexample dump or summary statistics
};

struct SuiteOptions {
    std::uint64_t seed = 42;
    bool fault_round_threshold = false;  // sabotage one rounding threshold
    int rounding_tensors = 500;
    int gap_systems = 50;
    int dmrg_seeds = 10;
};

/// Runs every module invariant with the given seed. Deterministic: the same
/// options produce byte-identical results.
std::vector<PropertyResult> run_property_suite(const SuiteOptions& opts);

// Individual suites, shared with the acceptance harness.
PropertyResult rounding_suite(std::uint64_t seed, int tensors,
                              const std::vector<double>& eps_list, bool fault);
PropertyResult residual_gap_suite(std::uint64_t seed, int systems,
                                  const std::vector<double>& eps_list);
PropertyResult dense_tt_equivalence(Index n);
PropertyResult expsum_quadrature_suite();
PropertyResult dmrg_stall_suite(std::uint64_t seed, int nseeds);

}  // namespace ttkry::proptests
