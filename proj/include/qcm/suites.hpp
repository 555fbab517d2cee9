#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcm/coherence.hpp"

namespace qcm {

// Randomized verification suites with recorded seeds, shared by the CLI and
// the acceptance tests. Every failure line carries the instance seed so the
// case can be replayed.
struct SuiteResult {
  std::string name;
  std::uint64_t seed = 0;
  int instances = 0;
  bool passed = false;
  double worst = 0.0;  // suite-specific worst-case metric
  std::vector<std::string> failures;
};

// Faithful primal, reduced primal, and dual optima pairwise agree; certified
// gaps stay small. worst = max pairwise disagreement.
SuiteResult run_duality_suite(std::uint64_t seed, int per_dim = 20,
                              const std::vector<int>& dims = {2, 3},
                              double agree_tol = 1e-6, double gap_tol = 1e-7);

// Strong monotonicity under random incoherent instruments.
SuiteResult run_monotonicity_suite(std::uint64_t seed, int instruments = 20,
                                   const std::vector<int>& dims = {2, 3},
                                   double slack = 1e-6);

// Faithfulness on diagonal states, identity-channel witness bound, positive
// scaling, and diagonal-unitary invariance.
SuiteResult run_invariants_suite(std::uint64_t seed, int instances = 10,
                                 const std::vector<int>& dims = {2, 3});

// Full Theorem-4 chain on random instances. worst = largest ordering excess.
SuiteResult run_hierarchy_suite(std::uint64_t seed, int per_dim = 50,
                                const std::vector<int>& dims = {2, 3, 4},
                                double slack = 1e-6);

}  // namespace qcm
