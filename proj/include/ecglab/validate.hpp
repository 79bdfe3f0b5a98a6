#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ecglab/rng.hpp"

namespace ecglab {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // the measured quantity
  double threshold = 0.0;  // what it was compared against
  std::string detail;
};

struct ValidationOptions {
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
};

/// The invariant suite: exact identities from the geometry, measure and
/// cocycle layers plus the fixed-seed statistical checks. Each check runs
/// independently; an exception inside one is reported as its failure.
std::vector<CheckResult> run_validation(const ValidationOptions& options,
                                        const std::function<void(const CheckResult&)>& progress = {});

}  // namespace ecglab
