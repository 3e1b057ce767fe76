#pragma once

#include "rnp/pumping.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rnp::verify {

using PumpStepFn =
    std::function<StepRecord(const BellDiagonalState&, const BellDiagonalState&, PumpKind, double, double)>;

struct Options {
    long long trials = 100'000;
    std::uint64_t seed = 7;
    int threads = 1;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    /// Informational checks are reported but never fail the run.
    bool informational = false;
    std::string detail;
};

/// Runs the fixed cross-check grids. `step` replaces the recurrence under
/// test so a tampered implementation can be injected.
std::vector<CheckResult> run_all(const Options& options, const PumpStepFn& step = pump_step);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace rnp::verify
