#pragma once

#include "rnp/core_model.hpp"
#include "rnp/verify.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rnp::cli {

enum ExitCode : int {
    kOk = 0,
    kVerificationFailed = 1,
    kFlagError = 2,
    kDomainError = 3,
    kIoError = 4,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. `step` is forwarded to `verify`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const verify::PumpStepFn& step = pump_step);

struct SweepGrid {
    double p_local_min = 1e-6;
    double p_local_max = 1e-3;
    int p_local_points = 13;
    double fidelity_min = 0.90;
    double fidelity_max = 0.99;
    int fidelity_points = 10;
};

/// p_L values (log-spaced) and F values (linear), endpoints exact.
std::vector<double> log_grid(double lo, double hi, int points);
std::vector<double> linear_grid(double lo, double hi, int points);

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double value);

}  // namespace rnp::cli
