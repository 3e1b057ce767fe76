#pragma once

#include "rnp/core_model.hpp"

#include <optional>

namespace rnp {

struct OpticalTimes {
    double t_init = 0.0;
    double t_meas = 0.0;
};

/// Optical initialization and readout time, ln(p_M)/ln(1-eta) * tau/C.
OpticalTimes optical_times(double p_meas, double eta, double tau, double purcell_c);

/// Heralded two-photon entanglement generation, (t_I + tau/C) / eta^2.
double entanglement_time(double t_init, double tau, double purcell_c, double eta);

struct MemoryCheck {
    static constexpr double kDefaultThreshold = 0.01;

    double ratio = 0.0;
    bool warning = false;
};

/// t_C / t_mem, flagged when above the threshold.
MemoryCheck memory_check(double t_cycle, double t_mem, double threshold = MemoryCheck::kDefaultThreshold);

/// Assembles PhysicalTimings from hardware constants; t_I = t_M.
PhysicalTimings make_timings(double p_meas, double t_local, double tau, double eta, double purcell_c,
                             std::optional<double> t_mem = std::nullopt);

}  // namespace rnp
