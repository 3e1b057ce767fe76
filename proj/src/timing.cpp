#include "rnp/timing.hpp"

#include <cmath>
#include <sstream>
#include <string_view>

namespace rnp {

namespace {

void require_positive(double value, std::string_view name) {
    if (!std::isfinite(value) || !(value > 0.0)) {
        std::ostringstream msg;
        msg << name << " must be positive and finite, got " << value;
        throw DomainError(msg.str());
    }
}

void require_open_unit(double value, std::string_view name) {
    if (!std::isfinite(value) || !(value > 0.0) || !(value < 1.0)) {
        std::ostringstream msg;
        msg << name << " must lie in (0, 1), got " << value;
        throw DomainError(msg.str());
    }
}

void require_purcell(double purcell_c) {
    if (!std::isfinite(purcell_c) || purcell_c < 1.0) {
        std::ostringstream msg;
        msg << "Purcell factor C must be >= 1, got " << purcell_c;
        throw DomainError(msg.str());
    }
}

}  // namespace

OpticalTimes optical_times(double p_meas, double eta, double tau, double purcell_c) {
    require_open_unit(p_meas, "p_M");
    require_open_unit(eta, "eta");
    require_positive(tau, "tau");
    require_purcell(purcell_c);
    const double t = std::log(p_meas) / std::log1p(-eta) * tau / purcell_c;
    return {t, t};
}

double entanglement_time(double t_init, double tau, double purcell_c, double eta) {
    require_positive(t_init, "t_I");
    require_positive(tau, "tau");
    require_purcell(purcell_c);
    if (!std::isfinite(eta) || !(eta > 0.0) || eta > 1.0) {
        std::ostringstream msg;
        msg << "eta must lie in (0, 1], got " << eta;
        throw DomainError(msg.str());
    }
    return (t_init + tau / purcell_c) / (eta * eta);
}

MemoryCheck memory_check(double t_cycle, double t_mem, double threshold) {
    require_positive(t_cycle, "t_C");
    require_positive(t_mem, "t_mem");
    const double ratio = t_cycle / t_mem;
    return {ratio, ratio > threshold};
}

PhysicalTimings make_timings(double p_meas, double t_local, double tau, double eta, double purcell_c,
                             std::optional<double> t_mem) {
    require_positive(t_local, "t_L");
    if (t_mem) require_positive(*t_mem, "t_mem");
    const OpticalTimes optical = optical_times(p_meas, eta, tau, purcell_c);
    PhysicalTimings t;
    t.t_local = t_local;
    t.tau = tau;
    t.eta = eta;
    t.purcell_c = purcell_c;
    t.t_init = optical.t_init;
    t.t_meas = optical.t_meas;
    t.t_ent = entanglement_time(optical.t_init, tau, purcell_c, eta);
    t.t_mem = t_mem;
    return t;
}

}  // namespace rnp
