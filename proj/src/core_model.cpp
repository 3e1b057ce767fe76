#include "rnp/core_model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace rnp {

namespace {

void require_probability(double value, std::string_view name) {
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
        std::ostringstream msg;
        msg << name << " out of range: " << value << " (expected a probability in [0, 1])";
        throw DomainError(msg.str());
    }
}

std::string unpurifiable_message(double fidelity) {
    std::ostringstream msg;
    msg << "unpurifiable fidelity F=" << fidelity << " (pumping requires F > 0.5)";
    return msg.str();
}

}  // namespace

UnpurifiableError::UnpurifiableError(double fidelity) : DomainError(unpurifiable_message(fidelity)) {}

std::string_view to_string(NoiseKind kind) {
    return kind == NoiseKind::depolarizing ? "depolarizing" : "dephasing";
}

NoiseKind parse_noise_kind(std::string_view text) {
    if (text == "depolarizing") return NoiseKind::depolarizing;
    if (text == "dephasing") return NoiseKind::dephasing;
    throw DomainError("noise kind must be 'depolarizing' or 'dephasing', got '" + std::string(text) + "'");
}

std::string_view to_string(RestartMode mode) {
    return mode == RestartMode::full_restart ? "full_restart" : "level_restart";
}

RestartMode parse_restart_mode(std::string_view text) {
    if (text == "full" || text == "full_restart") return RestartMode::full_restart;
    if (text == "level" || text == "level_restart") return RestartMode::level_restart;
    throw DomainError("restart mode must be 'full' or 'level', got '" + std::string(text) + "'");
}

ErrorParams validate(const ErrorParams& params) {
    require_probability(params.p_local, "p_L");
    require_probability(params.p_init, "p_I");
    require_probability(params.p_meas, "p_M");
    require_probability(params.fidelity, "F");
    return params;
}

ErrorParams validate_purifiable(const ErrorParams& params) {
    ErrorParams out = validate(params);
    if (!(out.fidelity > 0.5)) throw UnpurifiableError(out.fidelity);
    return out;
}

BellDiagonalState::BellDiagonalState(double phi_plus, double phi_minus, double psi_plus, double psi_minus)
    : p_{phi_plus, phi_minus, psi_plus, psi_minus} {
    static constexpr const char* kNames[4] = {"phi_plus", "phi_minus", "psi_plus", "psi_minus"};
    for (std::size_t i = 0; i < 4; ++i) {
        if (!std::isfinite(p_[i]) || p_[i] < 0.0) {
            std::ostringstream msg;
            msg << "Bell component " << kNames[i] << " invalid: " << p_[i];
            throw DomainError(msg.str());
        }
    }
    const double sum = std::accumulate(p_.begin(), p_.end(), 0.0);
    if (std::abs(sum - 1.0) > kSumTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "Bell components sum to " << sum << ", expected 1";
        throw DomainError(msg.str());
    }
    for (double& v : p_) v /= sum;
}

BellDiagonalState BellDiagonalState::from_unnormalized(const std::array<double, 4>& weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw DomainError("Bell weights must be finite and nonnegative");
        sum += w;
    }
    if (!(sum > 0.0)) throw DomainError("Bell weights sum to zero");
    return {weights[0] / sum, weights[1] / sum, weights[2] / sum, weights[3] / sum};
}

BellDiagonalState BellDiagonalState::werner(double fidelity) {
    require_probability(fidelity, "F");
    const double rest = (1.0 - fidelity) / 3.0;
    return {fidelity, rest, rest, rest};
}

PumpSchedule checked_schedule(int n_bit, int n_phase, int bound) {
    if (n_bit < 0 || n_bit > bound) {
        throw DomainError("n_b out of range: " + std::to_string(n_bit) + " (bound " + std::to_string(bound) + ")");
    }
    if (n_phase < 0 || n_phase > bound) {
        throw DomainError("n_p out of range: " + std::to_string(n_phase) + " (bound " + std::to_string(bound) + ")");
    }
    return {n_bit, n_phase};
}

void check_plan_invariants(const PlanResult& plan) {
    if (plan.eps_E > 2.0 * plan.delta_min + 1e-12) throw std::logic_error("plan: eps_E exceeds 2*delta_min");
    if (plan.t_C < plan.t_robust_ent) throw std::logic_error("plan: t_C shorter than robust entanglement time");
    if (plan.gamma < plan.eps_E) throw std::logic_error("plan: gamma below eps_E");
}

}  // namespace rnp
