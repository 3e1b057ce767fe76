#include "rnp/pumping.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace rnp {

namespace {

void require_step_probability(double value, std::string_view name) {
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
        std::ostringstream msg;
        msg << name << " out of range: " << value;
        throw DomainError(msg.str());
    }
}

constexpr int frame(int x, int z) { return 2 * x + z; }

}  // namespace

std::string_view to_string(PumpKind kind) { return kind == PumpKind::bit ? "bit" : "phase"; }

std::vector<double> PumpTrace::success_probs(PumpKind kind) const {
    std::vector<double> out;
    for (const StepRecord& s : steps) {
        if (s.kind == kind) out.push_back(s.success_prob);
    }
    return out;
}

BellDiagonalState raw_pair(const ErrorParams& params) {
    const ErrorParams p = validate_purifiable(params);
    if (p.noise == NoiseKind::depolarizing) return BellDiagonalState::werner(p.fidelity);
    return {p.fidelity, 1.0 - p.fidelity, 0.0, 0.0};
}

StepRecord pump_step(const BellDiagonalState& target, const BellDiagonalState& fresh, PumpKind kind, double p_local,
                     double eps_meas) {
    require_step_probability(p_local, "p_L");
    require_step_probability(eps_meas, "eps_M");

    // Joint Pauli frame of (keeper, fresh) after the bilateral CNOT.
    std::array<std::array<double, 4>, 4> joint{};
    for (int k = 0; k < 4; ++k) {
        const int xk = k >> 1, zk = k & 1;
        for (int f = 0; f < 4; ++f) {
            const int xf = f >> 1, zf = f & 1;
            const double w = target[k] * fresh[f];
            if (kind == PumpKind::bit) {
                joint[frame(xk, zk ^ zf)][frame(xf ^ xk, zf)] += w;
            } else {
                joint[frame(xk ^ xf, zk)][frame(xf, zf ^ zk)] += w;
            }
        }
    }

    // Two independent uniform-Pauli channels XOR to one: with probability
    // 1-(1-p)^2 the 4-bit frame is replaced by a uniform one.
    const double scrambled = 1.0 - (1.0 - p_local) * (1.0 - p_local);
    // Reported outcomes disagree with the true parity with this probability.
    const double flip = 2.0 * eps_meas * (1.0 - eps_meas);

    std::array<double, 4> kept{};
    for (int k = 0; k < 4; ++k) {
        for (int f = 0; f < 4; ++f) {
            const double w = (1.0 - scrambled) * joint[k][f] + scrambled / 16.0;
            const int detected = kind == PumpKind::bit ? (f >> 1) : (f & 1);
            kept[k] += w * (detected ? flip : 1.0 - flip);
        }
    }

    StepRecord rec;
    rec.kind = kind;
    rec.state_before = target;
    rec.success_prob = kept[0] + kept[1] + kept[2] + kept[3];
    rec.state_after_success = BellDiagonalState::from_unnormalized(kept);
    return rec;
}

PumpTrace run_two_level(PumpSchedule schedule, const ErrorParams& params, double eps_meas) {
    if (schedule.n_bit < 0 || schedule.n_phase < 0) throw DomainError("pump step counts must be nonnegative");
    const BellDiagonalState raw = raw_pair(params);

    PumpTrace trace;
    trace.schedule = schedule;
    trace.steps.reserve(static_cast<std::size_t>(schedule.total_steps()));

    BellDiagonalState keeper = raw;
    for (int i = 0; i < schedule.n_bit; ++i) {
        trace.steps.push_back(pump_step(keeper, raw, PumpKind::bit, params.p_local, eps_meas));
        keeper = trace.steps.back().state_after_success;
    }
    const BellDiagonalState bit_purified = keeper;
    for (int j = 0; j < schedule.n_phase; ++j) {
        trace.steps.push_back(pump_step(keeper, bit_purified, PumpKind::phase, params.p_local, eps_meas));
        keeper = trace.steps.back().state_after_success;
    }
    trace.final_state = keeper;
    trace.infidelity = keeper.infidelity();
    return trace;
}

PumpTrace run_standard(int total_steps, const ErrorParams& params, double eps_meas) {
    if (total_steps < 0) throw DomainError("total_steps must be nonnegative");
    const BellDiagonalState raw = raw_pair(params);

    PumpTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(total_steps));
    BellDiagonalState keeper = raw;
    for (int s = 0; s < total_steps; ++s) {
        const PumpKind kind = s % 2 == 0 ? PumpKind::bit : PumpKind::phase;
        trace.steps.push_back(pump_step(keeper, raw, kind, params.p_local, eps_meas));
        keeper = trace.steps.back().state_after_success;
        ++(kind == PumpKind::bit ? trace.schedule.n_bit : trace.schedule.n_phase);
    }
    trace.final_state = keeper;
    trace.infidelity = keeper.infidelity();
    return trace;
}

double closed_form_infidelity(PumpSchedule schedule, const ErrorParams& params, double eps_meas) {
    const ErrorParams p = validate(params);
    if (p.noise != NoiseKind::depolarizing) throw DomainError("closed-form infidelity assumes depolarizing noise");
    require_step_probability(eps_meas, "eps_M");
    const double nb = schedule.n_bit;
    const double np = schedule.n_phase;
    const double e = 1.0 - p.fidelity;
    return (3.0 + 2.0 * np) / 4.0 * p.p_local + (4.0 + 2.0 * (nb + np)) / 3.0 * e * eps_meas +
           (np + 1.0) * std::pow(2.0 * e / 3.0, nb + 1.0) + std::pow((nb + 1.0) * e / 3.0, np + 1.0);
}

}  // namespace rnp
