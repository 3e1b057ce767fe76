#pragma once

#include "rnp/core_model.hpp"

#include <string_view>
#include <vector>

namespace rnp {

/// bit: bilateral CNOT keeper -> fresh, fresh read out in Z; removes Psi+/-.
/// phase: bilateral CNOT fresh -> keeper, fresh read out in X; removes Phi-.
enum class PumpKind { bit, phase };

std::string_view to_string(PumpKind kind);

struct StepRecord {
    PumpKind kind = PumpKind::bit;
    BellDiagonalState state_before;
    double success_prob = 1.0;
    BellDiagonalState state_after_success;
};

struct PumpTrace {
    PumpSchedule schedule;
    std::vector<StepRecord> steps;
    BellDiagonalState final_state;
    double infidelity = 0.0;

    /// Acceptance probabilities of the steps of the given kind, in order.
    std::vector<double> success_probs(PumpKind kind) const;
};

/// Raw pair from entanglement generation: Werner form for depolarizing
/// noise, (F, 1-F, 0, 0) for dephasing.
BellDiagonalState raw_pair(const ErrorParams& params);

/// One pumping step on the keeper `target` consuming `fresh`.
///
/// Each of the two local CNOTs is followed by a two-qubit depolarizing
/// channel rho -> (1-p_L) rho + p_L/16 sum_P P rho P over all 16 Paulis,
/// and each of the two compared outcomes is flipped with probability
/// eps_meas. The step succeeds when the reported outcomes agree.
StepRecord pump_step(const BellDiagonalState& target, const BellDiagonalState& fresh, PumpKind kind, double p_local,
                     double eps_meas);

/// n_b bit steps fed with raw pairs, then n_p phase steps in which the
/// bit-purified pair serves as both keeper seed and fresh input.
PumpTrace run_two_level(PumpSchedule schedule, const ErrorParams& params, double eps_meas);

/// Alternating bit/phase steps (starting with bit), raw pairs as fresh input.
PumpTrace run_standard(int total_steps, const ErrorParams& params, double eps_meas);

/// Leading-order infidelity of two-level pumping under depolarizing noise:
///   (3+2n_p)/4 p_L + (4+2(n_b+n_p))/3 (1-F) eps_M
///   + (n_p+1) (2(1-F)/3)^(n_b+1) + ((n_b+1)(1-F)/3)^(n_p+1)
double closed_form_infidelity(PumpSchedule schedule, const ErrorParams& params, double eps_meas);

}  // namespace rnp
