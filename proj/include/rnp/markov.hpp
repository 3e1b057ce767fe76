#pragma once

#include "rnp/core_model.hpp"
#include "rnp/pumping.hpp"

#include <stdexcept>
#include <vector>

namespace rnp {

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Progress of two-level pumping: `level` counts bit-purified pairs
/// finished (0 = building the phase-level keeper, L >= 1 = building the
/// fresh pair for phase step L); `consumed` counts raw pairs already
/// absorbed into the pair under construction (0..n_b).
struct ChainState {
    int level = 0;
    int consumed = 0;
    bool done = false;

    friend bool operator==(const ChainState&, const ChainState&) = default;
};

struct Transition {
    std::size_t to = 0;
    double prob = 0.0;
};

/// Absorbing chain over raw-pair consumption: every transition out of a
/// transient state consumes exactly one raw pair. Phase steps consume no raw
/// pair and are folded into the transition that completes a fresh pair.
class MarkovChain {
public:
    MarkovChain(PumpSchedule schedule, std::vector<double> bit_success, std::vector<double> phase_success,
                RestartMode mode);

    const PumpSchedule& schedule() const { return schedule_; }
    RestartMode restart_mode() const { return mode_; }
    const std::vector<ChainState>& states() const { return states_; }
    /// Probability that the raw pair consumed from state i is accepted
    /// (fresh-pair completion includes the following phase step).
    const std::vector<double>& step_success() const { return step_success_; }
    const std::vector<Transition>& transitions(std::size_t state) const { return rows_[state]; }

    std::size_t initial() const { return 0; }
    std::size_t absorbing() const { return states_.size() - 1; }
    std::size_t size() const { return states_.size(); }

    /// Applies one chain step to a distribution over states.
    std::vector<double> advance(const std::vector<double>& dist) const;

private:
    std::size_t index(int level, int consumed) const;

    PumpSchedule schedule_;
    RestartMode mode_;
    std::vector<double> bit_success_;
    std::vector<double> phase_success_;
    std::vector<ChainState> states_;
    std::vector<double> step_success_;
    std::vector<std::vector<Transition>> rows_;
};

MarkovChain build_chain(const PumpTrace& trace, RestartMode mode);

/// 1 - P[absorbed within `budget` raw pairs].
double failure_probability(const MarkovChain& chain, long long budget);

/// Expected raw pairs until absorption, from the fundamental matrix.
/// Throws ConvergenceError when some step can never succeed.
double expected_pairs(const MarkovChain& chain);

/// Smallest budget with failure_probability <= delta_min, found by doubling
/// then bisection. Throws BudgetExceeded past `cap`.
long long solve_budget(const MarkovChain& chain, double delta_min, long long cap = 1'000'000);

struct ScheduleChoice {
    PumpSchedule schedule;
    double delta_min = 0.0;
    PumpTrace trace;
};

/// Exhaustive search over n_b, n_p in [0, bound] for minimal pumped
/// infidelity; ties go to smaller n_b + n_p, then smaller n_p. Dephasing
/// noise searches one-level schedules (n_b = 0) unless `one_level_dephasing`
/// is false.
ScheduleChoice optimize_schedule(const ErrorParams& params, double eps_meas, int bound = PumpSchedule::kDefaultBound,
                                 bool one_level_dephasing = true);

struct PlanOptions {
    int bound = PumpSchedule::kDefaultBound;
    RestartMode restart_mode = RestartMode::full_restart;
    long long budget_cap = 1'000'000;
    bool one_level_dephasing = true;
    double memory_threshold = 0.01;
};

/// optimize_schedule -> build_chain -> solve_budget, composed with the
/// measurement and timing models into clock cycle and effective gate error.
PlanResult plan(const ErrorParams& params, const PhysicalTimings& timings, const MeasurementPlan& meas,
                const PlanOptions& options = {});

/// Order-of-magnitude error of the unpurified non-local CNOT,
/// (1-F) + 2 p_L + 2 p_M.
double raw_cnot_error(const ErrorParams& params);

}  // namespace rnp
