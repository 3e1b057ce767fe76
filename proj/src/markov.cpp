#include "rnp/markov.hpp"

#include "rnp/timing.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>

namespace rnp {

namespace {

void add_transition(std::vector<Transition>& row, std::size_t to, double prob) {
    if (prob <= 0.0) return;
    for (Transition& t : row) {
        if (t.to == to) {
            t.prob += prob;
            return;
        }
    }
    row.push_back({to, prob});
}

double transient_mass(const MarkovChain& chain, const std::vector<double>& dist) {
    double mass = 0.0;
    for (std::size_t i = 0; i < chain.absorbing(); ++i) mass += dist[i];
    return std::clamp(mass, 0.0, 1.0);
}

std::vector<double> propagate(const MarkovChain& chain, std::vector<double> dist, long long steps) {
    for (long long s = 0; s < steps; ++s) dist = chain.advance(dist);
    return dist;
}

void require_success_list(const std::vector<double>& probs, std::size_t expected, std::string_view name) {
    if (probs.size() != expected) {
        std::ostringstream msg;
        msg << name << " success list has " << probs.size() << " entries, expected " << expected;
        throw DomainError(msg.str());
    }
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw DomainError(std::string(name) + " success probability out of range");
    }
}

}  // namespace

MarkovChain::MarkovChain(PumpSchedule schedule, std::vector<double> bit_success, std::vector<double> phase_success,
                         RestartMode mode)
    : schedule_(schedule), mode_(mode), bit_success_(std::move(bit_success)), phase_success_(std::move(phase_success)) {
    if (schedule_.n_bit < 0 || schedule_.n_phase < 0) throw DomainError("schedule step counts must be nonnegative");
    require_success_list(bit_success_, static_cast<std::size_t>(schedule_.n_bit), "bit");
    require_success_list(phase_success_, static_cast<std::size_t>(schedule_.n_phase), "phase");

    const int nb = schedule_.n_bit;
    const int np = schedule_.n_phase;
    for (int level = 0; level <= np; ++level) {
        for (int consumed = 0; consumed <= nb; ++consumed) states_.push_back({level, consumed, false});
    }
    states_.push_back({np, nb + 1, true});

    const std::size_t done = absorbing();
    rows_.resize(states_.size());
    step_success_.resize(states_.size(), 1.0);
    rows_[done].push_back({done, 1.0});

    for (std::size_t s = 0; s < done; ++s) {
        const auto [level, consumed, _] = states_[s];
        auto& row = rows_[s];
        const double accepted = consumed == 0 ? 1.0 : bit_success_[static_cast<std::size_t>(consumed - 1)];
        const std::size_t bit_restart = mode_ == RestartMode::full_restart ? initial() : index(level, 0);
        add_transition(row, bit_restart, 1.0 - accepted);

        if (consumed < nb) {
            add_transition(row, index(level, consumed + 1), accepted);
            step_success_[s] = accepted;
        } else if (level == 0) {
            add_transition(row, np == 0 ? done : index(1, 0), accepted);
            step_success_[s] = accepted;
        } else {
            const double phase_ok = phase_success_[static_cast<std::size_t>(level - 1)];
            add_transition(row, level == np ? done : index(level + 1, 0), accepted * phase_ok);
            // A failed phase comparison discards the keeper.
            add_transition(row, initial(), accepted * (1.0 - phase_ok));
            step_success_[s] = accepted * phase_ok;
        }
    }
}

std::size_t MarkovChain::index(int level, int consumed) const {
    return static_cast<std::size_t>(level) * static_cast<std::size_t>(schedule_.n_bit + 1) +
           static_cast<std::size_t>(consumed);
}

std::vector<double> MarkovChain::advance(const std::vector<double>& dist) const {
    std::vector<double> next(states_.size(), 0.0);
    for (std::size_t s = 0; s < states_.size(); ++s) {
        const double w = dist[s];
        if (w == 0.0) continue;
        for (const Transition& t : rows_[s]) next[t.to] += w * t.prob;
    }
    return next;
}

MarkovChain build_chain(const PumpTrace& trace, RestartMode mode) {
    return MarkovChain(trace.schedule, trace.success_probs(PumpKind::bit), trace.success_probs(PumpKind::phase), mode);
}

double failure_probability(const MarkovChain& chain, long long budget) {
    if (budget < 0) throw DomainError("budget must be nonnegative");
    std::vector<double> dist(chain.size(), 0.0);
    dist[chain.initial()] = 1.0;
    return transient_mass(chain, propagate(chain, std::move(dist), budget));
}

double expected_pairs(const MarkovChain& chain) {
    const std::size_t n = chain.absorbing();
    for (std::size_t s = 0; s < n; ++s) {
        if (!(chain.step_success()[s] > 0.0)) {
            throw ConvergenceError("chain never absorbs: state " + std::to_string(s) + " has zero success probability");
        }
    }
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(dim, dim);
    for (std::size_t s = 0; s < n; ++s) {
        for (const Transition& t : chain.transitions(s)) {
            if (t.to < n) lhs(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t.to)) -= t.prob;
        }
    }
    const Eigen::VectorXd steps = lhs.partialPivLu().solve(Eigen::VectorXd::Ones(dim));
    const double value = steps(static_cast<Eigen::Index>(chain.initial()));
    if (!std::isfinite(value) || value < 1.0) throw ConvergenceError("fundamental-matrix solve failed");
    return value;
}

long long solve_budget(const MarkovChain& chain, double delta_min, long long cap) {
    if (!std::isfinite(delta_min) || delta_min < 0.0 || delta_min > 1.0) {
        throw DomainError("delta_min must lie in [0, 1]");
    }
    std::vector<double> lo_dist(chain.size(), 0.0);
    lo_dist[chain.initial()] = 1.0;
    if (transient_mass(chain, lo_dist) <= delta_min) return 0;

    // Invariant: failure(lo) > delta_min >= failure(hi); lo_dist is the
    // distribution after lo steps.
    long long lo = 0;
    long long hi = 1;
    std::vector<double> hi_dist = chain.advance(lo_dist);
    while (transient_mass(chain, hi_dist) > delta_min) {
        if (hi >= cap) {
            std::ostringstream msg;
            msg << "raw-pair budget exceeds cap of " << cap << " for delta_min=" << delta_min;
            throw BudgetExceeded(msg.str());
        }
        lo = hi;
        lo_dist = std::move(hi_dist);
        hi = std::min(2 * hi, cap);
        hi_dist = propagate(chain, lo_dist, hi - lo);
    }
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        std::vector<double> mid_dist = propagate(chain, lo_dist, mid - lo);
        if (transient_mass(chain, mid_dist) <= delta_min) {
            hi = mid;
        } else {
            lo = mid;
            lo_dist = std::move(mid_dist);
        }
    }
    return hi;
}

ScheduleChoice optimize_schedule(const ErrorParams& params, double eps_meas, int bound, bool one_level_dephasing) {
    if (bound < 0) throw DomainError("schedule bound must be nonnegative");
    const ErrorParams p = validate_purifiable(params);
    const BellDiagonalState raw = raw_pair(p);
    const int max_bit = (p.noise == NoiseKind::dephasing && one_level_dephasing) ? 0 : bound;

    using Key = std::tuple<double, int, int>;
    Key best{2.0, 0, 0};
    PumpSchedule best_schedule;

    // Same step sequence as run_two_level, shared across schedules.
    BellDiagonalState bit_purified = raw;
    for (int nb = 0; nb <= max_bit; ++nb) {
        if (nb > 0) bit_purified = pump_step(bit_purified, raw, PumpKind::bit, p.p_local, eps_meas).state_after_success;
        BellDiagonalState keeper = bit_purified;
        for (int np = 0; np <= bound; ++np) {
            if (np > 0) keeper = pump_step(keeper, bit_purified, PumpKind::phase, p.p_local, eps_meas).state_after_success;
            const Key key{keeper.infidelity(), nb + np, np};
            if (key < best) {
                best = key;
                best_schedule = {nb, np};
            }
        }
    }

    ScheduleChoice choice;
    choice.schedule = best_schedule;
    choice.trace = run_two_level(best_schedule, p, eps_meas);
    choice.delta_min = choice.trace.infidelity;
    return choice;
}

double raw_cnot_error(const ErrorParams& params) {
    const ErrorParams p = validate(params);
    return (1.0 - p.fidelity) + 2.0 * p.p_local + 2.0 * p.p_meas;
}

PlanResult plan(const ErrorParams& params, const PhysicalTimings& timings, const MeasurementPlan& meas,
                const PlanOptions& options) {
    const ErrorParams p = validate_purifiable(params);
    const ScheduleChoice choice = optimize_schedule(p, meas.eps_meas, options.bound, options.one_level_dephasing);
    const MarkovChain chain = build_chain(choice.trace, options.restart_mode);

    PlanResult r;
    r.schedule = choice.schedule;
    r.restart_mode = options.restart_mode;
    r.measurement = meas;
    r.delta_min = choice.delta_min;
    r.n_tot_budget = solve_budget(chain, r.delta_min, options.budget_cap);
    r.eps_fail = failure_probability(chain, r.n_tot_budget);
    r.expected_pairs = expected_pairs(chain);
    r.eps_E = r.eps_fail + r.delta_min;

    const double per_pair = timings.t_ent + timings.t_local + meas.duration_s;
    const double overhead = 2.0 * timings.t_local + meas.duration_s;
    r.t_robust_ent = r.expected_pairs * per_pair;
    r.t_C = r.t_robust_ent + overhead;
    r.t_robust_ent_budget = static_cast<double>(r.n_tot_budget) * per_pair;
    r.t_C_budget = r.t_robust_ent_budget + overhead;

    r.gamma = r.eps_E + 2.0 * p.p_local + 2.0 * meas.eps_meas;
    r.p_cnot_raw = raw_cnot_error(p);
    if (timings.t_mem) {
        const MemoryCheck mem = memory_check(r.t_C, *timings.t_mem, options.memory_threshold);
        r.memory_ratio = mem.ratio;
        r.memory_warning = mem.warning;
    }
    check_plan_invariants(r);
    return r;
}

}  // namespace rnp
