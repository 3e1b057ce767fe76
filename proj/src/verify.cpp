#include "rnp/verify.hpp"

#include "rnp/markov.hpp"
#include "rnp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rnp::verify {

namespace {

constexpr double kOracleTolerance = 1e-10;

std::string format(double value) {
    std::ostringstream out;
    out.precision(3);
    out << value;
    return out.str();
}

std::vector<std::pair<BellDiagonalState, BellDiagonalState>> oracle_inputs(double fidelity) {
    const BellDiagonalState werner = BellDiagonalState::werner(fidelity);
    const double e = 1.0 - fidelity;
    const BellDiagonalState skewed(fidelity, e / 2.0, e / 3.0, e / 6.0);
    return {{werner, werner}, {skewed, werner}};
}

CheckResult oracle_equivalence(const PumpStepFn& step) {
    CheckResult r{"oracle-equivalence", true, false, {}};
    double worst = 0.0;
    int cases = 0;
    for (double f : {0.8, 0.9, 0.95}) {
        for (double p_local : {0.0, 1e-3}) {
            for (double eps : {0.0, 1e-2}) {
                for (PumpKind kind : {PumpKind::bit, PumpKind::phase}) {
                    for (const auto& [target, fresh] : oracle_inputs(f)) {
                        const StepRecord rec = step(target, fresh, kind, p_local, eps);
                        const oracle::StepOutcome ref = oracle::simulate_pump_step(target, fresh, kind, p_local, eps);
                        worst = std::max(worst, std::abs(rec.success_prob - ref.success_prob));
                        for (std::size_t i = 0; i < 4; ++i) {
                            worst = std::max(worst, std::abs(rec.state_after_success[i] - ref.state[i]));
                        }
                        ++cases;
                    }
                }
            }
        }
    }
    r.passed = worst <= kOracleTolerance;
    r.detail = "max deviation " + format(worst) + " over " + std::to_string(cases) + " steps";
    return r;
}

CheckResult fixed_point(const PumpStepFn& step) {
    CheckResult r{"perfect-pair-fixed-point", true, false, {}};
    const BellDiagonalState perfect;
    double worst = 0.0;
    for (PumpKind kind : {PumpKind::bit, PumpKind::phase}) {
        const StepRecord rec = step(perfect, perfect, kind, 0.0, 0.0);
        worst = std::max({worst, std::abs(rec.success_prob - 1.0), rec.state_after_success.infidelity()});
    }
    r.passed = worst <= kOracleTolerance;
    r.detail = "max deviation " + format(worst);
    return r;
}

CheckResult bit_suppression(const PumpStepFn& step) {
    CheckResult r{"bit-error-suppression", true, false, {}};
    int violations = 0;
    for (double f : {0.8, 0.9, 0.95, 0.99}) {
        const BellDiagonalState raw = BellDiagonalState::werner(f);
        BellDiagonalState keeper = raw;
        double previous = keeper.bit_error();
        for (int n = 1; n <= 8; ++n) {
            keeper = step(keeper, raw, PumpKind::bit, 0.0, 0.0).state_after_success;
            if (!(keeper.bit_error() < previous)) ++violations;
            previous = keeper.bit_error();
        }
    }
    r.passed = violations == 0;
    r.detail = std::to_string(violations) + " non-decreasing steps";
    return r;
}

CheckResult phase_suppression(const PumpStepFn& step) {
    CheckResult r{"phase-error-suppression", true, false, {}};
    int violations = 0;
    for (double a : {0.6, 0.8, 0.95}) {
        const BellDiagonalState pair(a, 1.0 - a, 0.0, 0.0);
        const StepRecord rec = step(pair, pair, PumpKind::phase, 0.0, 0.0);
        if (!(rec.state_after_success.phi_minus() < pair.phi_minus())) ++violations;
    }
    r.passed = violations == 0;
    r.detail = std::to_string(violations) + " cases without Phi- reduction";
    return r;
}

CheckResult normalization(const PumpStepFn& step) {
    CheckResult r{"normalization", true, false, {}};
    double worst = 0.0;
    for (double f : {0.6, 0.9, 0.99}) {
        const BellDiagonalState raw = BellDiagonalState::werner(f);
        BellDiagonalState keeper = raw;
        for (int n = 0; n < 12; ++n) {
            const PumpKind kind = n % 3 == 2 ? PumpKind::phase : PumpKind::bit;
            keeper = step(keeper, raw, kind, 1e-3, 1e-2).state_after_success;
            double sum = 0.0;
            for (double c : keeper.components()) {
                sum += c;
                if (c < 0.0) worst = std::max(worst, -c);
            }
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    }
    r.passed = worst <= 1e-12;
    r.detail = "max deviation " + format(worst);
    return r;
}

/// Builds the trace for a schedule from the step function under test.
PumpTrace trace_with(const PumpStepFn& step, PumpSchedule schedule, const ErrorParams& params, double eps) {
    const BellDiagonalState raw = raw_pair(params);
    PumpTrace trace;
    trace.schedule = schedule;
    BellDiagonalState keeper = raw;
    for (int i = 0; i < schedule.n_bit; ++i) {
        trace.steps.push_back(step(keeper, raw, PumpKind::bit, params.p_local, eps));
        keeper = trace.steps.back().state_after_success;
    }
    const BellDiagonalState bit_purified = keeper;
    for (int j = 0; j < schedule.n_phase; ++j) {
        trace.steps.push_back(step(keeper, bit_purified, PumpKind::phase, params.p_local, eps));
        keeper = trace.steps.back().state_after_success;
    }
    trace.final_state = keeper;
    trace.infidelity = keeper.infidelity();
    return trace;
}

const ErrorParams kMarkovParams{1e-4, 0.05, 0.05, 0.95, NoiseKind::depolarizing};
constexpr double kMarkovEps = 8e-4;

CheckResult chain_rows(const PumpStepFn& step) {
    CheckResult r{"markov-row-sums", true, false, {}};
    double worst = 0.0;
    for (PumpSchedule s : {PumpSchedule{0, 0}, PumpSchedule{1, 0}, PumpSchedule{2, 3}, PumpSchedule{4, 5}}) {
        for (RestartMode mode : {RestartMode::full_restart, RestartMode::level_restart}) {
            const MarkovChain chain = build_chain(trace_with(step, s, kMarkovParams, kMarkovEps), mode);
            for (std::size_t i = 0; i < chain.size(); ++i) {
                double sum = 0.0;
                for (const Transition& t : chain.transitions(i)) sum += t.prob;
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        }
    }
    r.passed = worst <= 1e-12;
    r.detail = "max row-sum deviation " + format(worst);
    return r;
}

CheckResult tail_sum(const PumpStepFn& step) {
    CheckResult r{"expected-pairs-tail-sum", true, false, {}};
    double worst = 0.0;
    for (PumpSchedule s : {PumpSchedule{1, 1}, PumpSchedule{2, 2}, PumpSchedule{4, 5}}) {
        for (RestartMode mode : {RestartMode::full_restart, RestartMode::level_restart}) {
            const MarkovChain chain = build_chain(trace_with(step, s, kMarkovParams, kMarkovEps), mode);
            std::vector<double> dist(chain.size(), 0.0);
            dist[chain.initial()] = 1.0;
            double sum = 0.0;
            for (long long n = 0; n < 10'000'000; ++n) {
                double transient = 0.0;
                for (std::size_t i = 0; i < chain.absorbing(); ++i) transient += dist[i];
                sum += transient;
                if (transient < 1e-16) break;
                dist = chain.advance(dist);
            }
            worst = std::max(worst, std::abs(sum - expected_pairs(chain)));
        }
    }
    r.passed = worst <= 1e-6;
    r.detail = "max |sum_n P[T>n] - E[T]| " + format(worst);
    return r;
}

CheckResult markov_vs_monte_carlo(const PumpStepFn& step, const Options& options) {
    CheckResult r{"markov-vs-montecarlo", true, false, {}};
    double worst_sigma = 0.0;
    int points = 0;
    for (PumpSchedule s : {PumpSchedule{1, 1}, PumpSchedule{2, 2}, PumpSchedule{4, 5}}) {
        for (RestartMode mode : {RestartMode::full_restart, RestartMode::level_restart}) {
            const PumpTrace trace = trace_with(step, s, kMarkovParams, kMarkovEps);
            const MarkovChain chain = build_chain(trace, mode);
            const double mean = expected_pairs(chain);
            const auto budget = static_cast<long long>(std::ceil(mean));
            const double p_fail = failure_probability(chain, budget);
            const oracle::MonteCarloResult mc =
                oracle::monte_carlo_pumping(trace, mode, budget, options.trials, options.seed, options.threads);
            const double n = static_cast<double>(options.trials);
            const double fail_sigma = std::sqrt(std::max(p_fail * (1.0 - p_fail), 1e-300) / n);
            worst_sigma = std::max(worst_sigma, std::abs(mc.fail_fraction - p_fail) / fail_sigma);
            if (mc.pairs_std_err > 0.0) {
                worst_sigma = std::max(worst_sigma, std::abs(mc.mean_pairs - mean) / mc.pairs_std_err);
            } else if (mc.mean_pairs != mean) {
                worst_sigma = std::max(worst_sigma, 1e9);
            }
            ++points;
        }
    }
    r.passed = worst_sigma <= 3.0;
    r.detail = "worst deviation " + format(worst_sigma) + " sigma over " + std::to_string(points) +
               " points (trials=" + std::to_string(options.trials) + ", seed=" + std::to_string(options.seed) + ")";
    return r;
}

CheckResult closed_form(const PumpStepFn& step) {
    CheckResult r{"closed-form-agreement", true, true, {}};
    int within = 0;
    int compared = 0;
    for (double f : {0.9, 0.95, 0.99}) {
        for (double p_local : {0.0, 1e-6, 1e-5, 1e-4}) {
            for (double eps : {0.0, 1e-5, 1e-4, 1e-3}) {
                const ErrorParams params{p_local, 0.0, 0.0, f, NoiseKind::depolarizing};
                for (int nb = 0; nb <= 4; ++nb) {
                    for (int np = 0; np <= 4; ++np) {
                        const double exact = trace_with(step, {nb, np}, params, eps).infidelity;
                        if (exact <= 1e-8) continue;
                        const double approx = closed_form_infidelity({nb, np}, params, eps);
                        ++compared;
                        if (std::abs(exact - approx) <= 0.25 * approx) ++within;
                    }
                }
            }
        }
    }
    r.passed = within == compared;
    r.detail = std::to_string(within) + "/" + std::to_string(compared) +
               " points within 25% of the leading-order formula";
    return r;
}

}  // namespace

std::vector<CheckResult> run_all(const Options& options, const PumpStepFn& step) {
    std::vector<CheckResult> results;
    results.push_back(oracle_equivalence(step));
    results.push_back(fixed_point(step));
    results.push_back(bit_suppression(step));
    results.push_back(phase_suppression(step));
    results.push_back(normalization(step));
    results.push_back(chain_rows(step));
    results.push_back(tail_sum(step));
    results.push_back(markov_vs_monte_carlo(step, options));
    results.push_back(closed_form(step));
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.passed || r.informational; });
}

}  // namespace rnp::verify
