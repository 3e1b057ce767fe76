#include "rnp/cli.hpp"
#include "rnp/markov.hpp"
#include "rnp/oracle.hpp"
#include "rnp/parallel.hpp"
#include "rnp/pumping.hpp"
#include "rnp/robust_measurement.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace rnp;
using nlohmann::json;

namespace {

struct Verdict {
    bool passed = false;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string run_cli(const std::vector<std::string>& args, int* code = nullptr) {
    std::ostringstream out, err;
    const int rc = cli::run(args, out, err);
    if (code) *code = rc;
    return out.str();
}

Verdict robust_measurement() {
    const auto start = std::chrono::steady_clock::now();
    const double eps6 = measurement_error(6, {1e-4, 0.05, 0.05, 0.95, NoiseKind::depolarizing});
    const MeasurementPlan opt = optimal_m({1e-6, 0.05, 0.05, 0.95, NoiseKind::depolarizing}, 25);
    const double elapsed = seconds_since(start);
    const bool ok = eps6 >= 7.8e-4 && eps6 <= 8.6e-4 && opt.half_width == 10 && opt.eps_meas >= 1.1e-5 &&
                    opt.eps_meas <= 1.5e-5 && elapsed < 1.0;
    return {ok, "eps_M(6)=" + sci(eps6) + ", m*=" + std::to_string(opt.half_width) + " eps_M=" + sci(opt.eps_meas) +
                    ", " + sci(elapsed) + " s"};
}

Verdict oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    int cases = 0;
    for (double f : {0.8, 0.9, 0.95}) {
        for (double p_l : {0.0, 1e-3}) {
            for (double eps : {0.0, 1e-2}) {
                for (PumpKind kind : {PumpKind::bit, PumpKind::phase}) {
                    const BellDiagonalState w = BellDiagonalState::werner(f);
                    const StepRecord fast = pump_step(w, w, kind, p_l, eps);
                    const oracle::StepOutcome slow = oracle::simulate_pump_step(w, w, kind, p_l, eps);
                    worst = std::max(worst, std::abs(fast.success_prob - slow.success_prob));
                    for (std::size_t i = 0; i < 4; ++i) {
                        worst = std::max(worst, std::abs(fast.state_after_success[i] - slow.state[i]));
                    }
                    ++cases;
                }
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-10 && elapsed < 10.0,
            std::to_string(cases) + " cases, max deviation " + sci(worst) + ", " + sci(elapsed) + " s"};
}

Verdict closed_form_agreement() {
    int compared = 0;
    int failing = 0;
    double worst = 0.0;
    std::string worst_at;
    for (double f : {0.9, 0.95, 0.99}) {
        for (double p_l : {0.0, 1e-6, 1e-5, 1e-4}) {
            for (double eps : {0.0, 1e-5, 1e-4, 1e-3}) {
                const ErrorParams e{p_l, 0.0, 0.0, f, NoiseKind::depolarizing};
                for (int nb = 0; nb <= 4; ++nb) {
                    for (int np = 0; np <= 4; ++np) {
                        const double exact = run_two_level({nb, np}, e, eps).infidelity;
                        if (exact <= 1e-8) continue;
                        const double closed = closed_form_infidelity({nb, np}, e, eps);
                        const double rel = std::abs(exact - closed) / closed;
                        ++compared;
                        if (rel > 0.25) ++failing;
                        if (rel > worst) {
                            worst = rel;
                            worst_at = "(n_b=" + std::to_string(nb) + ",n_p=" + std::to_string(np) + ",F=" + sci(f) +
                                       ",p_L=" + sci(p_l) + ",eps_M=" + sci(eps) + ")";
                        }
                    }
                }
            }
        }
    }
    return {failing == 0, std::to_string(failing) + "/" + std::to_string(compared) +
                              " points outside 25%, worst relative deviation " + sci(worst) + " at " + worst_at};
}

Verdict standard_floor() {
    double closest = 1e300;
    bool standard_ok = true;
    bool two_level_ok = true;
    for (double f : {0.90, 0.95, 0.99}) {
        const ErrorParams e{0.0, 0.0, 0.0, f, NoiseKind::depolarizing};
        const double floor = (1.0 - f) * (1.0 - f) / 9.0;
        for (int steps = 0; steps <= 30; ++steps) {
            const double inf = run_standard(steps, e, 0.0).infidelity;
            closest = std::min(closest, inf / floor);
            if (inf < floor) standard_ok = false;
        }
        double best = 1.0;
        for (int nb = 0; nb <= 15; ++nb) {
            for (int np = 0; np <= 15; ++np) best = std::min(best, run_two_level({nb, np}, e, 0.0).infidelity);
        }
        if (!(best < floor)) two_level_ok = false;
    }
    return {standard_ok && two_level_ok, "standard min ratio to floor " + sci(closest) +
                                             (two_level_ok ? ", two-level beats it at every F" : ", two-level misses")};
}

Verdict perfect_operation() {
    const ErrorParams e{0.0, 0.0, 0.0, 0.95, NoiseKind::depolarizing};
    double best = 1.0;
    PumpSchedule at{};
    for (int nb = 0; nb <= 15; ++nb) {
        for (int np = 0; np <= 15; ++np) {
            const double inf = run_two_level({nb, np}, e, 0.0).infidelity;
            if (inf < best) {
                best = inf;
                at = {nb, np};
            }
        }
    }
    return {best < 1e-10,
            "best infidelity " + sci(best) + " at (" + std::to_string(at.n_bit) + "," + std::to_string(at.n_phase) + ")"};
}

Verdict markov_vs_monte_carlo() {
    const auto start = std::chrono::steady_clock::now();
    const ErrorParams e{1e-6, 0.05, 0.05, 0.95, NoiseKind::depolarizing};
    const double eps = optimal_m(e, 25).eps_meas;
    constexpr long long kTrials = 100000;
    double worst = 0.0;
    int points = 0;
    for (PumpSchedule s : {PumpSchedule{2, 2}, PumpSchedule{4, 5}}) {
        for (RestartMode mode : {RestartMode::full_restart, RestartMode::level_restart}) {
            const PumpTrace trace = run_two_level(s, e, eps);
            const MarkovChain chain = build_chain(trace, mode);
            const double mean = expected_pairs(chain);
            const auto base = static_cast<long long>(std::ceil(mean));
            for (long long budget : {static_cast<long long>(s.min_raw_pairs()), base, 2 * base, 4 * base}) {
                const double p = failure_probability(chain, budget);
                const auto mc = oracle::monte_carlo_pumping(trace, mode, budget, kTrials, 20240611, default_thread_count());
                const double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / kTrials) / kTrials);
                worst = std::max(worst, std::abs(mc.fail_fraction - p) / se);
                worst = std::max(worst, std::abs(mc.mean_pairs - mean) / mc.pairs_std_err);
                ++points;
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {worst <= 3.0 && elapsed < 60.0, std::to_string(points) + " budget points, worst deviation " + sci(worst) +
                                                " sigma, " + sci(elapsed) + " s"};
}

Verdict headline() {
    const auto start = std::chrono::steady_clock::now();
    struct Scenario {
        const char* preset;
        double t_lo, t_hi, g_lo, g_hi;
    };
    bool all = true;
    std::string detail;
    for (const Scenario& s : {Scenario{"ion-depolarizing", 700e-6, 1300e-6, 3e-5, 6e-5},
                              Scenario{"nv-dephasing", 100e-6, 200e-6, 2.5e-5, 4.5e-5}}) {
        bool any_mode = false;
        detail += std::string(detail.empty() ? "" : "; ") + s.preset + ":";
        for (const char* mode : {"full", "level"}) {
            const json j = json::parse(run_cli({"plan", "--preset", s.preset, "--restart", mode}));
            const double t_exp = j["t_C"].get<double>();
            const double t_bud = j["t_C_budget"].get<double>();
            const double g = j["gamma"].get<double>();
            auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
            const bool ok = in(t_exp, s.t_lo, s.t_hi) && in(t_bud, s.t_lo, s.t_hi) && in(g, s.g_lo, s.g_hi);
            any_mode = any_mode || ok;
            detail += std::string(" ") + mode + " t_C=" + sci(t_exp * 1e6) + "us t_C_budget=" + sci(t_bud * 1e6) +
                      "us gamma=" + sci(g);
        }
        all = all && any_mode;
    }
    const double elapsed = seconds_since(start);
    return {all && elapsed < 60.0, detail};
}

Verdict sweep_properties() {
    const auto start = std::chrono::steady_clock::now();
    int code = -1;
    const std::string csv = run_cli({"sweep"}, &code);
    const double elapsed = seconds_since(start);
    if (code != 0) return {false, "sweep exited with " + std::to_string(code)};
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    double ratio_lo = 1e300, ratio_hi = 0.0;
    long long max_budget = 0;
    int over_budget = 0;
    std::string max_at;
    while (std::getline(lines, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        const double p_l = std::stod(f[0]);
        const double fid = std::stod(f[1]);
        const double eps_e = std::stod(f[7]);
        const long long budget = std::stoll(f[8]);
        if (fid >= 0.95 - 1e-12 && p_l <= 1e-4 * (1 + 1e-12)) {
            ratio_lo = std::min(ratio_lo, eps_e / p_l);
            ratio_hi = std::max(ratio_hi, eps_e / p_l);
        }
        if (budget > 1000) ++over_budget;
        if (budget > max_budget) {
            max_budget = budget;
            max_at = "p_L=" + f[0] + " F=" + f[1];
        }
        ++rows;
    }
    const bool ratio_ok = ratio_lo >= 3.0 && ratio_hi <= 30.0;
    const bool ok = rows == 130 && ratio_ok && over_budget == 0 && elapsed < 300.0;
    return {ok, std::to_string(rows) + " rows; eps_E/p_L in [" + sci(ratio_lo) + ", " + sci(ratio_hi) + "]; " +
                    std::to_string(over_budget) + " rows with n_tot_budget > 1000 (max " + std::to_string(max_budget) +
                    " at " + max_at + "); " + sci(elapsed) + " s"};
}

Verdict determinism() {
    const int many = std::max(4, default_thread_count());
    const std::string n = std::to_string(many);
    int identical = 0;
    int compared = 0;
    auto same = [&](const std::string& a, const std::string& b) {
        ++compared;
        if (a == b && !a.empty()) ++identical;
    };
    same(run_cli({"sweep", "--threads", "1"}), run_cli({"sweep", "--threads", "1"}));
    same(run_cli({"sweep", "--threads", "1"}), run_cli({"sweep", "--threads", n}));
    same(run_cli({"sweep", "--threads", "1", "--restart", "level", "--json"}),
         run_cli({"sweep", "--threads", n, "--restart", "level", "--json"}));
    same(run_cli({"plan", "--preset", "ion-depolarizing"}), run_cli({"plan", "--preset", "ion-depolarizing"}));
    same(run_cli({"verify", "--trials", "100000", "--seed", "7", "--threads", "1", "--json"}),
         run_cli({"verify", "--trials", "100000", "--seed", "7", "--threads", n, "--json"}));

    const PumpTrace trace = run_two_level({4, 5}, {1e-6, 0.05, 0.05, 0.95, NoiseKind::depolarizing}, 1.2e-5);
    const auto a = oracle::monte_carlo_pumping(trace, RestartMode::full_restart, 80, 100000, 3, 1);
    const auto b = oracle::monte_carlo_pumping(trace, RestartMode::full_restart, 80, 100000, 3, many);
    ++compared;
    if (a.fail_fraction == b.fail_fraction && a.mean_pairs == b.mean_pairs && a.pairs_std_err == b.pairs_std_err) {
        ++identical;
    }
    return {identical == compared,
            std::to_string(identical) + "/" + std::to_string(compared) + " outputs byte-identical (threads 1 vs " + n + ")"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"robust measurement regression", robust_measurement},
        {"oracle equivalence", oracle_equivalence},
        {"closed-form agreement", closed_form_agreement},
        {"standard-scheme floor", standard_floor},
        {"perfect-operation limit", perfect_operation},
        {"Markov vs Monte-Carlo", markov_vs_monte_carlo},
        {"headline scenario reproduction", headline},
        {"sweep properties", sweep_properties},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.passed) ++failures;
        std::cout << (v.passed ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << v.detail
                  << std::endl;
    }
    std::cout << criteria.size() - failures << "/" << criteria.size() << " acceptance criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
