#include "rnp/cli.hpp"

#include "rnp/markov.hpp"
#include "rnp/parallel.hpp"
#include "rnp/robust_measurement.hpp"
#include "rnp/timing.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace rnp::cli {

namespace {

using nlohmann::json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flag values shared by the physics subcommands.
struct ModelFlags {
    std::string preset;
    double p_local = 1e-6;
    double p_init = 0.05;
    double p_meas = 0.05;
    double fidelity = 0.95;
    std::string noise = "depolarizing";
    double tau = 10e-9;
    double eta = 0.2;
    double purcell_c = 10.0;
    double t_local = 0.1e-6;
    std::optional<double> t_mem;
    int m_max = 25;
    int bound = PumpSchedule::kDefaultBound;
    std::string restart = "full";
    long long budget_cap = 1'000'000;
    std::optional<double> eps_meas;
};

const auto kProbability = CLI::Range(0.0, 1.0);

void add_error_flags(CLI::App& cmd, ModelFlags& f) {
    cmd.add_option("--p-l", f.p_local, "local unitary error probability p_L")->check(kProbability);
    cmd.add_option("--p-i", f.p_init, "initialization error probability p_I")->check(kProbability);
    cmd.add_option("--p-m", f.p_meas, "raw measurement error probability p_M")->check(kProbability);
}

void add_model_flags(CLI::App& cmd, ModelFlags& f) {
    add_error_flags(cmd, f);
    cmd.add_option("--f", f.fidelity, "raw Bell pair fidelity F")->check(kProbability);
    cmd.add_option("--noise", f.noise, "raw pair noise: depolarizing | dephasing")
        ->check(CLI::IsMember({"depolarizing", "dephasing"}));
    cmd.add_option("--m-max", f.m_max, "largest majority-vote half-width searched")->check(CLI::Range(0, 200));
}

void add_timing_flags(CLI::App& cmd, ModelFlags& f) {
    cmd.add_option("--tau", f.tau, "vacuum radiative lifetime [s]")->check(CLI::PositiveNumber);
    cmd.add_option("--eta", f.eta, "photon collection/detection efficiency")->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--cavity-c", f.purcell_c, "Purcell factor C")->check(CLI::Range(1.0, 1e12));
    cmd.add_option("--t-local", f.t_local, "local gate time [s]")->check(CLI::PositiveNumber);
    cmd.add_option("--t-mem", f.t_mem, "storage memory time [s]")->check(CLI::PositiveNumber);
}

void add_planner_flags(CLI::App& cmd, ModelFlags& f) {
    cmd.add_option("--bound", f.bound, "search bound for n_b and n_p")->check(CLI::Range(0, 64));
    cmd.add_option("--restart", f.restart, "restart semantics: full | level")->check(CLI::IsMember({"full", "level"}));
    cmd.add_option("--budget-cap", f.budget_cap, "largest raw-pair budget searched")->check(CLI::Range(1LL, 1'000'000'000LL));
}

/// Preset values are applied first; explicitly passed flags win.
void apply_preset(CLI::App& cmd, ModelFlags& f) {
    if (f.preset.empty()) return;
    ModelFlags p;
    p.p_local = 1e-6;
    p.p_init = 0.05;
    p.p_meas = 0.05;
    p.fidelity = 0.95;
    p.tau = 10e-9;
    p.eta = 0.2;
    p.purcell_c = 10.0;
    p.t_local = 0.1e-6;
    if (f.preset == "ion-depolarizing") {
        p.noise = "depolarizing";
        p.t_mem = 10.0;
    } else {
        p.noise = "dephasing";
        p.t_mem = 1.0;
    }
    auto unset = [&](const char* name) { return cmd.count(name) == 0; };
    if (unset("--p-l")) f.p_local = p.p_local;
    if (unset("--p-i")) f.p_init = p.p_init;
    if (unset("--p-m")) f.p_meas = p.p_meas;
    if (unset("--f")) f.fidelity = p.fidelity;
    if (unset("--noise")) f.noise = p.noise;
    if (unset("--tau")) f.tau = p.tau;
    if (unset("--eta")) f.eta = p.eta;
    if (unset("--cavity-c")) f.purcell_c = p.purcell_c;
    if (unset("--t-local")) f.t_local = p.t_local;
    if (unset("--t-mem")) f.t_mem = p.t_mem;
}

ErrorParams error_params(const ModelFlags& f) {
    return validate({f.p_local, f.p_init, f.p_meas, f.fidelity, parse_noise_kind(f.noise)});
}

PhysicalTimings timings(const ModelFlags& f) {
    return make_timings(f.p_meas, f.t_local, f.tau, f.eta, f.purcell_c, f.t_mem);
}

json schedule_json(PumpSchedule s) { return {{"n_b", s.n_bit}, {"n_p", s.n_phase}}; }

json plan_json(const PlanResult& r) {
    json j;
    j["schedule"] = schedule_json(r.schedule);
    j["delta_min"] = r.delta_min;
    j["n_tot_budget"] = r.n_tot_budget;
    j["expected_pairs"] = r.expected_pairs;
    j["eps_fail"] = r.eps_fail;
    j["eps_E"] = r.eps_E;
    j["t_robust_ent"] = r.t_robust_ent;
    j["t_C"] = r.t_C;
    j["gamma"] = r.gamma;
    j["p_cnot_raw"] = r.p_cnot_raw;
    j["restart_mode"] = std::string(to_string(r.restart_mode));
    j["t_robust_ent_budget"] = r.t_robust_ent_budget;
    j["t_C_budget"] = r.t_C_budget;
    j["measurement"] = {{"m", r.measurement.half_width},
                        {"eps_M", r.measurement.eps_meas},
                        {"eps_M_leading", r.measurement.eps_meas_leading},
                        {"t_robust_meas", r.measurement.duration_s}};
    if (r.memory_ratio) {
        j["memory_ratio"] = *r.memory_ratio;
        j["memory_warning"] = r.memory_warning;
    }
    return j;
}

int threads_from(int flag) { return flag > 0 ? flag : default_thread_count(); }

// ---------------------------------------------------------------- measure

int cmd_measure(const ModelFlags& f, bool as_json, std::ostream& out) {
    const ErrorParams params = error_params(f);
    // Optical readout with p_M = 0 would take forever, so no duration is reported.
    const bool timed = f.p_meas > 0.0 && f.p_meas < 1.0;
    std::optional<PhysicalTimings> t;
    if (timed) t = timings(f);
    const MeasurementPlan mp = t ? optimal_m(params, *t, f.m_max) : optimal_m(params, f.m_max);
    if (as_json) {
        json j{{"m", mp.half_width}, {"eps_M", mp.eps_meas}, {"eps_M_leading", mp.eps_meas_leading}};
        j["t_robust_meas"] = t ? json(mp.duration_s) : json(nullptr);
        if (t) {
            j["t_I"] = t->t_init;
            j["t_M"] = t->t_meas;
        }
        out << j.dump() << '\n';
    } else {
        out << "m*            " << mp.half_width << '\n'
            << "eps_M         " << format_double(mp.eps_meas) << '\n'
            << "eps_M leading " << format_double(mp.eps_meas_leading) << '\n'
            << "t_robust_meas " << (t ? format_double(mp.duration_s) + " s" : std::string("n/a")) << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- pump

struct PumpFlags {
    int n_bit = 4;
    int n_phase = 5;
    std::string scheme = "two-level";
    int steps = 10;
};

int cmd_pump(const ModelFlags& f, const PumpFlags& pf, bool as_json, std::ostream& out) {
    const ErrorParams params = validate_purifiable(error_params(f));
    const double eps = f.eps_meas ? *f.eps_meas : optimal_m(params, f.m_max).eps_meas;
    const PumpTrace trace = pf.scheme == "standard" ? run_standard(pf.steps, params, eps)
                                                    : run_two_level(checked_schedule(pf.n_bit, pf.n_phase, 64), params, eps);
    if (as_json) {
        for (std::size_t i = 0; i < trace.steps.size(); ++i) {
            const StepRecord& s = trace.steps[i];
            const auto& c = s.state_after_success.components();
            out << json{{"step", i + 1},
                        {"kind", std::string(to_string(s.kind))},
                        {"success_prob", s.success_prob},
                        {"state", {c[0], c[1], c[2], c[3]}},
                        {"infidelity", s.state_after_success.infidelity()}}
                       .dump()
                << '\n';
        }
        out << json{{"schedule", schedule_json(trace.schedule)}, {"eps_M", eps}, {"infidelity", trace.infidelity}}.dump()
            << '\n';
        return kOk;
    }
    out << "step  kind   success_prob          phi+                  phi-                  psi+                  psi-\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const StepRecord& s = trace.steps[i];
        out << std::left << std::setw(6) << i + 1 << std::setw(7) << to_string(s.kind) << std::setw(22)
            << format_double(s.success_prob);
        for (double c : s.state_after_success.components()) out << std::setw(22) << format_double(c);
        out << '\n';
    }
    out << "eps_M " << format_double(eps) << "  final infidelity " << format_double(trace.infidelity) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- plan

PlanOptions plan_options(const ModelFlags& f) {
    PlanOptions o;
    o.bound = f.bound;
    o.restart_mode = parse_restart_mode(f.restart);
    o.budget_cap = f.budget_cap;
    return o;
}

int cmd_plan(const ModelFlags& f, std::ostream& out) {
    const ErrorParams params = validate_purifiable(error_params(f));
    const PhysicalTimings t = timings(f);
    MeasurementPlan mp = optimal_m(params, t, f.m_max);
    if (f.eps_meas) mp.eps_meas = *f.eps_meas;
    const PlanResult r = plan(params, t, mp, plan_options(f));
    out << plan_json(r).dump(2) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepFlags {
    SweepGrid grid;
    std::string out_path = "-";
    int threads = 0;
};

constexpr const char* kSweepHeader = "p_L,F,noise,n_b,n_p,delta_min,eps_fail,eps_E,n_tot_budget,expected_pairs,t_C_s,gamma";

int cmd_sweep(const ModelFlags& f, const SweepFlags& sf, bool as_json, std::ostream& out) {
    const std::vector<double> p_locals = log_grid(sf.grid.p_local_min, sf.grid.p_local_max, sf.grid.p_local_points);
    const std::vector<double> fidelities = linear_grid(sf.grid.fidelity_min, sf.grid.fidelity_max, sf.grid.fidelity_points);
    const PlanOptions options = plan_options(f);
    const PhysicalTimings t = timings(f);
    const NoiseKind noise = parse_noise_kind(f.noise);
    validate_purifiable({0.0, f.p_init, f.p_meas, sf.grid.fidelity_min, noise});

    const std::size_t rows = p_locals.size() * fidelities.size();
    std::vector<std::string> lines(rows);
    parallel_for(rows, threads_from(sf.threads), [&](std::size_t row) {
        const double p_local = p_locals[row / fidelities.size()];
        const double fidelity = fidelities[row % fidelities.size()];
        const ErrorParams params{p_local, f.p_init, f.p_meas, fidelity, noise};
        MeasurementPlan mp = optimal_m(params, t, f.m_max);
        if (f.eps_meas) mp.eps_meas = *f.eps_meas;
        const PlanResult r = plan(params, t, mp, options);
        if (as_json) {
            json j{{"p_L", p_local},
                   {"F", fidelity},
                   {"noise", std::string(to_string(noise))},
                   {"n_b", r.schedule.n_bit},
                   {"n_p", r.schedule.n_phase},
                   {"delta_min", r.delta_min},
                   {"eps_fail", r.eps_fail},
                   {"eps_E", r.eps_E},
                   {"n_tot_budget", r.n_tot_budget},
                   {"expected_pairs", r.expected_pairs},
                   {"t_C_s", r.t_C},
                   {"gamma", r.gamma}};
            lines[row] = j.dump();
            return;
        }
        std::string line;
        for (const std::string& field :
             {format_double(p_local), format_double(fidelity), std::string(to_string(noise)),
              std::to_string(r.schedule.n_bit), std::to_string(r.schedule.n_phase), format_double(r.delta_min),
              format_double(r.eps_fail), format_double(r.eps_E), std::to_string(r.n_tot_budget),
              format_double(r.expected_pairs), format_double(r.t_C), format_double(r.gamma)}) {
            if (!line.empty()) line += ',';
            line += field;
        }
        lines[row] = std::move(line);
    });

    std::ofstream file;
    std::ostream* sink = &out;
    if (sf.out_path != "-") {
        file.open(sf.out_path, std::ios::binary | std::ios::trunc);
        if (!file) throw IoError("cannot open output file '" + sf.out_path + "'");
        sink = &file;
    }
    if (!as_json) *sink << kSweepHeader << '\n';
    for (const std::string& line : lines) *sink << line << '\n';
    sink->flush();
    if (!*sink) throw IoError("failed writing sweep output to '" + sf.out_path + "'");
    return kOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const verify::Options& options, bool as_json, const verify::PumpStepFn& step, std::ostream& out) {
    const std::vector<verify::CheckResult> results = verify::run_all(options, step);
    const bool ok = verify::all_passed(results);
    if (as_json) {
        json checks = json::array();
        for (const auto& r : results) {
            checks.push_back({{"check", r.name},
                              {"status", r.passed ? "pass" : (r.informational ? "info" : "FAIL")},
                              {"detail", r.detail}});
        }
        out << json{{"passed", ok}, {"seed", options.seed}, {"trials", options.trials}, {"checks", checks}}.dump(2)
            << '\n';
    } else {
        for (const auto& r : results) {
            const char* status = r.passed ? "pass" : (r.informational ? "info" : "FAIL");
            out << std::left << std::setw(28) << r.name << std::setw(6) << status << r.detail << '\n';
        }
        out << (ok ? "verification passed" : "verification FAILED") << '\n';
    }
    return ok ? kOk : kVerificationFailed;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), end);
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw DomainError("invalid log grid bounds");
    std::vector<double> out(static_cast<std::size_t>(points));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < points; ++i) {
        out[static_cast<std::size_t>(i)] = points == 1 ? lo : std::pow(10.0, a + (b - a) * i / (points - 1));
    }
    out.front() = lo;
    if (points > 1) out.back() = hi;
    return out;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (!(hi >= lo) || points < 1) throw DomainError("invalid linear grid bounds");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        out[static_cast<std::size_t>(i)] =
            points == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(points - 1);
    }
    if (points > 1) out.back() = hi;
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const verify::PumpStepFn& step) {
    CLI::App app{"Planner for optically connected few-qubit registers"};
    app.require_subcommand(1);
    bool as_json = false;

    ModelFlags mf;
    PumpFlags pf;
    SweepFlags sf;
    verify::Options vo;
    int verify_threads = 0;

    CLI::App* measure = app.add_subcommand("measure", "robust majority-vote measurement");
    add_error_flags(*measure, mf);
    measure->add_option("--m-max", mf.m_max, "largest majority-vote half-width searched")->check(CLI::Range(0, 200));
    add_timing_flags(*measure, mf);

    CLI::App* pump = app.add_subcommand("pump", "deterministic pumping trace");
    add_model_flags(*pump, mf);
    pump->add_option("--nb", pf.n_bit, "bit-pumping steps")->check(CLI::Range(0, 64));
    pump->add_option("--np", pf.n_phase, "phase-pumping steps")->check(CLI::Range(0, 64));
    pump->add_option("--scheme", pf.scheme, "two-level | standard")->check(CLI::IsMember({"two-level", "standard"}));
    pump->add_option("--steps", pf.steps, "step count for the standard scheme")->check(CLI::Range(0, 1000));
    pump->add_option("--eps-m", mf.eps_meas, "robust measurement error (default: optimal majority vote)")
        ->check(kProbability);

    CLI::App* plan_cmd = app.add_subcommand("plan", "optimal schedule, raw-pair budget, clock cycle and gate error");
    plan_cmd->add_option("--preset", mf.preset, "ion-depolarizing | nv-dephasing")
        ->check(CLI::IsMember({"ion-depolarizing", "nv-dephasing"}));
    add_model_flags(*plan_cmd, mf);
    add_timing_flags(*plan_cmd, mf);
    add_planner_flags(*plan_cmd, mf);
    plan_cmd->add_option("--eps-m", mf.eps_meas, "override the robust measurement error")->check(kProbability);

    CLI::App* sweep = app.add_subcommand("sweep", "plan over a (p_L, F) grid, CSV output");
    add_model_flags(*sweep, mf);
    add_timing_flags(*sweep, mf);
    add_planner_flags(*sweep, mf);
    sweep->add_option("--eps-m", mf.eps_meas, "override the robust measurement error")->check(kProbability);
    sweep->add_option("--pl-min", sf.grid.p_local_min, "smallest p_L")->check(CLI::Range(1e-300, 1.0));
    sweep->add_option("--pl-max", sf.grid.p_local_max, "largest p_L")->check(CLI::Range(1e-300, 1.0));
    sweep->add_option("--pl-points", sf.grid.p_local_points, "log-spaced p_L points")->check(CLI::Range(1, 10000));
    sweep->add_option("--f-min", sf.grid.fidelity_min, "smallest F")->check(kProbability);
    sweep->add_option("--f-max", sf.grid.fidelity_max, "largest F")->check(kProbability);
    sweep->add_option("--f-points", sf.grid.fidelity_points, "linear F points")->check(CLI::Range(1, 10000));
    sweep->add_option("--out,-o", sf.out_path, "output CSV path ('-' for stdout)");
    sweep->add_option("--threads", sf.threads, "worker threads (default: RNP_THREADS or hardware)")
        ->check(CLI::Range(1, 4096));

    CLI::App* verify_cmd = app.add_subcommand("verify", "cross-check recurrences against the oracles");
    verify_cmd->add_option("--trials", vo.trials, "Monte-Carlo trials per point")->check(CLI::Range(1LL, 100'000'000LL));
    verify_cmd->add_option("--seed", vo.seed, "Monte-Carlo seed");
    verify_cmd->add_option("--threads", verify_threads, "worker threads (default: RNP_THREADS or hardware)")
        ->check(CLI::Range(1, 4096));

    for (CLI::App* sub : {measure, pump, plan_cmd, sweep, verify_cmd}) {
        sub->add_flag("--json", as_json, "emit JSON");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kFlagError;
    }

    try {
        if (*measure) return cmd_measure(mf, as_json, out);
        if (*pump) return cmd_pump(mf, pf, as_json, out);
        if (*plan_cmd) {
            apply_preset(*plan_cmd, mf);
            return cmd_plan(mf, out);
        }
        if (*sweep) return cmd_sweep(mf, sf, as_json, out);
        if (*verify_cmd) {
            vo.threads = threads_from(verify_threads);
            return cmd_verify(vo, as_json, step, out);
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    }
    return kFlagError;
}

}  // namespace rnp::cli
