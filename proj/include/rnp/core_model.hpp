#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rnp {

/// Raised when an input lies outside its physical domain. The message names
/// the offending field.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raw Bell fidelity at or below 1/2 cannot be improved by pumping.
class UnpurifiableError : public DomainError {
public:
    explicit UnpurifiableError(double fidelity);
};

enum class NoiseKind { depolarizing, dephasing };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view text);

/// Imperfection parameters of one register pair.
///
/// p_local: failure probability of a local unitary (p_L).
/// p_init / p_meas: raw initialization and measurement error of the
/// communication qubit (p_I, p_M).
/// fidelity: raw Bell pair fidelity F with respect to Phi+.
struct ErrorParams {
    double p_local = 0.0;
    double p_init = 0.0;
    double p_meas = 0.0;
    double fidelity = 1.0;
    NoiseKind noise = NoiseKind::depolarizing;
};

/// Checks every field is a finite probability; returns a copy.
ErrorParams validate(const ErrorParams& params);

/// validate() plus the F > 1/2 requirement of every purification routine.
ErrorParams validate_purifiable(const ErrorParams& params);

/// Probability vector over {Phi+, Phi-, Psi+, Psi-}.
///
/// Construction rejects negative or non-finite components and sums that
/// differ from one by more than 1e-12 (larger drift means a bug upstream),
/// then renormalizes.
class BellDiagonalState {
public:
    static constexpr double kSumTolerance = 1e-12;

    BellDiagonalState() : p_{1.0, 0.0, 0.0, 0.0} {}
    BellDiagonalState(double phi_plus, double phi_minus, double psi_plus, double psi_minus);

    /// Builds a state from weights that need not be normalized (used after
    /// post-selection). Rejects an all-zero vector.
    static BellDiagonalState from_unnormalized(const std::array<double, 4>& weights);

    /// Werner state: fidelity F, remaining weight spread evenly.
    static BellDiagonalState werner(double fidelity);

    double phi_plus() const { return p_[0]; }
    double phi_minus() const { return p_[1]; }
    double psi_plus() const { return p_[2]; }
    double psi_minus() const { return p_[3]; }

    double fidelity() const { return p_[0]; }
    double infidelity() const { return p_[1] + p_[2] + p_[3]; }
    /// Weight of Bell components carrying a bit flip (Psi+ and Psi-).
    double bit_error() const { return p_[2] + p_[3]; }
    /// Weight of Bell components carrying a phase flip (Phi- and Psi-).
    double phase_error() const { return p_[1] + p_[3]; }

    /// Components indexed by Pauli frame: index = 2*x + z, where x marks a
    /// bit flip and z a phase flip relative to Phi+.
    const std::array<double, 4>& components() const { return p_; }
    double operator[](std::size_t frame) const { return p_[frame]; }

private:
    std::array<double, 4> p_;
};

struct PumpSchedule {
    static constexpr int kDefaultBound = 15;

    int n_bit = 0;
    int n_phase = 0;

    int total_steps() const { return n_bit + n_phase; }
    /// Raw pairs consumed when every step succeeds.
    int min_raw_pairs() const { return (n_bit + 1) * (n_phase + 1); }

    friend bool operator==(const PumpSchedule&, const PumpSchedule&) = default;
};

/// Throws DomainError unless both step counts lie in [0, bound].
PumpSchedule checked_schedule(int n_bit, int n_phase, int bound = PumpSchedule::kDefaultBound);

/// Majority-vote measurement over 2m+1 readouts.
struct MeasurementPlan {
    int half_width = 0;           // m
    double eps_meas = 0.0;        // robust measurement error
    double eps_meas_leading = 0.0; // leading-order estimate for the same m
    double duration_s = 0.0;      // robust measurement time
};

/// Hardware timings, seconds unless noted.
struct PhysicalTimings {
    double t_local = 0.0;
    double tau = 0.0;
    double eta = 0.0;
    double purcell_c = 1.0;
    double t_init = 0.0;
    double t_meas = 0.0;
    double t_ent = 0.0;
    std::optional<double> t_mem;
};

enum class RestartMode { full_restart, level_restart };

std::string_view to_string(RestartMode mode);
RestartMode parse_restart_mode(std::string_view text);

struct PlanResult {
    PumpSchedule schedule;
    RestartMode restart_mode = RestartMode::full_restart;
    MeasurementPlan measurement;
    double delta_min = 0.0;
    long long n_tot_budget = 0;
    double expected_pairs = 0.0;
    double eps_fail = 0.0;
    double eps_E = 0.0;
    double t_robust_ent = 0.0;       // from expected_pairs
    double t_C = 0.0;                // from expected_pairs
    double t_robust_ent_budget = 0.0; // from n_tot_budget
    double t_C_budget = 0.0;          // from n_tot_budget
    double gamma = 0.0;
    double p_cnot_raw = 0.0;
    std::optional<double> memory_ratio;
    bool memory_warning = false;
};

/// Throws std::logic_error if the documented PlanResult inequalities fail.
void check_plan_invariants(const PlanResult& plan);

}  // namespace rnp
