#pragma once

#include "rnp/core_model.hpp"
#include "rnp/pumping.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>

namespace rnp::oracle {

/// Raised when a simulated circuit leaves the Bell-diagonal manifold, which
/// indicates a convention mismatch in the circuit definition.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Dense density matrix on 2 or 4 qubits. Qubit 0 is the most significant
/// bit of the basis index.
class DensityMatrix {
public:
    using Matrix = Eigen::MatrixXcd;

    explicit DensityMatrix(Matrix rho);

    static DensityMatrix from_bell(const BellDiagonalState& state);
    /// Tensor product with `this` on the high-order qubits.
    DensityMatrix kron(const DensityMatrix& low) const;

    int qubits() const { return qubits_; }
    Eigen::Index dim() const { return rho_.rows(); }
    const Matrix& matrix() const { return rho_; }

    std::complex<double> trace() const { return rho_.trace(); }
    /// Largest |rho - rho^dagger| entry.
    double hermiticity_defect() const;
    double min_eigenvalue() const;
    /// Throws ConsistencyError unless Hermitian (1e-12), unit trace (1e-12)
    /// and PSD (min eigenvalue >= -1e-10).
    void check_invariants() const;

    void apply_cnot(int control, int target);
    void apply_hadamard(int qubit);
    /// rho -> (1-p) rho + p/16 sum_P P rho P^dagger over Paulis on (a, b).
    void apply_two_qubit_depolarizing(int a, int b, double p);

private:
    void apply_unitary(const Matrix& u);
    void apply_pauli_sandwich(int qubit, int pauli, Matrix& m) const;

    Matrix rho_;
    int qubits_;
};

/// Bell-basis probabilities of a two-qubit state and the summed magnitude
/// of its off-diagonal Bell-basis entries.
struct BellProjection {
    std::array<double, 4> probs{};
    double off_diagonal_mass = 0.0;
};

BellProjection project_bell(const DensityMatrix& pair);

struct StepOutcome {
    double success_prob = 0.0;
    BellDiagonalState state;
    double off_diagonal_mass = 0.0;
};

/// Simulates one pumping step on the 16-dimensional two-pair register
/// (qubits: Alice keeper, Bob keeper, Alice fresh, Bob fresh) with exact
/// CNOT unitaries, depolarizing channels and post-selected readout.
StepOutcome simulate_pump_step(const BellDiagonalState& target, const BellDiagonalState& fresh, PumpKind kind,
                               double p_local, double eps_meas);

/// SplitMix64: portable, seedable, 64-bit output.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

private:
    std::uint64_t state_;
};

/// Seed for trial `index`; independent of how trials are split over threads.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index);

struct MonteCarloResult {
    std::uint64_t seed = 0;
    long long trials = 0;
    long long budget = 0;
    double fail_fraction = 0.0;
    double fail_std_err = 0.0;
    double mean_pairs = 0.0;
    double pairs_std_err = 0.0;
};

/// Simulates the stochastic pumping process: each step of the trace is
/// accepted with its recorded probability; rejections restart per `mode`.
/// A trial fails when it needs more than `budget` raw pairs.
MonteCarloResult monte_carlo_pumping(const PumpTrace& trace, RestartMode mode, long long budget, long long trials,
                                     std::uint64_t seed, int threads = 1);

}  // namespace rnp::oracle
