#include <doctest.h>

#include "rnp/oracle.hpp"

#include <cmath>

using namespace rnp;
using namespace rnp::oracle;

TEST_CASE("density matrix invariants") {
    const BellDiagonalState s(0.7, 0.1, 0.15, 0.05);
    DensityMatrix pair = DensityMatrix::from_bell(s);
    CHECK(pair.qubits() == 2);
    CHECK_NOTHROW(pair.check_invariants());
    const BellProjection proj = project_bell(pair);
    for (std::size_t i = 0; i < 4; ++i) CHECK(proj.probs[i] == doctest::Approx(s[i]).epsilon(1e-14).scale(0));
    CHECK(proj.off_diagonal_mass < 1e-14);

    DensityMatrix two = pair.kron(DensityMatrix::from_bell(BellDiagonalState::werner(0.9)));
    CHECK(two.qubits() == 4);
    CHECK(two.dim() == 16);
    two.apply_cnot(0, 2);
    two.apply_cnot(1, 3);
    two.apply_hadamard(2);
    two.apply_two_qubit_depolarizing(0, 2, 0.3);
    two.apply_two_qubit_depolarizing(1, 3, 1.0);
    CHECK_NOTHROW(two.check_invariants());
    CHECK(std::abs(two.trace() - 1.0) < 1e-12);
    CHECK(two.hermiticity_defect() < 1e-12);
    CHECK(two.min_eigenvalue() > -1e-10);

    DensityMatrix::Matrix bad = DensityMatrix::Matrix::Zero(4, 4);
    bad(0, 0) = 0.5;
    CHECK_THROWS(DensityMatrix(bad).check_invariants());
    CHECK_THROWS(DensityMatrix(DensityMatrix::Matrix::Identity(3, 3)));
}

TEST_CASE("full depolarizing erases a pair") {
    DensityMatrix pair = DensityMatrix::from_bell(BellDiagonalState());
    pair.apply_two_qubit_depolarizing(0, 1, 1.0);
    for (double p : project_bell(pair).probs) CHECK(p == doctest::Approx(0.25).epsilon(1e-14).scale(0));
}

TEST_CASE("simulated pump steps") {
    const StepOutcome perfect = simulate_pump_step(BellDiagonalState(), BellDiagonalState(), PumpKind::bit, 0, 0);
    CHECK(perfect.success_prob == doctest::Approx(1.0).epsilon(1e-14).scale(0));
    CHECK(perfect.state.fidelity() == doctest::Approx(1.0).epsilon(1e-14).scale(0));

    const BellDiagonalState w = BellDiagonalState::werner(0.95);
    const StepOutcome bit = simulate_pump_step(w, w, PumpKind::bit, 0, 0);
    CHECK(bit.state.psi_plus() + bit.state.psi_minus() < 0.05 * 2 / 3);
    CHECK(bit.off_diagonal_mass < 1e-10);

    const BellDiagonalState deph(0.8, 0.2, 0.0, 0.0);
    const StepOutcome phase = simulate_pump_step(deph, deph, PumpKind::phase, 0, 0);
    CHECK(phase.state.phi_minus() < 0.2);
}

TEST_CASE("SplitMix64 reference stream") {
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFull);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
    SplitMix64 u(42);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(trial_seed(7, 0) != trial_seed(7, 1));
    CHECK(trial_seed(7, 3) == trial_seed(7, 3));
}

TEST_CASE("Monte-Carlo sampling") {
    const ErrorParams ideal{0, 0, 0, 1.0, NoiseKind::depolarizing};
    const PumpTrace sure = run_two_level({2, 3}, ideal, 0.0);
    const MonteCarloResult all = monte_carlo_pumping(sure, RestartMode::full_restart, 12, 1000, 1);
    CHECK(all.fail_fraction == 0.0);
    CHECK(all.mean_pairs == 12.0);
    CHECK(monte_carlo_pumping(sure, RestartMode::full_restart, 11, 1000, 1).fail_fraction == 1.0);

    const ErrorParams e{1e-4, 0.05, 0.05, 0.95, NoiseKind::depolarizing};
    const PumpTrace trace = run_two_level({4, 5}, e, 8e-4);
    const MonteCarloResult a = monte_carlo_pumping(trace, RestartMode::full_restart, 80, 20000, 99, 1);
    const MonteCarloResult b = monte_carlo_pumping(trace, RestartMode::full_restart, 80, 20000, 99, 1);
    const MonteCarloResult c = monte_carlo_pumping(trace, RestartMode::full_restart, 80, 20000, 99, 5);
    CHECK(a.fail_fraction == b.fail_fraction);
    CHECK(a.mean_pairs == b.mean_pairs);
    CHECK(a.fail_fraction == c.fail_fraction);
    CHECK(a.mean_pairs == c.mean_pairs);
    CHECK(a.pairs_std_err == c.pairs_std_err);
    CHECK(monte_carlo_pumping(trace, RestartMode::full_restart, 80, 20000, 100, 1).mean_pairs != a.mean_pairs);
    CHECK_THROWS_AS(monte_carlo_pumping(trace, RestartMode::full_restart, 80, 0, 1), DomainError);
}
