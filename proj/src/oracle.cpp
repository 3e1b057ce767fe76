#include "rnp/oracle.hpp"

#include "rnp/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace rnp::oracle {

namespace {

using Matrix = DensityMatrix::Matrix;
using cd = std::complex<double>;

Matrix pauli(int which) {
    Matrix m = Matrix::Zero(2, 2);
    switch (which) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, cd(0, -1), cd(0, 1), 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Embeds a single-qubit operator acting on `qubit` of an n-qubit register.
Matrix embed(int qubits, int qubit, const Matrix& op) {
    Matrix out = Matrix::Identity(1, 1);
    for (int q = 0; q < qubits; ++q) out = kron(out, q == qubit ? op : Matrix::Identity(2, 2));
    return out;
}

std::array<Eigen::Vector4cd, 4> bell_basis() {
    const double s = 1.0 / std::numbers::sqrt2;
    std::array<Eigen::Vector4cd, 4> b;
    b[0] << s, 0, 0, s;   // Phi+
    b[1] << s, 0, 0, -s;  // Phi-
    b[2] << 0, s, s, 0;   // Psi+
    b[3] << 0, s, -s, 0;  // Psi-
    return b;
}

int bit_of(Eigen::Index index, int qubits, int qubit) {
    return static_cast<int>((index >> (qubits - 1 - qubit)) & 1);
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix rho) : rho_(std::move(rho)), qubits_(0) {
    if (rho_.rows() != rho_.cols()) throw std::invalid_argument("density matrix must be square");
    Eigen::Index d = rho_.rows();
    while (d > 1 && d % 2 == 0) {
        d /= 2;
        ++qubits_;
    }
    if (d != 1 || (qubits_ != 2 && qubits_ != 4)) throw std::invalid_argument("density matrix must be 4x4 or 16x16");
}

DensityMatrix DensityMatrix::from_bell(const BellDiagonalState& state) {
    const auto basis = bell_basis();
    Matrix rho = Matrix::Zero(4, 4);
    for (std::size_t i = 0; i < 4; ++i) rho += state[i] * basis[i] * basis[i].adjoint();
    return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::kron(const DensityMatrix& low) const {
    return DensityMatrix(oracle::kron(rho_, low.rho_));
}

double DensityMatrix::hermiticity_defect() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const {
    const Matrix herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DensityMatrix::check_invariants() const {
    std::ostringstream msg;
    if (const double h = hermiticity_defect(); h > 1e-12) msg << "not Hermitian (defect " << h << "); ";
    if (const double t = std::abs(trace() - cd(1.0, 0.0)); t > 1e-12) msg << "trace off by " << t << "; ";
    if (const double e = min_eigenvalue(); e < -1e-10) msg << "negative eigenvalue " << e << "; ";
    if (!msg.str().empty()) throw ConsistencyError("density matrix invariant violated: " + msg.str());
}

void DensityMatrix::apply_unitary(const Matrix& u) { rho_ = u * rho_ * u.adjoint(); }

void DensityMatrix::apply_cnot(int control, int target) {
    const Eigen::Index d = dim();
    Matrix u = Matrix::Zero(d, d);
    for (Eigen::Index s = 0; s < d; ++s) {
        Eigen::Index image = s;
        if (bit_of(s, qubits_, control)) image ^= Eigen::Index{1} << (qubits_ - 1 - target);
        u(image, s) = 1.0;
    }
    apply_unitary(u);
}

void DensityMatrix::apply_hadamard(int qubit) {
    Matrix h(2, 2);
    const double s = 1.0 / std::numbers::sqrt2;
    h << s, s, s, -s;
    apply_unitary(embed(qubits_, qubit, h));
}

void DensityMatrix::apply_pauli_sandwich(int qubit, int which, Matrix& m) const {
    const Matrix p = embed(qubits_, qubit, pauli(which));
    m = p * m * p.adjoint();
}

void DensityMatrix::apply_two_qubit_depolarizing(int a, int b, double p) {
    if (p == 0.0) return;
    Matrix mixed = Matrix::Zero(dim(), dim());
    for (int pa = 0; pa < 4; ++pa) {
        for (int pb = 0; pb < 4; ++pb) {
            Matrix term = rho_;
            apply_pauli_sandwich(a, pa, term);
            apply_pauli_sandwich(b, pb, term);
            mixed += term;
        }
    }
    rho_ = (1.0 - p) * rho_ + (p / 16.0) * mixed;
}

BellProjection project_bell(const DensityMatrix& pair) {
    if (pair.qubits() != 2) throw std::invalid_argument("Bell projection needs a two-qubit state");
    const auto basis = bell_basis();
    BellProjection out;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const cd entry = basis[i].adjoint() * pair.matrix() * basis[j];
            if (i == j) {
                out.probs[i] = entry.real();
            } else {
                out.off_diagonal_mass += std::abs(entry);
            }
        }
    }
    return out;
}

StepOutcome simulate_pump_step(const BellDiagonalState& target, const BellDiagonalState& fresh, PumpKind kind,
                               double p_local, double eps_meas) {
    constexpr int kAliceKeep = 0, kBobKeep = 1, kAliceFresh = 2, kBobFresh = 3;
    DensityMatrix rho = DensityMatrix::from_bell(target).kron(DensityMatrix::from_bell(fresh));

    if (kind == PumpKind::bit) {
        rho.apply_cnot(kAliceKeep, kAliceFresh);
        rho.apply_two_qubit_depolarizing(kAliceKeep, kAliceFresh, p_local);
        rho.apply_cnot(kBobKeep, kBobFresh);
        rho.apply_two_qubit_depolarizing(kBobKeep, kBobFresh, p_local);
    } else {
        rho.apply_cnot(kAliceFresh, kAliceKeep);
        rho.apply_two_qubit_depolarizing(kAliceKeep, kAliceFresh, p_local);
        rho.apply_cnot(kBobFresh, kBobKeep);
        rho.apply_two_qubit_depolarizing(kBobKeep, kBobFresh, p_local);
        // Read the fresh pair out in the X basis.
        rho.apply_hadamard(kAliceFresh);
        rho.apply_hadamard(kBobFresh);
    }

    // Weight each Z-basis outcome pair (a, b) of the fresh qubits by the
    // probability that the reported outcomes agree, then trace them out.
    Matrix kept = Matrix::Zero(4, 4);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double agree = a == b ? (1.0 - eps_meas) * (1.0 - eps_meas) + eps_meas * eps_meas
                                        : 2.0 * eps_meas * (1.0 - eps_meas);
            const Eigen::Index low = 2 * a + b;
            for (Eigen::Index i = 0; i < 4; ++i) {
                for (Eigen::Index j = 0; j < 4; ++j) kept(i, j) += agree * rho.matrix()(4 * i + low, 4 * j + low);
            }
        }
    }

    StepOutcome out;
    out.success_prob = kept.trace().real();
    if (!(out.success_prob > 0.0)) throw ConsistencyError("post-selection has zero acceptance probability");
    const DensityMatrix pair(kept / out.success_prob);
    const BellProjection proj = project_bell(pair);
    out.off_diagonal_mass = proj.off_diagonal_mass;
    if (proj.off_diagonal_mass > 1e-10) {
        std::ostringstream msg;
        msg << "post-selected pair is not Bell-diagonal (off-diagonal mass " << proj.off_diagonal_mass << ")";
        throw ConsistencyError(msg.str());
    }
    std::array<double, 4> probs = proj.probs;
    for (double& p : probs) p = std::max(p, 0.0);
    out.state = BellDiagonalState::from_unnormalized(probs);
    return out;
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return mixer.next();
}

namespace {

constexpr long long kMaxPairsPerTrial = 100'000'000;

/// Raw pairs consumed by one complete run of the protocol.
long long simulate_trial(const std::vector<double>& bit_ok, const std::vector<double>& phase_ok, RestartMode mode,
                         SplitMix64& rng) {
    const int nb = static_cast<int>(bit_ok.size());
    const int np = static_cast<int>(phase_ok.size());
    long long pairs = 0;
    int level = 0;
    while (level <= np) {
        // Build one bit-purified pair: seed raw pair plus n_b pumping steps.
        ++pairs;
        bool built = true;
        for (int i = 0; i < nb; ++i) {
            ++pairs;
            if (rng.uniform() >= bit_ok[static_cast<std::size_t>(i)]) {
                built = false;
                break;
            }
        }
        if (pairs > kMaxPairsPerTrial) throw std::runtime_error("Monte-Carlo trial did not terminate");
        if (!built) {
            if (mode == RestartMode::full_restart) level = 0;
            continue;
        }
        if (level > 0 && rng.uniform() >= phase_ok[static_cast<std::size_t>(level - 1)]) {
            level = 0;
            continue;
        }
        ++level;
    }
    return pairs;
}

}  // namespace

MonteCarloResult monte_carlo_pumping(const PumpTrace& trace, RestartMode mode, long long budget, long long trials,
                                     std::uint64_t seed, int threads) {
    if (trials < 1) throw DomainError("trials must be at least 1");
    if (budget < 0) throw DomainError("budget must be nonnegative");
    const std::vector<double> bit_ok = trace.success_probs(PumpKind::bit);
    const std::vector<double> phase_ok = trace.success_probs(PumpKind::phase);

    // Contiguous chunks with integer tallies keep the totals independent of
    // the worker count.
    constexpr long long kChunk = 4096;
    const auto chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
    struct Tally {
        long long failures = 0;
        unsigned long long pairs = 0;
        unsigned __int128 pairs_sq = 0;
    };
    std::vector<Tally> tallies(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        Tally t;
        const long long begin = static_cast<long long>(c) * kChunk;
        const long long end = std::min(trials, begin + kChunk);
        for (long long i = begin; i < end; ++i) {
            SplitMix64 rng(trial_seed(seed, static_cast<std::uint64_t>(i)));
            const long long used = simulate_trial(bit_ok, phase_ok, mode, rng);
            if (used > budget) ++t.failures;
            t.pairs += static_cast<unsigned long long>(used);
            t.pairs_sq += static_cast<unsigned __int128>(used) * static_cast<unsigned long long>(used);
        }
        tallies[c] = t;
    });

    Tally total;
    for (const Tally& t : tallies) {
        total.failures += t.failures;
        total.pairs += t.pairs;
        total.pairs_sq += t.pairs_sq;
    }
    const double n = static_cast<double>(trials);
    MonteCarloResult r;
    r.seed = seed;
    r.trials = trials;
    r.budget = budget;
    r.fail_fraction = static_cast<double>(total.failures) / n;
    r.fail_std_err = std::sqrt(r.fail_fraction * (1.0 - r.fail_fraction) / n);
    r.mean_pairs = static_cast<double>(total.pairs) / n;
    const double second = static_cast<double>(total.pairs_sq) / n;
    const double variance = trials > 1 ? std::max(0.0, second - r.mean_pairs * r.mean_pairs) * n / (n - 1.0) : 0.0;
    r.pairs_std_err = std::sqrt(variance / n);
    return r;
}

}  // namespace rnp::oracle
