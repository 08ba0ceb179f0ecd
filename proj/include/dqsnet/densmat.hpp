#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "dqsnet/bell.hpp"
#include "dqsnet/ghz_diagonal.hpp"

namespace dqsnet {
class Rng;
}

namespace dqsnet::densmat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Hard cap on register size: the kernel is a brute-force oracle, 2^6 x 2^6
// is the largest state it ever needs (3-node assembly and 4-qubit circuits).
inline constexpr int kMaxQubits = 6;

// Dense density matrix over up to kMaxQubits qubits. Qubit k maps to bit k
// of the computational basis index (qubit 0 = least significant bit).
// Public constructors validate Hermiticity (1e-9), unit trace (1e-9) and
// positivity; eigenvalues in [-1e-9, 0) are clipped to zero with
// renormalization, anything more negative is a hard error.
class DensityMatrix {
public:
    DensityMatrix(int num_qubits, Matrix data);

    static DensityMatrix pure(int num_qubits, const Vector& amplitudes);
    static DensityMatrix computational(int num_qubits, std::uint64_t basis_index);
    static DensityMatrix plus_state();  // single qubit |+>
    static DensityMatrix ghz(int num_qubits);
    static DensityMatrix ghz_basis_state(int num_qubits, GhzBasisIndex index);
    static DensityMatrix depolarized_ghz(int num_qubits, double fidelity);
    static DensityMatrix from_ghz_diagonal(const GhzDiagonalState& state);
    static DensityMatrix from_bell_diagonal(const bell::BellDiagonalState& bds);
    static DensityMatrix maximally_mixed(int num_qubits);

    int num_qubits() const { return num_qubits_; }
    Eigen::Index dim() const { return data_.rows(); }
    const Matrix& data() const { return data_; }

    double trace_real() const { return data_.trace().real(); }

    struct Unchecked {};
    DensityMatrix(int num_qubits, Matrix data, Unchecked) : num_qubits_(num_qubits), data_(std::move(data)) {}

private:
    int num_qubits_;
    Matrix data_;
};

// ---- kernel -------------------------------------------------------------

// Conjugation rho -> U rho U^dag with u acting on the listed qubits
// (qubits[0] is the least significant index bit of u). u must be unitary
// within 1e-9.
DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u, const std::vector<int>& qubits);

// Ideal CNOT with probability p, two-qubit depolarization of the acted pair
// otherwise.
DensityMatrix noisy_cnot(const DensityMatrix& rho, int control, int target, double gate_fidelity);

enum class MeasureBasis { Z, X };

struct MeasurementBranch {
    int outcome = 0;
    double probability = 0.0;
    DensityMatrix state;  // normalized post-state for this reported outcome
};

// Both branches of a noisy single-qubit projective measurement. The physical
// projection is ideal; the reported outcome flips with probability 1-eta, so
// the post-state for a reported outcome is the matching mixture of both
// projections. Basis changes are modeled as perfect single-qubit rotations.
std::array<MeasurementBranch, 2> measure_branches(const DensityMatrix& rho, int qubit,
                                                  MeasureBasis basis, double readout_fidelity);

// Samples the reported outcome with its POVM probability.
MeasurementBranch noisy_measure(const DensityMatrix& rho, int qubit, MeasureBasis basis,
                                double readout_fidelity, Rng& rng);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& qubits_to_remove);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// Real part of tr(rho * observable); observable must be full-dimension.
double expectation(const DensityMatrix& rho, const Matrix& observable);

// ---- parameter encoding and readout --------------------------------------

// Conjugates by the diagonal phase-accumulation unitary for d node phases,
// each coupling to the collective spin-z of its n local qubits (qubit
// index i*n + k belongs to node i).
DensityMatrix encode_phases(const DensityMatrix& rho, const std::vector<double>& phases,
                            int num_nodes, int sensors_per_node);

// Expectation of the register-wide tensor power of the equatorial observable
// O(alpha); O(0) = sigma_x.
double azimuthal_observable_expectation(const DensityMatrix& rho, double alpha);

// ---- probe assembly circuits ---------------------------------------------

struct NoisySpec {
    double cnot_fidelity = 1.0;
    double measurement_fidelity = 1.0;
};

// Merges two GHZ blocks [0..control] and [target..q-1] into one GHZ state:
// CNOT across the boundary, computational measurement of the target qubit,
// X corrections on the smaller side for outcome 1, then the measured qubit
// is traced out. Averaged over both outcomes.
DensityMatrix ghz_merge(const DensityMatrix& rho, int boundary_control, int boundary_target,
                        const NoisySpec& noise);

// Single outcome branch; *probability receives the branch weight.
DensityMatrix ghz_merge_branch(const DensityMatrix& rho, int boundary_control, int boundary_target,
                               const NoisySpec& noise, int outcome, double* probability = nullptr);

// Trajectory version: samples the measurement outcome.
DensityMatrix ghz_merge_sampled(const DensityMatrix& rho, int boundary_control, int boundary_target,
                                const NoisySpec& noise, Rng& rng);

// Teleported CNOT from data_control onto data_target, consuming the Bell
// pair (bell_control_side, bell_target_side); the pair qubits are measured
// and traced out. control_node noise covers operations co-located with
// data_control, target_node those with data_target. Averaged over the four
// measurement branches.
DensityMatrix cnot_teleport(const DensityMatrix& rho, int bell_control_side, int bell_target_side,
                            int data_control, int data_target, const NoisySpec& control_node,
                            const NoisySpec& target_node);

DensityMatrix cnot_teleport_sampled(const DensityMatrix& rho, int bell_control_side,
                                    int bell_target_side, int data_control, int data_target,
                                    const NoisySpec& control_node, const NoisySpec& target_node,
                                    Rng& rng);

// ---- GHZ-basis projections -----------------------------------------------

// Projection onto the GHZ-basis diagonal (trace preserving).
GhzDiagonalState ghz_twirl(const DensityMatrix& rho);

// <GHZ| rho |GHZ>.
double fidelity_to_ghz(const DensityMatrix& rho);

double fidelity_to_pure(const DensityMatrix& rho, const Vector& amplitudes);

// ---- circuit oracles for the Bell-diagonal analytic maps ------------------

// Brute-force swap: full 4-qubit circuit with all outcome branches and
// conditional corrections, reduced back to the Bell diagonal.
bell::BellDiagonalState swap_oracle(const bell::BellDiagonalState& left,
                                    const bell::BellDiagonalState& right, double gate_fidelity,
                                    double meas1_fidelity, double meas2_fidelity);

struct PurifyOracleResult {
    bell::BellDiagonalState state;
    double success_probability = 0.0;
};

PurifyOracleResult purify_oracle(const bell::BellDiagonalState& kept,
                                 const bell::BellDiagonalState& measured, double gate_fidelity_a,
                                 double gate_fidelity_b, double meas_fidelity_a,
                                 double meas_fidelity_b);

// ---- assembly resource counts ---------------------------------------------

enum class AssemblyMethod { Teleportation, Merging };

struct ResourceEstimate {
    int qubits = 0;
    int single_qubit_measurements = 0;
    int two_qubit_gates = 0;
    double avg_single_qubit_gates = 0.0;
};

// Operation counts for assembling an N-qubit GHZ state from N-1 Bell pairs.
ResourceEstimate resource_estimate(AssemblyMethod method, int ghz_size);

}  // namespace dqsnet::densmat
