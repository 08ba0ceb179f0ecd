#pragma once

#include <array>

namespace dqsnet::bell {

// Two-qubit state diagonal in the Bell basis, ordered (Phi+, Phi-, Psi+, Psi-).
// last_update_time tracks the simulation time the components refer to; the
// algebra below never reads it, the network layer advances it via decohere.
struct BellDiagonalState {
    std::array<double, 4> lambdas{1.0, 0.0, 0.0, 0.0};
    double last_update_time = 0.0;

    double fidelity() const { return lambdas[0]; }
    bool entangled() const { return lambdas[0] > 0.5; }

    // Throws std::invalid_argument if components are negative or do not sum
    // to 1 within 1e-12.
    void validate() const;

    static BellDiagonalState werner(double fidelity);
};

// Exponential memory idling channel: each qubit accumulates total Pauli error
// probability e(dt) = (3/4)(1 - exp(-dt/tau)), split across X/Y/Z by the
// pattern weights. The uniform pattern (1/3,1/3,1/3) is plain depolarizing
// and the only pattern for which the map composes as a semigroup.
struct MemoryErrorModel {
    double coherence_time_s = 1.0;
    std::array<double, 3> pattern{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

    void validate() const;
    double error_probability(double dt) const;
};

// Gate and readout quality of one node. Two-qubit gates act as the ideal
// unitary with probability p and as two-qubit depolarization otherwise;
// measurements report the projective outcome correctly with probability eta.
struct OperationErrorModel {
    double gate_fidelity = 1.0;
    double measurement_fidelity = 1.0;

    void validate() const;
};

// Independent single-qubit Pauli idling on both halves of a pair, for
// (possibly different) storage durations dt_a and dt_b.
BellDiagonalState decohere(const BellDiagonalState& bds, double dt_a, double dt_b,
                           const MemoryErrorModel& mem_a, const MemoryErrorModel& mem_b);

inline BellDiagonalState decohere(const BellDiagonalState& bds, double dt,
                                  const MemoryErrorModel& mem) {
    return decohere(bds, dt, dt, mem, mem);
}

// Entanglement swapping at a middle node holding one qubit of each input
// pair: noisy CNOT + Hadamard + two noisy computational measurements, with
// the outcome-conditioned Pauli correction folded in. Deterministic map on
// the Bell components (heralding succeeds by construction; probabilistic
// BSM hardware is gated separately by the network layer).
BellDiagonalState swap(const BellDiagonalState& left, const BellDiagonalState& right,
                       const OperationErrorModel& middle_gate, double meas1_fidelity,
                       double meas2_fidelity);

struct PurifyResult {
    BellDiagonalState state;         // normalized output conditioned on success
    double success_probability = 0;  // >= 1/2 for entangled inputs and eta >= 1/2
    double output_fidelity = 0;      // first Bell component of `state`
};

// Bilocal-CNOT recurrence purification (BBPSSW/DEJMPS family): both nodes
// apply a CNOT from the kept pair onto the measured pair, measure the target
// qubits and compare outcomes. Gates may fail into two-qubit depolarization
// (p_a, p_b per node), measurements flip with probability 1-eta.
PurifyResult purify(const BellDiagonalState& kept, const BellDiagonalState& measured,
                    double gate_fidelity_a, double gate_fidelity_b,
                    double meas_fidelity_a, double meas_fidelity_b);

}  // namespace dqsnet::bell
