#pragma once

#include <cstdint>
#include <vector>

namespace dqsnet {

// Index into the 2^m GHZ basis of an m-qubit register. The basis state with
// index v is (|b> + s|~b>)/sqrt(2) where b = v/2 runs over the bitstrings
// with leading bit 0 and s = +1 for even v, -1 for odd v. Partner states
// (same bitstring, opposite phase) differ only in the lowest index bit.
struct GhzBasisIndex {
    std::uint64_t value = 0;

    std::uint64_t bitstring() const { return value >> 1; }
    int phase_sign() const { return (value & 1) ? -1 : +1; }
    GhzBasisIndex partner() const { return {value ^ 1}; }
};

// Mixed state diagonal in the GHZ basis: a probability distribution over the
// 2^m basis states. Dense storage, so m is capped well below the point where
// closed-form expressions take over.
class GhzDiagonalState {
public:
    static constexpr int kMaxQubits = 20;

    // Throws std::invalid_argument on invariant violation (negative weight,
    // sum != 1 within 1e-12, wrong length).
    GhzDiagonalState(int num_qubits, std::vector<double> eigenvalues);

    // Pure m-qubit GHZ state (all weight on index 0).
    static GhzDiagonalState pure(int num_qubits);

    // Mixture of the pure GHZ state and the maximally mixed state with the
    // given fidelity: weight F on index 0, (1-F)/(2^m-1) elsewhere.
    static GhzDiagonalState depolarized(int num_qubits, double fidelity);

    // Rank-2 dephased state {F at index 0, 1-F at index 1}.
    static GhzDiagonalState dephased_rank2(int num_qubits, double fidelity);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return eigenvalues_.size(); }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    double eigenvalue(GhzBasisIndex i) const { return eigenvalues_[i.value]; }

    // Fidelity to the pure GHZ state (the index-0 weight).
    double fidelity() const { return eigenvalues_[0]; }

private:
    int num_qubits_;
    std::vector<double> eigenvalues_;
};

}  // namespace dqsnet
