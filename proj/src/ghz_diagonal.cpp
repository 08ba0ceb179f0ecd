#include "dqsnet/ghz_diagonal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dqsnet {

GhzDiagonalState::GhzDiagonalState(int num_qubits, std::vector<double> eigenvalues)
    : num_qubits_(num_qubits), eigenvalues_(std::move(eigenvalues)) {
    if (num_qubits < 1 || num_qubits > kMaxQubits)
        throw std::invalid_argument("GhzDiagonalState: num_qubits out of range");
    const std::size_t dim = std::size_t{1} << num_qubits;
    if (eigenvalues_.size() != dim)
        throw std::invalid_argument("GhzDiagonalState: expected " + std::to_string(dim) +
                                    " eigenvalues, got " + std::to_string(eigenvalues_.size()));
    double sum = 0.0;
    for (double v : eigenvalues_) {
        if (!(v >= -1e-12) || !std::isfinite(v))
            throw std::invalid_argument("GhzDiagonalState: negative eigenvalue");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("GhzDiagonalState: eigenvalues sum to " + std::to_string(sum));
    for (double& v : eigenvalues_)
        if (v < 0.0) v = 0.0;
}

GhzDiagonalState GhzDiagonalState::pure(int num_qubits) {
    std::vector<double> ev(std::size_t{1} << num_qubits, 0.0);
    ev[0] = 1.0;
    return {num_qubits, std::move(ev)};
}

GhzDiagonalState GhzDiagonalState::depolarized(int num_qubits, double fidelity) {
    if (fidelity < 0.0 || fidelity > 1.0)
        throw std::invalid_argument("depolarized: fidelity out of [0,1]");
    const std::size_t dim = std::size_t{1} << num_qubits;
    std::vector<double> ev(dim, (1.0 - fidelity) / static_cast<double>(dim - 1));
    ev[0] = fidelity;
    return {num_qubits, std::move(ev)};
}

GhzDiagonalState GhzDiagonalState::dephased_rank2(int num_qubits, double fidelity) {
    if (fidelity < 0.0 || fidelity > 1.0)
        throw std::invalid_argument("dephased_rank2: fidelity out of [0,1]");
    std::vector<double> ev(std::size_t{1} << num_qubits, 0.0);
    ev[0] = fidelity;
    ev[1] = 1.0 - fidelity;
    return {num_qubits, std::move(ev)};
}

}  // namespace dqsnet
