#include "dqsnet/densmat.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "dqsnet/rng.hpp"

namespace dqsnet::densmat {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::Index dim_of(int num_qubits) { return Eigen::Index{1} << num_qubits; }

void check_qubit_count(int q) {
    if (q < 1 || q > kMaxQubits) throw std::invalid_argument("qubit count out of range");
}

void check_qubit_index(const DensityMatrix& rho, int qubit) {
    if (qubit < 0 || qubit >= rho.num_qubits()) throw std::out_of_range("qubit index out of range");
}

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

Matrix hadamard() {
    Matrix m(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return m;
}

Matrix cnot_matrix() {
    // control = low bit, target = high bit of the 2-qubit index
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1;
    m(2, 2) = 1;
    m(3, 1) = 1;
    m(1, 3) = 1;
    return m;
}

// Expands u (acting on `qubits`, qubits[0] = low bit of u's index) to the
// full register.
Matrix embed(const Matrix& u, const std::vector<int>& qubits, int num_qubits) {
    const int k = static_cast<int>(qubits.size());
    const Eigen::Index dim = dim_of(num_qubits);
    const Eigen::Index sub = Eigen::Index{1} << k;
    if (u.rows() != sub || u.cols() != sub) throw std::invalid_argument("operator size mismatch");

    std::uint64_t mask = 0;
    for (int q : qubits) {
        if (q < 0 || q >= num_qubits) throw std::out_of_range("qubit index out of range");
        if (mask & (std::uint64_t{1} << q)) throw std::invalid_argument("duplicate qubit index");
        mask |= std::uint64_t{1} << q;
    }

    Matrix full = Matrix::Zero(dim, dim);
    for (Eigen::Index rest = 0; rest < dim; ++rest) {
        if (static_cast<std::uint64_t>(rest) & mask) continue;
        for (Eigen::Index a = 0; a < sub; ++a) {
            std::uint64_t row = static_cast<std::uint64_t>(rest);
            for (int bit = 0; bit < k; ++bit)
                if (a & (Eigen::Index{1} << bit)) row |= std::uint64_t{1} << qubits[bit];
            for (Eigen::Index b = 0; b < sub; ++b) {
                if (u(a, b) == Complex{0.0, 0.0}) continue;
                std::uint64_t col = static_cast<std::uint64_t>(rest);
                for (int bit = 0; bit < k; ++bit)
                    if (b & (Eigen::Index{1} << bit)) col |= std::uint64_t{1} << qubits[bit];
                full(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = u(a, b);
            }
        }
    }
    return full;
}

DensityMatrix unchecked(int q, Matrix m) { return DensityMatrix(q, std::move(m), DensityMatrix::Unchecked{}); }

DensityMatrix apply_full_unitary(const DensityMatrix& rho, const Matrix& full) {
    return unchecked(rho.num_qubits(), full * rho.data() * full.adjoint());
}

DensityMatrix apply_one_qubit(const DensityMatrix& rho, const Matrix& u, int qubit) {
    return apply_full_unitary(rho, embed(u, {qubit}, rho.num_qubits()));
}

// eta * P_m rho P_m + (1-eta) * P_{1-m} rho P_{1-m}, unnormalized, Z basis.
Matrix reported_branch(const Matrix& rho, int qubit, int outcome, double eta, Eigen::Index dim) {
    Matrix out = Matrix::Zero(dim, dim);
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    for (Eigen::Index r = 0; r < dim; ++r) {
        const int rb = (static_cast<std::uint64_t>(r) & bit) ? 1 : 0;
        for (Eigen::Index c = 0; c < dim; ++c) {
            const int cb = (static_cast<std::uint64_t>(c) & bit) ? 1 : 0;
            if (rb != cb) continue;
            out(r, c) = rho(r, c) * (rb == outcome ? eta : 1.0 - eta);
        }
    }
    return out;
}

struct BranchPair {
    Matrix states[2];  // unnormalized
    double probs[2];
};

BranchPair measure_unnormalized(const DensityMatrix& rho, int qubit, MeasureBasis basis, double eta) {
    check_qubit_index(rho, qubit);
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("readout fidelity out of [0,1]");
    DensityMatrix working = rho;
    if (basis == MeasureBasis::X) working = apply_one_qubit(working, hadamard(), qubit);
    BranchPair out{{Matrix{}, Matrix{}}, {0.0, 0.0}};
    for (int m = 0; m < 2; ++m) {
        Matrix b = reported_branch(working.data(), qubit, m, eta, working.dim());
        if (basis == MeasureBasis::X) {
            const Matrix h = embed(hadamard(), {qubit}, rho.num_qubits());
            b = h * b * h.adjoint();
        }
        out.probs[m] = b.trace().real();
        out.states[m] = std::move(b);
    }
    return out;
}

}  // namespace

DensityMatrix::DensityMatrix(int num_qubits, Matrix data) : num_qubits_(num_qubits), data_(std::move(data)) {
    check_qubit_count(num_qubits);
    const Eigen::Index dim = dim_of(num_qubits);
    if (data_.rows() != dim || data_.cols() != dim)
        throw std::invalid_argument("DensityMatrix: dimension mismatch");
    if ((data_ - data_.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(data_.trace().real() - 1.0) > 1e-9 || std::abs(data_.trace().imag()) > 1e-9)
        throw std::invalid_argument("DensityMatrix: trace != 1");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (data_ + data_.adjoint()));
    const auto& evals = solver.eigenvalues();
    if (evals.minCoeff() < -1e-9) throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    if (evals.minCoeff() < 0.0) {
        Eigen::VectorXd clipped = evals.cwiseMax(0.0);
        clipped /= clipped.sum();
        data_ = solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().adjoint();
    }
}

DensityMatrix DensityMatrix::pure(int num_qubits, const Vector& amplitudes) {
    check_qubit_count(num_qubits);
    if (amplitudes.size() != dim_of(num_qubits)) throw std::invalid_argument("amplitude size mismatch");
    Vector a = amplitudes / amplitudes.norm();
    return unchecked(num_qubits, a * a.adjoint());
}

DensityMatrix DensityMatrix::computational(int num_qubits, std::uint64_t basis_index) {
    Vector a = Vector::Zero(dim_of(num_qubits));
    a(static_cast<Eigen::Index>(basis_index)) = 1.0;
    return pure(num_qubits, a);
}

DensityMatrix DensityMatrix::plus_state() {
    Vector a(2);
    a << 1.0, 1.0;
    return pure(1, a);
}

DensityMatrix DensityMatrix::ghz(int num_qubits) {
    return ghz_basis_state(num_qubits, GhzBasisIndex{0});
}

DensityMatrix DensityMatrix::ghz_basis_state(int num_qubits, GhzBasisIndex index) {
    check_qubit_count(num_qubits);
    const Eigen::Index dim = dim_of(num_qubits);
    if (index.value >= static_cast<std::uint64_t>(dim)) throw std::out_of_range("GHZ index out of range");
    const std::uint64_t b = index.bitstring();
    const std::uint64_t bbar = static_cast<std::uint64_t>(dim - 1) - b;
    Vector a = Vector::Zero(dim);
    a(static_cast<Eigen::Index>(b)) = 1.0;
    a(static_cast<Eigen::Index>(bbar)) = static_cast<double>(index.phase_sign());
    return pure(num_qubits, a);
}

DensityMatrix DensityMatrix::depolarized_ghz(int num_qubits, double fidelity) {
    return from_ghz_diagonal(GhzDiagonalState::depolarized(num_qubits, fidelity));
}

DensityMatrix DensityMatrix::from_ghz_diagonal(const GhzDiagonalState& state) {
    const int q = state.num_qubits();
    check_qubit_count(q);
    const Eigen::Index dim = dim_of(q);
    Matrix m = Matrix::Zero(dim, dim);
    for (std::uint64_t v = 0; v < static_cast<std::uint64_t>(dim); ++v) {
        const double lambda = state.eigenvalues()[v];
        if (lambda == 0.0) continue;
        const GhzBasisIndex idx{v};
        const Eigen::Index b = static_cast<Eigen::Index>(idx.bitstring());
        const Eigen::Index bbar = dim - 1 - b;
        const double s = static_cast<double>(idx.phase_sign());
        m(b, b) += 0.5 * lambda;
        m(bbar, bbar) += 0.5 * lambda;
        m(b, bbar) += 0.5 * s * lambda;
        m(bbar, b) += 0.5 * s * lambda;
    }
    return unchecked(q, std::move(m));
}

DensityMatrix DensityMatrix::from_bell_diagonal(const bell::BellDiagonalState& bds) {
    bds.validate();
    std::vector<double> ev(bds.lambdas.begin(), bds.lambdas.end());
    return from_ghz_diagonal(GhzDiagonalState(2, std::move(ev)));
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    check_qubit_count(num_qubits);
    const Eigen::Index dim = dim_of(num_qubits);
    return unchecked(num_qubits, Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u, const std::vector<int>& qubits) {
    const Matrix gram = u.adjoint() * u;
    if ((gram - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("apply_unitary: operator is not unitary");
    return apply_full_unitary(rho, embed(u, qubits, rho.num_qubits()));
}

DensityMatrix noisy_cnot(const DensityMatrix& rho, int control, int target, double gate_fidelity) {
    check_qubit_index(rho, control);
    check_qubit_index(rho, target);
    if (control == target) throw std::invalid_argument("noisy_cnot: control == target");
    if (!(gate_fidelity >= 0.0 && gate_fidelity <= 1.0))
        throw std::invalid_argument("noisy_cnot: gate fidelity out of [0,1]");

    const Matrix ideal = embed(cnot_matrix(), {control, target}, rho.num_qubits());
    Matrix out = gate_fidelity * (ideal * rho.data() * ideal.adjoint());

    if (gate_fidelity < 1.0 && rho.num_qubits() == 2) {
        out += (1.0 - gate_fidelity) / 4.0 * Matrix::Identity(4, 4);
    } else if (gate_fidelity < 1.0) {
        const DensityMatrix rest = partial_trace(rho, {control, target});
        // I/4 on (control, target) tensor the reduced state on the others
        const Eigen::Index dim = rho.dim();
        const std::uint64_t cbit = std::uint64_t{1} << control;
        const std::uint64_t tbit = std::uint64_t{1} << target;
        const std::uint64_t pair_mask = cbit | tbit;
        auto rest_index = [&](std::uint64_t z) {
            std::uint64_t out_idx = 0;
            int pos = 0;
            for (int qb = 0; qb < rho.num_qubits(); ++qb) {
                if (qb == control || qb == target) continue;
                if (z & (std::uint64_t{1} << qb)) out_idx |= std::uint64_t{1} << pos;
                ++pos;
            }
            return static_cast<Eigen::Index>(out_idx);
        };
        const double w = (1.0 - gate_fidelity) / 4.0;
        for (Eigen::Index r = 0; r < dim; ++r)
            for (Eigen::Index c = 0; c < dim; ++c) {
                if ((static_cast<std::uint64_t>(r) & pair_mask) != (static_cast<std::uint64_t>(c) & pair_mask))
                    continue;
                out(r, c) += w * rest.data()(rest_index(r), rest_index(c));
            }
    }
    return unchecked(rho.num_qubits(), std::move(out));
}

std::array<MeasurementBranch, 2> measure_branches(const DensityMatrix& rho, int qubit,
                                                  MeasureBasis basis, double readout_fidelity) {
    BranchPair raw = measure_unnormalized(rho, qubit, basis, readout_fidelity);
    std::array<MeasurementBranch, 2> out{
        MeasurementBranch{0, 0.0, rho},
        MeasurementBranch{1, 0.0, rho},
    };
    for (int m = 0; m < 2; ++m) {
        out[m].probability = raw.probs[m];
        out[m].state = unchecked(rho.num_qubits(), raw.states[m] / std::max(raw.probs[m], 1e-300));
    }
    return out;
}

MeasurementBranch noisy_measure(const DensityMatrix& rho, int qubit, MeasureBasis basis,
                                double readout_fidelity, Rng& rng) {
    auto branches = measure_branches(rho, qubit, basis, readout_fidelity);
    const int outcome = rng.bernoulli(branches[0].probability) ? 0 : 1;
    return branches[outcome];
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& qubits_to_remove) {
    std::uint64_t remove_mask = 0;
    for (int q : qubits_to_remove) {
        check_qubit_index(rho, q);
        remove_mask |= std::uint64_t{1} << q;
    }
    const int removed = static_cast<int>(qubits_to_remove.size());
    const int kept = rho.num_qubits() - removed;
    if (kept < 1) throw std::invalid_argument("partial_trace: nothing left");

    std::vector<int> kept_qubits;
    for (int q = 0; q < rho.num_qubits(); ++q)
        if (!(remove_mask & (std::uint64_t{1} << q))) kept_qubits.push_back(q);

    const Eigen::Index out_dim = dim_of(kept);
    const Eigen::Index rem_dim = Eigen::Index{1} << removed;
    Matrix out = Matrix::Zero(out_dim, out_dim);

    auto compose = [&](Eigen::Index kept_idx, Eigen::Index rem_idx) {
        std::uint64_t z = 0;
        for (int i = 0; i < kept; ++i)
            if (kept_idx & (Eigen::Index{1} << i)) z |= std::uint64_t{1} << kept_qubits[i];
        for (int i = 0; i < removed; ++i)
            if (rem_idx & (Eigen::Index{1} << i)) z |= std::uint64_t{1} << qubits_to_remove[i];
        return static_cast<Eigen::Index>(z);
    };

    for (Eigen::Index r = 0; r < out_dim; ++r)
        for (Eigen::Index c = 0; c < out_dim; ++c) {
            Complex sum{0.0, 0.0};
            for (Eigen::Index e = 0; e < rem_dim; ++e) sum += rho.data()(compose(r, e), compose(c, e));
            out(r, c) = sum;
        }
    return unchecked(kept, std::move(out));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    const int q = a.num_qubits() + b.num_qubits();
    check_qubit_count(q);
    const Eigen::Index da = a.dim(), db = b.dim();
    Matrix out(da * db, da * db);
    // qubits of `a` occupy the low bits of the combined index
    for (Eigen::Index rb = 0; rb < db; ++rb)
        for (Eigen::Index cb = 0; cb < db; ++cb)
            out.block(rb * da, cb * da, da, da) = b.data()(rb, cb) * a.data();
    return unchecked(q, std::move(out));
}

double expectation(const DensityMatrix& rho, const Matrix& observable) {
    if (observable.rows() != rho.dim() || observable.cols() != rho.dim())
        throw std::invalid_argument("expectation: dimension mismatch");
    return (rho.data() * observable).trace().real();
}

DensityMatrix encode_phases(const DensityMatrix& rho, const std::vector<double>& phases,
                            int num_nodes, int sensors_per_node) {
    if (num_nodes * sensors_per_node != rho.num_qubits())
        throw std::invalid_argument("encode_phases: layout does not match register");
    if (static_cast<int>(phases.size()) != num_nodes)
        throw std::invalid_argument("encode_phases: need one phase per node");

    const Eigen::Index dim = rho.dim();
    Eigen::VectorXd angle(dim);
    for (Eigen::Index z = 0; z < dim; ++z) {
        double a = 0.0;
        for (int node = 0; node < num_nodes; ++node) {
            int up = 0;  // qubits of this node still in |0>
            for (int k = 0; k < sensors_per_node; ++k) {
                const int qb = node * sensors_per_node + k;
                if (!(static_cast<std::uint64_t>(z) & (std::uint64_t{1} << qb))) ++up;
            }
            a += -0.5 * phases[node] * static_cast<double>(2 * up - sensors_per_node);
        }
        angle(z) = a;
    }
    Matrix out(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c)
            out(r, c) = rho.data()(r, c) * std::exp(kI * (angle(r) - angle(c)));
    return unchecked(rho.num_qubits(), std::move(out));
}

double azimuthal_observable_expectation(const DensityMatrix& rho, double alpha) {
    const Eigen::Index dim = rho.dim();
    const int m = rho.num_qubits();
    double sum = 0.0;
    for (Eigen::Index z = 0; z < dim; ++z) {
        const Eigen::Index zbar = dim - 1 - z;
        const int pc = std::popcount(static_cast<std::uint64_t>(z));
        const Complex phase = std::exp(kI * (alpha * static_cast<double>(2 * pc - m)));
        sum += (rho.data()(z, zbar) * phase).real();
    }
    return sum;
}

namespace {

DensityMatrix merge_correct_and_trace(const DensityMatrix& rho, int control, int target, int outcome) {
    DensityMatrix state = rho;
    if (outcome == 1) {
        const int left_size = control + 1;
        const int right_size = rho.num_qubits() - target - 1;
        if (left_size <= right_size) {
            for (int q = 0; q <= control; ++q) state = apply_one_qubit(state, pauli_x(), q);
        } else {
            for (int q = target + 1; q < rho.num_qubits(); ++q)
                state = apply_one_qubit(state, pauli_x(), q);
        }
    }
    return partial_trace(state, {target});
}

}  // namespace

DensityMatrix ghz_merge_branch(const DensityMatrix& rho, int boundary_control, int boundary_target,
                               const NoisySpec& noise, int outcome, double* probability) {
    if (boundary_target != boundary_control + 1)
        throw std::invalid_argument("ghz_merge: boundary qubits must be adjacent");
    const DensityMatrix after_cnot = noisy_cnot(rho, boundary_control, boundary_target, noise.cnot_fidelity);
    auto branches = measure_branches(after_cnot, boundary_target, MeasureBasis::Z, noise.measurement_fidelity);
    if (probability != nullptr) *probability = branches[outcome].probability;
    return merge_correct_and_trace(branches[outcome].state, boundary_control, boundary_target, outcome);
}

DensityMatrix ghz_merge(const DensityMatrix& rho, int boundary_control, int boundary_target,
                        const NoisySpec& noise) {
    double p0 = 0.0, p1 = 0.0;
    const DensityMatrix b0 = ghz_merge_branch(rho, boundary_control, boundary_target, noise, 0, &p0);
    const DensityMatrix b1 = ghz_merge_branch(rho, boundary_control, boundary_target, noise, 1, &p1);
    return unchecked(b0.num_qubits(), p0 * b0.data() + p1 * b1.data());
}

DensityMatrix ghz_merge_sampled(const DensityMatrix& rho, int boundary_control, int boundary_target,
                                const NoisySpec& noise, Rng& rng) {
    if (boundary_target != boundary_control + 1)
        throw std::invalid_argument("ghz_merge: boundary qubits must be adjacent");
    const DensityMatrix after_cnot = noisy_cnot(rho, boundary_control, boundary_target, noise.cnot_fidelity);
    const MeasurementBranch branch =
        noisy_measure(after_cnot, boundary_target, MeasureBasis::Z, noise.measurement_fidelity, rng);
    return merge_correct_and_trace(branch.state, boundary_control, boundary_target, branch.outcome);
}

namespace {

// One (m1, m2) branch of the teleported CNOT, unnormalized weight in *weight.
DensityMatrix teleport_branch(const DensityMatrix& rho, int b1, int b2, int c, int t,
                              const NoisySpec& ctrl, const NoisySpec& tgt, int m1, int m2,
                              double* weight) {
    const DensityMatrix s1 = noisy_cnot(rho, c, b1, ctrl.cnot_fidelity);
    auto first = measure_branches(s1, b1, MeasureBasis::Z, ctrl.measurement_fidelity);
    DensityMatrix s2 = first[m1].state;
    if (m1 == 1) s2 = apply_one_qubit(s2, pauli_x(), b2);
    s2 = noisy_cnot(s2, b2, t, tgt.cnot_fidelity);
    auto second = measure_branches(s2, b2, MeasureBasis::X, tgt.measurement_fidelity);
    DensityMatrix s3 = second[m2].state;
    if (m2 == 1) s3 = apply_one_qubit(s3, pauli_z(), c);
    if (weight != nullptr) *weight = first[m1].probability * second[m2].probability;
    return partial_trace(s3, {b1, b2});
}

}  // namespace

DensityMatrix cnot_teleport(const DensityMatrix& rho, int bell_control_side, int bell_target_side,
                            int data_control, int data_target, const NoisySpec& control_node,
                            const NoisySpec& target_node) {
    Matrix sum;
    int out_qubits = 0;
    for (int m1 = 0; m1 < 2; ++m1)
        for (int m2 = 0; m2 < 2; ++m2) {
            double w = 0.0;
            const DensityMatrix branch =
                teleport_branch(rho, bell_control_side, bell_target_side, data_control, data_target,
                                control_node, target_node, m1, m2, &w);
            if (sum.size() == 0) {
                sum = Matrix::Zero(branch.dim(), branch.dim());
                out_qubits = branch.num_qubits();
            }
            sum += w * branch.data();
        }
    return unchecked(out_qubits, std::move(sum));
}

DensityMatrix cnot_teleport_sampled(const DensityMatrix& rho, int bell_control_side,
                                    int bell_target_side, int data_control, int data_target,
                                    const NoisySpec& control_node, const NoisySpec& target_node,
                                    Rng& rng) {
    const DensityMatrix s1 = noisy_cnot(rho, data_control, bell_control_side, control_node.cnot_fidelity);
    const MeasurementBranch first =
        noisy_measure(s1, bell_control_side, MeasureBasis::Z, control_node.measurement_fidelity, rng);
    DensityMatrix s2 = first.state;
    if (first.outcome == 1) s2 = apply_one_qubit(s2, pauli_x(), bell_target_side);
    s2 = noisy_cnot(s2, bell_target_side, data_target, target_node.cnot_fidelity);
    const MeasurementBranch second =
        noisy_measure(s2, bell_target_side, MeasureBasis::X, target_node.measurement_fidelity, rng);
    DensityMatrix s3 = second.state;
    if (second.outcome == 1) s3 = apply_one_qubit(s3, pauli_z(), data_control);
    return partial_trace(s3, {bell_control_side, bell_target_side});
}

GhzDiagonalState ghz_twirl(const DensityMatrix& rho) {
    const Eigen::Index dim = rho.dim();
    std::vector<double> ev(static_cast<std::size_t>(dim), 0.0);
    for (std::uint64_t v = 0; v < static_cast<std::uint64_t>(dim); ++v) {
        const GhzBasisIndex idx{v};
        const Eigen::Index b = static_cast<Eigen::Index>(idx.bitstring());
        const Eigen::Index bbar = dim - 1 - b;
        const double s = static_cast<double>(idx.phase_sign());
        double val = 0.5 * (rho.data()(b, b).real() + rho.data()(bbar, bbar).real()) +
                     s * rho.data()(b, bbar).real();
        if (val < 0.0 && val > -1e-12) val = 0.0;
        ev[v] = val;
    }
    // guard against accumulated rounding before handing to the validator
    double sum = 0.0;
    for (double v : ev) sum += v;
    for (double& v : ev) v /= sum;
    return GhzDiagonalState(rho.num_qubits(), std::move(ev));
}

double fidelity_to_ghz(const DensityMatrix& rho) {
    const Eigen::Index dim = rho.dim();
    return 0.5 * (rho.data()(0, 0).real() + rho.data()(dim - 1, dim - 1).real()) +
           rho.data()(0, dim - 1).real();
}

double fidelity_to_pure(const DensityMatrix& rho, const Vector& amplitudes) {
    Vector a = amplitudes / amplitudes.norm();
    return (a.adjoint() * rho.data() * a)(0, 0).real();
}

bell::BellDiagonalState swap_oracle(const bell::BellDiagonalState& left,
                                    const bell::BellDiagonalState& right, double gate_fidelity,
                                    double meas1_fidelity, double meas2_fidelity) {
    // qubits: A=0, B1=1 (left pair), B2=2, C=3 (right pair); BSM on (B1,B2)
    const DensityMatrix joint =
        tensor(DensityMatrix::from_bell_diagonal(left), DensityMatrix::from_bell_diagonal(right));
    DensityMatrix state = noisy_cnot(joint, 1, 2, gate_fidelity);
    state = apply_one_qubit(state, hadamard(), 1);

    Matrix sum = Matrix::Zero(4, 4);
    for (int m1 = 0; m1 < 2; ++m1) {
        auto first = measure_branches(state, 1, MeasureBasis::Z, meas1_fidelity);
        for (int m2 = 0; m2 < 2; ++m2) {
            auto second = measure_branches(first[m1].state, 2, MeasureBasis::Z, meas2_fidelity);
            DensityMatrix corrected = second[m2].state;
            if (m1 == 0 && m2 == 1) corrected = apply_one_qubit(corrected, pauli_x(), 3);
            if (m1 == 1 && m2 == 0) corrected = apply_one_qubit(corrected, pauli_z(), 3);
            if (m1 == 1 && m2 == 1) corrected = apply_one_qubit(corrected, pauli_y(), 3);
            const double w = first[m1].probability * second[m2].probability;
            sum += w * partial_trace(corrected, {1, 2}).data();
        }
    }
    const GhzDiagonalState diag = ghz_twirl(unchecked(2, std::move(sum)));
    bell::BellDiagonalState out;
    for (int i = 0; i < 4; ++i) out.lambdas[i] = diag.eigenvalues()[i];
    out.last_update_time = std::max(left.last_update_time, right.last_update_time);
    return out;
}

PurifyOracleResult purify_oracle(const bell::BellDiagonalState& kept,
                                 const bell::BellDiagonalState& measured, double gate_fidelity_a,
                                 double gate_fidelity_b, double meas_fidelity_a,
                                 double meas_fidelity_b) {
    // qubits: A1=0, B1=1 (kept pair), A2=2, B2=3 (measured pair);
    // node A holds (A1, A2), node B holds (B1, B2)
    const DensityMatrix joint =
        tensor(DensityMatrix::from_bell_diagonal(kept), DensityMatrix::from_bell_diagonal(measured));
    DensityMatrix state = noisy_cnot(joint, 0, 2, gate_fidelity_a);
    state = noisy_cnot(state, 1, 3, gate_fidelity_b);

    Matrix success = Matrix::Zero(4, 4);
    double p_s = 0.0;
    for (int ma = 0; ma < 2; ++ma) {
        auto first = measure_branches(state, 2, MeasureBasis::Z, meas_fidelity_a);
        auto second = measure_branches(first[ma].state, 3, MeasureBasis::Z, meas_fidelity_b);
        const int mb = ma;  // success requires agreeing outcomes
        const double w = first[ma].probability * second[mb].probability;
        success += w * partial_trace(second[mb].state, {2, 3}).data();
        p_s += w;
    }

    PurifyOracleResult result;
    result.success_probability = p_s;
    const GhzDiagonalState diag = ghz_twirl(unchecked(2, success / std::max(p_s, 1e-300)));
    for (int i = 0; i < 4; ++i) result.state.lambdas[i] = diag.eigenvalues()[i];
    result.state.last_update_time = std::max(kept.last_update_time, measured.last_update_time);
    return result;
}

ResourceEstimate resource_estimate(AssemblyMethod method, int ghz_size) {
    if (ghz_size < 2) throw std::invalid_argument("resource_estimate: GHZ size must be >= 2");
    const int n = ghz_size;
    ResourceEstimate r;
    if (method == AssemblyMethod::Teleportation) {
        r.qubits = 3 * n - 2;
        r.single_qubit_measurements = 2 * n - 2;
        r.two_qubit_gates = 2 * n - 2;
        r.avg_single_qubit_gates = static_cast<double>(n - 1);
    } else {
        r.qubits = 2 * n - 2;
        r.single_qubit_measurements = n - 1;
        r.two_qubit_gates = n - 1;
        r.avg_single_qubit_gates = static_cast<double>(n - 1) / 2.0;
    }
    return r;
}

}  // namespace dqsnet::densmat
