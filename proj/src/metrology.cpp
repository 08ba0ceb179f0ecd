#include "dqsnet/metrology.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dqsnet::metrology {

namespace {

// 1 - C for a depolarized GHZ register of m qubits at fidelity f, written
// with u = 2^-m so it stays finite for arbitrarily large registers:
//   1 - C = (f - u)^2 / [ (1 - u) ((1 - 2u) f + u) ].
double one_minus_c_depolarized(double f, double m_qubits) {
    const double u = std::exp2(-m_qubits);
    const double num = (f - u) * (f - u);
    const double den = (1.0 - u) * ((1.0 - 2.0 * u) * f + u);
    return num / den;
}

}  // namespace

void SensingProblem::validate() const {
    if (num_nodes < 1) throw std::invalid_argument("SensingProblem: need at least one node");
    if (sensors_per_node < 1) throw std::invalid_argument("SensingProblem: need at least one sensor per node");
}

void DepolarizedGhzModel::validate() const {
    if (!(fidelity > 0.0 && fidelity <= 1.0))
        throw std::invalid_argument("DepolarizedGhzModel: fidelity out of (0,1]");
    if (num_nodes < 2) throw std::invalid_argument("DepolarizedGhzModel: need at least two nodes");
    if (sensors_per_node < 1)
        throw std::invalid_argument("DepolarizedGhzModel: need at least one sensor per node");
    if (!(local_gen_quality > 0.0 && local_gen_quality <= 1.0))
        throw std::invalid_argument("DepolarizedGhzModel: quality out of (0,1]");
}

double DepolarizedGhzModel::effective_fidelity() const {
    return std::exp(static_cast<double>(sensors_per_node - 1) * std::log(local_gen_quality)) * fidelity;
}

double noise_coefficient(const GhzDiagonalState& state) {
    const auto& ev = state.eigenvalues();
    double c = 0.0;
    for (std::size_t v = 0; v + 1 < ev.size(); v += 2) {
        double a = ev[v], b = ev[v + 1];
        if (a < 1e-12) a = 0.0;
        if (b < 1e-12) b = 0.0;
        const double s = a + b;
        if (s > 1e-300) c += 4.0 * a * b / s;
    }
    return c;
}

double qfi_average(double noise_coefficient, const SensingProblem& problem) {
    problem.validate();
    if (!(noise_coefficient >= -1e-12 && noise_coefficient <= 1.0 + 1e-12))
        throw std::invalid_argument("noise coefficient out of [0,1]");
    const double n = problem.sensors_per_node;
    return problem.num_nodes * (1.0 - noise_coefficient) * n * n;
}

Eigen::MatrixXd qfim_from_coefficient(double noise_coefficient, const SensingProblem& problem) {
    problem.validate();
    const double n = problem.sensors_per_node;
    return (1.0 - noise_coefficient) * n * n *
           Eigen::MatrixXd::Ones(problem.num_nodes, problem.num_nodes);
}

double depolarized_noise_coefficient(const DepolarizedGhzModel& model) {
    model.validate();
    const double m = static_cast<double>(model.num_nodes) * model.sensors_per_node;
    return 1.0 - one_minus_c_depolarized(model.effective_fidelity(), m);
}

double advantage_depolarized(const DepolarizedGhzModel& model) {
    model.validate();
    const double m = static_cast<double>(model.num_nodes) * model.sensors_per_node;
    return model.num_nodes * one_minus_c_depolarized(model.effective_fidelity(), m);
}

double fidelity_threshold_depolarized(int num_nodes, int sensors_per_node) {
    if (num_nodes < 2) throw std::invalid_argument("threshold: need at least two nodes");
    if (sensors_per_node < 1) throw std::invalid_argument("threshold: need at least one sensor per node");
    const double d = num_nodes;
    const double m = d * sensors_per_node;
    const double u = std::exp2(-m);
    const double root = std::sqrt((1.0 - 2.0 * u) * (1.0 - 2.0 * u) + 8.0 * d * u);
    return u + (1.0 - u) * ((1.0 - 2.0 * u) + root) / (2.0 * d);
}

double fidelity_threshold_rank2(int num_nodes) {
    if (num_nodes < 2) throw std::invalid_argument("threshold: distributed regime needs d >= 2");
    const double sd = std::sqrt(static_cast<double>(num_nodes));
    return (1.0 + sd) / (2.0 * sd);
}

double qfi_lower_bound(double fidelity, int num_nodes) {
    if (num_nodes < 2) throw std::invalid_argument("qfi_lower_bound: need at least two nodes");
    if (!(fidelity >= 0.0 && fidelity <= 1.0))
        throw std::invalid_argument("qfi_lower_bound: fidelity out of [0,1]");
    const double t = 2.0 * fidelity - 1.0;
    return num_nodes * t * t;
}

SensorScalingEstimate max_local_sensors(int num_nodes, double fidelity, double quality) {
    if (num_nodes < 2) throw std::invalid_argument("max_local_sensors: need at least two nodes");
    if (!(quality > 0.0 && quality < 1.0))
        throw std::invalid_argument("max_local_sensors: quality must lie in (0,1)");
    const double df = num_nodes * fidelity;
    if (!(df > 1.0)) throw std::domain_error("max_local_sensors: d*F <= 1, no advantage possible");

    const double lk = std::log(quality);
    SensorScalingEstimate est;
    est.n_max = -std::log(df) / lk;
    est.sensitivity_fidelity = -1.0 / (fidelity * lk);
    est.sensitivity_quality = std::log(df) / (quality * lk * lk);
    est.sensitivity_ratio = -fidelity * std::log(df) / (quality * lk);
    return est;
}

double advantage_local_imperfect(int num_nodes, int sensors_per_node, double quality) {
    if (num_nodes < 2) throw std::invalid_argument("advantage_local_imperfect: need at least two nodes");
    if (sensors_per_node < 1)
        throw std::invalid_argument("advantage_local_imperfect: need at least one sensor");
    if (!(quality > 0.0 && quality <= 1.0))
        throw std::invalid_argument("advantage_local_imperfect: quality out of (0,1]");
    // per-node probe: n-qubit depolarized GHZ at fidelity (k^(1/d))^(n-1)
    const double f = std::exp(static_cast<double>(sensors_per_node - 1) * std::log(quality) / num_nodes);
    return one_minus_c_depolarized(f, sensors_per_node);
}

double global_local_ratio(const DepolarizedGhzModel& model) {
    return advantage_depolarized(model) /
           advantage_local_imperfect(model.num_nodes, model.sensors_per_node, model.local_gen_quality);
}

namespace {

double azimuthal_contrast(double fidelity, double m_qubits) {
    const double u = std::exp2(-m_qubits);
    return fidelity - (1.0 - fidelity) * u / (1.0 - u);
}

}  // namespace

double azimuthal_variance(double fidelity, int num_nodes, int sensors_per_node, double alpha,
                          double theta1) {
    if (!(fidelity > 0.0 && fidelity <= 1.0))
        throw std::invalid_argument("azimuthal_variance: fidelity out of (0,1]");
    if (num_nodes < 1 || sensors_per_node < 1)
        throw std::invalid_argument("azimuthal_variance: invalid layout");
    const double d = num_nodes;
    const double n = sensors_per_node;
    const double a = azimuthal_contrast(fidelity, d * n);
    const double arg = n * std::sqrt(d) * (theta1 + std::sqrt(d) * alpha);
    const double s2 = std::sin(arg) * std::sin(arg);
    const double c2 = std::cos(arg) * std::cos(arg);
    const double den = d * n * n * a * a * s2;
    if (den < 1e-300) {
        // 0/0 only for a unit-contrast probe, where the variance is flat
        if (std::abs(1.0 - a * a) < 1e-12) return 1.0 / (d * n * n * a * a);
        return std::numeric_limits<double>::infinity();
    }
    return (1.0 - a * a * c2) / den;
}

double AzimuthalOptimum::min_variance(double fidelity) const {
    const double a = azimuthal_contrast(fidelity, static_cast<double>(num_nodes) * sensors_per_node);
    return 1.0 / (num_nodes * a * a * sensors_per_node * sensors_per_node);
}

AzimuthalOptimum optimal_azimuthal(int sensors_per_node, int num_nodes) {
    if (num_nodes < 2) throw std::invalid_argument("optimal_azimuthal: need at least two nodes");
    if (sensors_per_node < 1) throw std::invalid_argument("optimal_azimuthal: need at least one sensor");
    AzimuthalOptimum opt;
    opt.num_nodes = num_nodes;
    opt.sensors_per_node = sensors_per_node;
    opt.alpha = M_PI / (2.0 * sensors_per_node * num_nodes);
    const double sd = std::sqrt(static_cast<double>(num_nodes));
    const double u = std::exp2(-static_cast<double>(num_nodes) * sensors_per_node);
    opt.fidelity_threshold = (1.0 + (sd - 1.0) * u) / sd;
    return opt;
}

double bell_pair_threshold(int num_nodes, Measurement measurement) {
    if (num_nodes < 2) throw std::invalid_argument("bell_pair_threshold: need at least two nodes");
    const double th = measurement == Measurement::Optimal
                          ? fidelity_threshold_depolarized(num_nodes, 1)
                          : optimal_azimuthal(1, num_nodes).fidelity_threshold;
    return std::pow(th, 1.0 / (num_nodes - 1));
}

Eigen::MatrixXd qfim_numeric(const densmat::DensityMatrix& rho, const SensingProblem& problem) {
    problem.validate();
    if (problem.total_qubits() != rho.num_qubits())
        throw std::invalid_argument("qfim_numeric: register does not match problem layout");
    if ((rho.data() - rho.data().adjoint()).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("qfim_numeric: state is not Hermitian");

    const int d = problem.num_nodes;
    const int n = problem.sensors_per_node;
    const Eigen::Index dim = rho.dim();

    Eigen::SelfAdjointEigenSolver<densmat::Matrix> solver(0.5 * (rho.data() + rho.data().adjoint()));
    const Eigen::VectorXd evals = solver.eigenvalues();
    if (evals.minCoeff() < -1e-9) throw std::invalid_argument("qfim_numeric: state is not PSD");
    const densmat::Matrix& vecs = solver.eigenvectors();

    std::vector<Eigen::Index> support;
    for (Eigen::Index a = 0; a < dim; ++a)
        if (evals(a) > 1e-12) support.push_back(a);

    // generators G_i = -(1/2) sum_k sigma_z on the qubits of node i; diagonal
    std::vector<Eigen::VectorXd> gen(d, Eigen::VectorXd::Zero(dim));
    for (Eigen::Index z = 0; z < dim; ++z)
        for (int node = 0; node < d; ++node) {
            int up = 0;
            for (int k = 0; k < n; ++k)
                if (!(static_cast<std::uint64_t>(z) & (std::uint64_t{1} << (node * n + k)))) ++up;
            gen[node](z) = -0.5 * static_cast<double>(2 * up - n);
        }

    std::vector<densmat::Matrix> gmat(d);  // <psi_a| G_i |psi_b>
    for (int i = 0; i < d; ++i) gmat[i] = vecs.adjoint() * gen[i].asDiagonal() * vecs;

    Eigen::MatrixXd qfim = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double val = 0.0;
            for (Eigen::Index a : support) {
                double gigj = 0.0;
                for (Eigen::Index z = 0; z < dim; ++z)
                    gigj += std::norm(vecs(z, a)) * gen[i](z) * gen[j](z);
                const double cov = gigj - gmat[i](a, a).real() * gmat[j](a, a).real();
                val += 4.0 * evals(a) * cov;
            }
            for (Eigen::Index a : support)
                for (Eigen::Index b : support) {
                    if (a == b) continue;
                    const double la = evals(a), lb = evals(b);
                    val -= 8.0 * la * lb / (la + lb) * (gmat[i](a, b) * gmat[j](b, a)).real();
                }
            qfim(i, j) = val;
            qfim(j, i) = val;
        }
    return qfim;
}

double qfi_average_from_qfim(const Eigen::MatrixXd& qfim) {
    return qfim.sum() / static_cast<double>(qfim.rows());
}

Eigen::MatrixXd orthonormal_extension(int dimension) {
    if (dimension < 2) throw std::invalid_argument("orthonormal_extension: need dimension >= 2");
    Eigen::MatrixXd rows(dimension, dimension);
    rows.row(0) = Eigen::VectorXd::Ones(dimension).transpose() / std::sqrt(static_cast<double>(dimension));
    int have = 1;
    for (int candidate = 0; candidate < dimension && have < dimension; ++candidate) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dimension);
        v(candidate) = 1.0;
        for (int r = 0; r < have; ++r) v -= rows.row(r).dot(v) * rows.row(r).transpose();
        const double norm = v.norm();
        if (norm < 1e-9) continue;  // linearly dependent candidate, skip
        rows.row(have++) = v.transpose() / norm;
    }
    if (have != dimension) throw std::logic_error("orthonormal_extension: completion failed");
    return rows;
}

}  // namespace dqsnet::metrology
