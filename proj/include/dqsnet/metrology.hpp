#pragma once

#include <Eigen/Dense>

#include "dqsnet/densmat.hpp"
#include "dqsnet/ghz_diagonal.hpp"

namespace dqsnet::metrology {

// Estimation target: the average of d node phases, one phase per sensor
// node, with n qubit sensors per node. The derived parameter direction is
// the normalized all-ones vector.
struct SensingProblem {
    int num_nodes = 2;
    int sensors_per_node = 1;

    void validate() const;
    int total_qubits() const { return num_nodes * sensors_per_node; }
};

// Depolarized GHZ probe distributed over d nodes, locally extended to n
// sensors per node with per-step quality k (k = 1: noiseless extension).
// The effective register fidelity is k^(n-1) * F.
struct DepolarizedGhzModel {
    double fidelity = 1.0;
    int num_nodes = 2;
    int sensors_per_node = 1;
    double local_gen_quality = 1.0;

    void validate() const;
    double effective_fidelity() const;
};

// Probe-quality coefficient in [0, 1]: the paired overlap sum over partner
// eigenvalues, 0 for a pure GHZ probe and 1 exactly when every partner pair
// carries identical weight. Eigenvalues below 1e-12 count as zero.
double noise_coefficient(const GhzDiagonalState& state);

// QFI for the phase average: d * (1 - C) * n^2.
double qfi_average(double noise_coefficient, const SensingProblem& problem);

// Full QFIM for the raw node phases: (1 - C) * n^2 * ones.
Eigen::MatrixXd qfim_from_coefficient(double noise_coefficient, const SensingProblem& problem);

// Closed-form coefficient for the depolarized model, evaluated in a form
// stable for any register size (no 2^(nd) overflow).
double depolarized_noise_coefficient(const DepolarizedGhzModel& model);

// Relative advantage eta = d * (1 - C_dp); > 1 beats the optimal local
// strategy (per-node GHZ probes with ideal readout).
double advantage_depolarized(const DepolarizedGhzModel& model);

// Fidelity below which the depolarized nd-qubit probe loses to the optimal
// local strategy. Decays to 1/d for large registers.
double fidelity_threshold_depolarized(int num_nodes, int sensors_per_node = 1);

// Threshold for the rank-2 dephased probe: (1 + sqrt(d)) / (2 sqrt(d)).
double fidelity_threshold_rank2(int num_nodes);

// Worst-case QFI over all GHZ-diagonal probes of fixed fidelity: d(2F-1)^2,
// attained by the rank-2 dephased state.
double qfi_lower_bound(double fidelity, int num_nodes);

struct SensorScalingEstimate {
    double n_max = 0.0;                // -ln(dF)/ln(k)
    double sensitivity_fidelity = 0.0; // dn_max/dF
    double sensitivity_quality = 0.0;  // dn_max/dk
    double sensitivity_ratio = 0.0;    // S_k / S_F
};

// Largest useful number of local sensors per node before the advantage dies,
// plus its sensitivities to F and k. Requires dF > 1 and k in (0, 1);
// throws std::domain_error when no advantage is possible.
SensorScalingEstimate max_local_sensors(int num_nodes, double fidelity, double quality);

// Advantage of the (imperfect) global strategy measured against a local
// strategy that also pays for imperfect local entanglement generation
// (per-node quality k^(1/d)).
double advantage_local_imperfect(int num_nodes, int sensors_per_node, double quality);
double global_local_ratio(const DepolarizedGhzModel& model);

// Per-shot error-propagation variance of the phase-average estimate under
// the product equatorial measurement M(alpha) on a depolarized probe.
// Returns +infinity where the sensitivity vanishes (the alpha = 0,
// theta1 -> 0 divergence); sweeps can plot the infinity directly.
double azimuthal_variance(double fidelity, int num_nodes, int sensors_per_node, double alpha,
                          double theta1);

struct AzimuthalOptimum {
    double alpha = 0.0;               // canonical representative pi/(2nd)
    double fidelity_threshold = 0.0;  // advantage threshold under M(alpha_opt)
    int num_nodes = 2;
    int sensors_per_node = 1;

    // Minimum variance at theta1 = 0 for a probe of the given fidelity.
    double min_variance(double fidelity) const;
};

AzimuthalOptimum optimal_azimuthal(int sensors_per_node, int num_nodes);

enum class Measurement { Optimal, Azimuthal };

// Per-pair fidelity a Bell-pair network must deliver so that the assembled
// d-qubit probe (product-fidelity approximation) still beats the local
// strategy: the (d-1)-th root of the corresponding GHZ threshold.
double bell_pair_threshold(int num_nodes, Measurement measurement);

// Spectral-decomposition QFIM for the collective-spin encoding, computed
// directly from a density matrix. Support-restricted: eigenvalues below
// 1e-12 are dropped. For GHZ-diagonal inputs this equals
// qfim_from_coefficient(noise_coefficient(...)).
Eigen::MatrixXd qfim_numeric(const densmat::DensityMatrix& rho, const SensingProblem& problem);

// QFI of the phase average extracted from a numeric QFIM: v1^T F v1.
double qfi_average_from_qfim(const Eigen::MatrixXd& qfim);

// Deterministic orthonormal completion of v1 = (1,..,1)/sqrt(d): row 0 is
// v1, M M^T = I within 1e-12.
Eigen::MatrixXd orthonormal_extension(int dimension);

}  // namespace dqsnet::metrology
