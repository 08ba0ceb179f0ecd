#pragma once

#include <cstdint>
#include <vector>

namespace dqsnet::estimation {

// A distribution outcome: the set of sensor nodes left isolated (no link to
// the center). Leaving all but one node isolated is equivalent to leaving
// all isolated, so |isolated| = d-1 is normalized to d at construction.
class Configuration {
public:
    Configuration(int num_nodes, std::vector<int> isolated_nodes);

    int num_nodes() const { return num_nodes_; }
    const std::vector<int>& isolated() const { return isolated_; }
    int num_isolated() const { return static_cast<int>(isolated_.size()); }
    int num_entangled() const { return num_nodes_ - num_isolated(); }

private:
    int num_nodes_;
    std::vector<int> isolated_;  // sorted, deduplicated
};

// Number of distinct configurations for d nodes: 2^d - d.
std::uint64_t configuration_count(int num_nodes);

struct EstimatorVariance {
    double variance = 0.0;  // > 0, finite
};

// Variance of the hybrid estimate of the phase average: isolated nodes
// contribute their local variances with weight 1/d, the entangled block
// contributes its average-phase variance with weight |entangled|/d.
double hybrid_variance(const Configuration& config, const std::vector<double>& local_variances,
                       double entangled_variance);

struct CombinedEstimate {
    std::vector<double> weights;  // nonnegative, sum to 1
    double variance = 0.0;        // <= min input variance
};

// Inverse-variance weighting across per-configuration estimators.
CombinedEstimate combine_inverse_variance(const std::vector<EstimatorVariance>& entries);

struct CoarseGroup {
    double variance_coefficient = 0.0;  // F_m: per-sample variance for the group
    double sample_count = 0.0;          // N_m
};

// Coarse-grained combination: configurations grouped by isolated-node count,
// each group approximated by one variance coefficient. Exact when all
// configurations in a group share the same coefficient.
double coarse_grain(const std::vector<CoarseGroup>& groups);

}  // namespace dqsnet::estimation
