#include "dqsnet/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dqsnet::estimation {

Configuration::Configuration(int num_nodes, std::vector<int> isolated_nodes)
    : num_nodes_(num_nodes), isolated_(std::move(isolated_nodes)) {
    if (num_nodes_ < 2) throw std::invalid_argument("Configuration: need at least two nodes");
    std::sort(isolated_.begin(), isolated_.end());
    isolated_.erase(std::unique(isolated_.begin(), isolated_.end()), isolated_.end());
    for (int idx : isolated_)
        if (idx < 0 || idx >= num_nodes_) throw std::out_of_range("Configuration: node index out of range");
    // a single entangled node carries no entanglement: same as all isolated
    if (static_cast<int>(isolated_.size()) == num_nodes_ - 1) {
        isolated_.clear();
        for (int i = 0; i < num_nodes_; ++i) isolated_.push_back(i);
    }
}

std::uint64_t configuration_count(int num_nodes) {
    if (num_nodes < 2 || num_nodes > 62) throw std::invalid_argument("configuration_count: bad node count");
    return (std::uint64_t{1} << num_nodes) - static_cast<std::uint64_t>(num_nodes);
}

double hybrid_variance(const Configuration& config, const std::vector<double>& local_variances,
                       double entangled_variance) {
    const int d = config.num_nodes();
    if (local_variances.size() != config.isolated().size())
        throw std::invalid_argument("hybrid_variance: need one local variance per isolated node");
    double sum = 0.0;
    for (double v : local_variances) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("hybrid_variance: bad local variance");
        sum += v;
    }
    sum /= d;
    const int entangled = config.num_entangled();
    if (entangled > 0) {
        if (!(entangled_variance > 0.0) || !std::isfinite(entangled_variance))
            throw std::invalid_argument("hybrid_variance: bad entangled variance");
        sum += static_cast<double>(entangled) / d * entangled_variance;
    }
    return sum;
}

CombinedEstimate combine_inverse_variance(const std::vector<EstimatorVariance>& entries) {
    if (entries.empty()) throw std::invalid_argument("combine_inverse_variance: empty input");
    double total = 0.0;
    for (const auto& e : entries) {
        if (!(e.variance > 0.0)) throw std::invalid_argument("combine_inverse_variance: nonpositive variance");
        total += 1.0 / e.variance;
    }
    CombinedEstimate out;
    out.weights.reserve(entries.size());
    for (const auto& e : entries) out.weights.push_back(1.0 / e.variance / total);
    out.variance = 1.0 / total;
    return out;
}

double coarse_grain(const std::vector<CoarseGroup>& groups) {
    if (groups.empty()) throw std::invalid_argument("coarse_grain: empty input");
    double total = 0.0;
    bool any = false;
    for (const auto& g : groups) {
        if (!(g.variance_coefficient > 0.0)) throw std::invalid_argument("coarse_grain: nonpositive coefficient");
        if (g.sample_count < 0.0) throw std::invalid_argument("coarse_grain: negative count");
        if (g.sample_count > 0.0) any = true;
        total += g.sample_count / g.variance_coefficient;
    }
    if (!any) throw std::invalid_argument("coarse_grain: all counts zero");
    return 1.0 / total;
}

}  // namespace dqsnet::estimation
