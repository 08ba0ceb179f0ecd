#include "dqsnet/bell.hpp"

#include <cmath>
#include <stdexcept>

namespace dqsnet::bell {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " out of [0,1]");
}

// Single-qubit Pauli action on the Bell components, identical for either
// qubit of the pair: X swaps Phi<->Psi within a phase, Z flips the phase
// within a bit pattern, Y does both.
constexpr int kPermX[4] = {2, 3, 0, 1};
constexpr int kPermY[4] = {3, 2, 1, 0};
constexpr int kPermZ[4] = {1, 0, 3, 2};

std::array<double, 4> apply_pauli_channel(const std::array<double, 4>& in, double e,
                                          const std::array<double, 3>& pattern) {
    // weights renormalized so the map is exactly mass preserving even when
    // the stored pattern carries rounding from a config file
    const double wsum = pattern[0] + pattern[1] + pattern[2];
    const double wx = e * pattern[0] / wsum;
    const double wy = e * pattern[1] / wsum;
    const double wz = e * pattern[2] / wsum;
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) {
        out[i] += (1.0 - e) * in[i];
        out[kPermX[i]] += wx * in[i];
        out[kPermY[i]] += wy * in[i];
        out[kPermZ[i]] += wz * in[i];
    }
    return out;
}

}  // namespace

void BellDiagonalState::validate() const {
    double sum = 0.0;
    for (double v : lambdas) {
        if (!(v >= -1e-12) || !std::isfinite(v))
            throw std::invalid_argument("BellDiagonalState: negative component");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("BellDiagonalState: components do not sum to 1");
}

BellDiagonalState BellDiagonalState::werner(double fidelity) {
    check_probability(fidelity, "werner fidelity");
    const double r = (1.0 - fidelity) / 3.0;
    return {{fidelity, r, r, r}, 0.0};
}

void MemoryErrorModel::validate() const {
    if (!(coherence_time_s > 0.0)) throw std::invalid_argument("coherence time must be positive");
    double sum = 0.0;
    for (double w : pattern) {
        if (!(w >= 0.0)) throw std::invalid_argument("negative pattern weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("pattern weights must sum to 1");
}

double MemoryErrorModel::error_probability(double dt) const {
    if (dt < 0.0) throw std::invalid_argument("negative idling duration");
    return 0.75 * (1.0 - std::exp(-dt / coherence_time_s));
}

void OperationErrorModel::validate() const {
    check_probability(gate_fidelity, "gate fidelity");
    check_probability(measurement_fidelity, "measurement fidelity");
}

BellDiagonalState decohere(const BellDiagonalState& bds, double dt_a, double dt_b,
                           const MemoryErrorModel& mem_a, const MemoryErrorModel& mem_b) {
    if (dt_a < 0.0 || dt_b < 0.0) throw std::invalid_argument("decohere: negative duration");
    auto out = apply_pauli_channel(bds.lambdas, mem_a.error_probability(dt_a), mem_a.pattern);
    out = apply_pauli_channel(out, mem_b.error_probability(dt_b), mem_b.pattern);
    return {out, bds.last_update_time};
}

BellDiagonalState swap(const BellDiagonalState& left, const BellDiagonalState& right,
                       const OperationErrorModel& middle_gate, double meas1_fidelity,
                       double meas2_fidelity) {
    left.validate();
    right.validate();
    middle_gate.validate();
    check_probability(meas1_fidelity, "meas1 fidelity");
    check_probability(meas2_fidelity, "meas2 fidelity");

    const auto& l = left.lambdas;
    const auto& r = right.lambdas;
    const double ci = l[0] * r[0] + l[1] * r[1] + l[2] * r[2] + l[3] * r[3];
    const double cx = l[0] * r[1] + l[1] * r[0] + l[2] * r[3] + l[3] * r[2];
    const double cy = l[0] * r[3] + l[3] * r[0] + l[1] * r[2] + l[2] * r[1];
    const double cz = l[0] * r[2] + l[2] * r[0] + l[1] * r[3] + l[3] * r[1];

    const double p = middle_gate.gate_fidelity;
    const double e1 = meas1_fidelity, f1 = 1.0 - meas1_fidelity;
    const double e2 = meas2_fidelity, f2 = 1.0 - meas2_fidelity;

    std::array<double, 4> out{};
    out[0] = p * (e1 * e2 * ci + f1 * e2 * cx + e1 * f2 * cz + f1 * f2 * cy);
    out[1] = p * (f1 * e2 * ci + e1 * e2 * cx + f1 * f2 * cz + e1 * f2 * cy);
    out[2] = p * (e1 * f2 * ci + f1 * f2 * cx + e1 * e2 * cz + f1 * e2 * cy);
    out[3] = p * (f1 * f2 * ci + e1 * f2 * cx + f1 * e2 * cz + e1 * e2 * cy);
    const double residue = (1.0 - p) / 4.0;
    for (double& v : out) v += residue;
    return {out, std::max(left.last_update_time, right.last_update_time)};
}

PurifyResult purify(const BellDiagonalState& kept, const BellDiagonalState& measured,
                    double gate_fidelity_a, double gate_fidelity_b, double meas_fidelity_a,
                    double meas_fidelity_b) {
    kept.validate();
    measured.validate();
    check_probability(gate_fidelity_a, "gate fidelity A");
    check_probability(gate_fidelity_b, "gate fidelity B");
    check_probability(meas_fidelity_a, "measurement fidelity A");
    check_probability(meas_fidelity_b, "measurement fidelity B");

    const auto& l = kept.lambdas;
    const auto& m = measured.lambdas;
    const double pab = gate_fidelity_a * gate_fidelity_b;
    // probability the two reported outcomes agree with the projective ones
    const double agree = meas_fidelity_a * meas_fidelity_b +
                         (1.0 - meas_fidelity_a) * (1.0 - meas_fidelity_b);
    const double differ = 1.0 - agree;

    std::array<double, 4> raw{};
    raw[0] = pab * (agree * (l[0] * m[0] + l[1] * m[1]) + differ * (l[0] * m[2] + l[1] * m[3]));
    raw[1] = pab * (agree * (l[0] * m[1] + l[1] * m[0]) + differ * (l[0] * m[3] + l[1] * m[2]));
    raw[2] = pab * (agree * (l[2] * m[2] + l[3] * m[3]) + differ * (l[2] * m[0] + l[3] * m[1]));
    raw[3] = pab * (agree * (l[2] * m[3] + l[3] * m[2]) + differ * (l[2] * m[1] + l[3] * m[0]));
    const double residue = (1.0 - pab) / 8.0;
    for (double& v : raw) v += residue;

    PurifyResult result;
    result.success_probability = raw[0] + raw[1] + raw[2] + raw[3];
    const double norm = std::max(result.success_probability, 1e-300);
    for (int i = 0; i < 4; ++i) result.state.lambdas[i] = raw[i] / norm;
    result.state.last_update_time = std::max(kept.last_update_time, measured.last_update_time);
    result.output_fidelity = result.state.lambdas[0];
    return result;
}

}  // namespace dqsnet::bell
