#include "dqsnet/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dqsnet::netsim {

void NetworkScenario::validate() const {
    if (num_sensor_nodes < 2) throw std::invalid_argument("scenario: need at least two sensor nodes");
    if (repeaters_per_link < 0) throw std::invalid_argument("scenario: negative repeater count");
    if (!(link_length_km > 0.0)) throw std::invalid_argument("scenario: link length must be positive");
    if (!(attenuation_db_per_km >= 0.0)) throw std::invalid_argument("scenario: negative attenuation");
    if (!(signal_speed_m_per_s > 0.0)) throw std::invalid_argument("scenario: signal speed must be positive");
    if (memories_per_end_node < 1 || memories_center < 1)
        throw std::invalid_argument("scenario: need at least one memory per node");
    if (repeaters_per_link > 0 && memories_per_repeater < 2)
        throw std::invalid_argument("scenario: repeaters need at least two memories");
    memory.validate();
    if (!(memory_frequency_hz > 0.0)) throw std::invalid_argument("scenario: memory frequency must be positive");
    if (!(memory_efficiency >= 0.0 && memory_efficiency <= 1.0))
        throw std::invalid_argument("scenario: memory efficiency out of [0,1]");
    if (!(cutoff_ratio > 0.0)) throw std::invalid_argument("scenario: cutoff ratio must be positive");
    if (!(raw_fidelity >= 0.0 && raw_fidelity <= 1.0))
        throw std::invalid_argument("scenario: raw fidelity out of [0,1]");
    double psum = 0.0;
    for (double w : raw_residual_pattern) {
        if (!(w >= 0.0)) throw std::invalid_argument("scenario: negative raw residual weight");
        psum += w;
    }
    if (std::abs(psum - 1.0) > 1e-12)
        throw std::invalid_argument("scenario: raw residual pattern must sum to 1");
    if (!(bsm_success_prob > 0.0 && bsm_success_prob <= 0.5))
        throw std::invalid_argument("scenario: heralding success probability must lie in (0, 1/2]");
    if (!(swap_success_prob >= 0.0 && swap_success_prob <= 1.0))
        throw std::invalid_argument("scenario: swap success probability out of [0,1]");
    end_ops.validate();
    center_ops.validate();
    repeater_ops.validate();
    if (!(window_s > 0.0)) throw std::invalid_argument("scenario: window must be positive");
}

double NetworkScenario::segment_transmittance() const {
    const double half_km = segment_length_km() / 2.0;
    return std::pow(10.0, -attenuation_db_per_km * half_km / 10.0);
}

double NetworkScenario::attempt_success_prob() const {
    const double pt = segment_transmittance();
    return memory_efficiency * memory_efficiency * pt * pt * bsm_success_prob;
}

double NetworkScenario::herald_latency_s() const {
    return segment_length_km() * 1000.0 / signal_speed_m_per_s;
}

double NetworkScenario::classical_comm_time() const {
    if (classical_comm_time_s >= 0.0) return classical_comm_time_s;
    return link_length_km * 1000.0 / signal_speed_m_per_s + 1e-3;
}

double NetworkScenario::attempt_interval_s() const {
    return std::max(1.0 / memory_frequency_hz, herald_latency_s());
}

NetworkScenario NetworkScenario::preset(int which) {
    NetworkScenario s;
    switch (which) {
        case 1:
            s.memory.coherence_time_s = 0.01;
            s.memory_efficiency = 0.05;
            s.raw_fidelity = 0.8;
            break;
        case 2:
            s.memory.coherence_time_s = 0.1;
            s.memory_efficiency = 0.1;
            s.raw_fidelity = 0.85;
            break;
        case 3:
            s.memory.coherence_time_s = 1.0;
            s.memory_efficiency = 0.5;
            s.raw_fidelity = 0.9;
            break;
        default:
            throw std::invalid_argument("preset: expected 1, 2 or 3");
    }
    s.name = "preset" + std::to_string(which);
    // Published values pin coherence time, memory efficiency, raw fidelity,
    // window, link length, memory counts and 0.99 operations. The remaining
    // knobs are unstated there; the preset pins them explicitly: attempts
    // saturate the heralding round trip, classical rounds carry a 4 ms
    // protocol overhead, and assembly teleports CNOTs.
    s.memory_frequency_hz = 2.0e4;
    s.classical_comm_time_s = s.link_length_km * 1000.0 / s.signal_speed_m_per_s + 4e-3;
    s.assembly = densmat::AssemblyMethod::Teleportation;
    return s;
}

namespace {

// Pattern weights in config files are normalized after parsing, so rounded
// thirds (or raw ratios like "1 1 4") are accepted.
std::array<double, 3> parse_triplet(const std::string& value, const std::string& key, int line_no) {
    std::istringstream ss(value);
    std::array<double, 3> out{};
    if (!(ss >> out[0] >> out[1] >> out[2]))
        throw std::runtime_error("scenario line " + std::to_string(line_no) + ": key '" + key +
                                 "' expects three numbers");
    const double sum = out[0] + out[1] + out[2];
    if (!(sum > 0.0) || out[0] < 0.0 || out[1] < 0.0 || out[2] < 0.0)
        throw std::runtime_error("scenario line " + std::to_string(line_no) + ": key '" + key +
                                 "' expects nonnegative weights with positive sum");
    for (double& w : out) w /= sum;
    return out;
}

double parse_number(const std::string& value, const std::string& key, int line_no) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || value.find_first_not_of(" \t", pos) != std::string::npos)
        throw std::runtime_error("scenario line " + std::to_string(line_no) + ": key '" + key +
                                 "' expects a number, got '" + value + "'");
    return v;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

NetworkScenario parse_scenario(std::istream& in) {
    NetworkScenario s;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("scenario line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        auto num = [&] { return parse_number(value, key, line_no); };
        if (key == "name") s.name = value;
        else if (key == "topology.num_sensor_nodes") s.num_sensor_nodes = static_cast<int>(num());
        else if (key == "topology.repeaters_per_link") s.repeaters_per_link = static_cast<int>(num());
        else if (key == "link.length_km") s.link_length_km = num();
        else if (key == "link.attenuation_db_per_km") s.attenuation_db_per_km = num();
        else if (key == "link.signal_speed_m_per_s") s.signal_speed_m_per_s = num();
        else if (key == "classical.comm_time_s") s.classical_comm_time_s = num();
        else if (key == "memory.per_end_node") s.memories_per_end_node = static_cast<int>(num());
        else if (key == "memory.center_total") s.memories_center = static_cast<int>(num());
        else if (key == "memory.per_repeater") s.memories_per_repeater = static_cast<int>(num());
        else if (key == "memory.coherence_time_s") s.memory.coherence_time_s = num();
        else if (key == "memory.error_pattern") s.memory.pattern = parse_triplet(value, key, line_no);
        else if (key == "memory.frequency_hz") s.memory_frequency_hz = num();
        else if (key == "memory.efficiency") s.memory_efficiency = num();
        else if (key == "memory.cutoff_ratio") s.cutoff_ratio = num();
        else if (key == "raw_bell.fidelity") s.raw_fidelity = num();
        else if (key == "raw_bell.residual_pattern") s.raw_residual_pattern = parse_triplet(value, key, line_no);
        else if (key == "bsm.success_prob") s.bsm_success_prob = num();
        else if (key == "swap.success_prob") s.swap_success_prob = num();
        else if (key == "ops.gate_fidelity") {
            s.end_ops.gate_fidelity = s.center_ops.gate_fidelity = s.repeater_ops.gate_fidelity = num();
        } else if (key == "ops.measurement_fidelity") {
            s.end_ops.measurement_fidelity = s.center_ops.measurement_fidelity =
                s.repeater_ops.measurement_fidelity = num();
        } else if (key == "ops.center.gate_fidelity") s.center_ops.gate_fidelity = num();
        else if (key == "ops.center.measurement_fidelity") s.center_ops.measurement_fidelity = num();
        else if (key == "ops.end.gate_fidelity") s.end_ops.gate_fidelity = num();
        else if (key == "ops.end.measurement_fidelity") s.end_ops.measurement_fidelity = num();
        else if (key == "ops.repeater.gate_fidelity") s.repeater_ops.gate_fidelity = num();
        else if (key == "ops.repeater.measurement_fidelity") s.repeater_ops.measurement_fidelity = num();
        else if (key == "window.duration_s") s.window_s = num();
        else if (key == "assembly.method") {
            if (value == "merging") s.assembly = densmat::AssemblyMethod::Merging;
            else if (value == "teleportation") s.assembly = densmat::AssemblyMethod::Teleportation;
            else
                throw std::runtime_error("scenario line " + std::to_string(line_no) +
                                         ": assembly.method must be 'merging' or 'teleportation'");
        } else {
            throw std::runtime_error("scenario line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    s.validate();
    return s;
}

NetworkScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    return parse_scenario(in);
}

namespace {

// shortest representation that parses back to the same double
std::string number(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string serialize_scenario(const NetworkScenario& s) {
    std::ostringstream out;
    out << "name = " << s.name << "\n";
    out << "topology.num_sensor_nodes = " << s.num_sensor_nodes << "\n";
    out << "topology.repeaters_per_link = " << s.repeaters_per_link << "\n";
    out << "link.length_km = " << number(s.link_length_km) << "\n";
    out << "link.attenuation_db_per_km = " << number(s.attenuation_db_per_km) << "\n";
    out << "link.signal_speed_m_per_s = " << number(s.signal_speed_m_per_s) << "\n";
    out << "classical.comm_time_s = " << number(s.classical_comm_time()) << "\n";
    out << "memory.per_end_node = " << s.memories_per_end_node << "\n";
    out << "memory.center_total = " << s.memories_center << "\n";
    out << "memory.per_repeater = " << s.memories_per_repeater << "\n";
    out << "memory.coherence_time_s = " << number(s.memory.coherence_time_s) << "\n";
    out << "memory.error_pattern = " << number(s.memory.pattern[0]) << " "
        << number(s.memory.pattern[1]) << " " << number(s.memory.pattern[2]) << "\n";
    out << "memory.frequency_hz = " << number(s.memory_frequency_hz) << "\n";
    out << "memory.efficiency = " << number(s.memory_efficiency) << "\n";
    out << "memory.cutoff_ratio = " << number(s.cutoff_ratio) << "\n";
    out << "raw_bell.fidelity = " << number(s.raw_fidelity) << "\n";
    out << "raw_bell.residual_pattern = " << number(s.raw_residual_pattern[0]) << " "
        << number(s.raw_residual_pattern[1]) << " " << number(s.raw_residual_pattern[2]) << "\n";
    out << "bsm.success_prob = " << number(s.bsm_success_prob) << "\n";
    out << "swap.success_prob = " << number(s.swap_success_prob) << "\n";
    out << "ops.center.gate_fidelity = " << number(s.center_ops.gate_fidelity) << "\n";
    out << "ops.center.measurement_fidelity = " << number(s.center_ops.measurement_fidelity) << "\n";
    out << "ops.end.gate_fidelity = " << number(s.end_ops.gate_fidelity) << "\n";
    out << "ops.end.measurement_fidelity = " << number(s.end_ops.measurement_fidelity) << "\n";
    out << "ops.repeater.gate_fidelity = " << number(s.repeater_ops.gate_fidelity) << "\n";
    out << "ops.repeater.measurement_fidelity = " << number(s.repeater_ops.measurement_fidelity) << "\n";
    out << "window.duration_s = " << number(s.window_s) << "\n";
    out << "assembly.method = "
        << (s.assembly == densmat::AssemblyMethod::Merging ? "merging" : "teleportation") << "\n";
    return out.str();
}

}  // namespace dqsnet::netsim
