#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "dqsnet/bell.hpp"
#include "dqsnet/densmat.hpp"

namespace dqsnet::netsim {

// Full configuration of one simulation campaign: a star of sensor nodes
// around a center node, every center-end link split into equal fiber
// segments by optional repeaters, with a heralding station at each segment
// midpoint.
struct NetworkScenario {
    std::string name = "custom";

    // topology
    int num_sensor_nodes = 3;   // center + (d-1) end nodes
    int repeaters_per_link = 0;

    // channel
    double link_length_km = 10.0;
    double attenuation_db_per_km = 0.2;
    double signal_speed_m_per_s = 2.0e8;
    double classical_comm_time_s = -1.0;  // < 0: length/speed + 1 ms default

    // memories
    int memories_per_end_node = 10;
    int memories_center = 20;
    int memories_per_repeater = 20;
    bell::MemoryErrorModel memory{};
    double memory_frequency_hz = 2.0e3;
    double memory_efficiency = 1.0;
    double cutoff_ratio = 0.5;

    // raw pair installed on a heralding success, before idling noise;
    // residual_pattern splits 1-F across (Phi-, Psi+, Psi-)
    double raw_fidelity = 1.0;
    std::array<double, 3> raw_residual_pattern{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

    // protocol hardware
    double bsm_success_prob = 0.5;   // linear-optics heralding cap, <= 1/2
    double swap_success_prob = 1.0;  // matter-qubit BSM gating at repeaters
    bell::OperationErrorModel end_ops{0.99, 0.99};
    bell::OperationErrorModel center_ops{0.99, 0.99};
    bell::OperationErrorModel repeater_ops{0.99, 0.99};

    // probe-generation window and assembly
    double window_s = 1.0;
    densmat::AssemblyMethod assembly = densmat::AssemblyMethod::Merging;

    void validate() const;

    int num_links() const { return num_sensor_nodes - 1; }
    int segments_per_link() const { return repeaters_per_link + 1; }
    double segment_length_km() const { return link_length_km / segments_per_link(); }

    // One-way photon transmittance to the segment midpoint.
    double segment_transmittance() const;

    // eta_m^2 * p_t^2 * p_m per heralding attempt.
    double attempt_success_prob() const;

    // Emission-to-herald latency of one segment.
    double herald_latency_s() const;

    double classical_comm_time() const;
    double cutoff_deadline_s() const { return cutoff_ratio * memory.coherence_time_s; }

    // Interval between attempts on one memory pair.
    double attempt_interval_s() const;

    // Main-text scenario presets 1..3.
    static NetworkScenario preset(int which);
};

// Key/value scenario files: one `key = value` per line, '#' comments, unit
// suffixes spelled out in the key names. parse throws std::runtime_error
// with a line diagnostic on malformed input.
NetworkScenario parse_scenario(std::istream& in);
NetworkScenario load_scenario(const std::string& path);
std::string serialize_scenario(const NetworkScenario& s);

}  // namespace dqsnet::netsim
