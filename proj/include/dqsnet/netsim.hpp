#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dqsnet/bell.hpp"
#include "dqsnet/densmat.hpp"
#include "dqsnet/rng.hpp"
#include "dqsnet/scenario.hpp"

namespace dqsnet::netsim {

struct TrialRecord {
    bool success = false;
    double fidelity = 0.0;                // assembled-state GHZ fidelity
    std::vector<double> link_fidelities;  // per-link pair fidelity at assembly
};

struct SimResult {
    int trials = 0;
    std::uint64_t seed = 0;
    int successes = 0;
    double success_probability = 0.0;

    // Ensemble average over successful trials; absent when none succeeded.
    std::optional<densmat::DensityMatrix> average_state;

    // Figures of merit; NaN (and eta_defined = false) when no trial succeeded.
    double fidelity = 0.0;
    double eta = 0.0;        // d(1-C) on the twirled average state
    double eta_tilde = 0.0;  // p * eta
    double eta_qfim = 0.0;   // cross-check: QFI of the average from the raw state
    bool eta_defined = false;

    std::vector<TrialRecord> trial_records;

    // time_s<TAB>event<TAB>link<TAB>outcome lines, populated on request.
    std::vector<std::string> event_log;
};

struct CampaignOptions {
    // Record the full event stream for trials [0, log_trials). The stream
    // includes every heralding attempt, so this is kept off for large
    // campaigns by default.
    int log_trials = 0;
};

// Runs `trials` independent probe-distribution windows of the scenario.
// Fully deterministic in (scenario, trials, seed). Throws
// std::invalid_argument if the topology exceeds the density-matrix
// assembly cap (num_sensor_nodes > 3).
SimResult run_campaign(const NetworkScenario& scenario, int trials, std::uint64_t seed,
                       const CampaignOptions& options = {});

struct NodeOpsSet {
    bell::OperationErrorModel center;
    bell::OperationErrorModel end;
};

// Assembles one Bell pair per link into the (d = pairs+1)-qubit probe.
// Pair i spans (end_i, center); merging chains boundary CNOTs at the
// center, teleportation runs the standard GHZ circuit over teleported
// CNOTs. Measurement outcomes are sampled from `rng` when given, otherwise
// averaged over all branches.
densmat::DensityMatrix assemble(const std::vector<bell::BellDiagonalState>& pairs,
                                densmat::AssemblyMethod method, const NodeOpsSet& ops,
                                Rng* rng = nullptr);

}  // namespace dqsnet::netsim
