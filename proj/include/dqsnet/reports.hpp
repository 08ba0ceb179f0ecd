#pragma once

#include <string>
#include <vector>

#include "dqsnet/netsim.hpp"

namespace dqsnet::reports {

// All numeric CSV fields are printed with 12 significant digits so that
// golden-file and determinism checks compare meaningfully.
std::string format_double(double v);

// Fidelity-threshold table, one row per (d, n):
// d,n,F_th_dp,F_th_azimuthal,F_th_rank2,F_bell_opt,F_bell_azimuthal,gme_bound,sep_bound
std::string thresholds_csv(int d_min, int d_max, int n_min, int n_max);

// Advantage-vs-n curves for the depolarized model on the (F, k) grid:
// F,k,d,n,eta
std::string analyze_curves_csv(const std::vector<double>& fidelities,
                               const std::vector<double>& qualities, int num_nodes, int n_max);

// Largest n with eta > 1 per (F, k), next to the log-ratio estimate:
// F,k,d,n_crossing,n_max_estimate
std::string analyze_crossings_csv(const std::vector<double>& fidelities,
                                  const std::vector<double>& qualities, int num_nodes);

// Integer n where advantage_depolarized first drops to or below 1 (upper
// scan bound `limit`); returns the last n that still had eta > 1.
int advantage_crossing(double fidelity, double quality, int num_nodes, int limit = 1 << 20);

// scenario,p,eta,eta_tilde,F,seed,trials,eta_qfim rows.
std::string results_csv_header();
std::string results_csv_row(const std::string& scenario_name, const netsim::SimResult& result);

std::string event_log_text(const netsim::SimResult& result);

// Writes via a temp file + rename; throws std::runtime_error on I/O failure.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace dqsnet::reports
