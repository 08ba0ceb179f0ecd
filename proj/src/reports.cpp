#include "dqsnet/reports.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dqsnet/metrology.hpp"

namespace dqsnet::reports {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string thresholds_csv(int d_min, int d_max, int n_min, int n_max) {
    if (d_min < 2 || d_max < d_min || n_min < 1 || n_max < n_min)
        throw std::invalid_argument("thresholds_csv: bad ranges");
    std::ostringstream out;
    out << "d,n,F_th_dp,F_th_azimuthal,F_th_rank2,F_bell_opt,F_bell_azimuthal,gme_bound,sep_bound\n";
    for (int d = d_min; d <= d_max; ++d)
        for (int n = n_min; n <= n_max; ++n) {
            const double sep = 3.0 / (std::exp2(static_cast<double>(n) * d) + 2.0);
            out << d << ',' << n << ','
                << format_double(metrology::fidelity_threshold_depolarized(d, n)) << ','
                << format_double(metrology::optimal_azimuthal(n, d).fidelity_threshold) << ','
                << format_double(metrology::fidelity_threshold_rank2(d)) << ','
                << format_double(metrology::bell_pair_threshold(d, metrology::Measurement::Optimal)) << ','
                << format_double(metrology::bell_pair_threshold(d, metrology::Measurement::Azimuthal)) << ','
                << format_double(0.5) << ',' << format_double(sep) << '\n';
        }
    return out.str();
}

int advantage_crossing(double fidelity, double quality, int num_nodes, int limit) {
    int last_above = 0;
    for (int n = 1; n <= limit; ++n) {
        metrology::DepolarizedGhzModel model{fidelity, num_nodes, n, quality};
        if (metrology::advantage_depolarized(model) > 1.0) last_above = n;
        else if (last_above > 0) break;  // past the crossing
    }
    return last_above;
}

std::string analyze_curves_csv(const std::vector<double>& fidelities,
                               const std::vector<double>& qualities, int num_nodes, int n_max) {
    std::ostringstream out;
    out << "F,k,d,n,eta\n";
    for (double f : fidelities)
        for (double k : qualities)
            for (int n = 1; n <= n_max; ++n) {
                metrology::DepolarizedGhzModel model{f, num_nodes, n, k};
                out << format_double(f) << ',' << format_double(k) << ',' << num_nodes << ',' << n
                    << ',' << format_double(metrology::advantage_depolarized(model)) << '\n';
            }
    return out.str();
}

std::string analyze_crossings_csv(const std::vector<double>& fidelities,
                                  const std::vector<double>& qualities, int num_nodes) {
    std::ostringstream out;
    out << "F,k,d,n_crossing,n_max_estimate\n";
    for (double f : fidelities)
        for (double k : qualities) {
            const int crossing = advantage_crossing(f, k, num_nodes);
            double estimate = std::numeric_limits<double>::quiet_NaN();
            if (k < 1.0 && num_nodes * f > 1.0)
                estimate = metrology::max_local_sensors(num_nodes, f, k).n_max;
            out << format_double(f) << ',' << format_double(k) << ',' << num_nodes << ',' << crossing
                << ',' << format_double(estimate) << '\n';
        }
    return out.str();
}

std::string results_csv_header() { return "scenario,p,eta,eta_tilde,F,seed,trials,eta_qfim\n"; }

std::string results_csv_row(const std::string& scenario_name, const netsim::SimResult& result) {
    std::ostringstream out;
    out << scenario_name << ',' << format_double(result.success_probability) << ','
        << format_double(result.eta) << ',' << format_double(result.eta_tilde) << ','
        << format_double(result.fidelity) << ',' << result.seed << ',' << result.trials << ','
        << format_double(result.eta_qfim) << '\n';
    return out.str();
}

std::string event_log_text(const netsim::SimResult& result) {
    std::string out;
    for (const auto& line : result.event_log) {
        out += line;
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot move " + tmp + " to " + path + ": " + ec.message());
    }
}

}  // namespace dqsnet::reports
