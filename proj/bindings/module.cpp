#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dqsnet/estimation.hpp"
#include "dqsnet/metrology.hpp"
#include "dqsnet/netsim.hpp"
#include "dqsnet/reports.hpp"

namespace py = pybind11;
using namespace dqsnet;

namespace {

std::vector<std::vector<double>> to_rows(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows(m.rows());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        rows[r].resize(m.cols());
        for (Eigen::Index c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_dqsnet, m) {
    m.doc() = "Distributed quantum sensing over noisy networks: closed-form "
              "metrology, Bell-diagonal algebra and a seeded repeater-network simulator";

    // ---- metrology ----
    py::class_<GhzDiagonalState>(m, "GhzDiagonalState")
        .def(py::init<int, std::vector<double>>(), py::arg("num_qubits"), py::arg("eigenvalues"))
        .def_static("pure", &GhzDiagonalState::pure)
        .def_static("depolarized", &GhzDiagonalState::depolarized)
        .def_static("dephased_rank2", &GhzDiagonalState::dephased_rank2)
        .def_property_readonly("num_qubits", &GhzDiagonalState::num_qubits)
        .def_property_readonly("eigenvalues", &GhzDiagonalState::eigenvalues)
        .def_property_readonly("fidelity", &GhzDiagonalState::fidelity);

    py::class_<metrology::SensingProblem>(m, "SensingProblem")
        .def(py::init([](int d, int n) { return metrology::SensingProblem{d, n}; }),
             py::arg("num_nodes"), py::arg("sensors_per_node") = 1)
        .def_readwrite("num_nodes", &metrology::SensingProblem::num_nodes)
        .def_readwrite("sensors_per_node", &metrology::SensingProblem::sensors_per_node);

    py::class_<metrology::DepolarizedGhzModel>(m, "DepolarizedGhzModel")
        .def(py::init([](double f, int d, int n, double k) {
                 return metrology::DepolarizedGhzModel{f, d, n, k};
             }),
             py::arg("fidelity"), py::arg("num_nodes"), py::arg("sensors_per_node") = 1,
             py::arg("local_gen_quality") = 1.0)
        .def_readwrite("fidelity", &metrology::DepolarizedGhzModel::fidelity)
        .def_readwrite("num_nodes", &metrology::DepolarizedGhzModel::num_nodes)
        .def_readwrite("sensors_per_node", &metrology::DepolarizedGhzModel::sensors_per_node)
        .def_readwrite("local_gen_quality", &metrology::DepolarizedGhzModel::local_gen_quality);

    m.def("noise_coefficient", &metrology::noise_coefficient);
    m.def("qfi_average", &metrology::qfi_average);
    m.def("depolarized_noise_coefficient", &metrology::depolarized_noise_coefficient);
    m.def("advantage_depolarized", &metrology::advantage_depolarized);
    m.def("fidelity_threshold_depolarized", &metrology::fidelity_threshold_depolarized,
          py::arg("num_nodes"), py::arg("sensors_per_node") = 1);
    m.def("fidelity_threshold_rank2", &metrology::fidelity_threshold_rank2);
    m.def("qfi_lower_bound", &metrology::qfi_lower_bound);
    m.def("azimuthal_variance", &metrology::azimuthal_variance, py::arg("fidelity"),
          py::arg("num_nodes"), py::arg("sensors_per_node"), py::arg("alpha"), py::arg("theta1"));
    m.def(
        "optimal_azimuthal",
        [](int n, int d) {
            const auto opt = metrology::optimal_azimuthal(n, d);
            return py::make_tuple(opt.alpha, opt.fidelity_threshold);
        },
        py::arg("sensors_per_node"), py::arg("num_nodes"));
    m.def(
        "bell_pair_threshold",
        [](int d, const std::string& measurement) {
            if (measurement == "optimal") return metrology::bell_pair_threshold(d, metrology::Measurement::Optimal);
            if (measurement == "azimuthal")
                return metrology::bell_pair_threshold(d, metrology::Measurement::Azimuthal);
            throw std::invalid_argument("measurement must be 'optimal' or 'azimuthal'");
        },
        py::arg("num_nodes"), py::arg("measurement"));
    m.def("max_local_sensors", [](int d, double f, double k) {
        const auto est = metrology::max_local_sensors(d, f, k);
        return py::make_tuple(est.n_max, est.sensitivity_fidelity, est.sensitivity_quality);
    });
    m.def("orthonormal_extension", [](int d) { return to_rows(metrology::orthonormal_extension(d)); });

    // ---- bell algebra ----
    py::class_<bell::BellDiagonalState>(m, "BellDiagonalState")
        .def(py::init([](std::array<double, 4> lambdas) {
                 bell::BellDiagonalState s{lambdas, 0.0};
                 s.validate();
                 return s;
             }),
             py::arg("lambdas"))
        .def_static("werner", &bell::BellDiagonalState::werner)
        .def_readwrite("lambdas", &bell::BellDiagonalState::lambdas)
        .def_property_readonly("fidelity", &bell::BellDiagonalState::fidelity);

    m.def(
        "decohere",
        [](const bell::BellDiagonalState& s, double dt, double tau) {
            return bell::decohere(s, dt, bell::MemoryErrorModel{tau});
        },
        py::arg("state"), py::arg("dt"), py::arg("coherence_time"));
    m.def(
        "swap",
        [](const bell::BellDiagonalState& a, const bell::BellDiagonalState& b, double p, double eta1,
           double eta2) { return bell::swap(a, b, bell::OperationErrorModel{p, eta1}, eta1, eta2); },
        py::arg("left"), py::arg("right"), py::arg("gate_fidelity") = 1.0, py::arg("meas1_fidelity") = 1.0,
        py::arg("meas2_fidelity") = 1.0);
    m.def(
        "purify",
        [](const bell::BellDiagonalState& kept, const bell::BellDiagonalState& measured, double pa,
           double pb, double ea, double eb) {
            const auto r = bell::purify(kept, measured, pa, pb, ea, eb);
            return py::make_tuple(r.state, r.success_probability, r.output_fidelity);
        },
        py::arg("kept"), py::arg("measured"), py::arg("gate_fidelity_a") = 1.0,
        py::arg("gate_fidelity_b") = 1.0, py::arg("meas_fidelity_a") = 1.0,
        py::arg("meas_fidelity_b") = 1.0);

    // ---- estimation ----
    m.def(
        "hybrid_variance",
        [](int num_nodes, const std::vector<int>& isolated, const std::vector<double>& local_vars,
           double entangled_var) {
            return estimation::hybrid_variance(estimation::Configuration(num_nodes, isolated),
                                               local_vars, entangled_var);
        },
        py::arg("num_nodes"), py::arg("isolated"), py::arg("local_variances"),
        py::arg("entangled_variance"));
    m.def("combine_inverse_variance", [](const std::vector<double>& variances) {
        std::vector<estimation::EstimatorVariance> entries;
        for (double v : variances) entries.push_back({v});
        const auto r = estimation::combine_inverse_variance(entries);
        return py::make_tuple(r.weights, r.variance);
    });
    m.def("coarse_grain", [](const std::vector<std::pair<double, double>>& groups) {
        std::vector<estimation::CoarseGroup> gs;
        for (const auto& [f, n] : groups) gs.push_back({f, n});
        return estimation::coarse_grain(gs);
    });
    m.def("configuration_count", &estimation::configuration_count);

    // ---- resource estimation ----
    m.def(
        "resource_estimate",
        [](const std::string& method, int n) {
            const auto method_enum = method == "teleportation" ? densmat::AssemblyMethod::Teleportation
                                                               : densmat::AssemblyMethod::Merging;
            const auto r = densmat::resource_estimate(method_enum, n);
            return py::make_tuple(r.qubits, r.single_qubit_measurements, r.two_qubit_gates,
                                  r.avg_single_qubit_gates);
        },
        py::arg("method"), py::arg("ghz_size"));

    // ---- network simulation ----
    py::class_<netsim::NetworkScenario>(m, "NetworkScenario")
        .def(py::init<>())
        .def_static("preset", &netsim::NetworkScenario::preset)
        .def_static("parse", [](const std::string& text) {
            std::istringstream in(text);
            return netsim::parse_scenario(in);
        })
        .def_readwrite("name", &netsim::NetworkScenario::name)
        .def_readwrite("num_sensor_nodes", &netsim::NetworkScenario::num_sensor_nodes)
        .def_readwrite("link_length_km", &netsim::NetworkScenario::link_length_km)
        .def_readwrite("memories_per_end_node", &netsim::NetworkScenario::memories_per_end_node)
        .def_readwrite("memories_center", &netsim::NetworkScenario::memories_center)
        .def_readwrite("memory_frequency_hz", &netsim::NetworkScenario::memory_frequency_hz)
        .def_readwrite("memory_efficiency", &netsim::NetworkScenario::memory_efficiency)
        .def_readwrite("cutoff_ratio", &netsim::NetworkScenario::cutoff_ratio)
        .def_readwrite("raw_fidelity", &netsim::NetworkScenario::raw_fidelity)
        .def_readwrite("window_s", &netsim::NetworkScenario::window_s)
        .def("serialize", [](const netsim::NetworkScenario& s) { return netsim::serialize_scenario(s); });

    py::class_<netsim::TrialRecord>(m, "TrialRecord")
        .def_readonly("success", &netsim::TrialRecord::success)
        .def_readonly("fidelity", &netsim::TrialRecord::fidelity)
        .def_readonly("link_fidelities", &netsim::TrialRecord::link_fidelities);

    py::class_<netsim::SimResult>(m, "SimResult")
        .def_readonly("trial_records", &netsim::SimResult::trial_records)
        .def_readonly("trials", &netsim::SimResult::trials)
        .def_readonly("seed", &netsim::SimResult::seed)
        .def_readonly("successes", &netsim::SimResult::successes)
        .def_readonly("success_probability", &netsim::SimResult::success_probability)
        .def_readonly("fidelity", &netsim::SimResult::fidelity)
        .def_readonly("eta", &netsim::SimResult::eta)
        .def_readonly("eta_tilde", &netsim::SimResult::eta_tilde)
        .def_readonly("eta_qfim", &netsim::SimResult::eta_qfim)
        .def_readonly("eta_defined", &netsim::SimResult::eta_defined)
        .def_readonly("event_log", &netsim::SimResult::event_log)
        .def("results_csv", [](const netsim::SimResult& r) {
            return reports::results_csv_header() + reports::results_csv_row("campaign", r);
        });

    m.def(
        "run_campaign",
        [](const netsim::NetworkScenario& scenario, int trials, std::uint64_t seed, int log_trials) {
            netsim::CampaignOptions options;
            options.log_trials = log_trials;
            return netsim::run_campaign(scenario, trials, seed, options);
        },
        py::arg("scenario"), py::arg("trials"), py::arg("seed"), py::arg("log_trials") = 0);

    m.def("thresholds_csv", &reports::thresholds_csv, py::arg("d_min") = 2, py::arg("d_max") = 10,
          py::arg("n_min") = 1, py::arg("n_max") = 4);
}
