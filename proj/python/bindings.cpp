#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "blindchan/channel.hpp"
#include "blindchan/experiments.hpp"
#include "blindchan/ofdm.hpp"
#include "blindchan/pilot.hpp"
#include "blindchan/simo.hpp"
#include "blindchan/subspace.hpp"

namespace py = pybind11;
using namespace blindchan;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Blind OFDM channel estimation core";
    m.attr("__version__") = "0.1.0";

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<OfdmConfig>(m, "OfdmConfig")
        .def(py::init<>())
        .def_readwrite("subcarriers", &OfdmConfig::subcarriers)
        .def_readwrite("cp_len", &OfdmConfig::cp_len)
        .def_readwrite("max_delay", &OfdmConfig::max_delay)
        .def_readwrite("pilot_symbols", &OfdmConfig::pilot_symbols)
        .def_readwrite("observed_symbols", &OfdmConfig::observed_symbols)
        .def_property_readonly("symbol_len", &OfdmConfig::symbol_len)
        .def_property_readonly("pair_len", &OfdmConfig::pair_len)
        .def_property_readonly("taps", &OfdmConfig::taps)
        .def("validate", &OfdmConfig::validate);

    m.def("qpsk_modulate", [](const std::vector<std::uint8_t>& bits) { return qpsk_modulate(bits); });
    m.def("qpsk_demodulate", &qpsk_demodulate);
    m.def("dft_unitary", &dft_unitary);
    m.def("idft_unitary", &idft_unitary);
    m.def("frequency_response", &frequency_response, py::arg("taps"), py::arg("subcarriers"));
    m.def("ofdm_modulate", &ofdm_modulate, py::arg("freq"), py::arg("cfg") = OfdmConfig{});
    m.def("ofdm_demodulate", &ofdm_demodulate, py::arg("time"), py::arg("cfg") = OfdmConfig{});

    py::class_<ChannelTaps>(m, "ChannelTaps")
        .def_readonly("taps", &ChannelTaps::taps)
        .def_readonly("active_len", &ChannelTaps::active_len)
        .def_static("from_taps", &ChannelTaps::from_taps, py::arg("h"), py::arg("cp_len"))
        .def("energy", &ChannelTaps::energy);

    py::class_<ChannelEstimate>(m, "ChannelEstimate")
        .def_property_readonly("taps", [](const ChannelEstimate& e) { return e.taps.taps; })
        .def_readonly("alpha", &ChannelEstimate::alpha)
        .def_readonly("residual", &ChannelEstimate::residual)
        .def_readonly("cond_gap", &ChannelEstimate::cond_gap)
        .def_readonly("ill_conditioned", &ChannelEstimate::ill_conditioned);

    py::class_<RankDiagnostic>(m, "RankDiagnostic")
        .def_readonly("numerical_rank", &RankDiagnostic::numerical_rank)
        .def_readonly("required_rank", &RankDiagnostic::required_rank)
        .def_readonly("lambda_max", &RankDiagnostic::lambda_max)
        .def_readonly("floor", &RankDiagnostic::floor)
        .def_readonly("valid", &RankDiagnostic::valid);

    m.def("draw_channel",
          [](int paths, std::uint64_t seed, int cp_len) {
              Rng rng(seed);
              return draw_channel(PowerDelayProfile::uniform(paths), cp_len, rng).taps;
          },
          py::arg("paths") = 5, py::arg("seed") = 0, py::arg("cp_len") = 8);
    m.def("draw_correlated_pair",
          [](double rho, int paths, std::uint64_t seed, int cp_len) {
              Rng rng(seed);
              auto [a, b] = draw_correlated_pair({rho, PowerDelayProfile::uniform(paths)}, cp_len, rng);
              return std::make_pair(a.taps, b.taps);
          },
          py::arg("rho"), py::arg("paths") = 5, py::arg("seed") = 0, py::arg("cp_len") = 8);
    m.def("snr_to_noise_var", &snr_to_noise_var, py::arg("snr_db"), py::arg("signal_power") = 1.0);

    m.def("build_channel_matrix",
          [](const CVector& h, const OfdmConfig& cfg) { return build_channel_matrix(h, cfg); },
          py::arg("h"), py::arg("cfg") = OfdmConfig{});
    m.def("stack_blocks", &stack_blocks, py::arg("prev"), py::arg("cur"), py::arg("cfg") = OfdmConfig{});
    m.def("analytic_autocorr", &analytic_autocorr, py::arg("h"), py::arg("noise_var"),
          py::arg("cfg") = OfdmConfig{});
    m.def("estimate_from_autocorr",
          [](const CMatrix& R, const OfdmConfig& cfg) { return estimate_channel(noise_subspace(R, cfg), cfg); },
          py::arg("matrix"), py::arg("cfg") = OfdmConfig{});
    m.def("rank_check",
          [](const CMatrix& R, const OfdmConfig& cfg, std::optional<double> floor) {
              return rank_check(R, cfg, floor);
          },
          py::arg("matrix"), py::arg("cfg") = OfdmConfig{}, py::arg("floor") = py::none());
    m.def("nmse", py::overload_cast<const CVector&, const CVector&>(&nmse));
    m.def("aligned_nmse", &aligned_nmse);

    m.def("simo_subspace_estimate",
          [](int outputs, int order, int window, const CMatrix& stats) {
              SimoInstance inst{outputs, order, window, CMatrix::Zero(outputs, order + 1)};
              return simo_subspace_estimate(inst, stats);
          },
          py::arg("outputs"), py::arg("order"), py::arg("window"), py::arg("stats"));
    m.def("simo_filtering_matrix",
          [](const CMatrix& taps, int window) {
              SimoInstance inst{static_cast<int>(taps.rows()), static_cast<int>(taps.cols()) - 1, window, taps};
              return filtering_matrix(inst);
          },
          py::arg("taps"), py::arg("window"));

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("cfg", &Scenario::cfg)
        .def_readwrite("rho", &Scenario::rho)
        .def_readwrite("ff", &Scenario::ff)
        .def_readwrite("snr_grid_db", &Scenario::snr_grid_db)
        .def_readwrite("trials", &Scenario::trials)
        .def_readwrite("seed", &Scenario::seed)
        .def_property(
            "estimator", [](const Scenario& s) { return std::string(to_string(s.estimator)); },
            [](Scenario& s, const std::string& v) { s.estimator = parse_estimator(v); })
        .def_readwrite("pdp", &Scenario::pdp)
        .def_readwrite("payload_bits", &Scenario::payload_bits)
        .def_readwrite("ambiguity_pilots", &Scenario::ambiguity_pilots)
        .def_readwrite("perfect_csi", &Scenario::perfect_csi)
        .def_readwrite("noiseless_nearby_pilots", &Scenario::noiseless_nearby_pilots)
        .def_readwrite("workers", &Scenario::workers)
        .def("set", [](Scenario& s, const std::string& k, const std::string& v) { apply_setting(s, k, v); })
        .def("validate", &Scenario::validate);

    py::class_<BerPoint>(m, "BerPoint")
        .def_readonly("snr_db", &BerPoint::snr_db)
        .def_readonly("bits", &BerPoint::bits)
        .def_readonly("bit_errors", &BerPoint::bit_errors)
        .def_readonly("ber", &BerPoint::ber)
        .def_readonly("mean_nmse", &BerPoint::mean_nmse)
        .def_readonly("invalid_trials", &BerPoint::invalid_trials);

    py::class_<Curve>(m, "Curve")
        .def_readonly("scenario", &Curve::scenario)
        .def_readonly("points", &Curve::points);

    py::class_<Experiment>(m, "Experiment")
        .def_readwrite("preset", &Experiment::preset)
        .def_readwrite("curves", &Experiment::curves);

    m.def("preset", [](const std::string& name) { return preset(name); });
    m.def("run_scenario", &run_scenario, py::call_guard<py::gil_scoped_release>());
    m.def("run_experiment", &run_experiment, py::call_guard<py::gil_scoped_release>());
    m.def("format_csv", &format_csv);
    m.def("write_csv", py::overload_cast<const std::vector<Curve>&, const std::filesystem::path&>(&write_csv));
    m.attr("CSV_HEADER") = std::string(kCsvHeader);
}
