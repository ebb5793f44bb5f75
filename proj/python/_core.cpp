#include "pillarqed/commands.hpp"
#include "pillarqed/design.hpp"
#include "pillarqed/estimation.hpp"
#include "pillarqed/interferometer.hpp"
#include "pillarqed/scattering.hpp"
#include "pillarqed/tuning.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace pillarqed;

namespace
{

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DoubleArray& a)
{
    if (a.ndim() != 1)
        throw std::invalid_argument("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

QdState dot_state(std::optional<double> omega_qd)
{
    return omega_qd ? QdState::at(*omega_qd) : QdState::empty_cavity();
}

py::array_t<Complex> amplitudes(const SystemParams& p, std::optional<double> omega_qd, const DoubleArray& omega)
{
    const auto w = to_vector(omega);
    const auto qd = dot_state(omega_qd);
    py::array_t<Complex> out(static_cast<py::ssize_t>(w.size()));
    auto view = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < w.size(); ++i)
        view(static_cast<py::ssize_t>(i)) = reflection_amplitude(p, qd, w[i]);
    return out;
}

py::array_t<double> as_array(std::span<const double> values)
{
    return py::array_t<double>(static_cast<py::ssize_t>(values.size()), values.data());
}

py::dict design_dict(const DesignPoint& d)
{
    py::dict out;
    out["kappa"] = d.params.kappa_top();
    out["max_conditional_phase"] = d.max_conditional_phase;
    out["argmax_omega"] = d.argmax_omega;
    out["on_resonance_conditional_phase"] = d.on_resonance_conditional_phase;
    out["on_resonance_reflectivity"] = d.on_resonance_reflectivity;
    out["feasible"] = d.feasible;
    out["kappa_over_4g"] = d.kappa_over_4g;
    return out;
}

py::dict fit_intensity(const DoubleArray& omega, const DoubleArray& coupled, std::optional<DoubleArray> empty,
                       const SystemParams& guess, std::optional<double> omega_qd, double background,
                       const std::vector<std::string>& free)
{
    const auto w = to_vector(omega);
    FitProblem problem;
    problem.observed.push_back({Observable::intensity, true, Spectrum(w, to_vector(coupled)), {}});
    if (empty)
        problem.observed.push_back({Observable::intensity, false, Spectrum(w, to_vector(*empty)), {}});
    problem.initial_guess = ModelParams::from(guess, omega_qd.value_or(guess.omega_c()), background);
    problem.bounds = FitProblem::default_bounds(problem.observed);
    for (const auto& name : free)
    {
        const auto p = param_from_name(name);
        if (!p)
            throw std::invalid_argument("unknown parameter '" + name + "'");
        problem.free_mask[static_cast<std::size_t>(*p)] = true;
    }
    const auto result = fit(problem);

    py::dict params;
    py::dict errors;
    for (auto p : all_params)
    {
        const std::string name(param_name(p));
        params[name.c_str()] = result.params[p];
        errors[name.c_str()] = result.std_errors[static_cast<std::size_t>(p)];
    }
    py::dict out;
    out["params"] = params;
    out["std_errors"] = errors;
    out["converged"] = result.converged;
    out["message"] = result.message;
    out["iterations"] = result.iterations;
    out["residual_norm"] = result.residual_norm;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Quantum dot / micropillar cavity reflection model";

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<double, double, double, double, double>(), py::arg("g"), py::arg("kappa_top"),
             py::arg("kappa_side"), py::arg("gamma"), py::arg("omega_c"))
        .def_property_readonly("g", &SystemParams::g)
        .def_property_readonly("kappa_top", &SystemParams::kappa_top)
        .def_property_readonly("kappa_side", &SystemParams::kappa_side)
        .def_property_readonly("gamma", &SystemParams::gamma)
        .def_property_readonly("omega_c", &SystemParams::omega_c)
        .def_property_readonly("kappa_total", &SystemParams::kappa_total)
        .def("with_g", &SystemParams::with_g)
        .def("with_kappa_top", &SystemParams::with_kappa_top)
        .def("with_kappa_side", &SystemParams::with_kappa_side)
        .def("with_gamma", &SystemParams::with_gamma)
        .def("with_omega_c", &SystemParams::with_omega_c)
        .def(py::self == py::self)
        .def("__repr__", [](const SystemParams& p) {
            return "SystemParams(g=" + std::to_string(p.g()) + ", kappa_top=" + std::to_string(p.kappa_top()) +
                   ", kappa_side=" + std::to_string(p.kappa_side()) + ", gamma=" + std::to_string(p.gamma()) +
                   ", omega_c=" + std::to_string(p.omega_c()) + ")";
        });

    m.def("fitted_params", &reference::fitted_params, "Parameters of the characterized device (ueV).");

    m.def("reflection_amplitude", &amplitudes, py::arg("params"), py::arg("omega_qd"), py::arg("omega"),
          "Complex reflection coefficient on a grid; omega_qd=None gives the empty cavity.");
    m.def(
        "reflectivity",
        [](const SystemParams& p, std::optional<double> omega_qd, const DoubleArray& omega) {
            const auto w = to_vector(omega);
            const auto s = reflectivity_spectrum(p, dot_state(omega_qd), w);
            return as_array(s.values());
        },
        py::arg("params"), py::arg("omega_qd"), py::arg("omega"));
    m.def(
        "phase",
        [](const SystemParams& p, std::optional<double> omega_qd, const DoubleArray& omega) {
            const auto w = to_vector(omega);
            const auto s = phase_spectrum(p, dot_state(omega_qd), w);
            return as_array(s.values());
        },
        py::arg("params"), py::arg("omega_qd"), py::arg("omega"), "Unwrapped reflection phase.");

    m.def("q_factor", &q_factor);
    m.def("rabi_splitting", &rabi_splitting);
    m.def("coupling_regime", [](const SystemParams& p) { return std::string(to_string(coupling_regime(p))); });
    m.def(
        "polariton_eigenvalues",
        [](const SystemParams& p, double omega_qd) {
            const auto ev = polariton_eigenvalues(p, QdState::at(omega_qd));
            return std::make_pair(ev[0], ev[1]);
        },
        py::arg("params"), py::arg("omega_qd"));

    m.def(
        "conditional_phase",
        [](const SystemParams& p, double omega_qd, const DoubleArray& omega, double background,
           double background_phase) {
            const auto w = to_vector(omega);
            const auto s = conditional_phase_spectrum(p, omega_qd, w, BackgroundModel{background, background_phase});
            return as_array(s.values());
        },
        py::arg("params"), py::arg("omega_qd"), py::arg("omega"), py::arg("background") = 0.0,
        py::arg("background_phase") = 0.0);
    m.def(
        "max_conditional_phase",
        [](const SystemParams& p, double omega_qd, double background, double background_phase) {
            const auto r = max_conditional_phase(p, omega_qd, BackgroundModel{background, background_phase});
            return std::make_pair(r.magnitude, r.omega);
        },
        py::arg("params"), py::arg("omega_qd"), py::arg("background") = 0.0, py::arg("background_phase") = 0.0,
        "Returns (magnitude in rad, probe energy).");
    m.def("evaluate_design", [](const SystemParams& p) { return design_dict(evaluate_design(p)); });
    m.def(
        "sweep_kappa",
        [](const SystemParams& base, const std::vector<double>& kappas) {
            py::list out;
            for (const auto& d : sweep_kappa(base, kappas))
                out.append(design_dict(d));
            return out;
        },
        py::arg("base"), py::arg("kappa_values"));

    m.def(
        "simulate_channels",
        [](Complex r, Complex beta, std::optional<double> sb_offset) {
            const auto ref = sb_offset ? ReferenceArm(beta, *sb_offset) : ReferenceArm::calibrated(beta);
            const auto c = simulate_channels(r, ref);
            return py::make_tuple(c.h, c.v, c.d, c.a);
        },
        py::arg("r"), py::arg("beta") = Complex{0.9, 0.0}, py::arg("sb_offset") = py::none(),
        "(h, v, d, a) intensities; sb_offset=None uses the calibrated compensator.");
    m.def(
        "extract_phase",
        [](double h, double v, double d, double a, Complex beta, std::optional<double> sb_offset) {
            const auto ref = sb_offset ? ReferenceArm(beta, *sb_offset) : ReferenceArm::calibrated(beta);
            return extract_phase(ChannelRecord{0.0, h, v, d, a}, ref).phase;
        },
        py::arg("h"), py::arg("v"), py::arg("d"), py::arg("a"), py::arg("beta") = Complex{0.9, 0.0},
        py::arg("sb_offset") = py::none());
    m.def(
        "apply_background",
        [](Complex r, double b, double psi) { return apply_background(r, BackgroundModel{b, psi}); }, py::arg("r"),
        py::arg("background"), py::arg("background_phase") = 0.0);
    m.def(
        "dip_visibility",
        [](const DoubleArray& omega, const DoubleArray& values) {
            return dip_visibility(Spectrum(to_vector(omega), to_vector(values)));
        },
        py::arg("omega"), py::arg("values"));
    m.def(
        "infer_background_fraction",
        [](double visibility, const SystemParams& p, std::optional<double> omega_qd) {
            return infer_background_fraction(visibility, p, dot_state(omega_qd));
        },
        py::arg("visibility"), py::arg("params"), py::arg("omega_qd") = py::none());

    m.def("fit_intensity", &fit_intensity, py::arg("omega"), py::arg("coupled"), py::arg("empty") = py::none(),
          py::arg("guess"), py::arg("omega_qd") = py::none(), py::arg("background") = 0.0,
          py::arg("free") = std::vector<std::string>{"g", "kappa_top", "kappa_side", "gamma"});

    m.def(
        "run_cli", [](const std::vector<std::string>& args) { return cli::run(args); }, py::arg("args"),
        "Runs the command line front end in-process and returns its exit code.");
}
