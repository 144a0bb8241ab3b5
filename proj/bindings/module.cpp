#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coniwave/ansatz.hpp"
#include "coniwave/config.hpp"
#include "coniwave/landau_zener.hpp"
#include "coniwave/runner.hpp"
#include "coniwave/special.hpp"

namespace py = pybind11;
using namespace coniwave;

namespace {

PotentialModel model_by_name(const std::string& name, int d) {
    if (name == "linear-isotropic") return linear_isotropic(d);
    throw std::invalid_argument("unknown model name: " + name);
}

Vec to_vec(const std::vector<double>& v) {
    Vec x(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<int>(i)) = v[i];
    return x;
}

} // namespace

PYBIND11_MODULE(_coniwave, m) {
    m.doc() = "semiclassical wave packets through conical intersections";

    m.def("gamma", [](std::complex<double> z) { return complex_gamma(z); },
          "complex gamma function (Lanczos)");

    m.def("lz_coefficients", [](double eta2) {
        return std::make_pair(coeff_a(eta2), coeff_b(eta2));
    }, "Landau-Zener transfer coefficients (a, b)");

    m.def("scattering_matrix", [](double eta2) {
        Mat2c s = scattering_matrix(eta2);
        std::vector<std::vector<std::complex<double>>> out(2,
            std::vector<std::complex<double>>(2));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out[i][j] = s(i, j);
        return out;
    });

    m.def("lz_transition", [](double eta2, double r, double s0) {
        using namespace std::complex_literals;
        Vec2 eta(0.0, eta2 * std::sqrt(r));
        Vec2c u0(std::exp(-1.0i * lambda_phase(-s0, eta, r)), 0.0);
        Vec2c u = lz_integrate(eta, r, s0, u0);
        return std::norm(u(0));
    }, "mode-swap probability from the model-problem ODE",
       py::arg("eta2"), py::arg("r") = 1.0, py::arg("s0") = 200.0);

    m.def("classical_trajectory", [](const std::string& model, int d,
                                     const std::vector<double>& q0,
                                     const std::vector<double>& p0, double t0, double t1,
                                     const std::string& mode) {
        PotentialModel pm = model_by_name(model, d);
        Mode md = mode == "plus" ? Mode::plus
                                 : (mode == "minus" ? Mode::minus : Mode::reference);
        Trajectory tr = integrate_flow(pm, md, {to_vec(q0), to_vec(p0)}, t0, t1);
        py::dict out;
        std::vector<double> times = tr.times;
        std::vector<std::vector<double>> qs, ps;
        for (const PhasePoint& z : tr.states) {
            qs.emplace_back(z.q.data(), z.q.data() + z.q.size());
            ps.emplace_back(z.p.data(), z.p.data() + z.p.size());
        }
        out["times"] = times;
        out["q"] = qs;
        out["p"] = ps;
        out["crossed"] = tr.crossing.has_value();
        if (tr.crossing) {
            out["t_flat"] = tr.crossing->t_flat;
            out["r"] = tr.crossing->r;
            out["omega"] = std::vector<double>{tr.crossing->omega(0), tr.crossing->omega(1)};
        }
        return out;
    }, py::arg("model") = "linear-isotropic", py::arg("d") = 2, py::arg("q0"),
       py::arg("p0"), py::arg("t0") = 0.0, py::arg("t1") = 1.0, py::arg("mode") = "minus");

    m.def("parse_config", [](const std::string& text) {
        ExperimentConfig cfg = parse_config_text(text, "<string>");
        py::dict out;
        out["t0"] = cfg.t0;
        out["T"] = cfg.T;
        out["epsilons"] = cfg.epsilons;
        out["model"] = cfg.model_name;
        return out;
    }, "validate an experiment config and return its headline fields");

    m.def("wigner_split", [](double eta2) {
        double a2 = std::exp(-M_PI * eta2 * eta2);
        return std::make_pair(a2, 1.0 - a2);
    }, "pointwise (swap, stay) mass fractions at a transverse offset");
}
