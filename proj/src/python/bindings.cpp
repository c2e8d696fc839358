#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpd/amplifier.hpp"
#include "qpd/states.hpp"
#include "qpd/verify.hpp"

namespace py = pybind11;
using namespace qpd;

namespace {

PhaseGrid make_grid(const std::vector<double>& q, const std::vector<double>& p) {
    if (q.size() != 3 || p.size() != 3) throw ValidationError("grid axes are (min, max, n)");
    PhaseGrid g{q[0], q[1], p[0], p[1], static_cast<int>(q[2]), static_cast<int>(p[2])};
    g.validate();
    return g;
}

py::dict to_dict(const QuasiDistribution& d) {
    py::dict out;
    out["values"] = d.values;
    out["q"] = std::vector<double>{d.grid.q_min, d.grid.q_max, double(d.grid.nq)};
    out["p"] = std::vector<double>{d.grid.p_min, d.grid.p_max, double(d.grid.np)};
    out["kind"] = d.kind.describe();
    out["diagnostics"] = d.diagnostics.values;
    out["warnings"] = d.diagnostics.warnings;
    return out;
}

QuasiDistribution from_husimi(const Eigen::MatrixXd& values, const std::vector<double>& q, const std::vector<double>& p,
                              const LadderConvention& conv) {
    QuasiDistribution d;
    d.grid = make_grid(q, p);
    if (values.rows() != d.grid.nq || values.cols() != d.grid.np) throw ValidationError("values do not match the grid");
    d.values = values;
    d.convention = conv;
    d.kind = DistributionKind::s_param(-1.0);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quasi-probability distributions on a truncated Fock space";

    auto base = py::register_exception<Error>(m, "QpdError");
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IllPosed>(m, "IllPosed", base.ptr());
    py::register_exception<SupportOverflow>(m, "SupportOverflow", base.ptr());
    py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());

    py::class_<LadderConvention>(m, "Convention")
        .def(py::init([](double hbar, double lambda) {
                 LadderConvention c{hbar, lambda};
                 c.validate();
                 return c;
             }),
             py::arg("hbar") = 1.0, py::arg("lam") = 1.0)
        .def_readonly("hbar", &LadderConvention::hbar)
        .def_readonly("lam", &LadderConvention::lambda)
        .def("to_alpha", &LadderConvention::to_alpha);

    m.def(
        "density_matrix",
        [](const std::string& spec, int dim) { return build_state(parse_state_spec(spec), FockSpace(dim)).matrix(); },
        py::arg("spec"), py::arg("dim") = 64);

    m.def(
        "distribution",
        [](const std::string& spec, double s, const std::vector<double>& q, const std::vector<double>& p, int dim,
           const LadderConvention& conv) {
            const DensityMatrix rho = build_state(parse_state_spec(spec), FockSpace(dim));
            const PhaseGrid g = make_grid(q, p);
            if (s == -1.0) return to_dict(husimi_direct_grid(rho, g, conv));
            if (s == 0.0) return to_dict(wigner_direct_grid(rho, g, conv));
            return to_dict(s_distribution(rho, g, s, conv));
        },
        py::arg("spec"), py::arg("s"), py::arg("q"), py::arg("p"), py::arg("dim") = 64,
        py::arg("convention") = LadderConvention{});

    m.def(
        "evolve_husimi",
        [](const Eigen::MatrixXd& values, const std::vector<double>& q, const std::vector<double>& p, double gain,
           double noise, const LadderConvention& conv) {
            return to_dict(evolve_husimi(from_husimi(values, q, p, conv), gain, noise));
        },
        py::arg("values"), py::arg("q"), py::arg("p"), py::arg("gain"), py::arg("noise"),
        py::arg("convention") = LadderConvention{});

    m.def(
        "channel_params",
        [](const std::string& text) {
            const ChannelParams c = channel_params(AmplifierChannel::parse(text));
            return std::pair{c.gain, c.noise};
        },
        py::arg("channel"));

    m.def("moment_integral", &moment_integral, py::arg("n"), py::arg("m"), py::arg("alpha"), py::arg("gain"),
          py::arg("noise"));
    m.def("moment_integral_quadrature", &moment_integral_quadrature, py::arg("n"), py::arg("m"), py::arg("alpha"),
          py::arg("gain"), py::arg("noise"), py::arg("nodes") = 0);

    m.def(
        "verify",
        [](const std::string& suite, int dim) {
            VerifyConfig cfg;
            cfg.dim = dim;
            return run_verify(suite, cfg).to_json().dump();
        },
        py::arg("suite") = "all", py::arg("dim") = 64);
}
