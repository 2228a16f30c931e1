#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vmlab/assumptions.hpp"
#include "vmlab/bounds.hpp"
#include "vmlab/config.hpp"
#include "vmlab/error.hpp"
#include "vmlab/experiment.hpp"
#include "vmlab/integrator.hpp"
#include "vmlab/lg.hpp"
#include "vmlab/modes.hpp"
#include "vmlab/objective.hpp"
#include "vmlab/quadrature.hpp"
#include "vmlab/rates.hpp"
#include "vmlab/schedule.hpp"

namespace py = pybind11;
using namespace vmlab;

namespace {

Matrix states_matrix(const Trajectory& t) {
  Matrix out(static_cast<Eigen::Index>(t.size()), t.dimension());
  for (std::size_t k = 0; k < t.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = t.states[k].transpose();
  return out;
}

py::object json_to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_vmlab, m) {
  m.doc() = "Variable-mass inertial Newton dynamics: schemes, bounds and rate analysis";

  static py::exception<Error> exc(m, "VmlabError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = exc;
      py::object inst = err(std::string(e.what()));
      inst.attr("code") = std::string(to_string(e.code()));
      inst.attr("index") = e.index() ? py::cast(*e.index()) : py::none();
      PyErr_SetObject(err.ptr(), inst.ptr());
    }
  });

  py::enum_<Integrability>(m, "Integrability")
      .value("integrable", Integrability::integrable)
      .value("non_integrable", Integrability::non_integrable)
      .value("unknown", Integrability::unknown);

  py::class_<Schedule>(m, "Schedule")
      .def_static("power", &Schedule::power, py::arg("c0"), py::arg("a"))
      .def_static("constant", &Schedule::constant, py::arg("c0"))
      .def_static("zero", &Schedule::zero)
      .def_static("table", &Schedule::table, py::arg("times"), py::arg("values"))
      .def("eval", &Schedule::eval, py::arg("t"), py::arg("order") = 0)
      .def("__call__", &Schedule::operator())
      .def("integrability", &Schedule::integrability)
      .def_property_readonly("family", [](const Schedule& s) { return to_string(s.family()); })
      .def_property_readonly("c0", &Schedule::c0)
      .def_property_readonly("exponent", &Schedule::exponent)
      .def("label", &Schedule::label)
      .def("__repr__", [](const Schedule& s) { return "<Schedule " + s.label() + ">"; });

  py::class_<QuadraticSpec>(m, "QuadraticSpec")
      .def_static("from_matrix", &QuadraticSpec::from_matrix, py::arg("A"))
      .def_static("from_spectrum", &QuadraticSpec::from_spectrum, py::arg("eigenvalues"))
      .def_static("log_spaced", &QuadraticSpec::log_spaced, py::arg("n"), py::arg("kappa"), py::arg("lambda_max") = 10.0)
      .def_property_readonly("dimension", &QuadraticSpec::dimension)
      .def_property_readonly("gram", &QuadraticSpec::gram)
      .def_property_readonly("lambda_min", &QuadraticSpec::lambda_min);

  py::class_<Objective>(m, "Objective")
      .def_readonly("name", &Objective::name)
      .def_readonly("dimension", &Objective::dimension)
      .def_readonly("minimizer", &Objective::minimizer)
      .def_readonly("mu_hint", &Objective::mu_hint)
      .def_readonly("is_quadratic", &Objective::is_quadratic)
      .def_readonly("warnings", &Objective::warnings)
      .def("eval", [](const Objective& o, const Vector& x) { return o.eval(x); })
      .def("grad", [](const Objective& o, const Vector& x) { return o.grad(x); })
      .def("hess", [](const Objective& o, const Vector& x) { return o.hess(x); });

  m.def("make_quadratic", &make_quadratic);
  m.def("make_gauss_plus_quad", &make_gauss_plus_quad);
  m.def("make_logsumexp_plus_quad", &make_logsumexp_plus_quad);
  m.def("make_poly50_plus_quad", &make_poly50_plus_quad);
  m.def(
      "estimate_mu",
      [](const Objective& o, const std::vector<Vector>& samples, double floor) { return estimate_mu(o, samples, floor); },
      py::arg("objective"), py::arg("samples"), py::arg("floor") = kMuFloor);

  py::enum_<Scheme>(m, "Scheme").value("cn", Scheme::cn).value("lm", Scheme::lm).value("vm", Scheme::vm);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("gamma", &SolverConfig::gamma)
      .def_readwrite("beta", &SolverConfig::beta)
      .def_readwrite("horizon", &SolverConfig::horizon)
      .def_readwrite("x0", &SolverConfig::x0)
      .def_readwrite("v0", &SolverConfig::v0)
      .def_readwrite("scheme", &SolverConfig::scheme)
      .def("steps", &SolverConfig::steps);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("scheme", &Trajectory::scheme)
      .def_readonly("gamma", &Trajectory::gamma)
      .def_readonly("times", &Trajectory::times)
      .def_property_readonly("states", &states_matrix)
      .def("__len__", &Trajectory::size);

  m.def("step_cn", [](const Objective& o, const Vector& x, double gamma, double beta) {
    return step_cn(o, x, gamma, beta);
  });
  m.def("step_lm", [](const Objective& o, const Vector& x, double gamma, double beta, double alpha) {
    return step_lm(o, x, gamma, beta, alpha);
  });
  m.def("step_vm", [](const Objective& o, const Vector& x, const Vector& x_prev, double gamma, double beta, double eps,
                      double alpha) { return step_vm(o, x, x_prev, gamma, beta, eps, alpha); });
  m.def("integrate", &integrate, py::arg("objective"), py::arg("eps"), py::arg("alpha"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("lyapunov_series", &lyapunov_series);

  py::class_<AssumptionReport>(m, "AssumptionReport")
      .def_readonly("id", &AssumptionReport::id)
      .def_readonly("holds", &AssumptionReport::holds)
      .def_readonly("determined", &AssumptionReport::determined)
      .def_readonly("c1", &AssumptionReport::c1)
      .def_readonly("c2", &AssumptionReport::c2)
      .def_readonly("bound", &AssumptionReport::bound)
      .def_readonly("witness", &AssumptionReport::witness)
      .def_readonly("t0", &AssumptionReport::t0)
      .def_readonly("note", &AssumptionReport::note);

  m.def("check_grid", &check_grid, py::arg("gamma"), py::arg("horizon"));
  m.def("check_a31", [](const Schedule& e, const Schedule& a, const std::vector<double>& g) { return check_a31(e, a, g); });
  m.def("check_a35", [](const Schedule& e, const Schedule& a, const std::vector<double>& g) { return check_a35(e, a, g); });
  m.def("check_a42", &check_a42, py::arg("eps"), py::arg("alpha"), py::arg("lam"), py::arg("beta"), py::arg("grid"));
  m.def("check_a46", &check_a46);

  py::class_<T32Constants>(m, "T32Constants")
      .def_readonly("C0", &T32Constants::C0)
      .def_readonly("C1", &T32Constants::C1)
      .def_readonly("C2", &T32Constants::C2);
  m.def("constants_t32", &constants_t32, py::arg("U0"), py::arg("mu"), py::arg("beta"), py::arg("c1"), py::arg("c2"));
  m.def(
      "envelope_t36_shape",
      [](const Schedule& eps, const Schedule& alpha, double beta, const std::vector<double>& times) {
        return envelope_t36_shape(eps, alpha, beta, times).values;
      },
      py::arg("eps"), py::arg("alpha"), py::arg("beta"), py::arg("times"));
  m.def("fit_constant", [](const std::vector<double>& d, const std::vector<double>& s) { return fit_constant(d, s); });
  m.def("distance_series", py::overload_cast<const Trajectory&, const Trajectory&>(&distance_series));

  py::class_<ScalarMode>(m, "ScalarMode")
      .def(py::init([](double lambda, double beta, Schedule eps, Schedule alpha, double x0, double v0) {
             return ScalarMode{lambda, beta, std::move(eps), std::move(alpha), x0, v0};
           }),
           py::arg("lam"), py::arg("beta"), py::arg("eps"), py::arg("alpha"), py::arg("x0") = 1.0, py::arg("v0") = 0.0)
      .def_readwrite("lam", &ScalarMode::lambda)
      .def_readwrite("beta", &ScalarMode::beta)
      .def_readwrite("x0", &ScalarMode::x0)
      .def_readwrite("v0", &ScalarMode::v0);

  py::class_<PR>(m, "PR")
      .def_readonly("p", &PR::p)
      .def_readonly("dp", &PR::dp)
      .def_readonly("ddp", &PR::ddp)
      .def_readonly("r", &PR::r)
      .def_readonly("dr", &PR::dr)
      .def_readonly("ddr", &PR::ddr);

  m.def("closed_form_cn", &closed_form_cn, py::arg("x0"), py::arg("beta"), py::arg("t"));
  m.def("closed_form_lm", &closed_form_lm, py::arg("mode"), py::arg("t"), py::arg("tol") = 1e-12);
  m.def("p_r_eval", &p_r_eval, py::arg("mode"), py::arg("t"), py::arg("order") = 2);
  m.def("phi", &phi);

  py::class_<PhiIntegral>(m, "PhiIntegral")
      .def_readonly("value", &PhiIntegral::value)
      .def_readonly("tail", &PhiIntegral::tail)
      .def_readonly("convergent", &PhiIntegral::convergent);
  m.def("phi_integral", &phi_integral, py::arg("mode"), py::arg("t_tail") = 1e4, py::arg("tol") = 1e-10);

  py::class_<LGOptions>(m, "LGOptions")
      .def(py::init<>())
      .def_readwrite("t_max", &LGOptions::t_max)
      .def_readwrite("node_spacing", &LGOptions::node_spacing)
      .def_readwrite("tol", &LGOptions::tol);

  py::class_<LGValue>(m, "LGValue")
      .def_readonly("value", &LGValue::value)
      .def_readonly("lower", &LGValue::lower)
      .def_readonly("upper", &LGValue::upper);

  py::class_<LGApprox>(m, "LGApprox")
      .def_property_readonly("A", &LGApprox::A)
      .def_property_readonly("B", &LGApprox::B)
      .def_property_readonly("phi_total", &LGApprox::phi_total)
      .def("delta1_env", &LGApprox::delta1_env)
      .def("delta2_env", &LGApprox::delta2_env)
      .def("solution", [](const LGApprox& a, double t) { return lg_solution(a, t); });
  m.def("fit_ab", &fit_ab, py::arg("mode"), py::arg("options") = LGOptions{});
  m.def("expanded_exponent", [](const ScalarMode& mode, double t) { return expanded_exponent(mode, t); });

  m.def("classify_rates", [](const Schedule& eps, const Schedule& alpha, double horizon) {
    const RateClassification c = classify_rates(eps, alpha, horizon);
    py::dict d;
    d["vs_cn"] = to_string(c.vs_cn.verdict);
    d["vs_lm"] = to_string(c.vs_lm.verdict);
    d["dominance"] = to_string(c.dominance);
    d["rationale_cn"] = c.vs_cn.rationale;
    d["rationale_lm"] = c.vs_lm.rationale;
    d["assumptions_hold"] = c.assumptions_hold;
    return d;
  }, py::arg("eps"), py::arg("alpha"), py::arg("horizon") = 200.0);

  py::class_<DecayFit>(m, "DecayFit")
      .def_readonly("slope", &DecayFit::slope)
      .def_readonly("intercept", &DecayFit::intercept)
      .def_readonly("t_begin", &DecayFit::t_begin)
      .def_readonly("t_end", &DecayFit::t_end)
      .def_readonly("points", &DecayFit::points)
      .def_readonly("shrunk", &DecayFit::shrunk);
  m.def("estimate_decay_rate", [](const std::vector<double>& t, const std::vector<double>& s, double a, double b) {
    return estimate_decay_rate(t, s, a, b);
  });

  m.def("make_x0", [](int n, std::uint64_t seed) { return make_x0(X0Mode::signs, n, seed); }, py::arg("n"),
        py::arg("seed"));
  m.def(
      "run_figure",
      [](const std::filesystem::path& config, const std::string& figure, const std::filesystem::path& out) {
        RunOptions opts;
        opts.out = out;
        RunManifest man;
        {
          py::gil_scoped_release release;
          man = run_figure(parse_config(config), figure, opts);
        }
        return py::make_tuple(man.path(), man.exit_code);
      },
      py::arg("config"), py::arg("figure"), py::arg("out"));
  m.def(
      "report_rates",
      [](const std::filesystem::path& manifest) { return json_to_py(report_rates(RunManifest::load(manifest))); },
      py::arg("manifest"));
  m.def("validate_config", [](const std::filesystem::path& config) {
    return json_to_py(validate_report(parse_config(config)));
  });
}
