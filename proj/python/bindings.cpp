#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "semorder/bounds.hpp"
#include "semorder/empproc.hpp"
#include "semorder/errors.hpp"
#include "semorder/io.hpp"
#include "semorder/misspec.hpp"
#include "semorder/order.hpp"
#include "semorder/rates.hpp"
#include "semorder/regress.hpp"
#include "semorder/semgen.hpp"

namespace py = pybind11;
using namespace semorder;

namespace {

// Specs cross the boundary as JSON text in the CLI formats; the Python
// wrapper converts to and from dicts.
SemSpec spec_from(const std::string& text) { return io::sem_from_json(io::Json::parse(text)); }
ClassSpec class_from(const std::string& text) { return io::class_from_json(io::Json::parse(text)); }

DataMatrix as_data(const Matrix& values) {
  DataMatrix data;
  data.values = values;
  return data;
}

}  // namespace

PYBIND11_MODULE(_semorder, m) {
  m.doc() = "semorder native core";
  m.attr("__version__") = SEMORDER_VERSION;

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("coefficients", &FitResult::coefficients)
      .def_readonly("residual_variance", &FitResult::residual_variance)
      .def_readonly("degenerate", &FitResult::degenerate)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("certificate", &FitResult::certificate)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("rank", &FitResult::rank);

  py::class_<OrderEstimate>(m, "OrderEstimate")
      .def_readonly("order", &OrderEstimate::order)
      .def_readonly("sigma_hat", &OrderEstimate::sigma_hat)
      .def_readonly("score", &OrderEstimate::score)
      .def_property_readonly("method", [](const OrderEstimate& e) { return to_string(e.method); })
      .def_readonly("floored_positions", &OrderEstimate::floored_positions)
      .def_readonly("degenerate_positions", &OrderEstimate::degenerate_positions)
      .def("__repr__", [](const OrderEstimate& e) {
        std::string order;
        for (int v : e.order) order += (order.empty() ? "" : ", ") + std::to_string(v);
        return "OrderEstimate(order=[" + order + "], score=" + io::format_double(e.score) + ", method=" +
               to_string(e.method) + ")";
      });

  m.def("simulate", [](const std::string& spec, Index n, std::uint64_t seed, unsigned threads) {
        return sample(spec_from(spec), n, seed, threads).values;
      },
      py::arg("spec"), py::arg("n"), py::arg("seed"), py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>());

  m.def("validate_sem", [](const std::string& spec) { return io::to_json(spec_from(spec)).dump(); }, py::arg("spec"));

  m.def("design_matrix", [](const std::string& dict, const Matrix& columns, bool intercept) {
        return design_matrix(io::dictionary_from_json(io::Json::parse(dict)), columns, intercept);
      },
      py::arg("dictionary"), py::arg("columns"), py::arg("intercept") = true);

  m.def("fit_span", &fit_span, py::arg("x"), py::arg("y"));
  m.def("fit_l1", [](const Matrix& x, const Vector& y, double budget, bool intercept_first, double tol) {
        L1Options options;
        options.intercept_first = intercept_first;
        options.tol = tol;
        return fit_l1(x, y, budget, options);
      },
      py::arg("x"), py::arg("y"), py::arg("budget"), py::arg("intercept_first") = false, py::arg("tol") = 1e-8);
  m.def("project_l1_ball", &project_l1_ball, py::arg("v"), py::arg("radius"));

  m.def("score", [](const Matrix& data, const std::vector<int>& perm, const std::string& cls) {
        return score(as_data(data), perm, class_from(cls));
      },
      py::arg("data"), py::arg("perm"), py::arg("cls"));

  m.def("estimate_order", [](const Matrix& data, const std::string& cls, const std::string& method, unsigned threads) {
        const ClassSpec spec = class_from(cls);
        const OrderMethod how = order_method_from_string(method);
        py::gil_scoped_release release;
        return estimate_order(as_data(data), spec, how, threads);
      },
      py::arg("data"), py::arg("cls"), py::arg("method") = "exact", py::arg("threads") = 1);

  m.def("identifiability_gap", [](const std::string& spec, const std::string& cls, Index oracle_n,
                                  std::uint64_t seed, unsigned threads, int batches) {
        const SemSpec s = spec_from(spec);
        const ClassSpec c = class_from(cls);
        GapReport report;
        {
          py::gil_scoped_release release;
          report = identifiability_gap(s, c, oracle_n, seed, threads, batches);
        }
        return io::to_json(report).dump();
      },
      py::arg("spec"), py::arg("cls"), py::arg("oracle_n"), py::arg("seed"), py::arg("threads") = 1,
      py::arg("batches") = 10);

  m.def("z_sup_ellipsoid", [](const Matrix& sample, const Matrix& population) {
        MomentPair mp;
        mp.sample = sample;
        mp.population = population;
        return z_sup_ellipsoid(mp);
      },
      py::arg("sample"), py::arg("population"));
  m.def("z_sup_l1", [](const Matrix& sample, const Matrix& population, double budget, int restarts, std::uint64_t seed) {
        MomentPair mp;
        mp.sample = sample;
        mp.population = population;
        return z_sup_l1(mp, budget, restarts, seed);
      },
      py::arg("sample"), py::arg("population"), py::arg("budget"), py::arg("restarts") = 64, py::arg("seed") = 0);
  m.def("inner_product_sup", &inner_product_sup, py::arg("cross_sample"), py::arg("cross_population"),
        py::arg("sigma_f"), py::arg("sigma_g"), py::arg("r1") = 1.0, py::arg("r2") = 1.0);
  m.def("subgauss_product_sup", &subgauss_product_sup, py::arg("features"), py::arg("y"), py::arg("sigma"),
        py::arg("cross_population"));

  m.def("delta_n", [](double k_x, double k_0, double p, double n, double lambda_min) {
        return delta_n(k_x, k_0, p, n, lambda_min).value;
      },
      py::arg("k_x"), py::arg("k_0"), py::arg("p"), py::arg("n"), py::arg("lambda_min"));
  m.def("entropy_bound_l1", &entropy_bound_l1, py::arg("u"), py::arg("p"), py::arg("n"), py::arg("k_x"),
        py::arg("budget"));
  m.def("j_integral_l1", &j_integral_l1, py::arg("p"), py::arg("n"), py::arg("k_x"), py::arg("budget"));

  m.def("rate_experiment", [](const std::string& rate_case, const std::string& family, double lower, double upper,
                              const std::vector<Index>& n_grid, const std::vector<int>& p_grid,
                              const std::vector<int>& size_grid, double budget, int reps, int restarts,
                              std::uint64_t seed, bool self_test, unsigned threads) {
        RateConfig rc;
        rc.rate_case = rate_case_from_string(rate_case);
        rc.family = basis_family_from_string(family);
        rc.lower = lower;
        rc.upper = upper;
        rc.n_grid = n_grid;
        rc.p_grid = p_grid;
        rc.size_grid = size_grid;
        rc.budget = budget;
        rc.reps = reps;
        rc.restarts = restarts;
        rc.seed = seed;
        rc.self_test = self_test;
        rc.threads = threads;
        RateReport report;
        {
          py::gil_scoped_release release;
          report = rate_experiment(rc);
        }
        return io::to_json(report).dump();
      },
      py::arg("case"), py::arg("family"), py::arg("lower"), py::arg("upper"), py::arg("n_grid"), py::arg("p_grid"),
      py::arg("N_grid"), py::arg("M") = 1.0, py::arg("reps") = 50, py::arg("restarts") = 64, py::arg("seed") = 0,
      py::arg("self_test") = false, py::arg("threads") = 1);
}
