#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bcp/bm_formulas.hpp"
#include "bcp/boundary.hpp"
#include "bcp/cli.hpp"
#include "bcp/jump_model.hpp"
#include "bcp/mc_engine.hpp"

namespace py = pybind11;

namespace {

bcp::cli::RunSpec make_spec(const std::string& boundary, const std::string& law, double lam, double t,
                            std::size_t reps, std::uint64_t seed, int n_points,
                            const std::string& method, std::size_t workers, double grid_step,
                            double series_tol) {
  bcp::cli::RunSpec s;
  s.boundary = boundary;
  s.law = law;
  s.lambda = lam;
  s.t = t;
  s.reps = reps;
  s.seed = seed;
  s.n_points = n_points;
  s.method = method;
  s.workers = workers;
  s.grid_step = grid_step;
  s.series.epsilon = series_tol;
  return s;
}

py::dict to_dict(const bcp::cli::RunRecord& r) {
  py::dict d;
  d["boundary"] = r.spec.boundary;
  d["law"] = r.spec.law;
  d["lambda"] = r.spec.lambda;
  d["t"] = r.spec.t;
  d["reps"] = r.spec.reps;
  d["n"] = r.spec.n_points;
  d["seed"] = r.spec.seed;
  d["method"] = r.spec.method;
  d["estimate"] = r.estimate;
  d["std_error"] = r.std_error;
  d["wall_time_s"] = r.wall_time;
  return d;
}

}  // namespace

PYBIND11_MODULE(_bcp, m) {
  m.doc() = "Boundary-crossing probabilities of Brownian motion with jumps";

  py::register_exception<bcp::SeriesNotConverged>(m, "SeriesNotConverged", PyExc_ArithmeticError);

  m.def("bridge_upcross_prob", &bcp::bridge_upcross_prob, py::arg("a"), py::arg("b"), py::arg("t"),
        py::arg("x"));
  m.def("linear_noncross_prob", py::overload_cast<double, double, double>(&bcp::linear_noncross_prob),
        py::arg("a"), py::arg("b"), py::arg("t"));
  m.def(
      "anderson_theta",
      [](double g1, double d1, double g2, double d2, double t, double x, double eps, int max_terms) {
        return bcp::anderson_theta(g1, d1, g2, d2, t, x, {eps, max_terms});
      },
      py::arg("gamma1"), py::arg("delta1"), py::arg("gamma2"), py::arg("delta2"), py::arg("t"),
      py::arg("x"), py::arg("eps") = 1e-12, py::arg("max_terms") = 200);
  m.def(
      "anderson_chi",
      [](double g1, double d1, double g2, double d2, double t, double eps, int max_terms) {
        return bcp::anderson_chi(g1, d1, g2, d2, t, {eps, max_terms});
      },
      py::arg("gamma1"), py::arg("delta1"), py::arg("gamma2"), py::arg("delta2"), py::arg("t"),
      py::arg("eps") = 1e-12, py::arg("max_terms") = 200);
  m.def(
      "two_sided_segment_factor",
      [](double a, double b, double c, double d, double t, double x) {
        return bcp::two_sided_segment_factor({a, b, c, d, t}, x);
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("t"), py::arg("x"));
  m.def(
      "two_sided_tail_prob",
      [](double a, double b, double c, double d, double t) {
        return bcp::two_sided_tail_prob({a, b, c, d, t});
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("t"));

  m.def("truncation_level", &bcp::truncation_level, py::arg("rate"), py::arg("t"), py::arg("tol"));
  m.def("poisson_tail_bound", &bcp::poisson_tail_bound, py::arg("rate"), py::arg("t"), py::arg("n"));

  m.def(
      "estimate",
      [](const std::string& boundary, const std::string& law, double lam, double t, std::size_t reps,
         std::uint64_t seed, int n_points, const std::string& method, std::size_t workers,
         double grid_step, double series_tol) {
        const auto spec = make_spec(boundary, law, lam, t, reps, seed, n_points, method, workers,
                                    grid_step, series_tol);
        bcp::cli::RunRecord rec;
        {
          py::gil_scoped_release release;
          rec = bcp::cli::run(spec);
        }
        return to_dict(rec);
      },
      py::arg("boundary"), py::arg("law") = "de:0.5,10,6.666666666666667", py::arg("lam") = 0.0,
      py::arg("t") = 1.0, py::arg("reps") = 200000, py::arg("seed") = 42, py::arg("n_points") = 32,
      py::arg("method") = "engine", py::arg("workers") = 1, py::arg("grid_step") = 1e-3,
      py::arg("series_tol") = 1e-12,
      "Survival probability estimate for one configuration, as a dict.");

  m.def(
      "weights",
      [](const std::string& boundary, const std::string& law, double lam, double t, std::size_t reps,
         std::uint64_t seed, int n_points) {
        bcp::ExperimentConfig c;
        c.boundary = bcp::parse_boundary(boundary, n_points);
        c.law = bcp::cli::parse_law(law);
        c.jumps = bcp::PoissonProcess{lam};
        c.horizon = t;
        c.replications = reps;
        c.seed = seed;
        py::gil_scoped_release release;
        return bcp::bcp_weights(c);
      },
      py::arg("boundary"), py::arg("law") = "de:0.5,10,6.666666666666667", py::arg("lam") = 0.0,
      py::arg("t") = 1.0, py::arg("reps") = 1000, py::arg("seed") = 42, py::arg("n_points") = 32,
      "Per-replication engine weights, in replication order.");

  m.def(
      "table",
      [](int which, std::uint64_t seed, std::size_t reps) {
        if (which != 1 && which != 2) throw py::value_error("table must be 1 or 2");
        py::list out;
        for (const auto& s : bcp::cli::table_specs(static_cast<bcp::cli::Table>(which), seed, reps)) {
          bcp::cli::RunRecord rec;
          {
            py::gil_scoped_release release;
            rec = bcp::cli::run(s);
          }
          out.append(to_dict(rec));
        }
        return out;
      },
      py::arg("which"), py::arg("seed") = 42, py::arg("reps") = 200000);
}
