#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tscatter/asymptotics.hpp"
#include "tscatter/calculus.hpp"
#include "tscatter/counterexample.hpp"
#include "tscatter/csv.hpp"
#include "tscatter/domain.hpp"
#include "tscatter/equivariance.hpp"
#include "tscatter/errors.hpp"
#include "tscatter/solver.hpp"

namespace py = pybind11;
using namespace tscatter;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Sample to_sample(const Array& points, const std::optional<Array>& weights) {
  if (points.ndim() != 2) throw DimensionError("points must be a 2-d array");
  const auto p = points.unchecked<2>();
  std::vector<Vector> rows(p.shape(0), Vector(p.shape(1)));
  for (py::ssize_t i = 0; i < p.shape(0); ++i)
    for (py::ssize_t j = 0; j < p.shape(1); ++j) rows[i][j] = p(i, j);
  if (!weights) return Sample::uniform(std::move(rows));
  if (weights->ndim() != 1) throw DimensionError("weights must be a 1-d array");
  const auto w = weights->unchecked<1>();
  Vector wv(w.shape(0));
  for (py::ssize_t i = 0; i < w.shape(0); ++i) wv[i] = w(i);
  return Sample(std::move(rows), std::move(wv));
}

Vector to_vector(const Array& x) {
  if (x.ndim() != 1) throw DimensionError("expected a 1-d array");
  return Vector(x.data(), x.data() + x.size());
}

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-d array");
  const auto v = a.unchecked<2>();
  Matrix m(v.shape(0), v.shape(1));
  for (py::ssize_t i = 0; i < v.shape(0); ++i)
    for (py::ssize_t j = 0; j < v.shape(1); ++j) m(i, j) = v(i, j);
  return m;
}

py::array_t<double> from_vector(const Vector& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> from_sym(const SymMatrix& s) {
  const auto d = static_cast<py::ssize_t>(s.dim());
  py::array_t<double> out({d, d});
  auto m = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < d; ++i)
    for (py::ssize_t j = 0; j < d; ++j) m(i, j) = s(i, j);
  return out;
}

py::array_t<double> from_points(const Sample& s) {
  const auto n = static_cast<py::ssize_t>(s.size());
  const auto d = static_cast<py::ssize_t>(s.dim());
  py::array_t<double> out({n, d});
  auto m = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < n; ++i)
    for (py::ssize_t j = 0; j < d; ++j) m(i, j) = s.point(i)[j];
  return out;
}

py::tuple sample_tuple(const Sample& s) {
  return py::make_tuple(from_points(s), from_vector(s.weights()));
}

TConfig make_config(double nu, std::size_t dim, double tol_step, double tol_fp,
                    std::size_t max_iter, bool check_domain, const std::string& init) {
  SolverOptions opt;
  opt.tol_step = tol_step;
  opt.tol_fp = tol_fp;
  opt.max_iter = max_iter;
  opt.check_domain = check_domain;
  if (init == "identity") {
    opt.init = InitMode::kIdentity;
  } else if (init == "covariance") {
    opt.init = InitMode::kCovariance;
  } else {
    throw ConfigError("init must be 'identity' or 'covariance'");
  }
  return TConfig(nu, dim, opt);
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  d["fixed_point_residual"] = r.fixed_point_residual;
  d["gradient_norm"] = r.gradient_norm;
  d["objective_trace"] = r.objective_trace;
  d["condition_number_trace"] = r.condition_number_trace;
  d["min_eigenvalue_trace"] = r.min_eigenvalue_trace;
  return d;
}

py::dict estimate_dict(const LocationScatterEstimate& e) {
  py::dict d;
  d["mu"] = from_vector(e.mu);
  d["sigma"] = from_sym(e.sigma);
  d["gamma_check"] = e.gamma_check;
  d["weight_sum"] = e.weight_sum;
  d["degenerate"] = e.degenerate;
  d["report"] = report_dict(e.report);
  return d;
}

py::dict domain_dict(const DomainReport& r) {
  py::dict d;
  d["member"] = r.member;
  d["kind"] = r.affine ? "affine" : "linear";
  d["a0"] = r.a0;
  py::list dims;
  for (const auto& c : r.per_dimension) {
    py::dict row;
    row["q"] = c.q;
    row["max_mass"] = c.max_mass;
    row["threshold"] = c.threshold;
    row["witness"] = c.witness;
    dims.append(row);
  }
  d["per_dimension"] = dims;
  return d;
}

py::dict influence_dict(const InfluenceResult& r) {
  py::dict d;
  d["d_mu"] = from_vector(r.d_mu);
  d["d_sigma"] = from_sym(r.d_sigma);
  return d;
}

#define TSCATTER_SOLVER_ARGS                                                        \
  py::arg("tol_step") = 1e-12, py::arg("tol_fp") = 1e-9, py::arg("max_iter") = 1000, \
      py::arg("check_domain") = true, py::arg("init") = "identity"

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multivariate t M-functionals of location and scatter";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<ConfigError> config_error(m, "ConfigError", error.ptr());
  static py::exception<DimensionError> dimension_error(m, "DimensionError", error.ptr());
  static py::exception<NotPositiveDefinite> not_pd(m, "NotPositiveDefinite", error.ptr());
  static py::exception<ExplicitLimitation> limitation(m, "ExplicitLimitation", error.ptr());
  static py::exception<DomainViolation> domain_violation(m, "DomainViolation", error.ptr());
  static py::exception<NoConvergence> no_convergence(m, "NoConvergence", error.ptr());

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainViolation& e) {
      py::object exc = py::handle(domain_violation.ptr())(e.what());
      exc.attr("witness") = e.witness();
      exc.attr("subspace_dim") = e.subspace_dim();
      exc.attr("mass") = e.mass();
      exc.attr("threshold") = e.threshold();
      py::set_error(domain_violation, exc);
    } catch (const NoConvergence& e) {
      py::object exc = py::handle(no_convergence.ptr())(e.what());
      exc.attr("iterations") = e.iterations();
      exc.attr("residual") = e.residual();
      exc.attr("min_eigenvalue_trace") = e.min_eigenvalue_trace();
      py::set_error(no_convergence, exc);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const DimensionError& e) {
      py::set_error(dimension_error, e.what());
    } catch (const NotPositiveDefinite& e) {
      py::set_error(not_pd, e.what());
    } catch (const ExplicitLimitation& e) {
      py::set_error(limitation, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("rho", [](double s, double nu, std::size_t dim) { return rho(s, TConfig(nu, dim)); },
        py::arg("s"), py::arg("nu"), py::arg("dim"));
  m.def("u_weight",
        [](double s, double nu, std::size_t dim) { return u_weight(s, TConfig(nu, dim)); },
        py::arg("s"), py::arg("nu"), py::arg("dim"));

  m.def(
      "fit",
      [](const Array& points, double nu, const std::optional<Array>& weights, double tol_step,
         double tol_fp, std::size_t max_iter, bool check_domain, const std::string& init) {
        const Sample p = to_sample(points, weights);
        const TConfig cfg = make_config(nu, p.dim(), tol_step, tol_fp, max_iter, check_domain, init);
        py::gil_scoped_release release;
        auto est = p.dim() == 1 ? fit_univariate(p, cfg) : fit_location_scatter(p, cfg);
        py::gil_scoped_acquire acquire;
        return estimate_dict(est);
      },
      py::arg("points"), py::arg("nu"), py::arg("weights") = py::none(), TSCATTER_SOLVER_ARGS);

  m.def(
      "fit_scatter",
      [](const Array& points, double nu, const std::optional<Array>& weights, double tol_step,
         double tol_fp, std::size_t max_iter, bool check_domain, const std::string& init) {
        const Sample q = to_sample(points, weights);
        const TConfig cfg = make_config(nu, q.dim(), tol_step, tol_fp, max_iter, check_domain, init);
        py::gil_scoped_release release;
        auto fit = fit_scatter(q, cfg);
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["b"] = from_sym(fit.b.matrix());
        d["report"] = report_dict(fit.report);
        return d;
      },
      py::arg("points"), py::arg("nu"), py::arg("weights") = py::none(), TSCATTER_SOLVER_ARGS);

  m.def(
      "check_domain",
      [](const Array& points, double nu, const std::optional<Array>& weights, bool affine) {
        const Sample p = to_sample(points, weights);
        const TConfig cfg(nu, p.dim());
        return domain_dict(affine ? in_V(p, cfg) : in_U(p, cfg));
      },
      py::arg("points"), py::arg("nu"), py::arg("weights") = py::none(), py::arg("affine") = true);

  m.def(
      "influence",
      [](const Array& points, const Array& x, double nu, const std::optional<Array>& weights) {
        const Sample p = to_sample(points, weights);
        const Vector xv = to_vector(x);
        const TConfig cfg(nu, p.dim());
        py::gil_scoped_release release;
        const auto cmp = tscatter::influence(p, cfg, xv);
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["implicit"] = influence_dict(cmp.implicit);
        d["finite_difference"] = influence_dict(cmp.finite_difference);
        d["relative_discrepancy"] = cmp.relative_discrepancy;
        return d;
      },
      py::arg("points"), py::arg("x"), py::arg("nu"), py::arg("weights") = py::none());

  m.def(
      "mc_normality",
      [](const Array& points, double nu, std::size_t n, std::size_t replicates, std::uint64_t seed,
         const std::optional<Array>& weights, std::size_t workers) {
        const Sample p = to_sample(points, weights);
        const TConfig cfg(nu, p.dim());
        McOptions opt;
        opt.workers = workers;
        py::gil_scoped_release release;
        const McReport r = tscatter::mc_normality(p, cfg, n, replicates, seed, opt);
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["n"] = r.n;
        d["replicates"] = r.replicates;
        d["population"] = from_vector(r.population);
        d["mean"] = from_vector(r.mean);
        d["covariance"] = from_sym(r.covariance);
        d["skewness"] = from_vector(r.skewness);
        d["excess_kurtosis"] = from_vector(r.excess_kurtosis);
        d["domain_hit_rate"] = r.domain_hit_rate;
        d["domain_failures"] = r.domain_failures;
        d["solver_failures"] = r.solver_failures;
        py::list errors;
        for (const auto& e : r.scaled_errors) errors.append(from_vector(e));
        d["scaled_errors"] = errors;
        return d;
      },
      py::arg("points"), py::arg("nu"), py::arg("n"), py::arg("replicates"), py::arg("seed"),
      py::arg("weights") = py::none(), py::arg("workers") = 0);

  m.def(
      "sandwich_covariance",
      [](const Array& points, double nu, const std::optional<Array>& weights) {
        const Sample p = to_sample(points, weights);
        return from_sym(tscatter::sandwich_covariance(p, TConfig(nu, p.dim())));
      },
      py::arg("points"), py::arg("nu"), py::arg("weights") = py::none());

  m.def(
      "check_equivariance",
      [](const Array& points, double nu, const Array& a, const Array& v,
         const std::optional<Array>& weights) {
        const Sample p = to_sample(points, weights);
        const auto r = tscatter::check_equivariance(p, TConfig(nu, p.dim()),
                                                    AffineMap{to_matrix(a), to_vector(v)});
        py::dict d;
        d["mu_defect"] = r.mu_defect;
        d["sigma_defect"] = r.sigma_defect;
        d["mu_relative"] = r.mu_relative;
        d["sigma_relative"] = r.sigma_relative;
        return d;
      },
      py::arg("points"), py::arg("nu"), py::arg("a"), py::arg("v"), py::arg("weights") = py::none());

  m.def("make_Pk", [](int k) { return sample_tuple(make_Pk(k)); }, py::arg("k"));
  m.def("make_Qk", [](int k) { return sample_tuple(make_Qk(k)); }, py::arg("k"));
  m.def(
      "limits",
      [](double nu) {
        const auto l = tscatter::limits(TConfig(nu, 2));
        return py::make_tuple(l.a, l.b, l.c);
      },
      py::arg("nu"));
  m.def(
      "counterexample_sweep",
      [](double nu, const std::vector<int>& ks) {
        const auto rows = tscatter::counterexample_sweep(TConfig(nu, 2), ks);
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["k"] = r.k;
          d["p_mu"] = from_vector(r.p_mu);
          d["p_sigma"] = from_sym(r.p_sigma);
          d["q_mu"] = from_vector(r.q_mu);
          d["q_sigma"] = from_sym(r.q_sigma);
          out.append(d);
        }
        return out;
      },
      py::arg("nu"), py::arg("ks") = std::vector<int>(kDefaultKSweep.begin(), kDefaultKSweep.end()));

  m.def("read_csv", [](const std::string& path) { return sample_tuple(read_csv_file(path)); },
        py::arg("path"));
}
