#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tscatter/asymptotics.hpp"
#include "tscatter/calculus.hpp"
#include "tscatter/counterexample.hpp"
#include "tscatter/csv.hpp"
#include "tscatter/domain.hpp"
#include "tscatter/equivariance.hpp"
#include "tscatter/errors.hpp"
#include "tscatter/solver.hpp"

namespace tscatter::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kSchema = "tscatter/1";

// ------------------------------------------------------------------ output

void write_number(std::ostream& os, double v) {
  if (!std::isfinite(v)) {
    os << "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

// nlohmann's dump() prints the shortest round-trip form; reports promise 17
// significant digits, so floats are written here.
void write_json(std::ostream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << inner << Json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent + 1);
      }
      os << '\n' << pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (flat) {
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent + 1);
        }
        os << ']';
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write_json(os, j[i], indent + 1);
      }
      os << '\n' << pad << ']';
      return;
    }
    case Json::value_t::number_float:
      write_number(os, j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json to_json(const SymMatrix& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

Json to_json(const std::vector<std::size_t>& v) {
  Json a = Json::array();
  for (std::size_t x : v) a.push_back(x);
  return a;
}

Json to_json(const SolveReport& r) {
  Json j;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["fixed_point_residual"] = r.fixed_point_residual;
  j["gradient_norm"] = r.gradient_norm;
  j["objective_trace"] = to_json(r.objective_trace);
  j["condition_number_trace"] = to_json(r.condition_number_trace);
  return j;
}

Json to_json(const LocationScatterEstimate& e) {
  Json j;
  j["mu"] = to_json(e.mu);
  j["sigma"] = to_json(e.sigma);
  j["gamma_check"] = e.gamma_check;
  j["weight_sum"] = e.weight_sum;
  j["degenerate"] = e.degenerate;
  j["report"] = to_json(e.report);
  return j;
}

Json to_json(const DomainReport& r) {
  Json j;
  j["member"] = r.member;
  j["kind"] = r.affine ? "affine" : "linear";
  j["a0"] = r.a0;
  Json dims = Json::array();
  for (const DimensionCheck& c : r.per_dimension) {
    Json d;
    d["q"] = c.q;
    d["max_mass"] = c.max_mass;
    d["threshold"] = c.threshold;
    d["witness"] = to_json(c.witness);
    dims.push_back(d);
  }
  j["per_dimension"] = dims;
  return j;
}

Json to_json(const InfluenceResult& r) {
  Json j;
  j["d_mu"] = to_json(r.d_mu);
  j["d_sigma"] = to_json(r.d_sigma);
  return j;
}

// ------------------------------------------------------------------ config

struct RunConfig {
  std::string command;
  std::string input;
  double nu = 0.0;
  std::string output;
  std::uint64_t seed = 0;
  double tol_step = SolverOptions{}.tol_step;
  double tol_fp = SolverOptions{}.tol_fp;
  std::size_t max_iter = SolverOptions{}.max_iter;
  std::size_t n = 200;
  std::size_t replicates = 500;
  bool skip_domain_check = false;
  std::string init = "identity";
  // Command-specific.
  bool linear = false;
  std::string x;
  int k_max = 100;
  double radius = 0.5;
  std::size_t grid_size = 100;
  std::string n_list = "100,1000,10000";
  std::size_t maps = 100;
  std::optional<double> tail_radius;
  double tail_delta = 0.5;

  TConfig model(std::size_t dim) const {
    SolverOptions s;
    s.tol_step = tol_step;
    s.tol_fp = tol_fp;
    s.max_iter = max_iter;
    s.check_domain = !skip_domain_check;
    s.init = init == "covariance" ? InitMode::kCovariance : InitMode::kIdentity;
    return TConfig(nu, dim, s);
  }

  Json to_json() const {
    Json j;
    j["command"] = command;
    j["input"] = input;
    j["nu"] = nu;
    j["output"] = output;
    j["seed"] = seed;
    j["tol_step"] = tol_step;
    j["tol_fp"] = tol_fp;
    j["max_iter"] = max_iter;
    j["n"] = n;
    j["R"] = replicates;
    j["skip_domain_check"] = skip_domain_check;
    j["init"] = init;
    if (command == "check-domain") j["linear"] = linear;
    if (command == "influence") j["x"] = x;
    if (command == "counterexample") j["k_max"] = k_max;
    if (command == "gc-diagnostic") {
      j["radius"] = radius;
      j["grid_size"] = grid_size;
      j["n_list"] = n_list;
    }
    if (command == "equivariance-test") j["maps"] = maps;
    if (command == "mc-normality" && tail_radius) {
      j["tail_radius"] = *tail_radius;
      j["tail_delta"] = tail_delta;
    }
    return j;
  }
};

struct UsageError : Error {
  using Error::Error;
};

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) throw UsageError(std::string("cannot parse ") + what + ": '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

Json envelope(const RunConfig& rc) {
  Json j;
  j["schema"] = kSchema;
  j["config"] = rc.to_json();
  return j;
}

// ---------------------------------------------------------------- commands

Json cmd_fit(const RunConfig& rc) {
  const Sample p = read_csv_file(rc.input);
  const TConfig cfg = rc.model(p.dim());
  Json j = envelope(rc);
  j["result"] = to_json(p.dim() == 1 ? fit_univariate(p, cfg) : fit_location_scatter(p, cfg));
  return j;
}

// The report goes to the output either way; a violation also sets `violation`.
Json cmd_check_domain(const RunConfig& rc, std::optional<Json>& violation) {
  const Sample p = read_csv_file(rc.input);
  const TConfig cfg(rc.nu, p.dim());
  const DomainReport r = rc.linear ? in_U(p, cfg) : in_V(p, cfg);
  if (const DimensionCheck* c = r.first_violation()) {
    Json v;
    v["witness"] = to_json(c->witness);
    v["subspace_dim"] = c->q;
    v["mass"] = c->max_mass;
    v["threshold"] = c->threshold;
    violation = v;
  }
  Json j = envelope(rc);
  j["result"] = to_json(r);
  return j;
}

Json cmd_influence(const RunConfig& rc) {
  const Sample p = read_csv_file(rc.input);
  const Vector x = parse_list<double>(rc.x, "--x");
  if (x.size() != p.dim()) throw UsageError("--x has " + std::to_string(x.size()) + " coordinates, data has " + std::to_string(p.dim()));
  const InfluenceComparison c = influence(p, rc.model(p.dim()), x);
  Json j = envelope(rc);
  Json r;
  r["x"] = to_json(x);
  r["implicit"] = to_json(c.implicit);
  r["finite_difference"] = to_json(c.finite_difference);
  r["relative_discrepancy"] = c.relative_discrepancy;
  j["result"] = r;
  return j;
}

Json cmd_mc(const RunConfig& rc) {
  const Sample p = read_csv_file(rc.input);
  const TConfig cfg = rc.model(p.dim());
  McOptions opt;
  if (rc.tail_radius) opt.tail = TailCheck{*rc.tail_radius, rc.tail_delta};
  const McReport m = mc_normality(p, cfg, rc.n, rc.replicates, rc.seed, opt);
  Json r;
  r["parameters"] = m.parameters;
  r["population"] = to_json(m.population);
  r["kept"] = m.scaled_errors.size();
  r["domain_failures"] = m.domain_failures;
  r["solver_failures"] = m.solver_failures;
  r["domain_hit_rate"] = m.domain_hit_rate;
  if (m.tail_condition) r["tail_condition"] = *m.tail_condition;
  r["mean"] = to_json(m.mean);
  r["covariance"] = to_json(m.covariance);
  r["skewness"] = to_json(m.skewness);
  r["excess_kurtosis"] = to_json(m.excess_kurtosis);
  r["sandwich_covariance"] = to_json(sandwich_covariance(p, cfg));
  Json rows = Json::array();
  for (const Vector& e : m.scaled_errors) rows.push_back(to_json(e));
  r["scaled_errors"] = rows;
  Json j = envelope(rc);
  j["result"] = r;
  return j;
}

// Entries uniform on [-2, 2] from the replicate stream; singular draws are skipped.
AffineMap random_map(std::mt19937_64& rng, std::size_t d) {
  auto unit = [&] { return 4.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 2.0; };
  for (;;) {
    AffineMap f{Matrix(d, d), Vector(d)};
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < d; ++k) f.a(i, k) = unit();
      f.v[i] = unit();
    }
    if (!f.singular()) return f;
  }
}

Json cmd_equivariance(const RunConfig& rc) {
  const Sample p = read_csv_file(rc.input);
  const TConfig cfg = rc.model(p.dim());
  Json rows = Json::array();
  double worst_mu = 0.0, worst_sigma = 0.0;
  for (std::size_t i = 0; i < rc.maps; ++i) {
    std::mt19937_64 rng = replicate_rng(rc.seed, i);
    const AffineMap f = random_map(rng, p.dim());
    const EquivarianceDefect e = check_equivariance(p, cfg, f);
    worst_mu = std::max(worst_mu, e.mu_relative);
    worst_sigma = std::max(worst_sigma, e.sigma_relative);
    Json row;
    row["map"] = i;
    row["determinant"] = f.determinant();
    row["mu_defect"] = e.mu_defect;
    row["sigma_defect"] = e.sigma_defect;
    row["mu_relative"] = e.mu_relative;
    row["sigma_relative"] = e.sigma_relative;
    rows.push_back(row);
  }
  Json r;
  r["max_mu_relative"] = worst_mu;
  r["max_sigma_relative"] = worst_sigma;
  r["maps"] = rows;
  Json j = envelope(rc);
  j["result"] = r;
  return j;
}

Json cmd_counterexample(const RunConfig& rc) {
  if (rc.k_max < 1) throw UsageError("--k-max must be at least 1");
  const TConfig cfg = rc.model(2);
  std::vector<int> ks;
  for (int k : kDefaultKSweep)
    if (k <= rc.k_max) ks.push_back(k);
  if (ks.back() != rc.k_max) ks.push_back(rc.k_max);
  const LimitTriple lim = limits(cfg);
  Json rows = Json::array();
  for (const SweepRow& s : counterexample_sweep(cfg, ks)) {
    Json row;
    row["k"] = s.k;
    row["P_sigma11"] = s.p_sigma(0, 0);
    row["P_sigma22"] = s.p_sigma(1, 1);
    row["P_sigma12"] = s.p_sigma(0, 1);
    row["Q_sigma11"] = s.q_sigma(0, 0);
    row["Q_sigma22"] = s.q_sigma(1, 1);
    row["Q_sigma12"] = s.q_sigma(0, 1);
    row["P_mu"] = to_json(s.p_mu);
    row["Q_mu"] = to_json(s.q_mu);
    rows.push_back(row);
  }
  Json limits_json;
  limits_json["a"] = lim.a;
  limits_json["b"] = lim.b;
  limits_json["c"] = lim.c;
  Json r;
  r["limits"] = limits_json;
  r["table"] = rows;
  Json j = envelope(rc);
  j["result"] = r;
  return j;
}

Json cmd_gc(const RunConfig& rc) {
  const Sample p = read_csv_file(rc.input);
  const std::vector<std::size_t> ns = parse_list<std::size_t>(rc.n_list, "--n-list");
  const auto rows = gc_diagnostic(p, rc.model(p.dim()), rc.radius, rc.grid_size, ns, rc.seed);
  Json table = Json::array();
  for (const GcRow& g : rows) {
    Json row;
    row["n"] = g.n;
    row["sup_deviation"] = g.sup_deviation;
    table.push_back(row);
  }
  Json r;
  r["table"] = table;
  Json j = envelope(rc);
  j["result"] = r;
  return j;
}

void emit_error(std::ostream& err, const std::string& code, const std::string& message,
                const Json* extra = nullptr) {
  Json e;
  e["code"] = code;
  e["message"] = message;
  if (extra)
    for (auto it = extra->begin(); it != extra->end(); ++it) e[it.key()] = it.value();
  write_json(err, e, 0);
  err << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Elliptical t M-functionals of location and scatter", "tscatter"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool needs_input, bool needs_nu) {
    if (needs_input) sub->add_option("input", rc.input, "CSV sample (x1..xd[,weight])")->required();
    auto* nu = sub->add_option("--nu", rc.nu, "degrees of freedom");
    if (needs_nu) nu->required();
    sub->add_option("--output,-o", rc.output, "write the JSON report here instead of stdout");
    sub->add_option("--seed", rc.seed, "random seed");
    sub->add_option("--tol-step", rc.tol_step, "relative step tolerance");
    sub->add_option("--tol-fp", rc.tol_fp, "fixed-point residual tolerance");
    sub->add_option("--max-iter", rc.max_iter, "iteration cap");
    sub->add_flag("--skip-domain-check", rc.skip_domain_check, "do not pre-check the existence domain");
    sub->add_option("--init", rc.init, "starting matrix")->check(CLI::IsMember({"identity", "covariance"}));
  };

  CLI::App* fit = app.add_subcommand("fit", "location-scatter fit");
  common(fit, true, true);
  CLI::App* dom = app.add_subcommand("check-domain", "existence-domain membership");
  common(dom, true, true);
  dom->add_flag("--linear", rc.linear, "check linear subspaces (pure scatter) instead of affine ones");
  CLI::App* inf = app.add_subcommand("influence", "influence function at a point");
  common(inf, true, true);
  inf->add_option("--x", rc.x, "comma-separated point")->required();
  CLI::App* mc = app.add_subcommand("mc-normality", "Monte-Carlo root-n normality check");
  common(mc, true, true);
  mc->add_option("--n", rc.n, "sample size")->check(CLI::PositiveNumber);
  mc->add_option("--R", rc.replicates, "replicates")->check(CLI::PositiveNumber);
  mc->add_option("--tail-radius", rc.tail_radius, "report the tail condition for this radius");
  mc->add_option("--tail-delta", rc.tail_delta, "delta of the tail condition");
  CLI::App* eq = app.add_subcommand("equivariance-test", "random affine-map equivariance check");
  common(eq, true, true);
  eq->add_option("--maps", rc.maps, "number of random maps")->check(CLI::PositiveNumber);
  CLI::App* ce = app.add_subcommand("counterexample", "scatter along the two weakly converging sequences");
  common(ce, false, true);
  ce->add_option("--k-max", rc.k_max, "largest k in the sweep");
  CLI::App* gc = app.add_subcommand("gc-diagnostic", "uniform deviation of empirical losses");
  common(gc, true, true);
  gc->add_option("--radius", rc.radius, "neighbourhood radius (< 1)");
  gc->add_option("--grid-size", rc.grid_size, "parameter grid size")->check(CLI::PositiveNumber);
  gc->add_option("--n-list", rc.n_list, "comma-separated sample sizes");

  std::vector<const char*> argv{"tscatter"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "UsageError", e.what());
    return kExitUsage;
  }
  rc.command = app.get_subcommands().front()->get_name();

  try {
    if (!(rc.tol_step > 0.0) || !(rc.tol_fp > 0.0)) throw UsageError("tolerances must be positive");
    Json report;
    std::optional<Json> violation;
    if (rc.command == "fit") report = cmd_fit(rc);
    else if (rc.command == "check-domain") report = cmd_check_domain(rc, violation);
    else if (rc.command == "influence") report = cmd_influence(rc);
    else if (rc.command == "mc-normality") report = cmd_mc(rc);
    else if (rc.command == "equivariance-test") report = cmd_equivariance(rc);
    else if (rc.command == "counterexample") report = cmd_counterexample(rc);
    else report = cmd_gc(rc);

    if (rc.output.empty()) {
      write_json(out, report, 0);
      out << '\n';
    } else {
      std::ofstream file(rc.output, std::ios::binary);
      if (!file) throw UsageError("cannot write '" + rc.output + "'");
      write_json(file, report, 0);
      file << '\n';
    }
    if (violation) {
      emit_error(err, "DomainViolation", "law is outside the existence domain", &*violation);
      return kExitDomain;
    }
    return kExitOk;
  } catch (const DomainViolation& e) {
    Json extra;
    extra["witness"] = to_json(e.witness());
    extra["subspace_dim"] = e.subspace_dim();
    extra["mass"] = e.mass();
    extra["threshold"] = e.threshold();
    emit_error(err, "DomainViolation", e.what(), &extra);
    return kExitDomain;
  } catch (const NoConvergence& e) {
    Json extra;
    extra["iterations"] = e.iterations();
    extra["residual"] = e.residual();
    extra["min_eigenvalue_trace"] = to_json(e.min_eigenvalue_trace());
    emit_error(err, "NoConvergence", e.what(), &extra);
    return kExitNoConvergence;
  } catch (const UsageError& e) {
    emit_error(err, "UsageError", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    emit_error(err, "ConfigError", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    emit_error(err, "Error", e.what());
    return kExitUsage;
  }
}

}  // namespace tscatter::cli
