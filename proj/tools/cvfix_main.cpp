// cvfix command-line driver: loads a JSON run configuration, executes the
// requested hypothesis checks and/or an end-to-end solve, and writes a result
// document plus a per-iteration trace CSV.
//
// Exit codes: 0 all requested checks passed and the solve (if requested)
// converged; 1 configuration error; 2 at least one requested check failed;
// 3 the solve did not converge. Check failures take precedence over
// non-convergence when both occur.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvfix/coefficients.hpp"
#include "cvfix/complex_scalar.hpp"
#include "cvfix/grid_function.hpp"
#include "cvfix/jungck.hpp"
#include "cvfix/metric_space.hpp"
#include "cvfix/quadrature.hpp"
#include "cvfix/urysohn.hpp"

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json to_json(const cvfix::ComplexScalar& z) { return json::array({z.re(), z.im()}); }

std::uint64_t seed_from_env() {
  if (const char* s = std::getenv("CVFIX_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ConfigError(std::string("CVFIX_SEED is not an integer: ") + s);
    }
  }
  return 42;
}

template <typename T>
T field_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

cvfix::QuadratureRule parse_rule(const std::string& name) {
  if (name == "simpson") return cvfix::QuadratureRule::Simpson;
  if (name == "trapezoid") return cvfix::QuadratureRule::Trapezoid;
  throw ConfigError("unknown quadrature rule: " + name);
}

cvfix::TripleKind parse_form(const std::string& name) {
  if (name == "sum") return cvfix::TripleKind::SumForm;
  if (name == "rational") return cvfix::TripleKind::RationalForm;
  throw ConfigError("unknown coefficient form: " + name);
}

cvfix::CoefficientTriple parse_triple(const json& cfg) {
  if (!cfg.contains("triple")) {
    throw ConfigError("config requires a \"triple\" object");
  }
  const json& t = cfg.at("triple");
  try {
    return cvfix::CoefficientTriple::constants(
        t.at("lambda1").get<double>(), t.at("lambda2").get<double>(),
        t.at("lambda3").get<double>(), parse_form(t.at("form").get<std::string>()));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad coefficient triple: ") + e.what());
  }
}

cvfix::Kernel parse_kernel(const json& k, double lower, double step, Eigen::Index nodes) {
  const std::string type = k.at("type").get<std::string>();
  if (type == "zero") {
    return [](double, double, const Eigen::VectorXd& x) {
      return Eigen::VectorXd::Zero(x.size()).eval();
    };
  }
  if (type == "linear-separable") {
    const double gain = k.at("gain").get<double>();
    return [gain](double t, double s, const Eigen::VectorXd& x) {
      return (gain * t * s * x).eval();
    };
  }
  if (type == "tabulated") {
    // Row j, column s: the scalar multiplier applied to x at node pair
    // (t_j, t_s). Evaluated at grid nodes only, which is all the Nystrom
    // discretization ever asks of a kernel.
    const auto rows = k.at("matrix").get<std::vector<std::vector<double>>>();
    if (static_cast<Eigen::Index>(rows.size()) != nodes) {
      throw ConfigError("tabulated kernel matrix must have one row per grid node");
    }
    Eigen::MatrixXd m(nodes, nodes);
    for (Eigen::Index j = 0; j < nodes; ++j) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(j)].size()) != nodes) {
        throw ConfigError("tabulated kernel matrix must be square");
      }
      for (Eigen::Index s = 0; s < nodes; ++s) {
        m(j, s) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)];
      }
    }
    return [m, lower, step, nodes](double t, double s, const Eigen::VectorXd& x) {
      const auto j = static_cast<Eigen::Index>(std::llround((t - lower) / step));
      const auto i = static_cast<Eigen::Index>(std::llround((s - lower) / step));
      if (j < 0 || j >= nodes || i < 0 || i >= nodes) {
        throw std::domain_error("tabulated kernel evaluated off the grid");
      }
      return (m(j, i) * x).eval();
    };
  }
  throw ConfigError("unknown kernel type: " + type);
}

cvfix::GridFunction parse_offset(const json& o, double lower, double upper, Eigen::Index nodes,
                                 Eigen::Index components) {
  const std::string type = o.at("type").get<std::string>();
  if (type == "zero") return cvfix::GridFunction::zeros(lower, upper, nodes, components);
  if (type == "linear") {
    return cvfix::GridFunction::linear_ramp(lower, upper, nodes, components,
                                            o.at("slope").get<double>());
  }
  if (type == "constant") {
    cvfix::GridFunction g = cvfix::GridFunction::zeros(lower, upper, nodes, components);
    g.values.setConstant(o.at("value").get<double>());
    return g;
  }
  if (type == "csv") {
    std::ifstream in(o.at("path").get<std::string>());
    if (!in) throw ConfigError("cannot open offset csv: " + o.at("path").get<std::string>());
    cvfix::GridFunction g = cvfix::read_grid_csv(in);
    if (g.lower != lower || g.upper != upper || g.node_count() != nodes ||
        g.component_count() != components) {
      throw ConfigError("offset csv grid does not match the instance grid");
    }
    return g;
  }
  throw ConfigError("unknown offset type: " + type);
}

cvfix::UrysohnInstance parse_urysohn(const json& inst_cfg) {
  if (field_or<std::string>(inst_cfg, "preset", "") == "demo-linear") {
    return cvfix::demo_instance(
        field_or<Eigen::Index>(inst_cfg, "grid_points", 101),
        field_or<double>(inst_cfg, "gain", 0.3),
        parse_rule(field_or<std::string>(inst_cfg, "quadrature", "simpson")),
        field_or<double>(inst_cfg, "metric_slope", 1.0));
  }

  const auto interval = inst_cfg.at("interval").get<std::vector<double>>();
  if (interval.size() != 2 || !(interval[0] <= interval[1])) {
    throw ConfigError("instance interval must be [lower, upper] with lower <= upper");
  }
  const auto nodes = inst_cfg.at("grid_points").get<Eigen::Index>();
  const auto components = field_or<Eigen::Index>(inst_cfg, "components", 1);

  cvfix::UrysohnInstance inst;
  inst.rule = parse_rule(field_or<std::string>(inst_cfg, "quadrature", "simpson"));
  inst.metric_slope = field_or<double>(inst_cfg, "metric_slope", 1.0);

  const json& kernels = inst_cfg.at("kernels");
  const json& offsets = inst_cfg.at("offsets");
  if ((kernels.size() != 1 && kernels.size() != 4) ||
      (offsets.size() != 1 && offsets.size() != 4)) {
    throw ConfigError("kernels and offsets each take 1 entry (broadcast) or 4 entries");
  }
  const double step = (interval[1] - interval[0]) / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < 4; ++i) {
    inst.kernels[i] =
        parse_kernel(kernels.at(kernels.size() == 1 ? 0 : i), interval[0], step, nodes);
    inst.offsets[i] = parse_offset(offsets.at(offsets.size() == 1 ? 0 : i), interval[0],
                                   interval[1], nodes, components);
  }
  try {
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid instance: ") + e.what());
  }
  return inst;
}

cvfix::GridFunction parse_start(const json& s, const cvfix::UrysohnInstance& inst,
                                std::mt19937_64& rng) {
  const std::string type = s.at("type").get<std::string>();
  if (type == "zero") return inst.zero();
  if (type == "linear") {
    return cvfix::GridFunction::linear_ramp(inst.lower(), inst.upper(), inst.node_count(),
                                            inst.component_count(), s.at("slope").get<double>());
  }
  if (type == "constant") {
    cvfix::GridFunction g = inst.zero();
    g.values.setConstant(s.at("value").get<double>());
    return g;
  }
  if (type == "random") {
    const double scale = field_or<double>(s, "scale", 1.0);
    std::uniform_real_distribution<double> dist(-scale, scale);
    cvfix::GridFunction g = inst.zero();
    for (Eigen::Index j = 0; j < g.node_count(); ++j) {
      for (Eigen::Index c = 0; c < g.component_count(); ++c) g.values(j, c) = dist(rng);
    }
    return g;
  }
  throw ConfigError("unknown start type: " + type);
}

cvfix::GridFunction random_grid(const cvfix::UrysohnInstance& inst, std::mt19937_64& rng,
                                double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  cvfix::GridFunction g = inst.zero();
  for (Eigen::Index j = 0; j < g.node_count(); ++j) {
    for (Eigen::Index c = 0; c < g.component_count(); ++c) g.values(j, c) = dist(rng);
  }
  return g;
}

json certificate_to_json(const cvfix::FixedPointCertificate<cvfix::GridFunction>& cert) {
  json j;
  j["valid"] = cert.valid;
  j["tol"] = cert.tol;
  j["map_residuals"] = cert.map_residuals;
  j["coincidence_residuals"] = cert.coincidence_residuals;
  j["commutation_residuals"] = cert.commutation_residuals;
  if (!cert.reason.empty()) j["reason"] = cert.reason;
  return j;
}

struct RunOutcome {
  json result;
  int exit_code = 0;
  std::string trace_csv;
  std::string solution_csv;
};

RunOutcome run_urysohn(const json& cfg, std::uint64_t seed) {
  RunOutcome out;
  std::mt19937_64 rng(seed);

  const cvfix::UrysohnInstance inst = parse_urysohn(cfg.at("instance"));
  const cvfix::CoefficientTriple triple = parse_triple(cfg);
  const double tol = field_or<double>(cfg, "tol", 1e-10);
  const int max_iter = field_or<int>(cfg, "max_iter", 200);
  const double check_tol = field_or<double>(cfg, "check_tol", 1e-8);
  const int sample_pairs = field_or<int>(cfg, "sample_pairs", 50);
  const int sample_points = field_or<int>(cfg, "sample_points", 8);
  if (!(tol > 0.0) || max_iter < 2) {
    throw ConfigError("tol must be positive and max_iter at least 2");
  }

  const bool solve_requested = field_or<bool>(cfg, "solve", false);
  const auto checks = field_or<std::vector<std::string>>(cfg, "checks", {});
  if (!solve_requested && checks.empty()) {
    throw ConfigError("config requests neither a solve nor any checks");
  }

  out.result["instance"] = {{"kind", "urysohn"},
                            {"grid_points", inst.node_count()},
                            {"components", inst.component_count()},
                            {"interval", {inst.lower(), inst.upper()}},
                            {"quadrature", cvfix::to_string(inst.rule)},
                            {"metric_slope", inst.metric_slope}};

  const cvfix::MetricSpace<cvfix::GridFunction> space = cvfix::make_metric_space(inst);
  const cvfix::MapQuadruple<cvfix::GridFunction> quad = cvfix::make_quadruple(inst);

  bool checks_passed = true;
  for (const std::string& name : checks) {
    json entry;
    if (name == "axioms") {
      std::vector<cvfix::GridFunction> sample;
      for (int i = 0; i < sample_points; ++i) sample.push_back(random_grid(inst, rng, 1.0));
      const cvfix::AxiomReport report = cvfix::verify_axioms(space, sample);
      entry["passed"] = report.passed;
      entry["sample_size"] = report.sample_size_used;
      entry["violation_counts"] = {{"nonnegativity", report.nonnegativity_violations.size()},
                                   {"identity", report.identity_violations.size()},
                                   {"symmetry", report.symmetry_violations.size()},
                                   {"triangle", report.triangle_violations.size()}};
    } else if (name == "bound") {
      std::uniform_real_distribution<double> dist(0.0, 2.0);
      std::vector<std::pair<cvfix::ComplexScalar, cvfix::ComplexScalar>> sample;
      for (int i = 0; i < sample_pairs; ++i) {
        sample.emplace_back(cvfix::ComplexScalar(dist(rng), dist(rng)),
                            cvfix::ComplexScalar(dist(rng), dist(rng)));
      }
      const auto report = cvfix::check_hypothesis_bound(triple, sample);
      entry["passed"] = report.passed;
      entry["min_margin"] = report.min_margin;
      entry["points_checked"] = report.entries.size();
      json witnesses = json::array();
      for (std::size_t idx : report.violations) {
        if (witnesses.size() >= 5) break;
        const auto& e = report.entries[idx];
        witnesses.push_back(
            {{"x", to_json(e.x)}, {"y", to_json(e.y)}, {"margin", e.margin}});
      }
      entry["violations"] = witnesses;
    } else if (name == "contraction") {
      std::vector<std::pair<cvfix::GridFunction, cvfix::GridFunction>> pairs;
      for (int i = 0; i < sample_pairs; ++i) {
        pairs.emplace_back(random_grid(inst, rng, 1.0), random_grid(inst, rng, 1.0));
      }
      const cvfix::ArgPairFn<cvfix::GridFunction> args =
          cvfix::origin_distance_args(space, inst.zero());
      const cvfix::ContractionReport report =
          triple.kind() == cvfix::TripleKind::SumForm
              ? cvfix::verify_contraction_sum(quad, space, triple, pairs, args)
              : cvfix::verify_contraction_rational(quad, space, triple, pairs, args);
      entry["passed"] = report.passed();
      entry["pairs_checked"] = report.pairs_checked;
      json witnesses = json::array();
      for (const auto& v : report.violations) {
        if (witnesses.size() >= 5) break;
        witnesses.push_back(
            {{"pair", v.pair_index}, {"lhs", to_json(v.lhs)}, {"rhs", to_json(v.rhs)}});
      }
      entry["violations"] = witnesses;
    } else if (name == "range") {
      std::vector<cvfix::GridFunction> sample;
      for (int i = 0; i < sample_points; ++i) sample.push_back(random_grid(inst, rng, 1.0));
      const auto report = cvfix::verify_range_inclusion(quad, space, sample, check_tol);
      entry["passed"] = report.witnessed;
      entry["points_checked"] = report.entries.size();
    } else if (name == "conditions12") {
      const cvfix::GridFunction probe = random_grid(inst, rng, 1.0);
      const auto report = cvfix::structural_condition_residuals(inst, probe);
      entry["passed"] = report.range_identity_residual <= check_tol &&
                        report.commutation_identity_residual <= check_tol;
      entry["range_identity_residual"] = report.range_identity_residual;
      entry["commutation_identity_residual"] = report.commutation_identity_residual;
      entry["formulas"] = report.formulas;
    } else if (name == "condition3") {
      std::vector<std::pair<cvfix::GridFunction, cvfix::GridFunction>> pairs;
      for (int i = 0; i < sample_pairs; ++i) {
        pairs.emplace_back(random_grid(inst, rng, 1.0), random_grid(inst, rng, 1.0));
      }
      const auto mode = field_or<std::string>(cfg, "bound_mode", "consistent") == "literal"
                            ? cvfix::BoundMode::Literal
                            : cvfix::BoundMode::Consistent;
      const auto report = cvfix::verify_pointwise_contraction(inst, triple, pairs, mode);
      entry["passed"] = report.passed();
      entry["pairs_checked"] = report.pairs_checked;
      entry["mode"] = report.mode == cvfix::BoundMode::Literal ? "literal" : "consistent";
      entry["violation_count"] = report.violations.size();
    } else {
      throw ConfigError("unknown check: " + name);
    }
    checks_passed = checks_passed && entry.at("passed").get<bool>();
    out.result["checks"][name] = entry;
  }

  bool solve_converged = true;
  if (solve_requested) {
    std::vector<cvfix::GridFunction> starts;
    if (cfg.contains("starts")) {
      for (const json& s : cfg.at("starts")) starts.push_back(parse_start(s, inst, rng));
    }
    if (starts.empty()) starts.push_back(inst.zero());

    cvfix::SolveOptions options;
    options.tol = tol;
    options.max_iter = max_iter;
    const cvfix::SolveResult solved = cvfix::solve_system(inst, triple, options, starts);
    solve_converged = solved.status == cvfix::IterationStatus::Converged;

    json s;
    s["status"] = cvfix::to_string(solved.status);
    s["iterations"] = solved.trace.step_norms.size();
    if (!solved.trace.step_norms.empty()) {
      s["final_step_norm"] = solved.trace.step_norms.back();
    }
    if (!solved.trace.message.empty()) s["message"] = solved.trace.message;
    s["certificate"] = certificate_to_json(solved.certificate);
    s["equation_residuals"] = solved.equation_residuals;
    s["structural_conditions"] = {
        {"range_identity_residual", solved.conditions.range_identity_residual},
        {"commutation_identity_residual", solved.conditions.commutation_identity_residual},
        {"formulas", solved.conditions.formulas}};
    s["solution_sup_norm"] = cvfix::sup_norm(solved.solution);
    s["solution_csv"] = "solution.csv";
    out.result["solve"] = s;

    std::ostringstream trace_stream;
    cvfix::write_trace_csv(solved.trace, trace_stream);
    out.trace_csv = trace_stream.str();

    std::ostringstream solution_stream;
    cvfix::write_grid_csv(solved.solution, solution_stream);
    out.solution_csv = solution_stream.str();

    if (starts.size() >= 2) {
      cvfix::IterationOptions<cvfix::GridFunction> iter;
      iter.tol = tol;
      iter.max_iter = max_iter;
      iter.gamma_args = cvfix::origin_distance_args(space, inst.zero());
      const auto probe =
          cvfix::uniqueness_probe(quad, space, cvfix::derive_gamma(triple), starts, iter,
                                  field_or<double>(cfg, "merge_tol", 1e-6));
      out.result["solve"]["uniqueness"] = {{"consistent", probe.unique_consistent},
                                           {"max_pairwise", probe.max_pairwise},
                                           {"starts", starts.size()}};
    }
  }

  if (!checks_passed) {
    out.exit_code = 2;
  } else if (solve_requested && !solve_converged) {
    out.exit_code = 3;
  }
  return out;
}

RunOutcome run_scalar(const json& cfg, std::uint64_t seed) {
  RunOutcome out;
  std::mt19937_64 rng(seed);

  const json& inst_cfg = cfg.at("instance");
  const std::string map_name = field_or<std::string>(inst_cfg, "map", "halving");
  const double rate = field_or<double>(inst_cfg, "rate", 0.5);
  const double slope = field_or<double>(inst_cfg, "metric_slope", 0.0);

  cvfix::MapQuadruple<double> quad;
  quad.f = quad.g = [](const double& x) { return x; };
  quad.preimage_f = quad.preimage_g = [](const double& w, const double&,
                                         double) -> std::optional<double> { return w; };
  if (map_name == "halving") {
    quad.S = quad.T = [rate](const double& x) { return rate * x; };
  } else if (map_name == "identity") {
    quad.S = quad.T = [](const double& x) { return x; };
  } else {
    throw ConfigError("unknown scalar map: " + map_name);
  }

  const cvfix::MetricSpace<double> space = cvfix::make_scaled_modulus_space(slope);
  const cvfix::CoefficientTriple triple = parse_triple(cfg);
  const double tol = field_or<double>(cfg, "tol", 1e-10);
  const int max_iter = field_or<int>(cfg, "max_iter", 200);
  const int sample_pairs = field_or<int>(cfg, "sample_pairs", 50);
  if (!(tol > 0.0) || max_iter < 2) {
    throw ConfigError("tol must be positive and max_iter at least 2");
  }

  const bool solve_requested = field_or<bool>(cfg, "solve", false);
  const auto checks = field_or<std::vector<std::string>>(cfg, "checks", {});
  if (!solve_requested && checks.empty()) {
    throw ConfigError("config requests neither a solve nor any checks");
  }

  out.result["instance"] = {{"kind", "scalar"}, {"map", map_name}, {"metric_slope", slope}};

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  bool checks_passed = true;
  for (const std::string& name : checks) {
    json entry;
    if (name == "axioms") {
      std::vector<double> sample;
      for (int i = 0; i < 16; ++i) sample.push_back(unit(rng));
      const auto report = cvfix::verify_axioms(space, sample);
      entry["passed"] = report.passed;
      entry["sample_size"] = report.sample_size_used;
    } else if (name == "bound") {
      std::uniform_real_distribution<double> dist(0.0, 2.0);
      std::vector<std::pair<cvfix::ComplexScalar, cvfix::ComplexScalar>> sample;
      for (int i = 0; i < sample_pairs; ++i) {
        sample.emplace_back(cvfix::ComplexScalar(dist(rng), dist(rng)),
                            cvfix::ComplexScalar(dist(rng), dist(rng)));
      }
      const auto report = cvfix::check_hypothesis_bound(triple, sample);
      entry["passed"] = report.passed;
      entry["min_margin"] = report.min_margin;
    } else if (name == "contraction") {
      std::vector<std::pair<double, double>> pairs;
      for (int i = 0; i < sample_pairs; ++i) pairs.emplace_back(unit(rng), unit(rng));
      const auto report =
          triple.kind() == cvfix::TripleKind::SumForm
              ? cvfix::verify_contraction_sum(quad, space, triple, pairs)
              : cvfix::verify_contraction_rational(quad, space, triple, pairs);
      entry["passed"] = report.passed();
      entry["pairs_checked"] = report.pairs_checked;
      json witnesses = json::array();
      for (const auto& v : report.violations) {
        if (witnesses.size() >= 5) break;
        witnesses.push_back(
            {{"pair", v.pair_index}, {"lhs", to_json(v.lhs)}, {"rhs", to_json(v.rhs)}});
      }
      entry["violations"] = witnesses;
    } else if (name == "range") {
      std::vector<double> sample;
      for (int i = 0; i < 8; ++i) sample.push_back(unit(rng));
      const auto report = cvfix::verify_range_inclusion(quad, space, sample,
                                                        field_or<double>(cfg, "check_tol", 1e-8));
      entry["passed"] = report.witnessed;
    } else if (name == "conditions12" || name == "condition3") {
      throw ConfigError("check \"" + name + "\" requires an integral-equation instance");
    } else {
      throw ConfigError("unknown check: " + name);
    }
    checks_passed = checks_passed && entry.at("passed").get<bool>();
    out.result["checks"][name] = entry;
  }

  bool solve_converged = true;
  if (solve_requested) {
    double x0 = 1.0;
    if (cfg.contains("starts") && !cfg.at("starts").empty()) {
      x0 = field_or<double>(cfg.at("starts").at(0), "value", 1.0);
    }
    cvfix::IterationOptions<double> iter;
    iter.tol = tol;
    iter.max_iter = max_iter;
    const auto trace =
        cvfix::jungck_iterate(quad, space, cvfix::derive_gamma(triple), x0, iter);
    solve_converged = trace.converged();

    json s;
    s["status"] = cvfix::to_string(trace.status);
    s["iterations"] = trace.step_norms.size();
    if (!trace.step_norms.empty()) s["final_step_norm"] = trace.step_norms.back();
    if (!trace.message.empty()) s["message"] = trace.message;
    if (trace.converged()) {
      s["limit"] = trace.y_points.back();
      const auto cert = cvfix::certify_fixed_point(quad, space, trace, 100.0 * tol);
      s["certificate"] = {{"valid", cert.valid},
                          {"tol", cert.tol},
                          {"map_residuals", cert.map_residuals},
                          {"coincidence_residuals", cert.coincidence_residuals},
                          {"commutation_residuals", cert.commutation_residuals}};
    }
    out.result["solve"] = s;

    std::ostringstream trace_stream;
    cvfix::write_trace_csv(trace, trace_stream);
    out.trace_csv = trace_stream.str();
  }

  if (!checks_passed) {
    out.exit_code = 2;
  } else if (solve_requested && !solve_converged) {
    out.exit_code = 3;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cvfix: common-fixed-point iteration and Urysohn integral systems"};
  std::string config_path;
  std::string out_dir = ".";
  std::string trace_name = "trace.csv";
  bool quiet = false;
  app.add_option("--config", config_path, "Path to the JSON run configuration")->required();
  app.add_option("--out", out_dir, "Directory for result artifacts");
  app.add_option("--trace-csv", trace_name, "File name for the per-iteration trace CSV");
  app.add_flag("--quiet", quiet, "Suppress progress output");
  CLI11_PARSE(app, argc, argv);

  json result;
  RunOutcome outcome;
  std::uint64_t seed = 42;
  try {
    seed = seed_from_env();
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config: " + config_path);
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    if (!cfg.contains("instance")) {
      throw ConfigError("config requires an \"instance\" object");
    }
    const std::string kind = field_or<std::string>(cfg.at("instance"), "kind", "urysohn");
    if (kind == "urysohn") {
      outcome = run_urysohn(cfg, seed);
    } else if (kind == "scalar") {
      outcome = run_scalar(cfg, seed);
    } else {
      throw ConfigError("unknown instance kind: " + kind);
    }
  } catch (const json::exception& e) {
    std::fprintf(stderr, "cvfix: config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cvfix: %s\n", e.what());
    return 1;
  }

  outcome.result["meta"] = {{"tool", "cvfix"},
                            {"seed", seed},
                            {"config", config_path},
                            {"generated_at", static_cast<long long>(std::time(nullptr))}};
  outcome.result["exit_code"] = outcome.exit_code;

  try {
    std::filesystem::create_directories(out_dir);
    const auto out_path = std::filesystem::path(out_dir);
    {
      std::ofstream f(out_path / "result.json");
      f << outcome.result.dump(2) << '\n';
    }
    if (!outcome.trace_csv.empty()) {
      std::ofstream f(out_path / trace_name);
      f << outcome.trace_csv;
    }
    if (!outcome.solution_csv.empty()) {
      std::ofstream f(out_path / "solution.csv");
      f << outcome.solution_csv;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cvfix: cannot write artifacts: %s\n", e.what());
    return 1;
  }

  if (!quiet) {
    std::printf("cvfix: wrote %s (exit %d)\n",
                (std::filesystem::path(out_dir) / "result.json").c_str(), outcome.exit_code);
  }
  return outcome.exit_code;
}
