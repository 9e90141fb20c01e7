#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "pareto_tracer/harness.hpp"

namespace pareto_tracer {
namespace {

using Keys = std::set<std::string>;

void reject_unknown(const YAML::Node& node, const std::string& where, const Keys& allowed) {
  if (!node.IsMap()) throw ConfigError(fmt::format("{}: expected a mapping", where));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  const YAML::Node value = node[key];
  if (!value) return;
  try {
    out = value.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}.{}: invalid value '{}'", where, key, YAML::Dump(value)));
  }
}

template <typename T>
void read_optional(const YAML::Node& node, const char* key, std::optional<T>& out, const std::string& where) {
  if (!node[key]) return;
  T value{};
  read(node, key, value, where);
  out = value;
}

struct Shorthand {
  MethodKind kind;
  std::optional<HvpMode> hvp;
  std::optional<SolverKind> solver;
};

Shorthand resolve_shorthand(const std::string& name) {
  if (name == "smgd") return {MethodKind::kSmgd, {}, {}};
  if (name == "scalarization") return {MethodKind::kScalarization, {}, {}};
  if (name == "pc") return {MethodKind::kPc, {}, {}};
  if (name == "pc-gn-cg") return {MethodKind::kPc, HvpMode::kGnSum, SolverKind::kCg};
  if (name == "pc-gn-minres") return {MethodKind::kPc, HvpMode::kGnSum, SolverKind::kCr};
  if (name == "pc-hessian-cg" || name == "pc-exact-cg") return {MethodKind::kPc, HvpMode::kExact, SolverKind::kCg};
  if (name == "pc-hessian-minres" || name == "pc-exact-minres")
    return {MethodKind::kPc, HvpMode::kExact, SolverKind::kCr};
  throw ConfigError(fmt::format("unknown method '{}'", name));
}

MethodKind block_kind(const std::string& block) {
  if (block == "smgd") return MethodKind::kSmgd;
  if (block == "pc") return MethodKind::kPc;
  return MethodKind::kScalarization;
}

void parse_problem(const YAML::Node& node, ProblemSpec& spec) {
  const std::string where = "problem";
  reject_unknown(node, where,
                 {"name", "dimension", "seed", "separation", "samples", "features", "group_imbalance", "dataset"});
  read(node, "name", spec.name, where);
  read_optional(node, "dimension", spec.dimension, where);
  read(node, "seed", spec.seed, where);
  read(node, "separation", spec.separation, where);
  read(node, "samples", spec.samples, where);
  read(node, "features", spec.features, where);
  read(node, "group_imbalance", spec.group_imbalance, where);
  read(node, "dataset", spec.dataset, where);
}

void parse_mgd(const YAML::Node& node, MgdConfig& mgd, const std::string& where) {
  read(node, "step_size", mgd.step_size, where);
  read(node, "stationarity_tol", mgd.stationarity_tol, where);
}

void parse_pc(const YAML::Node& node, PcSettings& pc, const Shorthand& shorthand) {
  const std::string where = "pc";
  reject_unknown(node, where,
                 {"warm_start", "warm_start_steps", "warm_start_step", "warm_start_weight", "N", "K", "predictor_step", "corrector_steps",
                  "corrector_step_size", "solver", "hvp_mode", "damping", "tol", "max_iter", "record_residuals",
                  "beta", "random_beta", "stationarity_tol"});
  ExploreConfig& e = pc.explore;
  read(node, "warm_start_steps", pc.warm_start_steps, where);
  read(node, "warm_start_step", pc.warm_start_step, where);
  read(node, "warm_start_weight", pc.warm_start_weight, where);
  if (node["warm_start"]) {
    std::string s;
    read(node, "warm_start", s, where);
    pc.warm_start = warm_start_from_string(s);
  }
  read(node, "N", e.N, where);
  read(node, "K", e.K, where);
  read(node, "predictor_step", e.predictor_step, where);
  read(node, "corrector_steps", e.corrector_steps, where);
  read(node, "corrector_step_size", e.corrector_step_size, where);
  read(node, "tol", e.solver_config.tol, where);
  read(node, "max_iter", e.solver_config.max_iter, where);
  read(node, "record_residuals", e.solver_config.record_residuals, where);
  read(node, "random_beta", e.random_beta, where);
  read(node, "stationarity_tol", e.stationarity_tol, where);
  read_optional(node, "damping", e.hvp.damping, where);
  read(node, "beta", e.beta_directions, where);
  if (node["solver"]) {
    std::string s;
    read(node, "solver", s, where);
    const SolverKind kind = solver_kind_from_string(s);
    if (shorthand.solver && *shorthand.solver != kind)
      throw ConfigError(fmt::format("pc.solver '{}' conflicts with the method name", s));
    e.solver = kind;
  }
  if (node["hvp_mode"]) {
    std::string s;
    read(node, "hvp_mode", s, where);
    const HvpMode mode = hvp_mode_from_string(s);
    if (shorthand.hvp && *shorthand.hvp != mode)
      throw ConfigError(fmt::format("pc.hvp_mode '{}' conflicts with the method name", s));
    e.hvp.mode = mode;
  }
}

std::string hvp_label(HvpMode mode) {
  switch (mode) {
    case HvpMode::kExact: return "EXACT";
    case HvpMode::kFdExact: return "FD";
    case HvpMode::kGnRankOne: return "GN1";
    case HvpMode::kGnSum: return "GN";
  }
  return "?";
}

}  // namespace

std::string to_string(WarmStart w) { return w == WarmStart::kMgd ? "mgd" : "scalarized"; }

WarmStart warm_start_from_string(const std::string& s) {
  if (s == "mgd") return WarmStart::kMgd;
  if (s == "scalarized") return WarmStart::kScalarized;
  throw ConfigError(fmt::format("unknown warm start '{}' (expected mgd or scalarized)", s));
}

std::string ExperimentConfig::method_label() const {
  switch (method) {
    case MethodKind::kSmgd: return "SMGD";
    case MethodKind::kScalarization: return "SCALARIZATION";
    case MethodKind::kPc: return "PC-" + hvp_label(pc.explore.hvp.mode) + "-" + to_string(pc.explore.solver);
  }
  return "?";
}

void ExperimentConfig::validate() const {
  const ProblemSpec& p = problem;
  if (p.name != "quadratic" && p.name != "fonseca_fleming" && p.name != "fairness")
    throw ConfigError(fmt::format("unknown problem '{}'", p.name));
  if (p.dimension && *p.dimension == 0) throw ConfigError("problem.dimension must be >= 1");
  if (!(p.separation >= 0.0)) throw ConfigError("problem.separation must be >= 0");
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be >= 0");
  switch (method) {
    case MethodKind::kSmgd:
      if (smgd.init_count < 1) throw ConfigError("smgd.init_count must be >= 1");
      if (smgd.epochs < 0) throw ConfigError("smgd.epochs must be >= 0");
      smgd.mgd.validate();
      break;
    case MethodKind::kPc:
      if (pc.warm_start_steps < 0) throw ConfigError("pc.warm_start_steps must be >= 0");
      if (!(pc.warm_start_step > 0.0)) throw ConfigError("pc.warm_start_step must be > 0");
      if (!(pc.warm_start_weight >= 0.0)) throw ConfigError("pc.warm_start_weight must be >= 0");
      pc.explore.validate(2);
      if (is_gauss_newton(pc.explore.hvp.mode) && pc.explore.solver == SolverKind::kCg && pc.explore.hvp.damping &&
          *pc.explore.hvp.damping == 0.0)
        throw ConfigError("pc.damping must be > 0 for Gauss-Newton operators with CG");
      break;
    case MethodKind::kScalarization:
      if (scalarization.lambdas.empty()) throw ConfigError("scalarization.lambdas must not be empty");
      for (double l : scalarization.lambdas)
        if (!(l >= 0.0)) throw ConfigError("scalarization.lambdas must be >= 0");
      scalarization.inner.validate();
      break;
  }
}

void apply_method_shorthand(ExperimentConfig& config, const std::string& shorthand) {
  const Shorthand s = resolve_shorthand(shorthand);
  config.method = s.kind;
  if (s.hvp) config.pc.explore.hvp.mode = *s.hvp;
  if (s.solver) config.pc.explore.solver = *s.solver;
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("config is not valid YAML: {}", e.what()));
  }
  if (!root || root.IsNull()) throw ConfigError("config is empty");
  reject_unknown(root, "config",
                 {"problem", "method", "seed", "init_scale", "smgd", "pc", "scalarization", "output"});

  ExperimentConfig config;
  read(root, "seed", config.seed, "config");
  read(root, "init_scale", config.init_scale, "config");
  if (!root["problem"]) throw ConfigError("config must contain a problem section");
  parse_problem(root["problem"], config.problem);

  std::vector<std::string> blocks;
  for (const char* b : {"smgd", "pc", "scalarization"})
    if (root[b]) blocks.emplace_back(b);
  if (blocks.size() > 1) throw ConfigError("config must contain exactly one method block");

  Shorthand shorthand{MethodKind::kPc, {}, {}};
  if (root["method"]) {
    std::string name;
    read(root, "method", name, "config");
    shorthand = resolve_shorthand(name);
    apply_method_shorthand(config, name);
    if (!blocks.empty() && block_kind(blocks.front()) != shorthand.kind)
      throw ConfigError(fmt::format("method '{}' does not match the '{}' block", name, blocks.front()));
  } else if (!blocks.empty()) {
    config.method = block_kind(blocks.front());
  } else {
    throw ConfigError("config must name a method");
  }

  if (const YAML::Node n = root["smgd"]) {
    reject_unknown(n, "smgd", {"init_count", "epochs", "step_size", "stationarity_tol"});
    read(n, "init_count", config.smgd.init_count, "smgd");
    read(n, "epochs", config.smgd.epochs, "smgd");
    parse_mgd(n, config.smgd.mgd, "smgd");
  }
  if (const YAML::Node n = root["pc"]) parse_pc(n, config.pc, shorthand);
  if (const YAML::Node n = root["scalarization"]) {
    reject_unknown(n, "scalarization", {"lambdas", "step_size", "max_iters", "stationarity_tol"});
    read(n, "lambdas", config.scalarization.lambdas, "scalarization");
    read(n, "max_iters", config.scalarization.inner.max_iters, "scalarization");
    parse_mgd(n, config.scalarization.inner, "scalarization");
  }
  if (const YAML::Node n = root["output"]) {
    reject_unknown(n, "output", {"directory", "point_timing"});
    read(n, "directory", config.output.directory, "output");
    read(n, "point_timing", config.output.point_timing, "output");
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

nlohmann::json canonical_config(const ExperimentConfig& config) {
  using nlohmann::json;
  const ProblemSpec& p = config.problem;
  json problem = {{"name", p.name}, {"seed", p.seed}};
  if (p.name == "quadratic") {
    problem["dimension"] = p.dimension.value_or(50);
    problem["separation"] = p.separation;
  } else if (p.name == "fonseca_fleming") {
    problem["dimension"] = p.dimension.value_or(3);
  } else {
    problem["samples"] = p.samples;
    problem["features"] = p.features;
    problem["group_imbalance"] = p.group_imbalance;
    problem["dataset"] = p.dataset;
  }
  json doc = {{"problem", problem},
              {"method", config.method_label()},
              {"seed", config.seed},
              {"init_scale", config.init_scale},
              {"output", {{"point_timing", config.output.point_timing}}}};
  switch (config.method) {
    case MethodKind::kSmgd: {
      const SmgdSettings& s = config.smgd;
      doc["smgd"] = {{"init_count", s.init_count},
                     {"epochs", s.epochs},
                     {"step_size", s.mgd.step_size},
                     {"stationarity_tol", s.mgd.stationarity_tol}};
      break;
    }
    case MethodKind::kPc: {
      const ExploreConfig& e = config.pc.explore;
      doc["pc"] = {{"warm_start", to_string(config.pc.warm_start)},
                   {"warm_start_steps", config.pc.warm_start_steps},
                   {"warm_start_step", config.pc.warm_start_step},
                   {"warm_start_weight", config.pc.warm_start_weight},
                   {"N", e.N},
                   {"K", e.K},
                   {"predictor_step", e.predictor_step},
                   {"corrector_steps", e.corrector_steps},
                   {"corrector_step_size", e.corrector_step_size},
                   {"solver", to_string(e.solver)},
                   {"hvp_mode", to_string(e.hvp.mode)},
                   {"damping", e.hvp.damping ? json(*e.hvp.damping) : json("default")},
                   {"tol", e.solver_config.tol},
                   {"max_iter", e.solver_config.max_iter},
                   {"record_residuals", e.solver_config.record_residuals},
                   {"beta", e.resolved_betas(2)},
                   {"random_beta", e.random_beta},
                   {"stationarity_tol", e.stationarity_tol}};
      break;
    }
    case MethodKind::kScalarization: {
      const ScalarizationSettings& s = config.scalarization;
      doc["scalarization"] = {{"lambdas", s.lambdas},
                              {"step_size", s.inner.step_size},
                              {"max_iters", s.inner.max_iters},
                              {"stationarity_tol", s.inner.stationarity_tol}};
      break;
    }
  }
  return doc;
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical_config(config).dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace pareto_tracer
