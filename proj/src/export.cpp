#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "pareto_tracer/harness.hpp"

namespace pareto_tracer {
namespace {

using nlohmann::json;

std::string number(double v) { return fmt::format("{:.17g}", v); }

json cost_to_json(const RunRecord& r) {
  return {{"method", r.method},
          {"problem", r.problem},
          {"seed", r.seed},
          {"wall_time_ms", r.wall_time_ms},
          {"gradient_evals", r.gradient_evals},
          {"objective_evals", r.objective_evals},
          {"hvp_applies", r.hvp_applies},
          {"solver_iterations_total", r.solver_iterations_total},
          {"points_generated", r.points_generated},
          {"predictor_fallbacks", r.predictor_fallbacks}};
}

RunRecord cost_from_json(const json& j) {
  RunRecord r;
  r.method = j.at("method").get<std::string>();
  r.problem = j.at("problem").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.wall_time_ms = j.at("wall_time_ms").get<std::int64_t>();
  r.gradient_evals = j.at("gradient_evals").get<std::int64_t>();
  r.objective_evals = j.at("objective_evals").get<std::int64_t>();
  r.hvp_applies = j.at("hvp_applies").get<std::int64_t>();
  r.solver_iterations_total = j.at("solver_iterations_total").get<std::int64_t>();
  r.points_generated = j.at("points_generated").get<std::int64_t>();
  r.predictor_fallbacks = j.at("predictor_fallbacks").get<std::int64_t>();
  return r;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace

void write_points_csv(const ExperimentConfig& config, const MethodResult& result, std::ostream& out) {
  const std::size_t m = result.raw_points.empty() ? 2 : result.raw_points.front().f.size();
  out << "# config_hash=" << config_hash(config) << '\n';
  out << "point_id,parent_id,method_tag";
  for (std::size_t i = 1; i <= m; ++i) out << ",f_" << i;
  out << ",solver_iters,grad_evals_cum,wall_ms_cum\n";
  for (const ParetoPoint& p : result.raw_points) {
    out << p.point_id << ',' << (p.parent_id ? std::to_string(*p.parent_id) : "") << ',' << to_string(p.method_tag);
    for (double f : p.f) out << ',' << number(f);
    out << ',' << p.solver_iters << ',' << p.grad_evals_cum << ','
        << (config.output.point_timing ? fmt::format("{:.3f}", p.wall_ms_cum) : "NA") << '\n';
  }
}

void write_residuals_csv(const ExperimentConfig& config, const MethodResult& result, std::ostream& out) {
  out << "# config_hash=" << config_hash(config) << '\n';
  out << "solve_id,iteration,residual_norm\n";
  for (const SolveRecord& s : result.solves) {
    if (!s.report.residual_history) continue;
    const Vector& h = *s.report.residual_history;
    for (std::size_t k = 0; k < h.size(); ++k) out << s.solve_id << ',' << k + 1 << ',' << number(h[k]) << '\n';
  }
}

json metrics_to_json(const FrontMetrics& metrics) {
  return {{"hypervolume", metrics.hypervolume},
          {"generational_distance",
           metrics.generational_distance ? json(*metrics.generational_distance) : json(nullptr)},
          {"spread", metrics.spread},
          {"point_count", metrics.point_count},
          {"reference_point", metrics.reference_point}};
}

json archive_to_json(const ExperimentConfig& config, const MethodResult& result) {
  json points = json::array();
  for (const ParetoPoint& p : result.raw_points) {
    json jp = {{"point_id", p.point_id},
               {"parent_id", p.parent_id ? json(*p.parent_id) : json(nullptr)},
               {"method_tag", to_string(p.method_tag)},
               {"x", p.x},
               {"f", p.f},
               {"solver_iters", p.solver_iters},
               {"grad_evals_cum", p.grad_evals_cum}};
    if (config.output.point_timing) jp["wall_ms_cum"] = p.wall_ms_cum;
    points.push_back(std::move(jp));
  }
  json ids = json::array();
  for (const ParetoPoint& p : result.archive) ids.push_back(p.point_id);
  return {{"config", canonical_config(config)},
          {"config_hash", config_hash(config)},
          {"complete", result.complete},
          {"error", result.error},
          {"cost", cost_to_json(result.cost)},
          {"points", std::move(points)},
          {"archive_ids", std::move(ids)}};
}

ArchiveDocument archive_from_json(const json& doc) {
  ArchiveDocument out;
  try {
    for (const json& jp : doc.at("points")) {
      ParetoPoint p;
      p.point_id = jp.at("point_id").get<std::int64_t>();
      if (!jp.at("parent_id").is_null()) p.parent_id = jp.at("parent_id").get<std::int64_t>();
      p.method_tag = method_tag_from_string(jp.at("method_tag").get<std::string>());
      p.x = jp.at("x").get<ParamVec>();
      p.f = jp.at("f").get<ObjectiveVec>();
      p.solver_iters = jp.at("solver_iters").get<int>();
      p.grad_evals_cum = jp.at("grad_evals_cum").get<std::int64_t>();
      if (jp.contains("wall_ms_cum")) p.wall_ms_cum = jp.at("wall_ms_cum").get<double>();
      out.points.push_back(std::move(p));
    }
    out.archive_ids = doc.at("archive_ids").get<std::vector<std::int64_t>>();
    out.cost = cost_from_json(doc.at("cost"));
  } catch (const json::exception& e) {
    throw Error(fmt::format("malformed archive document: {}", e.what()));
  }
  return out;
}

void write_run_files(const ExperimentConfig& config, const MethodResult& result, const FrontMetrics& metrics) {
  const std::filesystem::path dir = config.output.directory;
  std::filesystem::create_directories(dir);
  {
    std::ofstream out = open_output(dir / "points.csv");
    write_points_csv(config, result, out);
  }
  open_output(dir / "archive.json") << archive_to_json(config, result).dump(2) << '\n';
  open_output(dir / "metrics.json") << metrics_to_json(metrics).dump(2) << '\n';
  if (config.method == MethodKind::kPc) {
    std::ofstream out = open_output(dir / "residuals.csv");
    write_residuals_csv(config, result, out);
  }
  std::ofstream log = open_output(dir / "run.log");
  log << "config_hash " << config_hash(config) << '\n';
  log << "method " << config.method_label() << " on " << config.problem.name << ", seed " << config.seed << '\n';
  for (const std::string& line : result.log) log << line << '\n';
  const RunRecord& c = result.cost;
  log << fmt::format("cost: {} gradient evals, {} objective evals, {} hvp applies, {} solver iterations, {} ms\n",
                     c.gradient_evals, c.objective_evals, c.hvp_applies, c.solver_iterations_total, c.wall_time_ms);
  log << fmt::format("front: {} points, hypervolume {:.10g}, spread {:.10g}", metrics.point_count,
                     metrics.hypervolume, metrics.spread);
  if (metrics.generational_distance) log << fmt::format(", generational distance {:.6e}", *metrics.generational_distance);
  log << '\n' << (result.complete ? "status ok" : "status failed: " + result.error) << '\n';
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::unique_ptr<MooProblem> problem = make_problem(config.problem);
  ExperimentOutcome outcome;
  outcome.result = run_method(config, *problem);

  const std::vector<ObjectiveVec> front = objectives_of(outcome.result.archive);
  const std::optional<std::vector<ObjectiveVec>> truth = reference_front(config.problem);
  std::vector<std::span<const ObjectiveVec>> pool{front};
  if (truth) pool.emplace_back(*truth);
  if (!front.empty()) {
    const ObjectiveVec reference = shared_reference_point(pool);
    outcome.metrics = compute_front_metrics(front, reference, truth ? std::span<const ObjectiveVec>(*truth)
                                                                    : std::span<const ObjectiveVec>{});
  }
  write_run_files(config, outcome.result, outcome.metrics);
  if (!outcome.result.complete) throw NumericalError(outcome.result.error);
  return outcome;
}

void write_summary_csv(const Comparison& comparison, std::ostream& out) {
  std::uint64_t h = 14695981039346656037ull;
  for (const SummaryRow& row : comparison.rows)
    for (unsigned char c : row.config_hash) {
      h ^= c;
      h *= 1099511628211ull;
    }
  out << fmt::format("# config_hash={:016x}\n", h);
  if (!comparison.reference_point.empty())
    out << "# reference_point=" << number(comparison.reference_point[0]) << ' '
        << number(comparison.reference_point[1]) << '\n';
  out << fmt::format(
      "# evals_to_reach: gradient evaluations until the front's hypervolume first reaches {:.0f}% of the {} "
      "hypervolume (target {:.10g}); NA if never reached\n",
      100.0 * kReachFraction, comparison.reach_basis, comparison.reach_target);
  out << "method,problem,seed,hypervolume,generational_distance,spread,point_count,gradient_evals,hvp_applies,"
         "solver_iterations,wall_time_ms,evals_to_reach,config_hash\n";
  for (const SummaryRow& row : comparison.rows) {
    const FrontMetrics& m = row.metrics;
    out << row.label << ',' << row.cost.problem << ',' << row.cost.seed << ',' << number(m.hypervolume) << ','
        << (m.generational_distance ? number(*m.generational_distance) : "NA") << ',' << number(m.spread) << ','
        << m.point_count << ',' << row.cost.gradient_evals << ',' << row.cost.hvp_applies << ','
        << row.cost.solver_iterations_total << ',' << row.cost.wall_time_ms << ','
        << (row.evals_to_reach ? std::to_string(*row.evals_to_reach) : "NA") << ',' << row.config_hash << '\n';
  }
}

}  // namespace pareto_tracer
