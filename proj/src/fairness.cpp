#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "pareto_tracer/kernels.hpp"
#include "pareto_tracer/problems.hpp"

namespace pareto_tracer {
namespace {

constexpr std::size_t kSampleChunk = 64;

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

// log(1 + exp(s)) without overflow.
double softplus(double s) { return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

double parse_double(const std::string& cell, std::size_t line) {
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(fmt::format("fairness csv line {}: cannot parse '{}'", line, cell));
  return value;
}

void check_groups(const FairnessDataset& data) {
  std::size_t ones = 0;
  for (int g : data.group) ones += g == 1 ? 1 : 0;
  if (ones == 0 || ones == data.samples)
    throw ConfigError("fairness dataset: one of the groups is empty");
}

}  // namespace

FairnessDataset generate_fairness_dataset(std::uint64_t seed, std::size_t samples, std::size_t features,
                                          double group_imbalance) {
  if (samples < 20) throw ConfigError("generate_fairness_dataset: samples must be >= 20");
  if (features < 1) throw ConfigError("generate_fairness_dataset: features must be >= 1");
  if (!(group_imbalance >= 0.0 && group_imbalance <= 1.0))
    throw ConfigError("generate_fairness_dataset: group_imbalance must lie in [0, 1]");

  std::mt19937_64 rng = make_rng(seed, RngStream::kDataset);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  // Ground-truth scorer with logit scale about 3.
  Vector truth(features);
  for (double& w : truth) w = normal(rng);
  const double norm = kernels::norm2(truth);
  for (double& w : truth) w *= norm > 0.0 ? 3.0 / norm : 0.0;

  FairnessDataset data;
  data.samples = samples;
  data.features = features;
  data.x.resize(samples * features);
  data.label.resize(samples);
  data.group.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const int group = uniform(rng) < 0.4 ? 1 : 0;
    double logit = 0.0;
    for (std::size_t j = 0; j < features; ++j) {
      double v = normal(rng);
      if (j == 0 && group == 1) v += 0.5;
      data.x[i * features + j] = v;
      logit += truth[j] * v;
    }
    int label = uniform(rng) < sigmoid(logit) ? 1 : 0;
    // Always draw so the stream does not depend on the label.
    const double flip = uniform(rng);
    if (group == 1 && label == 0 && flip < group_imbalance) label = 1;
    data.label[i] = label;
    data.group[i] = group;
  }
  check_groups(data);
  return data;
}

void write_fairness_csv(const FairnessDataset& data, std::ostream& out) {
  for (std::size_t j = 0; j < data.features; ++j) out << "x_" << j + 1 << ',';
  out << "label,group\n";
  for (std::size_t i = 0; i < data.samples; ++i) {
    for (std::size_t j = 0; j < data.features; ++j) out << fmt::format("{:.17g},", data.x[i * data.features + j]);
    out << data.label[i] << ',' << data.group[i] << '\n';
  }
}

FairnessDataset read_fairness_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("fairness csv: missing header");
  std::size_t columns = 1;
  for (char c : line) columns += c == ',' ? 1 : 0;
  if (columns < 3) throw ConfigError("fairness csv: need at least one feature column plus label and group");

  FairnessDataset data;
  data.features = columns - 2;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(parse_double(cell, line_no));
    if (values.size() != columns)
      throw ConfigError(fmt::format("fairness csv line {}: expected {} columns, got {}", line_no, columns,
                                    values.size()));
    data.x.insert(data.x.end(), values.begin(), values.begin() + static_cast<std::ptrdiff_t>(data.features));
    const double label = values[data.features];
    const double group = values[data.features + 1];
    if ((label != 0.0 && label != 1.0) || (group != 0.0 && group != 1.0))
      throw ConfigError(fmt::format("fairness csv line {}: label and group must be 0 or 1", line_no));
    data.label.push_back(static_cast<int>(label));
    data.group.push_back(static_cast<int>(group));
  }
  data.samples = data.label.size();
  if (data.samples == 0) throw ConfigError("fairness csv: no rows");
  check_groups(data);
  return data;
}

SyntheticFairness::SyntheticFairness(FairnessDataset data, Execution execution)
    : data_(std::move(data)), execution_(execution) {
  if (data_.x.size() != data_.samples * data_.features || data_.label.size() != data_.samples ||
      data_.group.size() != data_.samples)
    throw std::invalid_argument("SyntheticFairness: inconsistent dataset shape");
  check_groups(data_);
  for (int g : data_.group) count_[g] += 1.0;
}

// Accumulator layout: [S0, S1 | G0 (n), G1 (n) | HV0 (n), HV1 (n)] where S_g is
// the summed loss, G_g the summed gradient and HV_g the summed Hessian product
// of group g.
Vector SyntheticFairness::sums(std::span<const double> x, std::span<const double> v, bool want_grad,
                               bool want_hvp) const {
  const std::size_t d = data_.features;
  const std::size_t n = d + 1;
  const std::size_t width = 2 + (want_grad ? 2 * n : 0) + (want_hvp ? 2 * n : 0);
  auto body = [&](std::size_t begin, std::size_t end, std::span<double> acc) {
    for (std::size_t i = begin; i < end; ++i) {
      const double* a = data_.x.data() + i * d;
      const int g = data_.group[i];
      const double y = data_.label[i];
      double s = x[d];
      for (std::size_t j = 0; j < d; ++j) s += x[j] * a[j];
      acc[g] += softplus(s) - y * s;
      if (!want_grad) continue;
      const double p = sigmoid(s);
      double* grad = acc.data() + 2 + g * n;
      const double r = p - y;
      for (std::size_t j = 0; j < d; ++j) grad[j] += r * a[j];
      grad[d] += r;
      if (!want_hvp) continue;
      double zv = v[d];
      for (std::size_t j = 0; j < d; ++j) zv += a[j] * v[j];
      const double c = p * (1.0 - p) * zv;
      double* hv = acc.data() + 2 + 2 * n + g * n;
      for (std::size_t j = 0; j < d; ++j) hv[j] += c * a[j];
      hv[d] += c;
    }
  };
  if (execution_ == Execution::kSerial) return kernels::serial::chunked_sum(data_.samples, kSampleChunk, width, body);
  return kernels::chunked_sum(data_.samples, kSampleChunk, width, body);
}

std::pair<double, double> SyntheticFairness::group_losses(std::span<const double> x) const {
  const Vector s = sums(x, {}, false, false);
  return {s[0] / count_[0], s[1] / count_[1]};
}

ObjectiveVec SyntheticFairness::evaluate(std::span<const double> x) const {
  const Vector s = sums(x, {}, false, false);
  const double gap = s[0] / count_[0] - s[1] / count_[1];
  return {(s[0] + s[1]) / static_cast<double>(data_.samples), gap * gap};
}

GradientSet SyntheticFairness::gradients(std::span<const double> x) const {
  const std::size_t n = dimension();
  const Vector s = sums(x, {}, true, false);
  const double gap = s[0] / count_[0] - s[1] / count_[1];
  const double* g0 = s.data() + 2;
  const double* g1 = g0 + n;
  GradientSet out(2, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.row(0)[j] = (g0[j] + g1[j]) / static_cast<double>(data_.samples);
    out.row(1)[j] = 2.0 * gap * (g0[j] / count_[0] - g1[j] / count_[1]);
  }
  return out;
}

// H1 v = (HV0 + HV1) / s
// H2 v = 2 <delta, v> delta + 2 gap (HV0 / n0 - HV1 / n1),  delta = G0 / n0 - G1 / n1
Vector SyntheticFairness::exact_hvp(std::span<const double> x, std::span<const double> weights,
                                    std::span<const double> v) const {
  const std::size_t n = dimension();
  const Vector s = sums(x, v, true, true);
  const double gap = s[0] / count_[0] - s[1] / count_[1];
  const double* g0 = s.data() + 2;
  const double* g1 = g0 + n;
  const double* h0 = g1 + n;
  const double* h1 = h0 + n;
  Vector delta(n);
  for (std::size_t j = 0; j < n; ++j) delta[j] = g0[j] / count_[0] - g1[j] / count_[1];
  const double dv = kernels::dot(delta, v);
  Vector out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double h1v = (h0[j] + h1[j]) / static_cast<double>(data_.samples);
    const double h2v = 2.0 * dv * delta[j] + 2.0 * gap * (h0[j] / count_[0] - h1[j] / count_[1]);
    out[j] = weights[0] * h1v + weights[1] * h2v;
  }
  return out;
}

}  // namespace pareto_tracer
