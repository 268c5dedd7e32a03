#include "bmc/estimators.hpp"

#include "bmc/error.hpp"
#include "bmc/io.hpp"
#include "bmc/kernel.hpp"
#include "bmc/parallel.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

namespace bmc {

namespace {

constexpr double inv_2pi_3_2 = 0.0634936359342409697857633587; // (2 pi)^(-3/2)

void
require_bandwidth(double h, const char* name)
{
  require(std::isfinite(h) && h > 0.0, std::string(name) + " must be a positive finite bandwidth");
}

} // namespace

void
BandwidthTriple::validate() const
{
  require_bandwidth(h, "h");
  require_bandwidth(h0, "h0");
  require_bandwidth(h1, "h1");
}

TriangleEstimator::TriangleEstimator(const TreeSample& sample, Population population)
  : data_(triangle_columns(sample, population))
{
}

TriangleEstimator::TriangleEstimator(TriangleColumns columns)
  : data_(std::move(columns))
{
  require(data_.parent.size() == data_.child0.size() && data_.parent.size() == data_.child1.size(),
          "triangle columns must have equal lengths");
}

double
TriangleEstimator::mu_hat(double h, double x) const
{
  require_bandwidth(h, "h");
  require(!data_.empty(), "estimator needs a nonempty index set");
  const double inv_h = 1.0 / h;
  const auto& xs = data_.parent;
  const double sum = pairwise_sum(xs.size(), [&](std::size_t i) {
    const double t = (x - xs[i]) * inv_h;
    return std::exp(-0.5 * t * t);
  });
  return GaussianKernel::inv_sqrt_2pi * sum / (static_cast<double>(xs.size()) * h);
}

double
TriangleEstimator::mu_tri_hat(const BandwidthTriple& bw, double x, double x0, double x1) const
{
  bw.validate();
  require(!data_.empty(), "estimator needs a nonempty index set");
  const double ih = 1.0 / bw.h;
  const double ih0 = 1.0 / bw.h0;
  const double ih1 = 1.0 / bw.h1;
  const double sum = pairwise_sum(data_.size(), [&](std::size_t i) {
    const double t = (x - data_.parent[i]) * ih;
    const double t0 = (x0 - data_.child0[i]) * ih0;
    const double t1 = (x1 - data_.child1[i]) * ih1;
    return std::exp(-0.5 * (t * t + t0 * t0 + t1 * t1));
  });
  return inv_2pi_3_2 * sum / (static_cast<double>(data_.size()) * bw.product());
}

double
TriangleEstimator::p_hat(const BandwidthTriple& numerator, double h_denominator, double x,
                         double x0, double x1) const
{
  const double den = mu_hat(h_denominator, x);
  const double num = mu_tri_hat(numerator, x, x0, x1);
  if (!(den >= degeneracy_threshold))
    return 0.0;
  return num / den;
}

double
mu_hat(const TreeSample& sample, Population population, double h, double x)
{
  return TriangleEstimator(sample, population).mu_hat(h, x);
}

double
mu_tri_hat(const TreeSample& sample, Population population, const BandwidthTriple& bw, double x,
           double x0, double x1)
{
  return TriangleEstimator(sample, population).mu_tri_hat(bw, x, x0, x1);
}

double
p_hat(const TreeSample& sample, Population population, const BandwidthTriple& numerator,
      double h_denominator, double x, double x0, double x1)
{
  return TriangleEstimator(sample, population).p_hat(numerator, h_denominator, x, x0, x1);
}

const char*
to_string(EstimatorKind kind)
{
  switch (kind) {
    case EstimatorKind::mu:
      return "mu";
    case EstimatorKind::mu_triangle:
      return "mu_tri";
    case EstimatorKind::transition:
      return "p";
  }
  return "?";
}

EstimatorKind
parse_estimator_kind(const std::string& text)
{
  if (text == "mu")
    return EstimatorKind::mu;
  if (text == "mu_tri")
    return EstimatorKind::mu_triangle;
  if (text == "p")
    return EstimatorKind::transition;
  throw InvalidArgument("unknown estimator '" + text + "' (expected mu|mu_tri|p)");
}

DensityEstimate
evaluate_on_grid(const TriangleEstimator& estimator, const EstimatorSpec& spec,
                 const std::vector<GridPoint>& grid, unsigned threads)
{
  require(!grid.empty(), "evaluation grid must be nonempty");
  if (spec.kind != EstimatorKind::mu_triangle)
    require_bandwidth(spec.denominator_h, "denominator bandwidth");
  if (spec.kind != EstimatorKind::mu)
    spec.numerator.validate();

  DensityEstimate out;
  out.spec = spec;
  out.points = grid;
  out.values.resize(grid.size());
  out.sample_size = estimator.size();
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const auto& p = grid[i];
    switch (spec.kind) {
      case EstimatorKind::mu:
        out.values[i] = estimator.mu_hat(spec.denominator_h, p[0]);
        break;
      case EstimatorKind::mu_triangle:
        out.values[i] = estimator.mu_tri_hat(spec.numerator, p[0], p[1], p[2]);
        break;
      case EstimatorKind::transition:
        out.values[i] = estimator.p_hat(spec.numerator, spec.denominator_h, p[0], p[1], p[2]);
        break;
    }
  });
  return out;
}

DensityEstimate
evaluate_on_grid(const TreeSample& sample, const EstimatorSpec& spec,
                 const std::vector<GridPoint>& grid, unsigned threads)
{
  return evaluate_on_grid(TriangleEstimator(sample, spec.population), spec, grid, threads);
}

void
write_density_estimate(const DensityEstimate& estimate, const std::string& csv_path,
                       const std::string& json_path)
{
  const bool one_dim = estimate.spec.kind == EstimatorKind::mu;
  std::ostringstream csv;
  csv << (one_dim ? "x,value\n" : "x,x0,x1,value\n");
  for (std::size_t i = 0; i < estimate.points.size(); ++i) {
    const auto& p = estimate.points[i];
    csv << io::format_double(p[0]);
    if (!one_dim)
      csv << ',' << io::format_double(p[1]) << ',' << io::format_double(p[2]);
    csv << ',' << io::format_double(estimate.values[i]) << '\n';
  }

  nlohmann::ordered_json meta;
  meta["estimator"] = to_string(estimate.spec.kind);
  meta["population"] = to_string(estimate.spec.population);
  meta["sample_size"] = estimate.sample_size;
  meta["points"] = estimate.points.size();
  if (estimate.spec.kind != EstimatorKind::mu)
    meta["numerator_bandwidth"] = {
      estimate.spec.numerator.h, estimate.spec.numerator.h0, estimate.spec.numerator.h1
    };
  if (estimate.spec.kind != EstimatorKind::mu_triangle)
    meta["denominator_bandwidth"] = estimate.spec.denominator_h;

  io::atomic_write_file(csv_path, csv.str());
  io::atomic_write_file(json_path, meta.dump(2) + "\n");
}

} // namespace bmc
