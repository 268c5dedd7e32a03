#include "bmc/clt_harness.hpp"

#include "bmc/bandwidth_cv.hpp"
#include "bmc/bandwidth_rot.hpp"
#include "bmc/error.hpp"
#include "bmc/io.hpp"
#include "bmc/oracle.hpp"
#include "bmc/parallel.hpp"
#include "bmc/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bmc {

using ordered_json = nlohmann::ordered_json;
using io::atomic_write_file;
using io::format_double;

const char*
to_string(SelectorKind kind)
{
  switch (kind) {
    case SelectorKind::fixed:
      return "fixed";
    case SelectorKind::cv:
      return "cv";
    case SelectorKind::rot:
      return "rot";
  }
  return "?";
}

SelectorKind
parse_selector_kind(const std::string& text)
{
  if (text == "fixed" || text == "FIXED")
    return SelectorKind::fixed;
  if (text == "cv" || text == "CV")
    return SelectorKind::cv;
  if (text == "rot" || text == "ROT")
    return SelectorKind::rot;
  throw InvalidArgument("unknown selector '" + text + "' (expected fixed, cv, rot)");
}

void
Selector::validate() const
{
  if (kind == SelectorKind::fixed)
    require(std::isfinite(gamma) && gamma > 0.0 && gamma < 1.0 / 3.0,
            "fixed selector needs gamma in (0, 1/3)");
  if (kind == SelectorKind::cv) {
    require(folds >= 2, "cv selector needs at least 2 folds");
    for (std::size_t j = 0; j < grid.size(); ++j) {
      require(grid[j] > 0.0 && grid[j] <= 1.0, "cv grid values must lie in (0, 1]");
      require(j == 0 || grid[j] > grid[j - 1], "cv grid must be strictly increasing");
    }
  }
}

void
ExperimentSpec::validate() const
{
  model.validate();
  require(!n_list.empty(), "n_list must be nonempty");
  for (int n : n_list)
    require(n >= 1 && n <= 24, "depths in n_list must lie in [1, 24]");
  require(replications >= 1, "replications must be >= 1");
  for (double v : point)
    require(std::isfinite(v), "evaluation point must be finite");
  selector.validate();
}

namespace {

struct Bandwidths
{
  BandwidthTriple numerator;
  double denominator = 1.0;
};

Bandwidths
select_bandwidths(const TreeSample& sample, const Selector& selector, std::uint64_t seed,
                  unsigned threads)
{
  const int n = sample.depth();
  switch (selector.kind) {
    case SelectorKind::fixed: {
      const double h = std::pow(2.0, -n * selector.gamma);
      return { BandwidthTriple::uniform(h), h };
    }
    case SelectorKind::cv: {
      const auto grid = selector.grid.empty() ? default_cv_grid(n) : selector.grid;
      const auto res = cv_select(sample, selector.folds, grid, derive_seed(seed, 0xc5), threads);
      return { BandwidthTriple::uniform(res.h_N_hat), res.h_D_hat };
    }
    case SelectorKind::rot: {
      const auto sel = rot_select(sample);
      return { sel.numerator(), sel.h_D_hat };
    }
  }
  throw InvalidArgument("unknown selector");
}

double
normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double
median(std::vector<double> v)
{
  if (v.empty())
    return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

ExperimentReport
run_clt(const ExperimentSpec& spec, unsigned threads, CltStatistic statistic)
{
  spec.validate();
  const SymmetricBarParams sym = as_symmetric(spec.model);
  const auto [x, x0, x1] = spec.point;
  const double truth = statistic == CltStatistic::transition
                         ? transition_density_p(spec.model, x, x0, x1)
                         : mu_triangle(sym, x, x0, x1);
  const double sigma2 = true_variance_clt(sym, x, x0, x1, statistic, spec.population);
  const double sigma = std::sqrt(sigma2);

  ExperimentReport report;
  report.statistic = to_string(statistic);
  report.spec = spec;
  const std::size_t reps = spec.replications;
  report.rows.resize(spec.n_list.size() * reps);

  for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni) {
    const int n = spec.n_list[ni];
    const double size = static_cast<double>(population_size(n, spec.population));
    parallel_for(reps, threads, [&](std::size_t r) {
      const std::uint64_t seed = derive_seed(spec.seed, r);
      const auto sample = simulate(spec.model, n, InitSpec::stationary(), seed, 1);
      const auto bw = select_bandwidths(sample, spec.selector, seed, 1);
      const TriangleEstimator est(sample, spec.population);
      const double value = statistic == CltStatistic::transition
                             ? est.p_hat(bw.numerator, bw.denominator, x, x0, x1)
                             : est.mu_tri_hat(bw.numerator, x, x0, x1);
      ExperimentRow row;
      row.seed = seed;
      row.replication = r;
      row.n = n;
      row.h_used = bw.numerator.h;
      row.h_product = bw.numerator.product();
      row.h_denominator = bw.denominator;
      row.estimate = value;
      row.standardized = std::sqrt(size * row.h_product) * (value - truth) / sigma;
      report.rows[ni * reps + r] = row;
    });

    std::vector<double> z(reps), err(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      z[r] = report.rows[ni * reps + r].standardized;
      err[r] = std::abs(report.rows[ni * reps + r].estimate - truth);
    }
    auto s = summarize(z);
    s.n = n;
    s.truth = truth;
    s.sigma2 = sigma2;
    s.median_abs_error = median(err);
    report.summaries.push_back(s);
  }
  return report;
}

} // namespace

ExperimentReport
run_clt_p_hat(const ExperimentSpec& spec, unsigned threads)
{
  return run_clt(spec, threads, CltStatistic::transition);
}

ExperimentReport
run_clt_mu_tri(const ExperimentSpec& spec, unsigned threads)
{
  return run_clt(spec, threads, CltStatistic::mu_triangle);
}

ExperimentSummary
summarize(const std::vector<double>& z)
{
  ExperimentSummary s;
  s.count = z.size();
  if (z.empty())
    return s;
  const double n = static_cast<double>(z.size());
  s.mean = pairwise_sum(z.size(), [&](std::size_t i) { return z[i]; }) / n;
  auto central = [&](int p) {
    return pairwise_sum(z.size(), [&](std::size_t i) { return std::pow(z[i] - s.mean, p); }) / n;
  };
  const double m2 = central(2);
  s.variance = z.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
  if (m2 > 0.0) {
    s.skewness = central(3) / std::pow(m2, 1.5);
    s.excess_kurtosis = central(4) / (m2 * m2) - 3.0;
  }
  std::vector<double> sorted = z;
  std::sort(sorted.begin(), sorted.end());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i]);
    d = std::max({ d, (i + 1) / n - f, f - i / n });
  }
  s.ks_distance = d;
  return s;
}

void
write_report_csv(const ExperimentReport& report, const std::string& path)
{
  std::ostringstream out;
  out << "seed,replication,n,h_used,h_product,h_denominator,estimate,standardized\n";
  for (const auto& r : report.rows)
    out << r.seed << ',' << r.replication << ',' << r.n << ',' << format_double(r.h_used) << ','
        << format_double(r.h_product) << ',' << format_double(r.h_denominator) << ','
        << format_double(r.estimate) << ',' << format_double(r.standardized) << '\n';
  atomic_write_file(path, out.str());
}

namespace {

ordered_json
model_json(const BarParams& p)
{
  return { { "a0", p.a0 }, { "a1", p.a1 }, { "b0", p.b0 },
           { "b1", p.b1 }, { "sigma", p.sigma }, { "rho", p.rho } };
}

} // namespace

std::string
report_json(const ExperimentReport& report)
{
  const auto& spec = report.spec;
  ordered_json selector = { { "kind", to_string(spec.selector.kind) } };
  if (spec.selector.kind == SelectorKind::fixed)
    selector["gamma"] = spec.selector.gamma;
  if (spec.selector.kind == SelectorKind::cv) {
    selector["folds"] = spec.selector.folds;
    selector["grid"] = spec.selector.grid;
  }
  ordered_json doc;
  doc["statistic"] = report.statistic;
  doc["model"] = model_json(spec.model);
  doc["n_list"] = spec.n_list;
  doc["replications"] = spec.replications;
  doc["point"] = spec.point;
  doc["population"] = to_string(spec.population);
  doc["selector"] = selector;
  doc["seed"] = spec.seed;
  doc["init"] = "stationary";
  ordered_json summaries = ordered_json::array();
  for (const auto& s : report.summaries)
    summaries.push_back({ { "n", s.n },
                          { "count", s.count },
                          { "truth", s.truth },
                          { "sigma2", s.sigma2 },
                          { "mean", s.mean },
                          { "variance", s.variance },
                          { "skewness", s.skewness },
                          { "excess_kurtosis", s.excess_kurtosis },
                          { "ks_distance", s.ks_distance },
                          { "median_abs_error", s.median_abs_error } });
  doc["summary"] = summaries;
  return doc.dump(2) + "\n";
}

void
write_report_json(const ExperimentReport& report, const std::string& path)
{
  atomic_write_file(path, report_json(report));
}

BarParams
figure_case_params(FigureCase c)
{
  return c == FigureCase::case1 ? BarParams{ 0.7, 0.5, 0.0, 0.0, 1.0, 0.0 }
                                : BarParams{ 1.2, 0.7, 0.0, 0.0, 1.0, 0.0 };
}

FigureCase
parse_figure_case(const std::string& text)
{
  if (text == "case1" || text == "CASE1" || text == "1")
    return FigureCase::case1;
  if (text == "case2" || text == "CASE2" || text == "2")
    return FigureCase::case2;
  throw InvalidArgument("unknown figure case '" + text + "' (expected case1, case2)");
}

const char*
to_string(FigureCase c)
{
  return c == FigureCase::case1 ? "case1" : "case2";
}

void
FigureSpec::validate() const
{
  require(selector != SelectorKind::fixed, "figure reproduction uses the cv or rot selector");
  require(!n_list.empty(), "n_list must be nonempty");
  for (int n : n_list)
    require(n >= 2 && n <= 22, "figure depths must lie in [2, 22]");
  require(seeds >= 1, "seeds must be >= 1");
  require(std::isfinite(x) && std::isfinite(lo) && std::isfinite(hi) && lo < hi,
          "slice range must satisfy lo < hi");
  require(grid_points >= 2, "grid_points must be >= 2");
  require(folds >= 2, "folds must be >= 2");
  require(std::isfinite(root), "root value must be finite");
}

FigureResult
run_figure_reproduction(const FigureSpec& spec, unsigned threads)
{
  spec.validate();
  const BarParams model = figure_case_params(spec.figure_case);
  Selector selector;
  selector.kind = spec.selector;
  selector.folds = spec.folds;
  selector.grid = spec.cv_grid;
  selector.validate();

  std::vector<GridPoint> points;
  const int g = spec.grid_points;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      points.push_back({ spec.x, spec.lo + (spec.hi - spec.lo) * i / (g - 1),
                         spec.lo + (spec.hi - spec.lo) * j / (g - 1) });

  FigureResult result;
  result.spec = spec;
  for (int n : spec.n_list) {
    double total = 0.0;
    for (std::size_t s = 0; s < spec.seeds; ++s) {
      FigureSlice slice;
      slice.n = n;
      slice.seed = derive_seed(spec.seed, s);
      const auto sample = simulate(model, n, InitSpec::dirac(spec.root), slice.seed, threads);
      const auto bw = select_bandwidths(sample, selector, slice.seed, threads);
      slice.numerator = bw.numerator;
      slice.h_denominator = bw.denominator;
      EstimatorSpec est;
      est.kind = EstimatorKind::transition;
      est.population = Population::generation;
      est.numerator = bw.numerator;
      est.denominator_h = bw.denominator;
      const auto values = evaluate_on_grid(sample, est, points, threads);
      slice.points = points;
      slice.estimate = values.values;
      slice.truth.resize(points.size());
      for (std::size_t i = 0; i < points.size(); ++i) {
        slice.truth[i] = transition_density_p(model, points[i][0], points[i][1], points[i][2]);
        slice.sup_error = std::max(slice.sup_error, std::abs(slice.estimate[i] - slice.truth[i]));
      }
      total += slice.sup_error;
      result.slices.push_back(std::move(slice));
    }
    result.mean_sup_error.push_back(total / static_cast<double>(spec.seeds));
  }
  return result;
}

std::vector<std::string>
write_figure_outputs(const FigureResult& result, const std::string& prefix, bool gnuplot)
{
  const auto& spec = result.spec;
  std::vector<std::string> written;
  for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni) {
    const int n = spec.n_list[ni];
    std::ostringstream out;
    out << "seed,x,x0,x1,estimate,truth,abs_error,sup_error\n";
    for (const auto& slice : result.slices) {
      if (slice.n != n)
        continue;
      for (std::size_t i = 0; i < slice.points.size(); ++i)
        out << slice.seed << ',' << format_double(slice.points[i][0]) << ','
            << format_double(slice.points[i][1]) << ',' << format_double(slice.points[i][2]) << ','
            << format_double(slice.estimate[i]) << ',' << format_double(slice.truth[i]) << ','
            << format_double(std::abs(slice.estimate[i] - slice.truth[i])) << ','
            << format_double(slice.sup_error) << '\n';
    }
    const std::string csv = prefix + "_n" + std::to_string(n) + ".csv";
    atomic_write_file(csv, out.str());
    written.push_back(csv);

    if (gnuplot) {
      // First seed only; the CSV is read with its header skipped.
      const std::size_t rows = static_cast<std::size_t>(spec.grid_points) * spec.grid_points;
      std::ostringstream gp;
      gp << "set datafile separator ','\n"
         << "set key top right\n"
         << "set xlabel 'x0'\nset ylabel 'x1'\n"
         << "set title '" << to_string(spec.figure_case) << ", " << to_string(spec.selector)
         << ", n = " << n << ", x = " << format_double(spec.x) << "'\n"
         << "set dgrid3d " << spec.grid_points << "," << spec.grid_points << "\n"
         << "splot '" << csv << "' every ::1::" << rows
         << " using 3:4:5 with lines title 'estimate', \\\n"
         << "      '' every ::1::" << rows << " using 3:4:6 with lines title 'truth'\n"
         << "pause -1\n";
      const std::string script = prefix + "_n" + std::to_string(n) + ".gp";
      atomic_write_file(script, gp.str());
      written.push_back(script);
    }
  }

  ordered_json doc;
  doc["case"] = to_string(spec.figure_case);
  doc["model"] = model_json(figure_case_params(spec.figure_case));
  doc["selector"] = to_string(spec.selector);
  doc["n_list"] = spec.n_list;
  doc["seeds"] = spec.seeds;
  doc["seed"] = spec.seed;
  doc["init"] = { { "kind", "dirac" }, { "x0", spec.root } };
  doc["slice"] = { { "x", spec.x }, { "lo", spec.lo }, { "hi", spec.hi },
                   { "grid_points", spec.grid_points } };
  doc["population"] = "gen";
  if (spec.selector == SelectorKind::cv)
    doc["cv"] = { { "folds", spec.folds }, { "grid", spec.cv_grid } };
  doc["defaults_note"] =
    "slice position, grid, depths and seed counts are implementation defaults";
  ordered_json per_n = ordered_json::array();
  for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni) {
    ordered_json entry = { { "n", spec.n_list[ni] },
                           { "mean_sup_error", result.mean_sup_error[ni] } };
    ordered_json slices = ordered_json::array();
    for (const auto& s : result.slices)
      if (s.n == spec.n_list[ni])
        slices.push_back({ { "seed", s.seed },
                           { "h", s.numerator.h },
                           { "h0", s.numerator.h0 },
                           { "h1", s.numerator.h1 },
                           { "h_denominator", s.h_denominator },
                           { "sup_error", s.sup_error } });
    entry["slices"] = slices;
    per_n.push_back(entry);
  }
  doc["results"] = per_n;
  const std::string json = prefix + "_summary.json";
  atomic_write_file(json, doc.dump(2) + "\n");
  written.push_back(json);
  return written;
}

} // namespace bmc
