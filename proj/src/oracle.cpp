#include "bmc/oracle.hpp"

#include "bmc/error.hpp"
#include "bmc/io.hpp"
#include "bmc/kernel.hpp"
#include "bmc/parallel.hpp"
#include "bmc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace bmc {

using io::format_double;

namespace {

constexpr double tail_tolerance = 1e-10;

double
normal_tail_outside(double mean, double sd, double lo, double hi)
{
  const double s = sd * std::numbers::sqrt2;
  return 0.5 * std::erfc((mean - lo) / s) + 0.5 * std::erfc((hi - mean) / s);
}

// Q^k applied to an exact function, tabulated when k > 0.
class Engine
{
public:
  Engine(const BarParams& params, const OracleOptions& options)
    : params_(params)
    , options_(options)
  {
    params_.validate();
    require(options.grid_nodes >= 16, "oracle grid needs at least 16 nodes");
    require(options.gh_nodes >= 4, "oracle needs at least 4 Gauss-Hermite nodes");
    const auto [lo, hi] = default_support(params, options.support_sds);
    nodes_.resize(static_cast<std::size_t>(options.grid_nodes));
    for (int i = 0; i < options.grid_nodes; ++i)
      nodes_[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (options.grid_nodes - 1);
  }

  RealFn power(const RealFn& f, int k)
  {
    if (k == 0)
      return f;
    // The first step integrates f itself, so only Q-smoothed functions are
    // ever interpolated.
    auto g = std::make_shared<GridFunction>(GridFunction::sample(
      [&](double y) { return apply_q_at(params_, f, y, options_.gh_nodes); }, nodes_));
    note_tails(*g);
    for (int i = 1; i < k; ++i) {
      *g = apply_q(params_, *g, options_.gh_nodes);
      warning_ = warning_ || g->tail_warning;
    }
    return [g](double y) { return (*g)(y); };
  }

  double power_at(const RealFn& f, int k, double x)
  {
    if (k == 0)
      return f(x);
    return apply_q_at(params_, power(f, k - 1), x, options_.gh_nodes);
  }

  // Tabulated so that later Q steps see a grid.
  RealFn p_sym(const RealFn& g, const RealFn& h)
  {
    auto grid = std::make_shared<GridFunction>(GridFunction::sample(
      [&](double x) { return apply_p_at(params_, g, h, x, true, options_.gh_nodes); }, nodes_));
    note_tails(*grid);
    return [grid](double y) { return (*grid)(y); };
  }

  // Same tail criterion as apply_q.
  void note_tails(const GridFunction& g)
  {
    const double lo = g.lo();
    const double hi = g.hi();
    for (double x : g.nodes())
      if (x >= 0.75 * lo + 0.25 * hi && x <= 0.25 * lo + 0.75 * hi)
        for (double m : { params_.a0 * x + params_.b0, params_.a1 * x + params_.b1 })
          warning_ = warning_ || normal_tail_outside(m, params_.sigma, lo, hi) > tail_tolerance;
  }

  double p_sym_at(const RealFn& g, const RealFn& h, double x)
  {
    return apply_p_at(params_, g, h, x, true, options_.gh_nodes);
  }

  // Q^k applied to a function that is only available pointwise and expensive.
  double power_of_p_at(const RealFn& g, const RealFn& h, int k, double x)
  {
    if (k == 0)
      return p_sym_at(g, h, x);
    return power_at(p_sym(g, h), k, x);
  }

  bool warning() const { return warning_; }

private:
  BarParams params_;
  OracleOptions options_;
  std::vector<double> nodes_;
  bool warning_ = false;
};

void
report(bool* out, const Engine& engine)
{
  if (out)
    *out = engine.warning();
}

} // namespace

std::pair<double, double>
default_support(const BarParams& params, double support_sds)
{
  params.validate();
  require(support_sds > 0.0, "support width must be > 0");
  const double contraction = 0.5 * (params.a0 * params.a0 + params.a1 * params.a1);
  // Explosive lineages have no invariant spread; fall back to a wide fixed scale.
  const double spread =
    contraction < 1.0 ? params.sigma / std::sqrt(1.0 - contraction) : 10.0 * params.sigma;
  const double shift = std::max(std::abs(params.b0), std::abs(params.b1));
  const double drift = contraction < 1.0 ? shift / (1.0 - std::sqrt(contraction)) : 10.0 * shift;
  const double w = support_sds * spread + drift;
  return { -w, w };
}

GridFunction
tabulate(const BarParams& params, const RealFn& f, const OracleOptions& options)
{
  const auto [lo, hi] = default_support(params, options.support_sds);
  return GridFunction::sample(f, lo, hi, options.grid_nodes);
}

GridFunction
apply_q(const BarParams& params, const GridFunction& f, int gh_nodes)
{
  params.validate();
  const auto& rule = cached_gauss_hermite(gh_nodes);
  const auto& nodes = f.nodes();
  const double lo = f.lo();
  const double hi = f.hi();
  const double inner_lo = 0.75 * lo + 0.25 * hi;
  const double inner_hi = 0.25 * lo + 0.75 * hi;
  const double scale = std::numbers::sqrt2 * params.sigma;
  const double norm = 0.5 * std::numbers::inv_sqrtpi;

  bool warning = f.tail_warning;
  std::vector<double> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double x = nodes[i];
    double acc = 0.0;
    for (double m : { params.a0 * x + params.b0, params.a1 * x + params.b1 }) {
      for (std::size_t j = 0; j < rule.nodes.size(); ++j)
        acc += rule.weights[j] * f(m + scale * rule.nodes[j]);
      if (x >= inner_lo && x <= inner_hi)
        warning = warning || normal_tail_outside(m, params.sigma, lo, hi) > tail_tolerance;
    }
    values[i] = norm * acc;
  }
  GridFunction out(nodes, std::move(values));
  out.tail_warning = warning;
  return out;
}

double
apply_q_at(const BarParams& params, const RealFn& f, double x, int gh_nodes)
{
  params.validate();
  const auto& rule = cached_gauss_hermite(gh_nodes);
  const double scale = std::numbers::sqrt2 * params.sigma;
  double acc = 0.0;
  for (double m : { params.a0 * x + params.b0, params.a1 * x + params.b1 })
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
      acc += rule.weights[j] * f(m + scale * rule.nodes[j]);
  return 0.5 * std::numbers::inv_sqrtpi * acc;
}

double
apply_p_at(const BarParams& params, const RealFn& g, const RealFn& h, double x, bool symmetric,
           int gh_nodes)
{
  params.validate();
  const auto& rule = cached_gauss_hermite(gh_nodes);
  const std::size_t k = rule.nodes.size();
  const double s = params.sigma;
  const double m0 = params.a0 * x + params.b0;
  const double m1 = params.a1 * x + params.b1;
  // Cholesky factor of Gamma: L = [[s, 0], [rho / s, sqrt(s^2 - rho^2 / s^2)]].
  const double l10 = params.rho / s;
  const double l11 = std::sqrt(s * s - l10 * l10);

  std::vector<double> y(k), gy(k), hy(k);
  for (std::size_t i = 0; i < k; ++i) {
    y[i] = m0 + std::numbers::sqrt2 * s * rule.nodes[i];
    gy[i] = g(y[i]);
    hy[i] = symmetric ? h(y[i]) : 0.0;
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double t1 = std::numbers::sqrt2 * rule.nodes[j];
    double inner = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double z = m1 + l10 * std::numbers::sqrt2 * rule.nodes[i] + l11 * t1;
      double term = gy[i] * h(z);
      if (symmetric)
        term = 0.5 * (term + hy[i] * g(z));
      inner += rule.weights[i] * term;
    }
    acc += rule.weights[j] * inner;
  }
  return acc / std::numbers::pi;
}

double
expected_generation_sum(const BarParams& params, const RealFn& f, double x, int n,
                        const OracleOptions& options, bool* tail_warning)
{
  require(n >= 0 && n <= 8, "expected_generation_sum needs 0 <= n <= 8");
  Engine engine(params, options);
  const double value = std::ldexp(engine.power_at(f, n, x), n);
  report(tail_warning, engine);
  return value;
}

double
second_moment_generation_sum(const BarParams& params, const RealFn& f, double x, int n,
                             const OracleOptions& options, bool* tail_warning)
{
  require(n >= 0 && n <= 5, "second_moment_generation_sum needs 0 <= n <= 5");
  Engine engine(params, options);
  const RealFn f2 = [&f](double y) {
    const double v = f(y);
    return v * v;
  };
  double value = std::ldexp(engine.power_at(f2, n, x), n);
  for (int k = 0; k < n; ++k) {
    const RealFn qk = engine.power(f, k);
    value += std::ldexp(engine.power_of_p_at(qk, qk, n - k - 1, x), n + k);
  }
  report(tail_warning, engine);
  return value;
}

double
mixed_moment(const BarParams& params, const RealFn& f, const RealFn& g, double x, int n, int m,
             const OracleOptions& options, bool* tail_warning)
{
  require(m >= 0 && m <= n && n <= 5, "mixed_moment needs 0 <= m <= n <= 5");
  Engine engine(params, options);
  const RealFn q_gap = engine.power(f, n - m);
  const RealFn product = [&g, &q_gap](double y) { return g(y) * q_gap(y); };
  double value = std::ldexp(engine.power_at(product, m, x), n);
  for (int k = 0; k < m; ++k) {
    const RealFn gk = engine.power(g, k);
    const RealFn fk = engine.power(f, n - m + k);
    value += std::ldexp(engine.power_of_p_at(gk, fk, m - k - 1, x), n + k);
  }
  report(tail_warning, engine);
  return value;
}

double
kernel_l2_norm_pow6()
{
  const double n2 = GaussianKernel::l2_norm_squared();
  return n2 * n2 * n2;
}

const char*
to_string(CltStatistic s)
{
  switch (s) {
    case CltStatistic::transition:
      return "p";
    case CltStatistic::mu_triangle:
      return "mu_tri";
    case CltStatistic::mu_triangle_fluctuation:
      return "mu_tri_fluctuation";
  }
  return "?";
}

CltStatistic
parse_clt_statistic(const std::string& text)
{
  if (text == "p" || text == "p_hat")
    return CltStatistic::transition;
  if (text == "mu_tri")
    return CltStatistic::mu_triangle;
  if (text == "mu_tri_fluctuation")
    return CltStatistic::mu_triangle_fluctuation;
  throw InvalidArgument("unknown statistic '" + text + "' (expected p, mu_tri, mu_tri_fluctuation)");
}

double
true_variance_clt(const SymmetricBarParams& params, double x, double x0, double x1,
                  CltStatistic statistic, Population population)
{
  params.validate();
  const double k6 = kernel_l2_norm_pow6();
  switch (statistic) {
    case CltStatistic::transition: {
      const BarParams full = params.lift();
      return k6 * transition_density_p(full, x, x0, x1) / stationary_mu(params, x);
    }
    case CltStatistic::mu_triangle:
      return k6 * mu_triangle(params, x, x0, x1);
    case CltStatistic::mu_triangle_fluctuation:
      return (population == Population::tree ? 2.0 : 1.0) * k6 * mu_triangle(params, x, x0, x1);
  }
  throw InvalidArgument("unknown statistic");
}

double
oracle_bump(double y)
{
  const double d = y - 0.5;
  return std::exp(-0.5 * d * d);
}

std::vector<OracleCheckRow>
run_oracle_check(const OracleCheckSpec& spec, unsigned threads)
{
  spec.model.validate();
  require(spec.max_depth >= 1 && spec.max_depth <= 5, "oracle check depth must be in [1, 5]");
  require(spec.trees >= 2, "oracle check needs at least two trees");
  require(spec.z_limit > 0.0, "z limit must be > 0");
  const BarParams params = spec.model.lift();

  struct Target
  {
    std::string formula;
    int fn;  // 0 identity, 1 bump
    int n;
    int m;
  };
  const std::vector<std::pair<std::string, RealFn>> functions = {
    { "identity", [](double y) { return y; } }, { "bump", oracle_bump }
  };
  std::vector<Target> targets;
  for (int fn = 0; fn < 2; ++fn) {
    for (int n = 1; n <= spec.max_depth; ++n)
      targets.push_back({ "Q1", fn, n, n });
    for (int n = 1; n <= spec.max_depth; ++n)
      targets.push_back({ "Q2", fn, n, n });
    for (int n = 2; n <= spec.max_depth; ++n)
      for (int m = std::max(1, n - 2); m < n; ++m)
        targets.push_back({ "Q2-bis", fn, n, m });
  }

  // Per-tree observations, index-addressed so the reduction order is fixed.
  const std::size_t t_count = targets.size();
  std::vector<double> obs(spec.trees * t_count);
  parallel_for(spec.trees, threads, [&](std::size_t t) {
    const auto sample =
      simulate(params, spec.max_depth - 1, InitSpec::dirac(spec.x), derive_seed(spec.seed, t), 1);
    double sums[2][6] = {};
    for (int fn = 0; fn < 2; ++fn)
      for (int k = 0; k <= spec.max_depth; ++k) {
        const auto level = sample.level(k);
        sums[fn][k] = pairwise_sum(level.size(), [&](std::size_t i) {
          return functions[static_cast<std::size_t>(fn)].second(level[i]);
        });
      }
    for (std::size_t i = 0; i < t_count; ++i) {
      const auto& tg = targets[i];
      const double* s = sums[tg.fn];
      double v = s[tg.n];
      if (tg.formula == "Q2")
        v = s[tg.n] * s[tg.n];
      else if (tg.formula == "Q2-bis")
        v = s[tg.n] * s[tg.m];
      obs[t * t_count + i] = v;
    }
  });

  std::vector<OracleCheckRow> rows(t_count);
  parallel_for(t_count, threads, [&](std::size_t i) {
    const auto& tg = targets[i];
    const RealFn& f = functions[static_cast<std::size_t>(tg.fn)].second;
    OracleCheckRow row;
    row.formula = tg.formula;
    row.function = functions[static_cast<std::size_t>(tg.fn)].first;
    row.n = tg.n;
    row.m = tg.m;
    if (tg.formula == "Q1")
      row.quadrature = expected_generation_sum(params, f, spec.x, tg.n, spec.options);
    else if (tg.formula == "Q2")
      row.quadrature = second_moment_generation_sum(params, f, spec.x, tg.n, spec.options);
    else
      row.quadrature = mixed_moment(params, f, f, spec.x, tg.n, tg.m, spec.options);

    const double r = static_cast<double>(spec.trees);
    const double mean =
      pairwise_sum(spec.trees, [&](std::size_t t) { return obs[t * t_count + i]; }) / r;
    const double ss = pairwise_sum(spec.trees, [&](std::size_t t) {
      const double d = obs[t * t_count + i] - mean;
      return d * d;
    });
    row.mc_estimate = mean;
    row.standard_error = std::sqrt(ss / (r - 1.0) / r);
    row.z = row.standard_error > 0.0 ? (mean - row.quadrature) / row.standard_error
                                     : (mean == row.quadrature ? 0.0 : INFINITY);
    row.pass = std::abs(row.z) <= spec.z_limit;
    rows[i] = row;
  });
  return rows;
}

std::string
oracle_rows_csv(const std::vector<OracleCheckRow>& rows)
{
  std::ostringstream out;
  out << "formula,function,n,m,quadrature,mc_estimate,standard_error,z,pass\n";
  for (const auto& r : rows)
    out << r.formula << ',' << r.function << ',' << r.n << ',' << r.m << ','
        << format_double(r.quadrature) << ',' << format_double(r.mc_estimate) << ','
        << format_double(r.standard_error) << ',' << format_double(r.z) << ','
        << (r.pass ? "PASS" : "FAIL") << '\n';
  return out.str();
}

} // namespace bmc
