#include "bmc/quadrature.hpp"

#include "bmc/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace bmc {

GaussHermiteRule
gauss_hermite(int count)
{
  // The asymptotic root guesses stop bracketing distinct roots past ~150 nodes.
  require(count >= 1 && count <= 128, "Gauss-Hermite rule needs 1..128 nodes");
  const int n = count;
  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    // Initial guesses for the largest roots first.
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * rule.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * rule.nodes[1];
    else
      z = 2.0 * z - rule.nodes[i - 2];

    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z)))
        break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  std::vector<std::size_t> order(n);
  for (int i = 0; i < n; ++i)
    order[i] = static_cast<std::size_t>(i);
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return rule.nodes[l] < rule.nodes[r]; });
  GaussHermiteRule sorted;
  for (auto i : order) {
    sorted.nodes.push_back(rule.nodes[i]);
    sorted.weights.push_back(rule.weights[i]);
  }
  return sorted;
}

const GaussHermiteRule&
cached_gauss_hermite(int count)
{
  static std::mutex mutex;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(count);
  if (it == cache.end())
    it = cache.emplace(count, gauss_hermite(count)).first;
  return it->second;
}

GridFunction::GridFunction(std::vector<double> nodes, std::vector<double> values)
  : nodes_(std::move(nodes))
  , values_(std::move(values))
{
  require(nodes_.size() >= 3, "grid function needs at least three nodes");
  require(nodes_.size() == values_.size(), "grid nodes and values differ in length");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    require(nodes_[i] > nodes_[i - 1], "grid nodes must be strictly increasing");

  // Natural spline: tridiagonal solve for the second derivatives.
  const std::size_t n = nodes_.size();
  second_.assign(n, 0.0);
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double sig = (nodes_[i] - nodes_[i - 1]) / (nodes_[i + 1] - nodes_[i - 1]);
    const double p = sig * second_[i - 1] + 2.0;
    second_[i] = (sig - 1.0) / p;
    const double slope = (values_[i + 1] - values_[i]) / (nodes_[i + 1] - nodes_[i]) -
                         (values_[i] - values_[i - 1]) / (nodes_[i] - nodes_[i - 1]);
    u[i] = (6.0 * slope / (nodes_[i + 1] - nodes_[i - 1]) - sig * u[i - 1]) / p;
  }
  second_[n - 1] = 0.0;
  for (std::size_t k = n - 1; k-- > 0;)
    second_[k] = second_[k] * second_[k + 1] + u[k];
}

GridFunction
GridFunction::sample(const std::function<double(double)>& fn, const std::vector<double>& nodes)
{
  std::vector<double> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    values[i] = fn(nodes[i]);
  return GridFunction(nodes, std::move(values));
}

GridFunction
GridFunction::sample(const std::function<double(double)>& fn, double lo, double hi, int count)
{
  require(count >= 3 && hi > lo, "sampling grid needs lo < hi and >= 3 nodes");
  std::vector<double> nodes(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    nodes[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return sample(fn, nodes);
}

double
GridFunction::operator()(double x) const
{
  if (x <= nodes_.front())
    return values_.front();
  if (x >= nodes_.back())
    return values_.back();
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - nodes_.begin());
  const std::size_t lo = hi - 1;
  const double h = nodes_[hi] - nodes_[lo];
  const double a = (nodes_[hi] - x) / h;
  const double b = (x - nodes_[lo]) / h;
  return a * values_[lo] + b * values_[hi] +
         ((a * a * a - a) * second_[lo] + (b * b * b - b) * second_[hi]) * (h * h) / 6.0;
}

namespace {

double
simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
             double fb, double whole, double tol, int depth)
{
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double
integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol)
{
  // Split first so narrow features are not missed by the initial stencil.
  constexpr int pieces = 16;
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + (b - a) * i / pieces;
    const double hi = a + (b - a) * (i + 1) / pieces;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += simpson_step(f, lo, hi, flo, fm, fhi, whole, tol / pieces, 40);
  }
  return total;
}

} // namespace bmc
