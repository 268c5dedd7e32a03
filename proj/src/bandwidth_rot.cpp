#include "bmc/bandwidth_rot.hpp"

#include "bmc/error.hpp"
#include "bmc/kernel.hpp"
#include "bmc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bmc {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double sqrt_pi = 1.0 / std::numbers::inv_sqrtpi;

bool
supercritical(double a)
{
  return 2.0 * a * a > 1.0;
}

} // namespace

RotConstants
rot_constants(double a, double sigma)
{
  require(std::isfinite(a) && a > 0.0 && a < 1.0, "rate a must lie in (0, 1)");
  require(std::isfinite(sigma) && sigma > 0.0, "sigma must be > 0");

  RotConstants c;
  c.a = a;
  c.sigma = sigma;
  c.sigma_a = sigma / std::sqrt(1.0 - a * a);
  c.kappa2 = GaussianKernel::second_moment();
  const double s2 = sigma * sigma;
  const double sa = c.sigma_a;
  const double one_m_a2 = 1.0 - a * a;

  c.c1 = 4.0 * GaussianKernel::l2_norm_squared();
  c.c2 = 3.0 / (16.0 * sqrt_pi) * std::pow(sa, -5.0);
  c.C_a_sigma = 1.0 / (pi * s2 * (1.0 + a) * (1.0 - a) * (1.0 - a));
  c.M_a_sigma = 2.0 / (pi * s2 * a * a * (1.0 + a) * (1.0 - a) * (1.0 - a) * (2.0 * a * a - 1.0));

  const double k3 = std::pow(GaussianKernel::l2_norm_squared(), 3.0);
  c.c2_tri = 6.0 * k3;
  c.c_tri = 3.0 * std::pow(1.0 + a * a, 2.0) / (64.0 * pi * sqrt_pi * std::pow(one_m_a2, 3.0)) *
            std::pow(sa, -7.0);
  c.c0_tri = 3.0 / (64.0 * pi * sqrt_pi * std::pow(one_m_a2, 3.0)) * std::pow(sa, -7.0);
  c.c1_tri = c.c0_tri;
  c.C_tri_a_sigma =
    4.0 / (std::numbers::e * pi * s2 * a * a * (1.0 - a) * (1.0 - a) * (1.0 + a));
  c.M_tri_a_sigma = c.C_tri_a_sigma / (4.0 * pi * s2 * (2.0 * a * a - 1.0));

  // mu_tri is the N(0, Lambda^-1) density with precision
  // Lambda = sigma^-2 [[1 + a^2, -a, -a], [-a, 1, 0], [-a, 0, 1]].
  // For a Gaussian density phi, int d_ii phi d_jj phi = (L_ii L_jj / 4 + L_ij^2 / 2) int phi^2.
  const double lambda[3][3] = { { (1.0 + a * a) / s2, -a / s2, -a / s2 },
                                { -a / s2, 1.0 / s2, 0.0 },
                                { -a / s2, 0.0, 1.0 / s2 } };
  const double sqrt_det = std::sqrt(one_m_a2) / (s2 * sigma);
  const double phi_sq = sqrt_det / std::pow(4.0 * pi, 1.5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      c.hessian_gram[i][j] =
        (lambda[i][i] * lambda[j][j] / 4.0 + lambda[i][j] * lambda[i][j] / 2.0) * phi_sq;

  c.b1 = 32.0 / 3.0;
  c.b2 = sqrt_pi * a * a * one_m_a2 * (1.0 + a) * (1.0 - a) * (1.0 - a) * (2.0 * a * a - 1.0);
  c.b3 = 48.0 * std::pow(one_m_a2, 3.0) / (12.0 * std::pow(1.0 + a * a, 2.0));
  c.b4 = 4.0 * std::pow(one_m_a2, 3.0);
  c.b5 = 3.0 * a * a * std::pow(one_m_a2, 3.0) * (1.0 + a) * (2.0 * a * a - 1.0) / (4.0 * sqrt_pi);
  return c;
}

std::array<RatioIdentity, 5>
ratio_identities(const RotConstants& c)
{
  const double s = c.sigma_a;
  return { { { c.c1 / (4.0 * c.c2), c.b1 * std::pow(s, 5.0) },
             { c.c1 / c.M_a_sigma, c.b2 * s * s },
             { c.c2_tri / (4.0 * c.c_tri), c.b3 * std::pow(s, 7.0) },
             { c.c2_tri / (4.0 * c.c0_tri), c.b4 * std::pow(s, 7.0) },
             { c.c2_tri / c.M_tri_a_sigma, c.b5 * std::pow(s, 4.0) } } };
}

double
score_G(double h, int n, const RotConstants& c)
{
  require(h > 0.0, "bandwidth must be > 0");
  const double size = static_cast<double>(generation_size(n));
  double g = c.c2 * std::pow(h, 4.0) + c.c1 / (size * h);
  if (supercritical(c.a))
    g += c.M_a_sigma * std::pow(c.a, 2.0 * n);
  return g;
}

double
score_G_tri(double h, double h0, double h1, int n, const RotConstants& c)
{
  require(h > 0.0 && h0 > 0.0 && h1 > 0.0, "bandwidths must be > 0");
  const double size = static_cast<double>(generation_size(n));
  const double sq[3] = { h * h, h0 * h0, h1 * h1 };
  double quad = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      quad += sq[i] * sq[j] * c.hessian_gram[i][j];
  double g = 0.5 * c.kappa2 * c.kappa2 * quad + c.c2_tri / (size * h * h0 * h1);
  if (supercritical(c.a))
    g += c.M_tri_a_sigma * std::pow(c.a, 2.0 * n);
  return g;
}

double
optimal_h_den(const RotConstants& c, int n)
{
  const double size = static_cast<double>(generation_size(n));
  const double r = 2.0 * c.a * c.a;
  if (r <= std::pow(2.0, -0.2))
    return std::pow(c.c1 / (4.0 * c.c2), 0.2) * std::pow(size, -0.2);
  return c.c1 / c.M_a_sigma * std::pow(r, -static_cast<double>(n));
}

BandwidthTriple
optimal_h_num(const RotConstants& c, int n)
{
  const double size = static_cast<double>(generation_size(n));
  const double r = 2.0 * c.a * c.a;
  if (r <= std::pow(2.0, -3.0 / 7.0)) {
    const double scale = std::pow(size, -1.0 / 7.0);
    return { std::pow(c.c2_tri / (4.0 * c.c_tri), 1.0 / 7.0) * scale,
             std::pow(c.c2_tri / (4.0 * c.c0_tri), 1.0 / 7.0) * scale,
             std::pow(c.c2_tri / (4.0 * c.c1_tri), 1.0 / 7.0) * scale };
  }
  const double h = std::cbrt(c.c2_tri / c.M_tri_a_sigma) * std::pow(r, -n / 3.0);
  return BandwidthTriple::uniform(h);
}

double
sigma_hat_a(std::span<const double> values)
{
  require(values.size() >= 2, "standard deviation needs at least two values");
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values.size(), [&](std::size_t i) { return values[i]; }) / n;
  const double ss = pairwise_sum(values.size(), [&](std::size_t i) {
    const double d = values[i] - mean;
    return d * d;
  });
  return std::sqrt(ss / (n - 1.0));
}

double
a_hat(const TreeSample& sample, std::optional<int> m_opt)
{
  const int n = sample.depth();
  const int m = m_opt.value_or(default_rate_lag(n));
  require(m >= 1 && m <= n, "lag m must satisfy 1 <= m <= n");

  const auto last = sample.level(n);
  const double size = static_cast<double>(last.size());
  const double mean = pairwise_sum(last.size(), [&](std::size_t i) { return last[i]; }) / size;
  const double den = pairwise_sum(last.size(), [&](std::size_t i) {
    const double d = last[i] - mean;
    return d * d;
  });
  if (!(den > 0.0))
    throw InvalidArgument("rate estimator is undefined when every level-n value is equal");

  const auto ancestors = sample.level(n - m + 1);
  const std::size_t block = std::size_t{1} << (m - 1);
  const double num = pairwise_sum(ancestors.size(), [&](std::size_t r) {
    const double descendants = pairwise_sum(block, [&](std::size_t w) {
      return last[r * block + w] - mean;
    });
    return (ancestors[r] - mean) * descendants;
  });

  const double ratio = std::clamp(num / den, 1e-12, 1.0);
  return std::min(std::pow(ratio, 1.0 / m), 0.999);
}

RotSelection
rot_bandwidths(double a_hat_value, const std::array<double, 3>& sigma_hats, int n)
{
  require(std::isfinite(a_hat_value) && a_hat_value > 0.0, "rate estimate must be > 0");
  for (double s : sigma_hats)
    require(std::isfinite(s) && s > 0.0, "standard deviation estimates must be > 0");
  const double size = static_cast<double>(generation_size(n));
  const double r = 2.0 * a_hat_value * a_hat_value;

  RotSelection sel;
  sel.n = n;
  sel.a_hat = a_hat_value;
  sel.sigma_hats = sigma_hats;
  sel.h_D_hat = (r <= std::pow(2.0, -0.2) ? std::pow(size, -0.2)
                                           : std::pow(r, -static_cast<double>(n))) *
                sigma_hats[0];
  const double num_scale =
    r <= std::pow(2.0, -3.0 / 7.0) ? std::pow(size, -1.0 / 7.0) : std::pow(r, -n / 3.0);
  sel.h_N_hat = num_scale * sigma_hats[0];
  sel.h_0N_hat = num_scale * sigma_hats[1];
  sel.h_1N_hat = num_scale * sigma_hats[2];
  return sel;
}

RotSelection
rot_select(const TreeSample& sample, std::optional<int> m)
{
  const int n = sample.depth();
  require(n >= 2, "rule-of-thumb selection needs depth >= 2");
  const int lag = m.value_or(default_rate_lag(n));

  const auto parents = sample.level(n);
  const auto children = sample.level(n + 1);
  std::vector<double> first(parents.size());
  std::vector<double> second(parents.size());
  for (std::size_t r = 0; r < parents.size(); ++r) {
    first[r] = children[2 * r];
    second[r] = children[2 * r + 1];
  }
  const std::array<double, 3> sigmas = { sigma_hat_a(parents), sigma_hat_a(first),
                                         sigma_hat_a(second) };
  auto sel = rot_bandwidths(a_hat(sample, lag), sigmas, n);
  sel.m = lag;
  return sel;
}

} // namespace bmc
