#include "bmc/bar_model.hpp"

#include "bmc/error.hpp"
#include "bmc/parallel.hpp"
#include "bmc/rng.hpp"

#include <cmath>
#include <numbers>

namespace bmc {

namespace {

bool
finite(double v)
{
  return std::isfinite(v);
}

constexpr std::uint64_t root_stream_generation = ~std::uint64_t{0};

} // namespace

void
BarParams::validate() const
{
  require(finite(a0) && finite(a1) && finite(b0) && finite(b1) && finite(rho),
          "BAR parameters must be finite");
  require(finite(sigma) && sigma > 0.0, "sigma must be > 0");
  require(std::abs(rho) < sigma * sigma, "|rho| must be < sigma^2");
}

bool
BarParams::is_symmetric() const
{
  return a0 == a1 && b0 == 0.0 && b1 == 0.0 && rho == 0.0;
}

void
SymmetricBarParams::validate() const
{
  require(finite(a) && std::abs(a) < 1.0, "symmetric model needs |a| < 1");
  require(finite(sigma) && sigma > 0.0, "sigma must be > 0");
}

double
SymmetricBarParams::sigma_a() const
{
  return sigma / std::sqrt(1.0 - a * a);
}

SymmetricBarParams
as_symmetric(const BarParams& params)
{
  params.validate();
  require(params.is_symmetric(), "model is not the symmetric reference case");
  SymmetricBarParams sym{params.a0, params.sigma};
  sym.validate();
  return sym;
}

TreeSample
simulate(const BarParams& params, int n, const InitSpec& init, std::uint64_t seed,
         unsigned threads)
{
  params.validate();
  require(n >= 0, "depth must be >= 0");
  if (n + 1 > max_generation)
    throw OutOfRange("depth " + std::to_string(n) + " is too large");

  std::vector<double> values(tree_size(n + 1));
  if (init.kind == InitSpec::Kind::stationary) {
    const auto sym = as_symmetric(params);
    auto stream = CounterStream::for_node(seed, root_stream_generation, 0);
    values[0] = sym.sigma_a() * stream.normal_pair().first;
  } else {
    require(finite(init.x0), "initial value must be finite");
    values[0] = init.x0;
  }

  const double s = params.sigma;
  const double mix = params.rho / s;
  const double resid = std::sqrt(s * s - mix * mix);

  for (int k = 0; k <= n; ++k) {
    const std::size_t offset = (std::size_t{1} << k) - 1;
    const std::size_t width = std::size_t{1} << k;
    parallel_for(width, threads, [&](std::size_t r) {
      const std::size_t i = offset + r;
      auto stream = CounterStream::for_node(seed, static_cast<std::uint64_t>(k), r);
      const auto [z0, z1] = stream.normal_pair();
      const double x = values[i];
      values[2 * i + 1] = params.a0 * x + params.b0 + s * z0;
      values[2 * i + 2] = params.a1 * x + params.b1 + mix * z0 + resid * z1;
    });
  }
  return TreeSample(n, std::move(values));
}

double
normal_pdf(double x, double mean, double sd)
{
  const double t = (x - mean) / sd;
  return std::exp(-0.5 * t * t) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double
transition_density_p(const BarParams& params, double x, double y, double z)
{
  const double s2 = params.sigma * params.sigma;
  const double det = s2 * s2 - params.rho * params.rho;
  const double ey = y - params.a0 * x - params.b0;
  const double ez = z - params.a1 * x - params.b1;
  const double g = ey * ey - 2.0 * params.rho / s2 * ey * ez + ez * ez;
  return std::exp(-s2 * g / (2.0 * det)) / (2.0 * std::numbers::pi * std::sqrt(det));
}

double
q_density(const BarParams& params, double x, double y)
{
  return 0.5 * (normal_pdf(y, params.a0 * x + params.b0, params.sigma) +
                normal_pdf(y, params.a1 * x + params.b1, params.sigma));
}

double
stationary_mu(const SymmetricBarParams& params, double x)
{
  return normal_pdf(x, 0.0, params.sigma_a());
}

double
mu_triangle(const SymmetricBarParams& params, double x, double y, double z)
{
  const auto lifted = params.lift();
  // Grouping the daughter factors keeps the result exactly symmetric in (y, z).
  return stationary_mu(params, x) * (q_density(lifted, x, y) * q_density(lifted, x, z));
}

} // namespace bmc
