#pragma once

#include <cmath>
#include <numbers>

namespace bmc {

//! Standard Gaussian kernel K0 and the norms the bandwidth formulas use.
struct GaussianKernel
{
  static constexpr double inv_sqrt_2pi = 0.3989422804014326779399460599343818684759;

  static double value(double t) { return inv_sqrt_2pi * std::exp(-0.5 * t * t); }

  static constexpr double l1_norm() { return 1.0; }

  //! ||K0||_2^2 = 1 / (2 sqrt(pi)).
  static constexpr double l2_norm_squared() { return 0.5 * std::numbers::inv_sqrtpi; }

  static constexpr double sup_norm() { return inv_sqrt_2pi; }

  //! (K0 * K0)(t), the N(0, 2) density.
  static double self_convolution(double t)
  {
    return 0.5 * std::numbers::inv_sqrtpi * std::exp(-0.25 * t * t);
  }

  //! kappa_2 = int t^2 K0(t) dt.
  static constexpr double second_moment() { return 1.0; }
};

} // namespace bmc
