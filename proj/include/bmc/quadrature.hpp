#pragma once

#include <functional>
#include <vector>

namespace bmc {

//! Nodes and weights for int f(t) exp(-t^2) dt.
struct GaussHermiteRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

//! Newton iteration on the Hermite recurrence. Needs 1 <= count <= 128.
GaussHermiteRule gauss_hermite(int count);

//! Shared, thread-safe cache of gauss_hermite(count).
const GaussHermiteRule& cached_gauss_hermite(int count);

/// Tabulated function with natural cubic spline interpolation between
/// strictly increasing nodes and flat extrapolation outside them.
class GridFunction
{
public:
  GridFunction(std::vector<double> nodes, std::vector<double> values);

  static GridFunction sample(const std::function<double(double)>& fn, double lo, double hi,
                             int count);
  static GridFunction sample(const std::function<double(double)>& fn,
                             const std::vector<double>& nodes);

  double operator()(double x) const;

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  double lo() const { return nodes_.front(); }
  double hi() const { return nodes_.back(); }

  //! Set when an operator producing this function lost more than the
  //! tolerated probability mass outside the support.
  bool tail_warning = false;

private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> second_;  // spline second derivatives
};

//! Adaptive Simpson integration on [a, b] to absolute tolerance `tol`.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12);

} // namespace bmc
