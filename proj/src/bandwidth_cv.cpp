#include "bmc/bandwidth_cv.hpp"

#include "bmc/error.hpp"
#include "bmc/kernel.hpp"
#include "bmc/parallel.hpp"
#include "bmc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bmc {

std::vector<std::size_t>
FoldPartition::members(int k) const
{
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < assignment.size(); ++u)
    if (assignment[u] == k)
      out.push_back(u);
  return out;
}

std::size_t
FoldPartition::fold_size(int k) const
{
  return static_cast<std::size_t>(std::count(assignment.begin(), assignment.end(), k));
}

FoldPartition
make_folds(int n, int folds, std::uint64_t seed)
{
  const auto size = generation_size(n);
  require(folds >= 2 && static_cast<std::uint64_t>(folds) <= size,
          "fold count must satisfy 2 <= K <= 2^n");
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterStream stream(derive_seed(seed, 0xf01d));
  for (std::size_t i = size - 1; i > 0; --i)
    std::swap(order[i], order[stream.below(i + 1)]);

  FoldPartition p;
  p.n = n;
  p.folds = folds;
  p.assignment.resize(size);
  for (std::size_t i = 0; i < size; ++i)
    p.assignment[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  return p;
}

namespace {

void
validate_grid(const std::vector<double>& grid, bool unit_interval)
{
  require(!grid.empty(), "bandwidth grid must be nonempty");
  for (std::size_t j = 0; j < grid.size(); ++j) {
    require(std::isfinite(grid[j]) && grid[j] > 0.0, "bandwidths must be positive and finite");
    if (unit_interval)
      require(grid[j] <= 1.0, "bandwidth grid values must lie in (0, 1]");
    if (j > 0)
      require(grid[j] > grid[j - 1], "bandwidth grid must be strictly increasing");
  }
}

// Accumulator layout: [kind][grid index][fold], kinds below.
enum Kind : std::size_t
{
  den_conv,
  den_eval,
  num_conv,
  num_eval,
  kind_count
};

struct PairSums
{
  std::size_t grid_size = 0;
  std::size_t folds = 0;
  std::vector<double> row;   // sum over u in F_k, v anywhere
  std::vector<double> same;  // sum over u, v both in F_k

  PairSums(std::size_t h, std::size_t k)
    : grid_size(h)
    , folds(k)
    , row(kind_count * h * k, 0.0)
    , same(kind_count * h * k, 0.0)
  {
  }

  std::size_t at(std::size_t kind, std::size_t j, std::size_t f) const
  {
    return (kind * grid_size + j) * folds + f;
  }
};

// Ordered-pair sums of exp(-d^2 / (4 h^2)) ("conv", the self-convolution
// exponent) and its square ("eval", the kernel exponent) in the parent
// coordinate and in all three coordinates, split by fold membership.
PairSums
accumulate_pair_sums(const TriangleColumns& tri, const std::vector<int>& fold_of,
                     std::size_t folds, const std::vector<double>& grid, unsigned threads)
{
  const std::size_t n = tri.size();
  const std::size_t h_count = grid.size();
  std::vector<double> rate(h_count);
  for (std::size_t j = 0; j < h_count; ++j)
    rate[j] = 0.25 / (grid[j] * grid[j]);

  // Rows are dealt cyclically to a fixed number of blocks chosen from the
  // problem shape alone, so the reduction order never depends on `threads`.
  const std::size_t per_block = kind_count * h_count * folds;
  const std::size_t budget = std::size_t{8} << 20;
  const std::size_t blocks =
    std::clamp<std::size_t>(budget / (2 * per_block), 1, std::min<std::size_t>(64, n));

  std::vector<PairSums> partial(blocks, PairSums(h_count, folds));
  parallel_for(blocks, threads, [&](std::size_t b) {
    auto& acc = partial[b];
    for (std::size_t u = b; u < n; u += blocks) {
      const double xu = tri.parent[u];
      const double yu = tri.child0[u];
      const double zu = tri.child1[u];
      const std::size_t fu = static_cast<std::size_t>(fold_of[u]);
      for (std::size_t v = u + 1; v < n; ++v) {
        const double dx = xu - tri.parent[v];
        const double dy = yu - tri.child0[v];
        const double dz = zu - tri.child1[v];
        const double s1 = dx * dx;
        const double s3 = s1 + dy * dy + dz * dz;
        const std::size_t fv = static_cast<std::size_t>(fold_of[v]);
        const bool same_fold = fu == fv;
        bool tri_alive = true;
        // Largest bandwidth first: once a term underflows to zero every
        // smaller bandwidth gives zero too.
        for (std::size_t jj = h_count; jj-- > 0;) {
          const double e1 = std::exp(-s1 * rate[jj]);
          if (e1 == 0.0)
            break;
          double e3 = 0.0;
          if (tri_alive) {
            e3 = std::exp(-s3 * rate[jj]);
            tri_alive = e3 != 0.0;
          }
          const double terms[kind_count] = { e1, e1 * e1, e3, e3 * e3 };
          for (std::size_t kind = 0; kind < kind_count; ++kind) {
            const double t = terms[kind];
            acc.row[acc.at(kind, jj, fu)] += t;
            acc.row[acc.at(kind, jj, fv)] += t;
            if (same_fold)
              acc.same[acc.at(kind, jj, fu)] += 2.0 * t;
          }
        }
      }
    }
  });

  PairSums total(h_count, folds);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < total.row.size(); ++i) {
      total.row[i] += p.row[i];
      total.same[i] += p.same[i];
    }
  // Diagonal pairs u = v contribute exp(0) = 1 to every sum.
  std::vector<double> fold_count(folds, 0.0);
  for (int f : fold_of)
    fold_count[static_cast<std::size_t>(f)] += 1.0;
  for (std::size_t kind = 0; kind < kind_count; ++kind)
    for (std::size_t j = 0; j < h_count; ++j)
      for (std::size_t f = 0; f < folds; ++f) {
        total.row[total.at(kind, j, f)] += fold_count[f];
        total.same[total.at(kind, j, f)] += fold_count[f];
      }
  return total;
}

} // namespace

CvFoldScores
cv_fold_scores(const TreeSample& sample, const FoldPartition& partition,
               const std::vector<double>& grid, unsigned threads)
{
  validate_grid(grid, false);
  require(partition.n == sample.depth(), "fold partition depth does not match the sample");
  require(partition.assignment.size() == generation_size(sample.depth()),
          "fold partition does not cover G_n");
  const std::size_t folds = static_cast<std::size_t>(partition.folds);
  std::vector<double> fold_count(folds, 0.0);
  for (int f : partition.assignment) {
    require(f >= 0 && static_cast<std::size_t>(f) < folds, "fold index out of range");
    fold_count[static_cast<std::size_t>(f)] += 1.0;
  }
  const double n_total = static_cast<double>(partition.assignment.size());
  for (double c : fold_count) {
    require(c > 0.0, "every fold must be nonempty");
    require(c < n_total, "every fold complement must be nonempty");
  }

  const auto tri = triangle_columns(sample, Population::generation);
  const auto sums = accumulate_pair_sums(tri, partition.assignment, folds, grid, threads);

  constexpr double conv0 = GaussianKernel::l2_norm_squared();  // (K0*K0)(0)
  constexpr double k0 = GaussianKernel::inv_sqrt_2pi;

  CvFoldScores out;
  out.den.assign(grid.size(), std::vector<double>(folds));
  out.num.assign(grid.size(), std::vector<double>(folds));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double h = grid[j];
    const double h3 = h * h * h;
    double total[kind_count] = {};
    for (std::size_t kind = 0; kind < kind_count; ++kind)
      for (std::size_t f = 0; f < folds; ++f)
        total[kind] += sums.row[sums.at(kind, j, f)];
    for (std::size_t k = 0; k < folds; ++k) {
      const double held = fold_count[k];
      const double m = n_total - held;
      auto complement = [&](Kind kind) {
        return total[kind] - 2.0 * sums.row[sums.at(kind, j, k)] + sums.same[sums.at(kind, j, k)];
      };
      auto cross = [&](Kind kind) {
        return sums.row[sums.at(kind, j, k)] - sums.same[sums.at(kind, j, k)];
      };
      out.den[j][k] = conv0 * complement(den_conv) / (m * m * h) -
                      2.0 / held * k0 * cross(den_eval) / (m * h);
      out.num[j][k] = conv0 * conv0 * conv0 * complement(num_conv) / (m * m * h3) -
                      2.0 / held * k0 * k0 * k0 * cross(num_eval) / (m * h3);
    }
  }
  return out;
}

double
j_hat_den(const TreeSample& sample, const FoldPartition& partition, int k, double h)
{
  require(k >= 0 && k < partition.folds, "fold index out of range");
  return cv_fold_scores(sample, partition, { h }, 1).den[0][static_cast<std::size_t>(k)];
}

double
j_hat_num(const TreeSample& sample, const FoldPartition& partition, int k, double h)
{
  require(k >= 0 && k < partition.folds, "fold index out of range");
  return cv_fold_scores(sample, partition, { h }, 1).num[0][static_cast<std::size_t>(k)];
}

CvResult
cv_select(const TreeSample& sample, int folds, const std::vector<double>& grid,
          std::uint64_t seed, unsigned threads)
{
  validate_grid(grid, true);
  const auto partition = make_folds(sample.depth(), folds, seed);
  const auto per_fold = cv_fold_scores(sample, partition, grid, threads);

  CvResult result;
  result.grid = grid;
  result.folds = folds;
  result.seed = seed;
  result.scores_den.resize(grid.size());
  result.scores_num.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double den = 0.0;
    double num = 0.0;
    for (int k = 0; k < folds; ++k) {
      den += per_fold.den[j][static_cast<std::size_t>(k)];
      num += per_fold.num[j][static_cast<std::size_t>(k)];
    }
    result.scores_den[j] = den / folds;
    result.scores_num[j] = num / folds;
  }
  std::size_t best_den = 0;
  std::size_t best_num = 0;
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (result.scores_den[j] < result.scores_den[best_den])
      best_den = j;
    if (result.scores_num[j] < result.scores_num[best_num])
      best_num = j;
  }
  result.h_D_hat = grid[best_den];
  result.h_N_hat = grid[best_num];
  return result;
}

std::vector<double>
default_cv_grid(int n, int count)
{
  require(n >= 0, "depth must be >= 0");
  require(count >= 1, "grid needs at least one value");
  const double lo = std::pow(2.0, -0.33 * n);
  if (count == 1)
    return { 1.0 };
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double log_lo = std::log(lo);
  for (int j = 0; j < count; ++j)
    grid[static_cast<std::size_t>(j)] = std::exp(log_lo * (1.0 - static_cast<double>(j) / (count - 1)));
  grid.back() = 1.0;
  grid.front() = lo;
  return grid;
}

} // namespace bmc
