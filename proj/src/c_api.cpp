#include "bmc/bmc.h"

#include "bmc/bandwidth_cv.hpp"
#include "bmc/bandwidth_rot.hpp"
#include "bmc/bar_model.hpp"
#include "bmc/clt_harness.hpp"
#include "bmc/error.hpp"
#include "bmc/estimators.hpp"
#include "bmc/oracle.hpp"
#include "bmc/parallel.hpp"
#include "bmc/tree.hpp"

#include <cmath>
#include <new>
#include <optional>
#include <string>

struct bmc_tree
{
  bmc::TreeSample sample;
};

struct bmc_estimate
{
  bmc::DensityEstimate estimate;
};

struct bmc_cv_result
{
  bmc::CvResult result;
};

struct bmc_report
{
  bmc::ExperimentReport report;
  std::string json;
};

struct bmc_oracle_table
{
  std::vector<bmc::OracleCheckRow> rows;
  std::string csv;
};

struct bmc_figure
{
  bmc::FigureResult result;
  std::vector<std::vector<double>> flat_points;
};

namespace {

thread_local std::string last_error;

template<class Fn>
int
guarded(Fn&& fn)
{
  try {
    fn();
    last_error.clear();
    return BMC_OK;
  } catch (const bmc::Error& e) {
    last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::invalid_argument& e) {
    last_error = e.what();
    return BMC_ERR_INVALID_ARGUMENT;
  } catch (const std::out_of_range& e) {
    last_error = e.what();
    return BMC_ERR_OUT_OF_RANGE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return BMC_ERR_RUNTIME;
  } catch (const std::exception& e) {
    last_error = e.what();
    return BMC_ERR_RUNTIME;
  } catch (...) {
    last_error = "unknown error";
    return BMC_ERR_RUNTIME;
  }
}

template<class T>
T&
deref(T* p, const char* what)
{
  if (!p)
    throw bmc::InvalidArgument(std::string(what) + " must not be null");
  return *p;
}

bmc::BarParams
to_params(const bmc_bar_params* p)
{
  const auto& v = deref(p, "params");
  bmc::BarParams out{ v.a0, v.a1, v.b0, v.b1, v.sigma, v.rho };
  out.validate();
  return out;
}

bmc::Population
to_population(int p)
{
  if (p == BMC_POP_GEN)
    return bmc::Population::generation;
  if (p == BMC_POP_TREE)
    return bmc::Population::tree;
  throw bmc::InvalidArgument("population must be BMC_POP_GEN or BMC_POP_TREE");
}

bmc::BandwidthTriple
to_bandwidths(const bmc_bandwidths* b)
{
  const auto& v = deref(b, "bandwidths");
  bmc::BandwidthTriple out{ v.h, v.h0, v.h1 };
  out.validate();
  return out;
}

unsigned
threads_of(int requested)
{
  return bmc::resolve_threads(requested);
}

bmc::RealFn
test_function(int fn)
{
  switch (fn) {
    case BMC_FN_ONE:
      return [](double) { return 1.0; };
    case BMC_FN_IDENTITY:
      return [](double y) { return y; };
    case BMC_FN_SQUARE:
      return [](double y) { return y * y; };
    case BMC_FN_BUMP:
      return bmc::oracle_bump;
  }
  throw bmc::InvalidArgument("unknown test function id");
}

bmc::CltStatistic
to_statistic(int s)
{
  switch (s) {
    case BMC_STAT_P:
      return bmc::CltStatistic::transition;
    case BMC_STAT_MU_TRI:
      return bmc::CltStatistic::mu_triangle;
    case BMC_STAT_MU_TRI_FLUCTUATION:
      return bmc::CltStatistic::mu_triangle_fluctuation;
  }
  throw bmc::InvalidArgument("unknown statistic id");
}

bmc::SelectorKind
to_selector(int s)
{
  switch (s) {
    case BMC_SELECT_FIXED:
      return bmc::SelectorKind::fixed;
    case BMC_SELECT_CV:
      return bmc::SelectorKind::cv;
    case BMC_SELECT_ROT:
      return bmc::SelectorKind::rot;
  }
  throw bmc::InvalidArgument("unknown selector id");
}

template<class T>
std::vector<T>
array_of(const T* data, std::size_t count, const char* what)
{
  if (count == 0)
    return {};
  if (!data)
    throw bmc::InvalidArgument(std::string(what) + " is null but its count is nonzero");
  return std::vector<T>(data, data + count);
}

const char*
checked_path(const char* path)
{
  if (!path || !*path)
    throw bmc::InvalidArgument("path must be a nonempty string");
  return path;
}

} // namespace

extern "C" {

const char*
bmc_last_error_message(void)
{
  return last_error.c_str();
}

const char*
bmc_version(void)
{
  return "0.1.0";
}

int
bmc_resolve_threads(int requested)
{
  return static_cast<int>(bmc::resolve_threads(requested));
}

int
bmc_simulate(const bmc_bar_params* params, int n, int init_kind, double x0, uint64_t seed,
             int threads, bmc_tree** out)
{
  return guarded([&] {
    auto& dst = deref(out, "out");
    bmc::InitSpec init;
    if (init_kind == BMC_INIT_DIRAC)
      init = bmc::InitSpec::dirac(x0);
    else if (init_kind == BMC_INIT_STATIONARY)
      init = bmc::InitSpec::stationary();
    else
      throw bmc::InvalidArgument("init kind must be BMC_INIT_DIRAC or BMC_INIT_STATIONARY");
    dst = new bmc_tree{ bmc::simulate(to_params(params), n, init, seed, threads_of(threads)) };
  });
}

int
bmc_tree_from_values(int depth, const double* values, size_t count, bmc_tree** out)
{
  return guarded([&] {
    auto& dst = deref(out, "out");
    dst = new bmc_tree{ bmc::TreeSample(depth, array_of(values, count, "values")) };
  });
}

int
bmc_tree_read_csv(const char* path, bmc_tree** out)
{
  return guarded([&] {
    auto& dst = deref(out, "out");
    dst = new bmc_tree{ bmc::read_tree_csv(std::string(checked_path(path))) };
  });
}

int
bmc_tree_write_csv(const bmc_tree* tree, const char* path)
{
  return guarded(
    [&] { bmc::write_tree_csv(deref(tree, "tree").sample, std::string(checked_path(path))); });
}

int
bmc_tree_read_binary(const char* path, bmc_tree** out)
{
  return guarded([&] {
    auto& dst = deref(out, "out");
    dst = new bmc_tree{ bmc::read_tree_binary(checked_path(path)) };
  });
}

int
bmc_tree_write_binary(const bmc_tree* tree, const char* path)
{
  return guarded(
    [&] { bmc::write_tree_binary(deref(tree, "tree").sample, checked_path(path)); });
}

int
bmc_tree_depth(const bmc_tree* tree, int* out)
{
  return guarded([&] { deref(out, "out") = deref(tree, "tree").sample.depth(); });
}

int
bmc_tree_values(const bmc_tree* tree, const double** values, size_t* count)
{
  return guarded([&] {
    const auto v = deref(tree, "tree").sample.values();
    deref(values, "values") = v.data();
    deref(count, "count") = v.size();
  });
}

void
bmc_tree_free(bmc_tree* tree)
{
  delete tree;
}

int
bmc_transition_density(const bmc_bar_params* params, double x, double y, double z, double* out)
{
  return guarded(
    [&] { deref(out, "out") = bmc::transition_density_p(to_params(params), x, y, z); });
}

int
bmc_stationary_mu(double a, double sigma, double x, double* out)
{
  return guarded([&] {
    const bmc::SymmetricBarParams p{ a, sigma };
    p.validate();
    deref(out, "out") = bmc::stationary_mu(p, x);
  });
}

int
bmc_mu_triangle(double a, double sigma, double x, double x0, double x1, double* out)
{
  return guarded([&] {
    const bmc::SymmetricBarParams p{ a, sigma };
    p.validate();
    deref(out, "out") = bmc::mu_triangle(p, x, x0, x1);
  });
}

int
bmc_mu_hat(const bmc_tree* tree, int population, double h, double x, double* out)
{
  return guarded([&] {
    deref(out, "out") = bmc::mu_hat(deref(tree, "tree").sample, to_population(population), h, x);
  });
}

int
bmc_mu_tri_hat(const bmc_tree* tree, int population, const bmc_bandwidths* bw, double x,
               double x0, double x1, double* out)
{
  return guarded([&] {
    deref(out, "out") = bmc::mu_tri_hat(deref(tree, "tree").sample, to_population(population),
                                        to_bandwidths(bw), x, x0, x1);
  });
}

int
bmc_p_hat(const bmc_tree* tree, int population, const bmc_bandwidths* numerator,
          double h_denominator, double x, double x0, double x1, double* out)
{
  return guarded([&] {
    deref(out, "out") = bmc::p_hat(deref(tree, "tree").sample, to_population(population),
                                   to_bandwidths(numerator), h_denominator, x, x0, x1);
  });
}

int
bmc_estimate_grid(const bmc_tree* tree, const bmc_estimator_spec* spec, const double* points,
                  size_t count, int threads, bmc_estimate** out)
{
  return guarded([&] {
    auto& dst = deref(out, "out");
    const auto& s = deref(spec, "spec");
    bmc::EstimatorSpec es;
    switch (s.kind) {
      case BMC_EST_MU:
        es.kind = bmc::EstimatorKind::mu;
        break;
      case BMC_EST_MU_TRI:
        es.kind = bmc::EstimatorKind::mu_triangle;
        break;
      case BMC_EST_P:
        es.kind = bmc::EstimatorKind::transition;
        break;
      default:
        throw bmc::InvalidArgument("unknown estimator kind");
    }
    es.population = to_population(s.population);
    es.numerator = { s.numerator.h, s.numerator.h0, s.numerator.h1 };
    es.denominator_h = s.denominator_h;
    const auto flat = array_of(points, 3 * count, "points");
    std::vector<bmc::GridPoint> grid(count);
    for (std::size_t i = 0; i < count; ++i)
      grid[i] = { flat[3 * i], flat[3 * i + 1], flat[3 * i + 2] };
    dst = new bmc_estimate{ bmc::evaluate_on_grid(deref(tree, "tree").sample, es, grid,
                                                  threads_of(threads)) };
  });
}

int
bmc_estimate_values(const bmc_estimate* est, const double** values, size_t* count)
{
  return guarded([&] {
    const auto& e = deref(est, "estimate").estimate;
    deref(values, "values") = e.values.data();
    deref(count, "count") = e.values.size();
  });
}

int
bmc_estimate_write(const bmc_estimate* est, const char* csv_path, const char* json_path)
{
  return guarded([&] {
    bmc::write_density_estimate(deref(est, "estimate").estimate, checked_path(csv_path),
                                checked_path(json_path));
  });
}

void
bmc_estimate_free(bmc_estimate* est)
{
  delete est;
}

int
bmc_default_cv_grid(int n, int count, double* out)
{
  return guarded([&] {
    deref(out, "out");
    const auto grid = bmc::default_cv_grid(n, count);
    std::copy(grid.begin(), grid.end(), out);
  });
}

int
bmc_cv_select(const bmc_tree* tree, int folds, const double* grid, size_t grid_count,
              uint64_t seed, int threads, bmc_cv_result** out)
{
  return guarded([&] {
    auto& dst = deref(out, "out");
    const auto& sample = deref(tree, "tree").sample;
    auto g = array_of(grid, grid_count, "grid");
    if (g.empty())
      g = bmc::default_cv_grid(sample.depth());
    dst = new bmc_cv_result{ bmc::cv_select(sample, folds, g, seed, threads_of(threads)) };
  });
}

int
bmc_cv_result_bandwidths(const bmc_cv_result* r, double* h_D, double* h_N)
{
  return guarded([&] {
    const auto& res = deref(r, "result").result;
    deref(h_D, "h_D") = res.h_D_hat;
    deref(h_N, "h_N") = res.h_N_hat;
  });
}

int
bmc_cv_result_scores(const bmc_cv_result* r, const double** grid, const double** den,
                     const double** num, size_t* count)
{
  return guarded([&] {
    const auto& res = deref(r, "result").result;
    deref(grid, "grid") = res.grid.data();
    deref(den, "den") = res.scores_den.data();
    deref(num, "num") = res.scores_num.data();
    deref(count, "count") = res.grid.size();
  });
}

void
bmc_cv_result_free(bmc_cv_result* r)
{
  delete r;
}

int
bmc_cv_fold_score(const bmc_tree* tree, int folds, uint64_t seed, int k, double h, double* den,
                  double* num)
{
  return guarded([&] {
    const auto& sample = deref(tree, "tree").sample;
    const auto partition = bmc::make_folds(sample.depth(), folds, seed);
    bmc::require(k >= 0 && k < folds, "fold index out of range");
    const auto scores = bmc::cv_fold_scores(sample, partition, { h }, 1);
    deref(den, "den") = scores.den[0][static_cast<std::size_t>(k)];
    deref(num, "num") = scores.num[0][static_cast<std::size_t>(k)];
  });
}

int
bmc_rot_select(const bmc_tree* tree, int m, bmc_rot_selection* out)
{
  return guarded([&] {
    auto& dst = deref(out, "out");
    const auto sel = bmc::rot_select(deref(tree, "tree").sample,
                                     m > 0 ? std::optional<int>(m) : std::nullopt);
    dst.h_D = sel.h_D_hat;
    dst.h_N = sel.h_N_hat;
    dst.h_0N = sel.h_0N_hat;
    dst.h_1N = sel.h_1N_hat;
    dst.a_hat = sel.a_hat;
    for (int i = 0; i < 3; ++i)
      dst.sigma_hats[i] = sel.sigma_hats[static_cast<std::size_t>(i)];
    dst.n = sel.n;
    dst.m = sel.m;
  });
}

int
bmc_a_hat(const bmc_tree* tree, int m, double* out)
{
  return guarded([&] {
    deref(out, "out") = bmc::a_hat(deref(tree, "tree").sample,
                                   m > 0 ? std::optional<int>(m) : std::nullopt);
  });
}

int
bmc_rot_constants_compute(double a, double sigma, bmc_rot_constants* out)
{
  return guarded([&] {
    auto& dst = deref(out, "out");
    const auto c = bmc::rot_constants(a, sigma);
    dst.sigma_a = c.sigma_a;
    dst.c1 = c.c1;
    dst.c2 = c.c2;
    dst.C = c.C_a_sigma;
    dst.M = c.M_a_sigma;
    dst.c_tri = c.c_tri;
    dst.c0_tri = c.c0_tri;
    dst.c1_tri = c.c1_tri;
    dst.c2_tri = c.c2_tri;
    dst.C_tri = c.C_tri_a_sigma;
    dst.M_tri = c.M_tri_a_sigma;
    const double b[5] = { c.b1, c.b2, c.b3, c.b4, c.b5 };
    const auto ids = bmc::ratio_identities(c);
    for (int i = 0; i < 5; ++i) {
      dst.b[i] = b[i];
      dst.ratio_lhs[i] = ids[static_cast<std::size_t>(i)].lhs;
      dst.ratio_rhs[i] = ids[static_cast<std::size_t>(i)].rhs;
    }
  });
}

int
bmc_optimal_h_den(double a, double sigma, int n, double* out)
{
  return guarded(
    [&] { deref(out, "out") = bmc::optimal_h_den(bmc::rot_constants(a, sigma), n); });
}

int
bmc_optimal_h_num(double a, double sigma, int n, bmc_bandwidths* out)
{
  return guarded([&] {
    const auto b = bmc::optimal_h_num(bmc::rot_constants(a, sigma), n);
    deref(out, "out") = { b.h, b.h0, b.h1 };
  });
}

int
bmc_true_variance_clt(double a, double sigma, double x, double x0, double x1, int statistic,
                      int population, double* out)
{
  return guarded([&] {
    deref(out, "out") = bmc::true_variance_clt({ a, sigma }, x, x0, x1, to_statistic(statistic),
                                               to_population(population));
  });
}

int
bmc_expected_generation_sum(const bmc_bar_params* params, int fn, double x, int n, double* out)
{
  return guarded([&] {
    deref(out, "out") = bmc::expected_generation_sum(to_params(params), test_function(fn), x, n);
  });
}

int
bmc_second_moment_generation_sum(const bmc_bar_params* params, int fn, double x, int n,
                                 double* out)
{
  return guarded([&] {
    deref(out, "out") =
      bmc::second_moment_generation_sum(to_params(params), test_function(fn), x, n);
  });
}

int
bmc_mixed_moment(const bmc_bar_params* params, int f, int g, double x, int n, int m, double* out)
{
  return guarded([&] {
    deref(out, "out") =
      bmc::mixed_moment(to_params(params), test_function(f), test_function(g), x, n, m);
  });
}

void
bmc_oracle_check_spec_default(bmc_oracle_check_spec* spec)
{
  if (!spec)
    return;
  const bmc::OracleCheckSpec d;
  *spec = { d.model.a, d.model.sigma, d.x, d.max_depth, d.trees, d.seed, d.z_limit };
}

int
bmc_oracle_check(const bmc_oracle_check_spec* spec, int threads, bmc_oracle_table** out)
{
  return guarded([&] {
    auto& dst = deref(out, "out");
    const auto& s = deref(spec, "spec");
    bmc::OracleCheckSpec os;
    os.model = { s.a, s.sigma };
    os.x = s.x;
    os.max_depth = s.max_depth;
    os.trees = s.trees;
    os.seed = s.seed;
    os.z_limit = s.z_limit;
    auto rows = bmc::run_oracle_check(os, threads_of(threads));
    auto csv = bmc::oracle_rows_csv(rows);
    dst = new bmc_oracle_table{ std::move(rows), std::move(csv) };
  });
}

int
bmc_oracle_table_count(const bmc_oracle_table* t, size_t* count)
{
  return guarded([&] { deref(count, "count") = deref(t, "table").rows.size(); });
}

int
bmc_oracle_table_row(const bmc_oracle_table* t, size_t i, bmc_oracle_row* row)
{
  return guarded([&] {
    const auto& rows = deref(t, "table").rows;
    if (i >= rows.size())
      throw bmc::OutOfRange("oracle row index out of range");
    const auto& r = rows[i];
    deref(row, "row") = { r.formula.c_str(), r.function.c_str(), r.n, r.m, r.quadrature,
                          r.mc_estimate, r.standard_error, r.z, r.pass ? 1 : 0 };
  });
}

int
bmc_oracle_table_csv(const bmc_oracle_table* t, const char** csv)
{
  return guarded([&] { deref(csv, "csv") = deref(t, "table").csv.c_str(); });
}

void
bmc_oracle_table_free(bmc_oracle_table* t)
{
  delete t;
}

void
bmc_experiment_spec_default(bmc_experiment_spec* spec)
{
  if (!spec)
    return;
  const bmc::ExperimentSpec d;
  *spec = {};
  spec->model = { d.model.a0, d.model.a1, d.model.b0, d.model.b1, d.model.sigma, d.model.rho };
  spec->replications = d.replications;
  spec->point[0] = d.point[0];
  spec->point[1] = d.point[1];
  spec->point[2] = d.point[2];
  spec->population = BMC_POP_GEN;
  spec->selector = BMC_SELECT_FIXED;
  spec->gamma = d.selector.gamma;
  spec->folds = d.selector.folds;
  spec->seed = d.seed;
}

int
bmc_run_clt(const bmc_experiment_spec* spec, int statistic, int threads, bmc_report** out)
{
  return guarded([&] {
    auto& dst = deref(out, "out");
    const auto& s = deref(spec, "spec");
    bmc::ExperimentSpec es;
    es.model = to_params(&s.model);
    if (s.n_count > 0)
      es.n_list = array_of(s.n_list, s.n_count, "n_list");
    es.replications = s.replications;
    es.point = { s.point[0], s.point[1], s.point[2] };
    es.population = to_population(s.population);
    es.selector.kind = to_selector(s.selector);
    es.selector.gamma = s.gamma;
    es.selector.folds = s.folds;
    es.selector.grid = array_of(s.cv_grid, s.cv_grid_count, "cv_grid");
    es.seed = s.seed;
    const auto stat = to_statistic(statistic);
    bmc::ExperimentReport report;
    if (stat == bmc::CltStatistic::transition)
      report = bmc::run_clt_p_hat(es, threads_of(threads));
    else if (stat == bmc::CltStatistic::mu_triangle)
      report = bmc::run_clt_mu_tri(es, threads_of(threads));
    else
      throw bmc::InvalidArgument("CLT runs support the p and mu_tri statistics");
    auto json = bmc::report_json(report);
    dst = new bmc_report{ std::move(report), std::move(json) };
  });
}

int
bmc_report_row_count(const bmc_report* r, size_t* count)
{
  return guarded([&] { deref(count, "count") = deref(r, "report").report.rows.size(); });
}

int
bmc_report_row_at(const bmc_report* r, size_t i, bmc_report_row* row)
{
  return guarded([&] {
    const auto& rows = deref(r, "report").report.rows;
    if (i >= rows.size())
      throw bmc::OutOfRange("report row index out of range");
    const auto& x = rows[i];
    deref(row, "row") = { x.seed,          x.replication, x.n,        x.h_used, x.h_product,
                          x.h_denominator, x.estimate,    x.standardized };
  });
}

int
bmc_report_summary_count(const bmc_report* r, size_t* count)
{
  return guarded([&] { deref(count, "count") = deref(r, "report").report.summaries.size(); });
}

int
bmc_report_summary(const bmc_report* r, size_t i, bmc_summary* out)
{
  return guarded([&] {
    const auto& sums = deref(r, "report").report.summaries;
    if (i >= sums.size())
      throw bmc::OutOfRange("summary index out of range");
    const auto& s = sums[i];
    deref(out, "out") = { s.n,        s.count,    s.truth,    s.sigma2,
                          s.mean,     s.variance, s.skewness, s.excess_kurtosis,
                          s.ks_distance, s.median_abs_error };
  });
}

int
bmc_report_write_csv(const bmc_report* r, const char* path)
{
  return guarded([&] { bmc::write_report_csv(deref(r, "report").report, checked_path(path)); });
}

int
bmc_report_write_json(const bmc_report* r, const char* path)
{
  return guarded([&] { bmc::write_report_json(deref(r, "report").report, checked_path(path)); });
}

int
bmc_report_json(const bmc_report* r, const char** json)
{
  return guarded([&] { deref(json, "json") = deref(r, "report").json.c_str(); });
}

void
bmc_report_free(bmc_report* r)
{
  delete r;
}

void
bmc_figure_spec_default(bmc_figure_spec* spec)
{
  if (!spec)
    return;
  const bmc::FigureSpec d;
  *spec = {};
  spec->figure_case = 1;
  spec->selector = BMC_SELECT_ROT;
  spec->seeds = d.seeds;
  spec->seed = d.seed;
  spec->x = d.x;
  spec->lo = d.lo;
  spec->hi = d.hi;
  spec->grid_points = d.grid_points;
  spec->folds = d.folds;
  spec->root = d.root;
}

int
bmc_run_figures(const bmc_figure_spec* spec, int threads, bmc_figure** out)
{
  return guarded([&] {
    auto& dst = deref(out, "out");
    const auto& s = deref(spec, "spec");
    bmc::FigureSpec fs;
    if (s.figure_case == 1)
      fs.figure_case = bmc::FigureCase::case1;
    else if (s.figure_case == 2)
      fs.figure_case = bmc::FigureCase::case2;
    else
      throw bmc::InvalidArgument("figure case must be 1 or 2");
    fs.selector = to_selector(s.selector);
    if (s.n_count > 0)
      fs.n_list = array_of(s.n_list, s.n_count, "n_list");
    fs.seeds = s.seeds;
    fs.seed = s.seed;
    fs.x = s.x;
    fs.lo = s.lo;
    fs.hi = s.hi;
    fs.grid_points = s.grid_points;
    fs.folds = s.folds;
    fs.cv_grid = array_of(s.cv_grid, s.cv_grid_count, "cv_grid");
    fs.root = s.root;
    auto result = bmc::run_figure_reproduction(fs, threads_of(threads));
    std::vector<std::vector<double>> flat;
    for (const auto& slice : result.slices) {
      std::vector<double> pts;
      pts.reserve(3 * slice.points.size());
      for (const auto& p : slice.points)
        pts.insert(pts.end(), p.begin(), p.end());
      flat.push_back(std::move(pts));
    }
    dst = new bmc_figure{ std::move(result), std::move(flat) };
  });
}

int
bmc_figure_mean_sup_error(const bmc_figure* f, const double** values, size_t* count)
{
  return guarded([&] {
    const auto& r = deref(f, "figure").result;
    deref(values, "values") = r.mean_sup_error.data();
    deref(count, "count") = r.mean_sup_error.size();
  });
}

int
bmc_figure_slice_count(const bmc_figure* f, size_t* count)
{
  return guarded([&] { deref(count, "count") = deref(f, "figure").result.slices.size(); });
}

int
bmc_figure_slice_at(const bmc_figure* f, size_t i, bmc_figure_slice* out)
{
  return guarded([&] {
    const auto& fig = deref(f, "figure");
    if (i >= fig.result.slices.size())
      throw bmc::OutOfRange("slice index out of range");
    const auto& s = fig.result.slices[i];
    auto& dst = deref(out, "out");
    dst.n = s.n;
    dst.seed = s.seed;
    dst.numerator = { s.numerator.h, s.numerator.h0, s.numerator.h1 };
    dst.h_denominator = s.h_denominator;
    dst.sup_error = s.sup_error;
    dst.point_count = s.points.size();
    dst.points = fig.flat_points[i].data();
    dst.estimate = s.estimate.data();
    dst.truth = s.truth.data();
  });
}

int
bmc_figure_write(const bmc_figure* f, const char* prefix, int gnuplot)
{
  return guarded([&] {
    bmc::write_figure_outputs(deref(f, "figure").result, checked_path(prefix), gnuplot != 0);
  });
}

void
bmc_figure_free(bmc_figure* f)
{
  delete f;
}

} // extern "C"
