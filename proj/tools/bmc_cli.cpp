// bmc: simulate bifurcating autoregressive trees, estimate transition
// densities, select bandwidths and run the verification experiments.

#include "bmc/bmc.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;

namespace {

constexpr int exit_validation = 1;
constexpr int exit_runtime = 2;

// Bad user input; reported with exit code 1.
struct ConfigError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Library failure; the code decides between exit 1 and 2.
struct ApiError : std::runtime_error
{
  int code;
  ApiError(int c, const std::string& what)
    : std::runtime_error(what)
    , code(c)
  {
  }
};

void
check(int status)
{
  if (status != BMC_OK)
    throw ApiError(status, bmc_last_error_message());
}

struct CommonFlags
{
  std::string config;
  std::string out;
  std::string tree;
  std::string sidecar;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string population;
};

// A parsed config document plus its source text, for line numbers.
class Config
{
public:
  Config() = default;

  static Config load(const std::string& path)
  {
    Config c;
    c.path_ = path;
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    c.text_ = ss.str();
    try {
      c.doc_ = json::parse(c.text_);
    } catch (const json::parse_error& e) {
      const auto [line, col] = c.position(e.byte);
      throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                        ": malformed JSON: " + e.what());
    }
    if (!c.doc_.is_object())
      throw ConfigError(path + ":1: config must be a JSON object");
    return c;
  }

  const json& doc() const { return doc_; }
  bool empty() const { return doc_.is_null(); }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const
  {
    throw ConfigError(path_ + ":" + std::to_string(line_of(key)) + ": " + message);
  }

  int line_of(const std::string& key) const
  {
    const auto at = text_.find("\"" + key + "\"");
    if (at == std::string::npos)
      return 1;
    return position(at + 1).first;
  }

private:
  std::pair<int, int> position(std::size_t byte) const
  {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return { line, col };
  }

  std::string path_ = "<config>";
  std::string text_;
  json doc_;
};

// Typed access to one JSON object with unknown-key rejection.
class Section
{
public:
  Section(const Config& cfg, const json* obj, std::string name)
    : cfg_(cfg)
    , obj_(obj)
    , name_(std::move(name))
  {
    if (obj_ && !obj_->is_object())
      cfg_.fail(name_, "'" + name_ + "' must be a JSON object");
  }

  void allow(std::initializer_list<const char*> keys)
  {
    if (!obj_)
      return;
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj_->items())
      if (!ok.count(k))
        cfg_.fail(k, "unknown key '" + k + "' in " + name_);
  }

  bool has(const char* key) const { return obj_ && obj_->contains(key); }

  template<class T>
  T get(const char* key, T fallback) const
  {
    if (!has(key))
      return fallback;
    try {
      return (*obj_)[key].template get<T>();
    } catch (const json::exception&) {
      cfg_.fail(key, "key '" + std::string(key) + "' in " + name_ + " has the wrong type");
    }
  }

  Section child(const char* key) const
  {
    return Section(cfg_, has(key) ? &(*obj_)[key] : nullptr, key);
  }

  const Config& config() const { return cfg_; }

private:
  const Config& cfg_;
  const json* obj_;
  std::string name_;
};

Section
root(const Config& cfg)
{
  return Section(cfg, cfg.empty() ? nullptr : &cfg.doc(), "config");
}

bmc_bar_params
read_model(const Section& top, bmc_bar_params fallback)
{
  auto m = top.child("model");
  m.allow({ "a0", "a1", "b0", "b1", "sigma", "rho", "a" });
  bmc_bar_params p = fallback;
  if (m.has("a")) {
    p.a0 = p.a1 = m.get<double>("a", 0.0);
  }
  p.a0 = m.get("a0", p.a0);
  p.a1 = m.get("a1", p.a1);
  p.b0 = m.get("b0", p.b0);
  p.b1 = m.get("b1", p.b1);
  p.sigma = m.get("sigma", p.sigma);
  p.rho = m.get("rho", p.rho);
  return p;
}

json
model_json(const bmc_bar_params& p)
{
  return { { "a0", p.a0 }, { "a1", p.a1 }, { "b0", p.b0 },
           { "b1", p.b1 }, { "sigma", p.sigma }, { "rho", p.rho } };
}

int
population_id(const std::string& text)
{
  if (text == "gen" || text == "generation" || text == "GEN_N")
    return BMC_POP_GEN;
  if (text == "tree" || text == "TREE_N")
    return BMC_POP_TREE;
  throw ConfigError("population must be 'gen' or 'tree', got '" + text + "'");
}

const char*
population_name(int id)
{
  return id == BMC_POP_TREE ? "tree" : "gen";
}

int
selector_id(const std::string& text)
{
  if (text == "fixed" || text == "FIXED")
    return BMC_SELECT_FIXED;
  if (text == "cv" || text == "CV")
    return BMC_SELECT_CV;
  if (text == "rot" || text == "ROT")
    return BMC_SELECT_ROT;
  throw ConfigError("selector must be 'fixed', 'cv' or 'rot', got '" + text + "'");
}

const char*
selector_name(int id)
{
  return id == BMC_SELECT_CV ? "cv" : id == BMC_SELECT_ROT ? "rot" : "fixed";
}

bool
is_binary_path(const std::string& path)
{
  const auto ext = std::filesystem::path(path).extension().string();
  return ext == ".bin" || ext == ".bmct";
}

struct TreeHandle
{
  bmc_tree* tree = nullptr;
  ~TreeHandle() { bmc_tree_free(tree); }
};

void
load_tree(const std::string& path, TreeHandle& handle)
{
  if (path.empty())
    throw ConfigError("a tree file is required (--tree PATH or \"tree\" in the config)");
  check(is_binary_path(path) ? bmc_tree_read_binary(path.c_str(), &handle.tree)
                             : bmc_tree_read_csv(path.c_str(), &handle.tree));
}

// Writes text through a sibling temporary file so failures leave nothing behind.
//! Shortest round-trip decimal form.
std::string
shortest(double v)
{
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void
write_atomic(const std::string& path, const std::string& content)
{
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw ApiError(BMC_ERR_IO, "cannot write " + path);
    out << content;
    out.flush();
    if (!out)
      throw ApiError(BMC_ERR_IO, "cannot write " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ApiError(BMC_ERR_IO, "cannot rename into " + path);
  }
}

void
write_sidecar(const CommonFlags& flags, const std::string& command, const std::string& out,
              json resolved)
{
  std::string path = flags.sidecar;
  if (path.empty())
    path = out.empty() ? command + ".config.json" : out + ".config.json";
  json doc;
  doc["command"] = command;
  doc["library_version"] = bmc_version();
  doc["threads"] = bmc_resolve_threads(flags.threads);
  doc["resolved"] = std::move(resolved);
  write_atomic(path, doc.dump(2) + "\n");
}

std::string
pick(const std::string& flag, const Section& top, const char* key, const std::string& fallback)
{
  if (!flag.empty())
    return flag;
  return top.get<std::string>(key, fallback);
}

std::uint64_t
pick_seed(const CommonFlags& flags, const Section& top, std::uint64_t fallback)
{
  if (flags.seed)
    return *flags.seed;
  return top.get<std::uint64_t>("seed", fallback);
}

// ---- commands ----

int
cmd_simulate(const CommonFlags& flags, const Config& cfg)
{
  auto top = root(cfg);
  top.allow({ "model", "n", "init", "seed", "out", "format" });
  const auto model = read_model(top, { 0.5, 0.5, 0.0, 0.0, 1.0, 0.0 });
  const int n = top.get("n", 10);
  auto init = top.child("init");
  init.allow({ "kind", "x0" });
  const std::string kind = init.get<std::string>("kind", "dirac");
  const double x0 = init.get("x0", 0.0);
  if (kind != "dirac" && kind != "stationary")
    init.config().fail("kind", "init kind must be 'dirac' or 'stationary'");
  const std::uint64_t seed = pick_seed(flags, top, 1);
  const std::string out = pick(flags.out, top, "out", "");
  if (out.empty())
    throw ConfigError("simulate needs an output path (--out PATH)");
  const std::string format = top.get<std::string>("format", is_binary_path(out) ? "binary" : "csv");
  if (format != "csv" && format != "binary")
    cfg.fail("format", "format must be 'csv' or 'binary'");

  TreeHandle t;
  check(bmc_simulate(&model, n, kind == "dirac" ? BMC_INIT_DIRAC : BMC_INIT_STATIONARY, x0, seed,
                     flags.threads, &t.tree));
  check(format == "binary" ? bmc_tree_write_binary(t.tree, out.c_str())
                           : bmc_tree_write_csv(t.tree, out.c_str()));
  write_sidecar(flags, "simulate", out,
                { { "model", model_json(model) },
                  { "n", n },
                  { "init", { { "kind", kind }, { "x0", x0 } } },
                  { "seed", seed },
                  { "out", out },
                  { "format", format } });
  return 0;
}

int
cmd_estimate(const CommonFlags& flags, const Config& cfg)
{
  auto top = root(cfg);
  top.allow({ "tree", "estimator", "population", "bandwidths", "points", "grid", "out" });
  TreeHandle t;
  const std::string tree_path = pick(flags.tree, top, "tree", "");
  load_tree(tree_path, t);
  int depth = 0;
  check(bmc_tree_depth(t.tree, &depth));

  const std::string estimator = top.get<std::string>("estimator", "p");
  bmc_estimator_spec spec{};
  if (estimator == "mu")
    spec.kind = BMC_EST_MU;
  else if (estimator == "mu_tri")
    spec.kind = BMC_EST_MU_TRI;
  else if (estimator == "p")
    spec.kind = BMC_EST_P;
  else
    cfg.fail("estimator", "estimator must be 'mu', 'mu_tri' or 'p'");
  spec.population = population_id(pick(flags.population, top, "population", "gen"));

  const double h_default = std::pow(2.0, -0.2 * depth);
  auto bw = top.child("bandwidths");
  bw.allow({ "h", "h0", "h1", "h_den" });
  spec.numerator.h = bw.get("h", h_default);
  spec.numerator.h0 = bw.get("h0", spec.numerator.h);
  spec.numerator.h1 = bw.get("h1", spec.numerator.h);
  spec.denominator_h = bw.get("h_den", h_default);

  std::vector<double> flat;
  json points_json = json::array();
  if (top.has("points") && top.has("grid"))
    cfg.fail("grid", "give either 'points' or 'grid', not both");
  if (top.has("grid")) {
    auto g = top.child("grid");
    g.allow({ "x", "x0", "x1" });
    const auto xs = g.get<std::vector<double>>("x", { 0.0 });
    const auto x0s = g.get<std::vector<double>>("x0", { 0.0 });
    const auto x1s = g.get<std::vector<double>>("x1", { 0.0 });
    for (double a : xs)
      for (double b : x0s)
        for (double c : x1s)
          flat.insert(flat.end(), { a, b, c });
  } else {
    const auto pts =
      top.get<std::vector<std::vector<double>>>("points", { { 0.0, 0.0, 0.0 } });
    for (const auto& p : pts) {
      if (p.size() != 3)
        cfg.fail("points", "every point must be an [x, x0, x1] triple");
      flat.insert(flat.end(), p.begin(), p.end());
    }
  }
  for (std::size_t i = 0; i < flat.size(); i += 3)
    points_json.push_back({ flat[i], flat[i + 1], flat[i + 2] });

  const std::string out = pick(flags.out, top, "out", "");
  if (out.empty())
    throw ConfigError("estimate needs an output path (--out PATH)");

  bmc_estimate* est = nullptr;
  check(bmc_estimate_grid(t.tree, &spec, flat.data(), flat.size() / 3, flags.threads, &est));
  const int status = bmc_estimate_write(est, out.c_str(), (out + ".meta.json").c_str());
  bmc_estimate_free(est);
  check(status);
  write_sidecar(flags, "estimate", out,
                { { "tree", tree_path },
                  { "estimator", estimator },
                  { "population", population_name(spec.population) },
                  { "bandwidths",
                    { { "h", spec.numerator.h },
                      { "h0", spec.numerator.h0 },
                      { "h1", spec.numerator.h1 },
                      { "h_den", spec.denominator_h } } },
                  { "points", points_json },
                  { "out", out } });
  return 0;
}

int
cmd_cv_select(const CommonFlags& flags, const Config& cfg)
{
  auto top = root(cfg);
  top.allow({ "tree", "folds", "K", "grid", "seed", "out" });
  TreeHandle t;
  const std::string tree_path = pick(flags.tree, top, "tree", "");
  load_tree(tree_path, t);
  int depth = 0;
  check(bmc_tree_depth(t.tree, &depth));
  if (top.has("folds") && top.has("K"))
    cfg.fail("K", "give either 'K' or 'folds', not both");
  const int folds = top.has("K") ? top.get("K", 5) : top.get("folds", 5);
  std::vector<double> grid(32);
  check(bmc_default_cv_grid(depth, 32, grid.data()));
  grid = top.get("grid", grid);
  const std::uint64_t seed = pick_seed(flags, top, 1);
  const std::string out = pick(flags.out, top, "out", "");

  bmc_cv_result* r = nullptr;
  check(bmc_cv_select(t.tree, folds, grid.data(), grid.size(), seed, flags.threads, &r));
  double h_D = 0.0, h_N = 0.0;
  const double *g = nullptr, *den = nullptr, *num = nullptr;
  std::size_t count = 0;
  bmc_cv_result_bandwidths(r, &h_D, &h_N);
  bmc_cv_result_scores(r, &g, &den, &num, &count);
  json doc = { { "h_D_hat", h_D }, { "h_N_hat", h_N }, { "K", folds }, { "seed", seed } };
  std::string csv = "h,score_den,score_num\n";
  for (std::size_t j = 0; j < count; ++j)
    csv += shortest(g[j]) + "," + shortest(den[j]) + "," + shortest(num[j]) + "\n";
  bmc_cv_result_free(r);

  const std::string text = doc.dump(2) + "\n";
  if (!out.empty()) {
    write_atomic(out + ".scores.csv", csv);
    write_atomic(out, text);
  }
  std::cout << text;
  write_sidecar(flags, "cv-select", out,
                { { "tree", tree_path }, { "K", folds }, { "grid", grid }, { "seed", seed },
                  { "out", out } });
  return 0;
}

int
cmd_rot_select(const CommonFlags& flags, const Config& cfg)
{
  auto top = root(cfg);
  top.allow({ "tree", "m", "out" });
  TreeHandle t;
  const std::string tree_path = pick(flags.tree, top, "tree", "");
  load_tree(tree_path, t);
  int depth = 0;
  check(bmc_tree_depth(t.tree, &depth));
  const int m = top.get("m", depth / 2 + 1);
  const std::string out = pick(flags.out, top, "out", "");

  bmc_rot_selection sel{};
  check(bmc_rot_select(t.tree, m, &sel));
  json doc = { { "h_D_hat", sel.h_D },
               { "h_N_hat", sel.h_N },
               { "h_0N_hat", sel.h_0N },
               { "h_1N_hat", sel.h_1N },
               { "a_hat", sel.a_hat },
               { "sigma_hats", { sel.sigma_hats[0], sel.sigma_hats[1], sel.sigma_hats[2] } },
               { "n", sel.n },
               { "m", sel.m } };
  const std::string text = doc.dump(2) + "\n";
  if (!out.empty())
    write_atomic(out, text);
  std::cout << text;
  write_sidecar(flags, "rot-select", out, { { "tree", tree_path }, { "m", m }, { "out", out } });
  return 0;
}

int
cmd_clt_check(const CommonFlags& flags, const Config& cfg)
{
  auto top = root(cfg);
  top.allow({ "statistic", "model", "n_list", "replications", "point", "population", "selector",
              "seed", "out" });
  bmc_experiment_spec spec;
  bmc_experiment_spec_default(&spec);
  const std::string statistic = top.get<std::string>("statistic", "p");
  if (statistic != "p" && statistic != "mu_tri")
    cfg.fail("statistic", "statistic must be 'p' or 'mu_tri'");
  spec.model = read_model(top, spec.model);
  const auto n_list = top.get<std::vector<int>>("n_list", { 12 });
  spec.n_list = n_list.data();
  spec.n_count = n_list.size();
  spec.replications = top.get<std::size_t>("replications", spec.replications);
  const auto point = top.get<std::vector<double>>("point", { 0.0, 0.0, 0.0 });
  if (point.size() != 3)
    cfg.fail("point", "point must be an [x, x0, x1] triple");
  for (int i = 0; i < 3; ++i)
    spec.point[i] = point[static_cast<std::size_t>(i)];
  spec.population = population_id(pick(flags.population, top, "population", "gen"));

  auto sel = top.child("selector");
  sel.allow({ "kind", "gamma", "folds", "grid" });
  spec.selector = selector_id(sel.get<std::string>("kind", "fixed"));
  spec.gamma = sel.get("gamma", spec.gamma);
  spec.folds = sel.get("folds", spec.folds);
  const auto cv_grid = sel.get<std::vector<double>>("grid", {});
  spec.cv_grid = cv_grid.empty() ? nullptr : cv_grid.data();
  spec.cv_grid_count = cv_grid.size();
  spec.seed = pick_seed(flags, top, spec.seed);
  const std::string out = pick(flags.out, top, "out", "");
  if (out.empty())
    throw ConfigError("clt-check needs an output path for the row CSV (--out PATH)");

  bmc_report* report = nullptr;
  check(bmc_run_clt(&spec, statistic == "p" ? BMC_STAT_P : BMC_STAT_MU_TRI, flags.threads,
                    &report));
  const char* summary = nullptr;
  int status = bmc_report_write_csv(report, out.c_str());
  if (status == BMC_OK)
    status = bmc_report_write_json(report, (out + ".summary.json").c_str());
  if (status == BMC_OK)
    status = bmc_report_json(report, &summary);
  if (status == BMC_OK)
    std::cout << summary;
  bmc_report_free(report);
  check(status);

  json selector = { { "kind", selector_name(spec.selector) } };
  if (spec.selector == BMC_SELECT_FIXED)
    selector["gamma"] = spec.gamma;
  if (spec.selector == BMC_SELECT_CV) {
    selector["folds"] = spec.folds;
    selector["grid"] = cv_grid;
  }
  write_sidecar(flags, "clt-check", out,
                { { "statistic", statistic },
                  { "model", model_json(spec.model) },
                  { "n_list", n_list },
                  { "replications", spec.replications },
                  { "point", point },
                  { "population", population_name(spec.population) },
                  { "selector", selector },
                  { "seed", spec.seed },
                  { "out", out } });
  return 0;
}

int
cmd_oracle_check(const CommonFlags& flags, const Config& cfg)
{
  auto top = root(cfg);
  top.allow({ "a", "sigma", "x", "max_depth", "trees", "seed", "z_limit", "out" });
  bmc_oracle_check_spec spec;
  bmc_oracle_check_spec_default(&spec);
  spec.a = top.get("a", spec.a);
  spec.sigma = top.get("sigma", spec.sigma);
  spec.x = top.get("x", spec.x);
  spec.max_depth = top.get("max_depth", spec.max_depth);
  spec.trees = top.get<std::size_t>("trees", spec.trees);
  spec.seed = pick_seed(flags, top, spec.seed);
  spec.z_limit = top.get("z_limit", spec.z_limit);
  const std::string out = pick(flags.out, top, "out", "");

  bmc_oracle_table* table = nullptr;
  check(bmc_oracle_check(&spec, flags.threads, &table));
  const char* csv = nullptr;
  std::size_t count = 0;
  bmc_oracle_table_csv(table, &csv);
  bmc_oracle_table_count(table, &count);
  std::size_t passed = 0;
  for (std::size_t i = 0; i < count; ++i) {
    bmc_oracle_row row;
    bmc_oracle_table_row(table, i, &row);
    passed += row.pass ? 1 : 0;
  }
  const std::string text = csv;
  bmc_oracle_table_free(table);
  if (!out.empty())
    write_atomic(out, text);
  std::cout << text;
  std::cerr << passed << "/" << count << " rows within " << spec.z_limit
            << " standard errors\n";
  write_sidecar(flags, "oracle-check", out,
                { { "a", spec.a },
                  { "sigma", spec.sigma },
                  { "x", spec.x },
                  { "max_depth", spec.max_depth },
                  { "trees", spec.trees },
                  { "seed", spec.seed },
                  { "z_limit", spec.z_limit },
                  { "out", out } });
  return 0;
}

int
cmd_reproduce_figures(const CommonFlags& flags, const Config& cfg)
{
  auto top = root(cfg);
  top.allow({ "case", "selector", "n_list", "seeds", "seed", "x", "lo", "hi", "grid_points",
              "folds", "cv_grid", "root", "gnuplot", "out" });
  bmc_figure_spec spec;
  bmc_figure_spec_default(&spec);
  const std::string fcase = top.get<std::string>("case", "case1");
  if (fcase == "case1" || fcase == "CASE1")
    spec.figure_case = 1;
  else if (fcase == "case2" || fcase == "CASE2")
    spec.figure_case = 2;
  else
    cfg.fail("case", "case must be 'case1' or 'case2'");
  spec.selector = selector_id(top.get<std::string>("selector", "rot"));
  if (spec.selector == BMC_SELECT_FIXED)
    cfg.fail("selector", "figure reproduction uses the 'cv' or 'rot' selector");
  const auto n_list = top.get<std::vector<int>>("n_list", { 10, 12, 14 });
  spec.n_list = n_list.data();
  spec.n_count = n_list.size();
  spec.seeds = top.get<std::size_t>("seeds", spec.seeds);
  spec.seed = pick_seed(flags, top, spec.seed);
  spec.x = top.get("x", spec.x);
  spec.lo = top.get("lo", spec.lo);
  spec.hi = top.get("hi", spec.hi);
  spec.grid_points = top.get("grid_points", spec.grid_points);
  spec.folds = top.get("folds", spec.folds);
  const auto cv_grid = top.get<std::vector<double>>("cv_grid", {});
  spec.cv_grid = cv_grid.empty() ? nullptr : cv_grid.data();
  spec.cv_grid_count = cv_grid.size();
  spec.root = top.get("root", spec.root);
  const bool gnuplot = top.get("gnuplot", false);
  const std::string out = pick(flags.out, top, "out", "figure");

  bmc_figure* fig = nullptr;
  check(bmc_run_figures(&spec, flags.threads, &fig));
  int status = bmc_figure_write(fig, out.c_str(), gnuplot ? 1 : 0);
  const double* errors = nullptr;
  std::size_t count = 0;
  if (status == BMC_OK)
    status = bmc_figure_mean_sup_error(fig, &errors, &count);
  if (status == BMC_OK)
    for (std::size_t i = 0; i < count; ++i)
      std::cout << "n=" << n_list[i] << " mean_sup_error=" << json(errors[i]).dump() << "\n";
  bmc_figure_free(fig);
  check(status);
  write_sidecar(flags, "reproduce-figures", out,
                { { "case", spec.figure_case == 1 ? "case1" : "case2" },
                  { "selector", selector_name(spec.selector) },
                  { "n_list", n_list },
                  { "seeds", spec.seeds },
                  { "seed", spec.seed },
                  { "x", spec.x },
                  { "lo", spec.lo },
                  { "hi", spec.hi },
                  { "grid_points", spec.grid_points },
                  { "folds", spec.folds },
                  { "cv_grid", cv_grid },
                  { "root", spec.root },
                  { "gnuplot", gnuplot },
                  { "out", out } });
  return 0;
}

void
add_common(CLI::App* sub, CommonFlags& flags, bool tree, bool population)
{
  sub->add_option("--config", flags.config, "JSON config file");
  sub->add_option("--out", flags.out, "output path or prefix");
  sub->add_option("--seed", flags.seed, "master seed (u64)");
  sub->add_option("--threads", flags.threads, "worker threads (default: BMC_KERNEL_THREADS or all)")
    ->check(CLI::NonNegativeNumber);
  sub->add_option("--sidecar", flags.sidecar, "path of the resolved-config JSON");
  if (tree)
    sub->add_option("--tree", flags.tree, "input tree (.csv or .bin)");
  if (population)
    sub->add_option("--population", flags.population, "gen or tree")
      ->check(CLI::IsMember({ "gen", "tree" }));
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Kernel estimation for bifurcating Markov chains" };
  app.require_subcommand(1);
  CommonFlags flags;

  struct Command
  {
    const char* name;
    const char* help;
    bool tree;
    bool population;
    int (*run)(const CommonFlags&, const Config&);
  };
  const Command commands[] = {
    { "simulate", "simulate a BAR tree", false, false, cmd_simulate },
    { "estimate", "evaluate kernel estimators on points", true, true, cmd_estimate },
    { "cv-select", "K-fold cross-validation bandwidths", true, false, cmd_cv_select },
    { "rot-select", "rule-of-thumb bandwidths", true, false, cmd_rot_select },
    { "clt-check", "replicated CLT experiment", false, true, cmd_clt_check },
    { "oracle-check", "moment identities against Monte Carlo", false, false, cmd_oracle_check },
    { "reproduce-figures", "estimate-vs-truth grids per depth", false, false,
      cmd_reproduce_figures },
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, flags, c.tree, c.population);
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_validation;
  }

  try {
    const Config cfg = flags.config.empty() ? Config() : Config::load(flags.config);
    for (const auto& [sub, c] : subs)
      if (sub->parsed())
        return c->run(flags, cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code == BMC_ERR_INVALID_ARGUMENT || e.code == BMC_ERR_OUT_OF_RANGE ? exit_validation
                                                                                 : exit_runtime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_runtime;
  }
  return exit_validation;
}
