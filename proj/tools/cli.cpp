#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "bregaccel/admm.hpp"
#include "bregaccel/driver.hpp"
#include "bregaccel/error.hpp"
#include "bregaccel/portfolio.hpp"
#include "bregaccel/problem_io.hpp"
#include "bregaccel/synth.hpp"

namespace bregaccel::cli {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct KeyInfo {
  const char* key;
  const char* help;
  bool is_flag = false;
};

// Keys accepted both in config files and as --flags (underscores become dashes).
const std::vector<KeyInfo> kSolverKeys = {
    {"mode", "sbsa | sbsa_lsa | sb | admm"},
    {"safeguard", "heuristic_accept | strict_reject"},
    {"lambda", "Bregman penalty"},
    {"tol_b", "constraint tolerance"},
    {"max_outer", "outer iteration cap"},
    {"warmstart", "plain iterations before the switching test"},
    {"eta", "sufficient decrease constant"},
    {"gamma0", "initial switching ratio"},
    {"tol_f", "FISTA step tolerance"},
    {"fista_max_iters", "FISTA iteration cap"},
    {"tol_cg", "relative CG residual"},
    {"admm_penalty", "ADMM penalty"},
    {"admm_max_iters", "ADMM iteration cap"},
    {"admm_accelerate", "ADMM line search on/off"},
};

const std::vector<KeyInfo> kModelKeys = {
    {"tau1", "l1 weight"},
    {"tau2", "fused weight"},
    {"years", "number of rebalancing periods"},
    {"window", "estimation window in data rows"},
    {"stride", "rows between rebalancing dates"},
    {"first_rebalance", "row index of the first rebalancing date"},
    {"percent", "returns CSV is in percent", true},
    {"drop_volatile", "drop this many most volatile assets"},
    {"cov_divisor", "unbiased | window"},
    {"ridge", "added to every covariance diagonal"},
    {"xi_ini", "initial wealth"},
};

const std::vector<KeyInfo> kMetricKeys = {
    {"eps1", "holding threshold"},
    {"eps2", "variation threshold"},
};

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

class Settings {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double number(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0.0;
    const std::string& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw UsageError(key + ": `" + s + "` is not a number");
    return v;
  }

  long integer(const std::string& key, long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    long v = 0;
    const std::string& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw UsageError(key + ": `" + s + "` is not an integer");
    return v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& s = it->second;
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw UsageError(key + ": `" + s + "` is not a boolean");
  }

 private:
  std::map<std::string, std::string> values_;
};

// Registers every key as a flag; values are collected after parsing.
struct FlagSet {
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* app, const std::vector<KeyInfo>& keys) {
    for (const KeyInfo& info : keys) {
      const std::string name = "--" + dashed(info.key);
      if (info.is_flag) {
        options[info.key] = app->add_flag(name, flags[info.key], info.help);
      } else {
        options[info.key] = app->add_option(name, values[info.key], info.help);
      }
    }
  }

  void apply(Settings& settings) const {
    for (const auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      auto flag = flags.find(key);
      settings.set(key, flag != flags.end() ? (flag->second ? "true" : "false") : values.at(key));
    }
  }

  bool knows(const std::string& key) const { return options.count(key) > 0; }
};

void load_config_file(const std::string& path, const FlagSet& known, Settings& settings) {
  std::ifstream in(path);
  if (!in) throw InputError(path, 0, "cannot open config file");
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(path, line_no, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    if (!known.knows(key)) throw InputError(path, line_no, "unknown key `" + key + "`");
    settings.set(key, trim(line.substr(eq + 1)));
  }
}

struct SolverChoice {
  bool admm = false;
  SolverConfig bregman;
  AdmmConfig admm_cfg;
};

SolverChoice solver_from(const Settings& s) {
  SolverChoice choice;
  const std::string mode = s.text("mode", "sbsa");
  if (mode == "admm") {
    choice.admm = true;
  } else if (auto parsed = parse_mode(mode)) {
    choice.bregman.mode = *parsed;
  } else {
    throw UsageError("unknown mode `" + mode + "`");
  }
  const std::string guard = s.text("safeguard", to_string(choice.bregman.safeguard));
  if (auto parsed = parse_safeguard(guard)) {
    choice.bregman.safeguard = *parsed;
  } else {
    throw UsageError("unknown safeguard `" + guard + "`");
  }
  SolverConfig& b = choice.bregman;
  b.lambda = s.number("lambda", b.lambda);
  b.tol_b = s.number("tol_b", b.tol_b);
  b.max_outer = static_cast<int>(s.integer("max_outer", b.max_outer));
  b.warmstart_iters = static_cast<int>(s.integer("warmstart", b.warmstart_iters));
  b.eta = s.number("eta", b.eta);
  b.gamma0 = s.number("gamma0", b.gamma0);
  b.fista.tol_f = s.number("tol_f", b.fista.tol_f);
  b.fista.max_iters = static_cast<int>(s.integer("fista_max_iters", b.fista.max_iters));
  b.tol_cg = s.number("tol_cg", b.tol_cg);
  try {
    b.validate();
  } catch (const InvalidProblemError& e) {
    throw UsageError(e.what());
  }
  AdmmConfig& a = choice.admm_cfg;
  a.penalty = s.number("admm_penalty", a.penalty);
  a.tol_b = b.tol_b;
  a.tol_cg = b.tol_cg;
  a.max_iters = static_cast<int>(s.integer("admm_max_iters", a.max_iters));
  a.accelerate = s.boolean("admm_accelerate", a.accelerate);
  if (!(a.penalty > 0.0) || a.max_iters < 1) throw UsageError("admm_penalty and admm_max_iters must be positive");
  return choice;
}

struct LoadedModel {
  ConstrainedL1Problem problem;
  std::optional<PortfolioModel> portfolio;
  std::optional<NaivePortfolio> naive;
  nlohmann::json meta = nlohmann::json::object();
};

LoadedModel model_from_data(const std::string& path, const Settings& s) {
  ReturnPanel panel = read_returns_csv(path, s.boolean("percent", false));
  const long drop = s.integer("drop_volatile", 0);
  if (drop < 0) throw UsageError("drop_volatile must be nonnegative");
  if (drop > 0) panel = drop_most_volatile(panel, static_cast<int>(drop));

  MomentOptions opts;
  opts.window = s.integer("window", opts.window);
  opts.stride = s.integer("stride", opts.stride);
  opts.ridge = s.number("ridge", 0.0);
  const std::string divisor = s.text("cov_divisor", "unbiased");
  if (divisor == "unbiased") {
    opts.divisor = CovarianceDivisor::unbiased;
  } else if (divisor == "window") {
    opts.divisor = CovarianceDivisor::window;
  } else {
    throw UsageError("unknown cov_divisor `" + divisor + "`");
  }
  if (opts.window < 2 || opts.stride < 1) throw UsageError("window must be >= 2 and stride >= 1");
  const Index rows = panel.num_periods();
  if (rows < opts.window) throw UsageError(path + ": fewer rows than the estimation window");
  Index m = s.has("years") ? s.integer("years", 0)
                           : std::max<Index>(1, (rows - opts.window) / opts.stride);
  if (m < 1) throw UsageError("years must be positive");
  // Default schedule: the last m holding periods of the panel, each with a full window behind it.
  opts.first_rebalance = s.has("first_rebalance")
                             ? s.integer("first_rebalance", 0)
                             : std::max<Index>(opts.window, rows - m * opts.stride);
  Moments moments = estimate_moments(panel, m, opts);

  LoadedModel out;
  const double xi_ini = s.number("xi_ini", 1.0);
  NaivePortfolio naive = naive_wealth(moments.r, xi_ini);
  out.portfolio = build_model(std::move(moments.C_blocks), std::move(moments.r), xi_ini, naive.xi_naive,
                              s.number("tau1", 1e-2), s.number("tau2", 1e-2));
  out.problem = out.portfolio->assembled;
  out.naive = std::move(naive);
  out.meta = {{"source", path},
              {"assets", panel.asset_names},
              {"first_rebalance_row", *opts.first_rebalance},
              {"periods", m}};
  return out;
}

LoadedModel model_from_problem(const std::string& path, const Settings& s) {
  ProblemFile file = read_problem_file(path);
  LoadedModel out;
  out.meta = file.meta;
  if (file.portfolio) {
    PortfolioModel pm = std::move(*file.portfolio);
    if (s.has("tau1") || s.has("tau2") || s.has("xi_ini")) {
      pm = build_model(pm.C_blocks, pm.r, s.number("xi_ini", pm.xi_ini), pm.xi_fin, s.number("tau1", pm.tau1),
                       s.number("tau2", pm.tau2));
    }
    out.naive = naive_wealth(pm.r, pm.xi_ini);
    out.problem = pm.assembled;
    out.portfolio = std::move(pm);
  } else {
    out.problem = std::move(file.problem);
    out.problem.tau1 = s.number("tau1", out.problem.tau1);
    out.problem.tau2 = s.number("tau2", out.problem.tau2);
    out.problem.validate();
  }
  return out;
}

LoadedModel load_model(const std::string& data, const std::string& problem, const Settings& s) {
  if (data.empty() == problem.empty()) throw UsageError("exactly one of --data or --problem is required");
  return data.empty() ? model_from_problem(problem, s) : model_from_data(data, s);
}

SolveReport run_solver(const LoadedModel& model, const SolverChoice& choice) {
  if (choice.admm) return admm_solve(model.problem, choice.admm_cfg);
  return solve(stack(model.problem), choice.bregman);
}

std::optional<PortfolioMetrics> metrics_for(const LoadedModel& model, const Vector& u, const Settings& s) {
  if (!model.portfolio || !model.naive) return std::nullopt;
  return compute_metrics(u, model.naive->u, model.problem.C, model.portfolio->num_assets(),
                         s.number("eps1", 1e-4), s.number("eps2", 1e-4));
}

int exit_code_for(Termination t) {
  switch (t) {
    case Termination::converged:
      return kExitConverged;
    case Termination::max_outer:
      return kExitNotConverged;
    case Termination::numerical_error:
      return kExitNumerical;
  }
  return kExitNumerical;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw InputError(path, 0, "cannot open file for writing");
  file << text;
}

std::string check_format(const std::string& format, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (format == a) return format;
  throw UsageError("unknown format `" + format + "`");
}

// ---------------------------------------------------------------- compare table

struct Row {
  std::string solver;
  bool ok = false;
  std::string failure;
  SolveReport report;
  std::optional<PortfolioMetrics> metrics;
};

std::string fmt(double v, int precision, bool scientific = false) {
  std::ostringstream os;
  if (scientific) {
    os << std::scientific;
  } else {
    os << std::fixed;
  }
  os << std::setprecision(precision) << v;
  return os.str();
}

std::vector<std::string> header_cells(bool with_metrics) {
  std::vector<std::string> h = {"solver", "time_s", "outer", "objective", "viol_A", "viol_D", "termination"};
  if (with_metrics) {
    for (const char* prefix : {"", "raw_"})
      for (const char* name : {"ratio", "density", "shorts", "T", "V_norm1", "V_normInf"})
        h.push_back(std::string(prefix) + name);
  }
  return h;
}

std::vector<std::string> row_cells(const Row& row, bool with_metrics) {
  std::vector<std::string> c = {row.solver};
  const std::size_t width = header_cells(with_metrics).size();
  if (!row.ok) {
    c.resize(width, "---");
    return c;
  }
  const SolveReport& r = row.report;
  c.push_back(fmt(r.wall_time, 3));
  c.push_back(std::to_string(r.outer_iters));
  c.push_back(fmt(r.objective, 10, true));
  c.push_back(fmt(r.violation_A, 2, true));
  c.push_back(fmt(r.violation_D, 2, true));
  c.push_back(to_string(r.termination));
  if (with_metrics) {
    for (const PositionStats* st : {&row.metrics->thresholded, &row.metrics->raw}) {
      c.push_back(std::isfinite(st->ratio) ? fmt(st->ratio, 4) : "inf");
      c.push_back(fmt(st->density_pct, 2));
      c.push_back(std::to_string(st->shorts));
      c.push_back(std::to_string(st->T_cost));
      c.push_back(std::to_string(st->V_norm1));
      c.push_back(std::to_string(st->V_normInf));
    }
  }
  return c;
}

std::string aligned_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  std::ostringstream os;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i == 0) {
        os << std::left << std::setw(static_cast<int>(width[i])) << r[i];
      } else {
        os << "  " << std::right << std::setw(static_cast<int>(width[i])) << r[i];
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string csv_table(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  return os.str();
}

unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BREGACCEL_THREADS")) {
    unsigned v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) cap = v;
  }
  return cap;
}

// ---------------------------------------------------------------- commands

struct CommonArgs {
  std::string data;
  std::string problem;
  std::string config;
  std::string output;
  std::string format = "text";
  FlagSet flags;

  Settings settings() const {
    Settings s;
    if (!config.empty()) load_config_file(config, flags, s);
    flags.apply(s);
    return s;
  }
};

void add_common(CLI::App* sub, CommonArgs& args, bool solver_keys) {
  sub->add_option("--data", args.data, "returns CSV");
  sub->add_option("--problem", args.problem, "serialized problem file");
  sub->add_option("--config", args.config, "flat key = value file");
  sub->add_option("-o,--output", args.output, "output path (default stdout)");
  if (solver_keys) args.flags.add(sub, kSolverKeys);
  args.flags.add(sub, kModelKeys);
  args.flags.add(sub, kMetricKeys);
}

int cmd_solve(const CommonArgs& args, const std::string& plot, std::ostream& out) {
  const Settings s = args.settings();
  check_format(args.format, {"text", "json"});
  const SolverChoice choice = solver_from(s);
  const LoadedModel model = load_model(args.data, args.problem, s);
  const SolveReport report = run_solver(model, choice);
  const Index n = model.problem.n();
  const auto metrics = metrics_for(model, report.x_final.head(n), s);
  if (args.format == "json") {
    nlohmann::json doc = report_to_json(report, n);
    if (metrics) doc["metrics"] = metrics_to_json(*metrics);
    write_output(args.output, doc.dump(2) + "\n", out);
  } else {
    write_output(args.output, report_to_text(report, n, metrics), out);
  }
  if (!plot.empty()) write_output(plot, trace_to_csv(report), out);
  return exit_code_for(report.termination);
}

int cmd_compare(const CommonArgs& args, const std::string& csv_path, std::ostream& out) {
  const Settings s = args.settings();
  check_format(args.format, {"text", "csv"});
  if (s.has("mode")) throw UsageError("compare runs every mode; drop --mode");
  const LoadedModel model = load_model(args.data, args.problem, s);
  const Index n = model.problem.n();

  const std::vector<std::string> names = {"sbsa", "sbsa_lsa", "sb", "admm"};
  std::vector<Row> rows(names.size());
  auto run_one = [&](std::size_t i) {
    Row& row = rows[i];
    row.solver = names[i];
    try {
      Settings local = s;
      local.set("mode", names[i]);
      row.report = run_solver(model, solver_from(local));
      row.ok = row.report.termination == Termination::converged;
      if (!row.ok) row.failure = to_string(row.report.termination);
      if (row.ok) row.metrics = metrics_for(model, row.report.x_final.head(n), s);
    } catch (const std::exception& e) {
      row.ok = false;
      row.failure = e.what();
    }
  };
  const unsigned cap = std::min<unsigned>(thread_cap(), static_cast<unsigned>(names.size()));
  if (cap <= 1) {
    for (std::size_t i = 0; i < names.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex lock;
    for (unsigned t = 0; t < cap; ++t) {
      pool.emplace_back([&] {
        while (true) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> guard(lock);
            if (next >= names.size()) return;
            i = next++;
          }
          run_one(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  const bool with_metrics = model.portfolio.has_value();
  std::vector<std::vector<std::string>> table = {header_cells(with_metrics)};
  for (const Row& row : rows) table.push_back(row_cells(row, with_metrics));
  std::string text = args.format == "csv" ? csv_table(table) : aligned_table(table);
  if (args.format == "text") {
    for (const Row& row : rows)
      if (!row.ok) text += "# " + row.solver + ": " + row.failure + "\n";
  }
  write_output(args.output, text, out);
  if (!csv_path.empty()) write_output(csv_path, csv_table(table), out);
  return std::any_of(rows.begin(), rows.end(), [](const Row& r) { return r.ok; }) ? kExitConverged
                                                                                  : kExitNotConverged;
}

int cmd_metrics(const CommonArgs& args, const std::string& solution, std::ostream& out) {
  const Settings s = args.settings();
  check_format(args.format, {"text", "json"});
  const LoadedModel model = load_model(args.data, args.problem, s);
  if (!model.portfolio) throw UsageError("metrics need a portfolio problem");
  Vector u = read_solution(solution);
  const Index n = model.problem.n();
  if (u.size() < n) throw InputError(solution, 0, "solution has " + std::to_string(u.size()) + " entries, need " + std::to_string(n));
  u.conservativeResize(n);
  const PortfolioMetrics metrics = *metrics_for(model, u, s);
  if (args.format == "json") {
    write_output(args.output, metrics_to_json(metrics).dump(2) + "\n", out);
    return kExitConverged;
  }
  std::ostringstream os;
  os << std::setprecision(10);
  for (const auto& [prefix, st] : {std::pair<const char*, const PositionStats*>{"", &metrics.thresholded},
                                   {"raw_", &metrics.raw}}) {
    os << prefix << "ratio = " << st->ratio << '\n'
       << prefix << "density_pct = " << st->density_pct << '\n'
       << prefix << "shorts = " << st->shorts << '\n'
       << prefix << "T = " << st->T_cost << '\n'
       << prefix << "V_norm1 = " << st->V_norm1 << '\n'
       << prefix << "V_normInf = " << st->V_normInf << '\n';
  }
  write_output(args.output, os.str(), out);
  return kExitConverged;
}

int cmd_synth(const SynthOptions& opts, const std::string& output, std::ostream& out) {
  if (opts.n_assets < 1 || opts.periods < 1) throw UsageError("n-assets and periods must be positive");
  if (!(opts.eig_min > 0.0) || !(opts.eig_max >= opts.eig_min))
    throw UsageError("need 0 < eig-min <= eig-max");
  ProblemFile file;
  file.portfolio = synth_portfolio(opts);
  file.problem = file.portfolio->assembled;
  file.meta = {{"generator", "synth"},
               {"seed", opts.seed},
               {"n_assets", opts.n_assets},
               {"periods", opts.periods},
               {"eig_min", opts.eig_min},
               {"eig_max", opts.eig_max},
               {"return_mean", opts.return_mean},
               {"return_sd", opts.return_sd}};
  write_output(output, problem_to_json(file).dump(1) + "\n", out);
  return kExitConverged;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Split Bregman solvers for l1 and fused-lasso constrained quadratic programs"};
  app.require_subcommand(1);

  CommonArgs solve_args;
  std::string plot;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one problem");
  add_common(solve_cmd, solve_args, true);
  solve_cmd->add_option("--format", solve_args.format, "text | json");
  solve_cmd->add_option("--plot", plot, "write the per-iteration violation trace as CSV");

  CommonArgs compare_args;
  std::string csv_path;
  CLI::App* compare_cmd = app.add_subcommand("compare", "run every solver on one problem");
  add_common(compare_cmd, compare_args, true);
  compare_cmd->add_option("--format", compare_args.format, "text | csv");
  compare_cmd->add_option("--csv", csv_path, "also write the table as CSV");

  CommonArgs metrics_args;
  std::string solution;
  CLI::App* metrics_cmd = app.add_subcommand("metrics", "portfolio metrics of a stored solution");
  add_common(metrics_cmd, metrics_args, false);
  metrics_cmd->add_option("--solution", solution, "JSON report or whitespace-separated u")->required();
  metrics_cmd->add_option("--format", metrics_args.format, "text | json");

  SynthOptions synth;
  std::string synth_out;
  CLI::App* synth_cmd = app.add_subcommand("synth", "write a random portfolio problem");
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--n-assets", synth.n_assets);
  synth_cmd->add_option("--periods", synth.periods);
  synth_cmd->add_option("--eig-min", synth.eig_min);
  synth_cmd->add_option("--eig-max", synth.eig_max);
  synth_cmd->add_option("--return-mean", synth.return_mean);
  synth_cmd->add_option("--return-sd", synth.return_sd);
  synth_cmd->add_option("--tau1", synth.tau1);
  synth_cmd->add_option("--tau2", synth.tau2);
  synth_cmd->add_option("--xi-ini", synth.xi_ini);
  synth_cmd->add_option("-o,--output", synth_out, "output path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitConverged : kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(solve_args, plot, out);
    if (compare_cmd->parsed()) return cmd_compare(compare_args, csv_path, out);
    if (metrics_cmd->parsed()) return cmd_metrics(metrics_args, solution, out);
    if (synth_cmd->parsed()) return cmd_synth(synth, synth_out, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace bregaccel::cli
