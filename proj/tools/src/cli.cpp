#include "severfit/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "severfit/adapter.hpp"
#include "severfit/asymptotics.hpp"
#include "severfit/csv.hpp"
#include "severfit/dist.hpp"
#include "severfit/errors.hpp"
#include "severfit/estimators.hpp"
#include "severfit/mc.hpp"

namespace severfit::cli {

namespace {

const char* const kDefaultGrid = "0,0.05,0.10,0.15,0.25,0.49,0.70,0.85";

// Thrown for invalid flag combinations; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string six(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

double parse_real_flag(const std::string& name, const std::string& text) {
  const auto v = parse_double(text);
  if (!v) throw UsageError("invalid number for " + name + ": '" + text + "'");
  return *v;
}

std::vector<double> parse_grid(const std::string& name, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_double(item);
    if (!v || !(*v >= 0.0 && *v < 1.0)) throw UsageError("invalid value in " + name + ": '" + item + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError(name + " must not be empty");
  return out;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto m = parse_method(item);
    if (!m) throw UsageError("unknown method '" + item + "'");
    out.push_back(*m);
  }
  if (out.empty()) throw UsageError("--methods must not be empty");
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& name, const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_double(item);
    if (!v || !(*v >= 1.0) || std::floor(*v) != *v)
      throw UsageError("invalid value in " + name + ": '" + item + "'");
    out.push_back(static_cast<std::size_t>(*v));
  }
  if (out.empty()) throw UsageError(name + " must not be empty");
  return out;
}

// Writes to the named file, or to `fallback` when the name is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

struct ThresholdFlags {
  std::string d;
  std::string u;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> theta;
  std::optional<double> alpha;
};

void add_threshold_flags(CLI::App* cmd, ThresholdFlags& t) {
  cmd->add_option("--d", t.d, "Lower threshold d");
  cmd->add_option("--u", t.u, "Upper threshold u (accepts inf)");
  cmd->add_option("--a", t.a, "Lower tail probability, d = F^{-1}(a)");
  cmd->add_option("--b", t.b, "Upper tail probability, u = F^{-1}(1-b)");
}

ThresholdPair resolve_thresholds(const ThresholdFlags& t, Model model, std::optional<double> x0) {
  const bool direct = !t.d.empty() || !t.u.empty();
  const bool quantile = t.a.has_value() || t.b.has_value();
  if (direct && quantile) throw UsageError("give thresholds either as --d/--u or as --a/--b, not both");
  if (quantile) {
    const double a = t.a.value_or(0.0);
    const double b = t.b.value_or(0.0);
    if (model == Model::Exp) {
      if (!t.theta) throw UsageError("--a/--b need --theta");
      return quantile_thresholds(Model::Exp, *t.theta, 1.0, a, b);
    }
    if (!t.alpha || !x0) throw UsageError("--a/--b with pareto1 need --alpha and --x0");
    return quantile_thresholds(Model::Pareto1, *t.alpha, *x0, a, b);
  }
  const double lower_default = model == Model::Pareto1 && x0 ? *x0 : 0.0;
  const double d = t.d.empty() ? lower_default : parse_real_flag("--d", t.d);
  const double u = t.u.empty() ? kInf : parse_real_flag("--u", t.u);
  return ThresholdPair(d, u);
}

struct FitFlags {
  std::string method;
  std::string model = "exp";
  std::optional<double> x0;
  std::string data;
  ThresholdFlags t;
};

int cmd_fit(const FitFlags& f, std::ostream& out) {
  const auto method = parse_method(f.method);
  if (!method) throw UsageError("unknown method '" + f.method + "'");
  const auto model = parse_model(f.model);
  if (!model) throw UsageError("unknown model '" + f.model + "'");
  if (*model == Model::Pareto1 && !f.x0) throw UsageError("pareto1 fits need --x0");
  const auto t = resolve_thresholds(f.t, *model, f.x0);

  std::ifstream in(f.data);
  if (!in) throw UsageError("cannot read data file '" + f.data + "'");
  const auto data = read_loss_column(in);

  EstimateResult r;
  std::string reason;
  try {
    r = fit(*method, *model, data, t, f.x0);
    reason = std::string(to_string(r.reason));
  } catch (const EmptyWindow&) {
    r.method = *method;
    r.model = *model;
    r.n = data.size();
    reason = "EmptyWindow";
  }

  const std::string param = *model == Model::Exp ? "theta" : "alpha";
  std::optional<double> se;
  if (r.avar) se = std::sqrt(*r.avar / static_cast<double>(r.n));
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };

  CsvWriter w(out);
  w.row({"method", "model", "d", "u", "n", "mu_hat", "estimate", "exists", "reason", "avar", "se"});
  w.row({std::string(to_string(r.method)), std::string(to_string(r.model)), format_double(t.d),
         format_double(t.u), std::to_string(r.n), format_double(r.mu_hat), opt(r.estimate),
         r.exists ? "true" : "false", reason, opt(r.avar), opt(se)});

  out << "# " << to_string(r.method) << " fit of " << to_string(r.model) << " on " << r.n
      << " observations, window (" << six(t.d) << ", " << six(t.u) << "]\n";
  if (r.exists && r.estimate) {
    out << "# " << param << "_hat = " << six(*r.estimate);
    if (se) out << "  (asymptotic s.e. " << six(*se) << ")";
    out << "\n";
    return kExitOk;
  }
  out << "# no solution: " << reason << "\n";
  return kExitNoSolution;
}

struct AreFlags {
  double theta = 10.0;
  std::string a_grid = kDefaultGrid;
  std::string b_grid = kDefaultGrid;
  std::string methods = "mtum,mcm,mtcm";
  std::string out;
};

int cmd_are(const AreFlags& f, std::ostream& out) {
  if (!(f.theta > 0.0 && std::isfinite(f.theta))) throw UsageError("--theta must be > 0");
  const auto a = parse_grid("--a-grid", f.a_grid);
  const auto b = parse_grid("--b-grid", f.b_grid);
  const auto methods = parse_methods(f.methods);
  const auto table = are_table(f.theta, a, b, methods);
  Sink sink(f.out, out);
  write_are_csv(sink.get(), table);
  return kExitOk;
}

struct SimulateFlags {
  std::string config;
  bool full_scale = false;
  bool conditional = false;
  std::string out;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  SimConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw UsageError("cannot read config file '" + f.config + "'");
    cfg = parse_sim_config(in);
  }
  if (f.full_scale) {
    cfg.blocks = 10;
    cfg.reps = 10000;
  }
  if (!f.out.empty()) cfg.out = f.out;
  auto cells = expand_config(cfg);
  for (auto& c : cells) c.conditional = f.conditional;
  const auto reports = run_table(cells);
  Sink sink(cfg.out, out);
  write_sim_csv(sink.get(), reports);
  return kExitOk;
}

struct InfluenceFlags {
  std::string model = "exp";
  std::optional<double> theta;
  std::optional<double> alpha;
  double x0 = 1.0;
  double a = 0.05;
  double b = 0.05;
  std::optional<double> x_min;
  std::optional<double> x_max;
  std::size_t points = 101;
  std::string out;
};

int cmd_influence(const InfluenceFlags& f, std::ostream& out) {
  const auto model = parse_model(f.model);
  if (!model) throw UsageError("unknown model '" + f.model + "'");
  if (!(f.a >= 0.0 && f.b >= 0.0 && f.a + f.b < 1.0)) throw UsageError("need a, b >= 0 and a + b < 1");
  if (f.points < 2) throw UsageError("--points must be >= 2");
  DistributionAdapter F;
  if (*model == Model::Exp) {
    F = exponential_adapter(f.theta.value_or(10.0));
  } else {
    if (!f.alpha) throw UsageError("pareto1 needs --alpha");
    F = pareto1_adapter(*f.alpha, f.x0);
  }
  const double lo = f.x_min.value_or(F.support_lo);
  const double hi = f.x_max.value_or(F.quantile(0.995));
  if (!(hi > lo)) throw UsageError("need --x-max > --x-min");
  std::vector<double> grid(f.points);
  for (std::size_t i = 0; i < f.points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(f.points - 1);
  const auto mtm = influence_curve(F, IFKind::MTM, f.a, f.b, grid);
  const auto mcm = influence_curve(F, IFKind::MCM, f.a, f.b, grid);
  Sink sink(f.out, out);
  CsvWriter w(sink.get());
  w.row({"x", "if_mtm", "if_mcm"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    w.row({format_double(grid[i]), format_double(mtm.values[i]), format_double(mcm.values[i])});
  return kExitOk;
}

struct HistFlags {
  std::string n_list = "30,50,500";
  std::size_t count = 100;
  double d = 0.50;
  std::string u = "23.00";
  double theta = 10.0;
  std::string methods = "mtum,mcm,mtcm";
  std::uint64_t seed = 20240601;
  std::string out;
  std::string bins_out;
};

int cmd_hist(const HistFlags& f, std::ostream& out) {
  HistogramStudy study;
  study.n_list = parse_counts("--n-list", f.n_list);
  study.count = f.count;
  study.methods = parse_methods(f.methods);
  study.theta = f.theta;
  study.thresholds = ThresholdPair(f.d, parse_real_flag("--u", f.u));
  study.seed = f.seed;
  const auto panels = histogram_study(study);

  Sink sink(f.out, out);
  CsvWriter w(sink.get());
  w.row({"method", "n", "replicate", "theta_hat", "skewness"});
  for (const auto& p : panels) {
    const auto skew = format_double(p.skewness);
    for (std::size_t i = 0; i < p.estimates.size(); ++i)
      w.row({std::string(to_string(p.method)), std::to_string(p.n), std::to_string(p.replicate[i]),
             format_double(p.estimates[i]), skew});
  }
  if (!f.bins_out.empty()) {
    Sink bins(f.bins_out, out);
    CsvWriter bw(bins.get());
    bw.row({"method", "n", "bin_lo", "bin_hi", "count"});
    for (const auto& p : panels) {
      for (std::size_t k = 0; k < p.bin_counts.size(); ++k) {
        const double lo = p.bin_origin + static_cast<double>(k) * p.bin_width;
        bw.row({std::string(to_string(p.method)), std::to_string(p.n), format_double(lo),
                format_double(lo + p.bin_width), std::to_string(p.bin_counts[k])});
      }
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Threshold-moment estimation for exponential and single-parameter Pareto losses",
               "severfit"};
  app.require_subcommand(1);

  FitFlags fit_flags;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a loss sample");
  fit_cmd->add_option("--method", fit_flags.method, "mle | mtum | mcm | mtcm")->required();
  fit_cmd->add_option("--model", fit_flags.model, "exp | pareto1");
  fit_cmd->add_option("--x0", fit_flags.x0, "Pareto left endpoint");
  fit_cmd->add_option("--data", fit_flags.data, "CSV file of losses")->required();
  fit_cmd->add_option("--theta", fit_flags.t.theta, "Exponential mean for --a/--b thresholds");
  fit_cmd->add_option("--alpha", fit_flags.t.alpha, "Pareto tail index for --a/--b thresholds");
  add_threshold_flags(fit_cmd, fit_flags.t);

  AreFlags are_flags;
  auto* are_cmd = app.add_subcommand("are", "Asymptotic relative efficiency table");
  are_cmd->add_option("--theta", are_flags.theta, "Exponential mean");
  are_cmd->add_option("--a-grid", are_flags.a_grid, "Comma-separated lower tail probabilities");
  are_cmd->add_option("--b-grid", are_flags.b_grid, "Comma-separated upper tail probabilities");
  are_cmd->add_option("--methods", are_flags.methods, "Comma-separated methods");
  are_cmd->add_option("--out", are_flags.out, "Output file (default stdout)");

  SimulateFlags sim_flags;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo finite-sample study");
  sim_cmd->add_option("--config", sim_flags.config, "key = value configuration file");
  sim_cmd->add_flag("--full-scale", sim_flags.full_scale, "10 blocks x 10000 replications");
  sim_cmd->add_flag("--conditional", sim_flags.conditional,
                    "Report statistics over successful fits even when some fail");
  sim_cmd->add_option("--out", sim_flags.out, "Output file (overrides config 'out')");

  InfluenceFlags if_flags;
  auto* if_cmd = app.add_subcommand("influence", "Trimmed and censored mean influence functions");
  if_cmd->add_option("--model", if_flags.model, "exp | pareto1");
  if_cmd->add_option("--theta", if_flags.theta, "Exponential mean (default 10)");
  if_cmd->add_option("--alpha", if_flags.alpha, "Pareto tail index");
  if_cmd->add_option("--x0", if_flags.x0, "Pareto left endpoint");
  if_cmd->add_option("--a", if_flags.a, "Lower tail probability");
  if_cmd->add_option("--b", if_flags.b, "Upper tail probability");
  if_cmd->add_option("--x-min", if_flags.x_min, "Grid start");
  if_cmd->add_option("--x-max", if_flags.x_max, "Grid end");
  if_cmd->add_option("--points", if_flags.points, "Grid size");
  if_cmd->add_option("--out", if_flags.out, "Output file (default stdout)");

  HistFlags hist_flags;
  auto* hist_cmd = app.add_subcommand("hist", "Sampling distribution of the estimators");
  hist_cmd->add_option("--n-list", hist_flags.n_list, "Comma-separated sample sizes");
  hist_cmd->add_option("--count", hist_flags.count, "Samples per sample size");
  hist_cmd->add_option("--d", hist_flags.d, "Lower threshold");
  hist_cmd->add_option("--u", hist_flags.u, "Upper threshold (accepts inf)");
  hist_cmd->add_option("--theta", hist_flags.theta, "Exponential mean");
  hist_cmd->add_option("--methods", hist_flags.methods, "Comma-separated methods");
  hist_cmd->add_option("--seed", hist_flags.seed, "Master seed");
  hist_cmd->add_option("--out", hist_flags.out, "Output file (default stdout)");
  hist_cmd->add_option("--bins-out", hist_flags.bins_out, "Optional histogram bin file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_flags, out);
    if (*are_cmd) return cmd_are(are_flags, out);
    if (*sim_cmd) return cmd_simulate(sim_flags, out);
    if (*if_cmd) return cmd_influence(if_flags, out);
    if (*hist_cmd) return cmd_hist(hist_flags, out);
  } catch (const CsvParseError& e) {
    err << "error: malformed data: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace severfit::cli
