#include "severfit/mc.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <regex>
#include <thread>

#include "severfit/asymptotics.hpp"
#include "severfit/csv.hpp"
#include "severfit/errors.hpp"
#include "severfit/estimators.hpp"

namespace severfit {

namespace {

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = default_worker_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v;
  const double m = sum / static_cast<double>(x.size());
  if (x.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
  return {m, sd / std::sqrt(static_cast<double>(x.size()))};
}

std::vector<double> simulate(const SimCell& cell, RandomSource& rng) {
  if (cell.model == Model::Exp) return sample(ExponentialModel(cell.param_true), cell.n, rng);
  return sample(ParetoIModel(cell.param_true, cell.x0), cell.n, rng);
}

// Estimate or nothing; nonexistence and empty windows both count as failures.
std::optional<double> try_fit(Method method, Model model, std::span<const double> data,
                              const ThresholdPair& t, double x0) {
  try {
    const auto r = fit(method, model, data, t,
                       model == Model::Pareto1 ? std::optional<double>(x0) : std::nullopt);
    if (r.exists && r.estimate) return r.estimate;
  } catch (const EmptyWindow&) {
  } catch (const SolverStall&) {
  } catch (const DegenerateError&) {
  }
  return std::nullopt;
}

void validate(const SimCell& c) {
  if (c.n == 0) throw ConfigError("simulation cell needs n >= 1");
  if (c.replications_per_block == 0 || c.blocks == 0)
    throw ConfigError("simulation cell needs reps >= 1 and blocks >= 1");
  if (!(c.param_true > 0.0 && std::isfinite(c.param_true)))
    throw ConfigError("simulation cell needs a positive true parameter");
  if (c.model == Model::Pareto1) {
    if (!(c.x0 > 0.0)) throw ConfigError("PARETO1 cells need x0 > 0");
    if (c.method != Method::MLE && c.thresholds.d < c.x0)
      throw ConfigError("PARETO1 cells need d >= x0");
  }
}

double analytic_are(const SimCell& c) {
  if (c.model == Model::Exp) return are(c.method, c.param_true, c.thresholds);
  const auto [m, tx] = log_transform_pareto_to_exp(ParetoIModel(c.param_true, c.x0), c.thresholds);
  return are(c.method, m.theta, tx);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(',', start);
    out.push_back(trim(std::string_view(s).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_unsigned(const std::string& key, const std::string& s) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw ConfigError("invalid value for key '" + key + "'");
  return v;
}

double parse_real(const std::string& key, const std::string& s) {
  const auto v = parse_double(s);
  if (!v) throw ConfigError("invalid value for key '" + key + "'");
  return *v;
}

double quantile_of_sorted(std::span<const double> s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

void fill_bins(HistogramPanel& p) {
  const auto m = p.estimates.size();
  if (m == 0) return;
  std::vector<double> s(p.estimates);
  std::sort(s.begin(), s.end());
  const double lo = s.front();
  const double hi = s.back();
  const double iqr = quantile_of_sorted(s, 0.75) - quantile_of_sorted(s, 0.25);
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(m));
  if (!(width > 0.0)) width = hi > lo ? hi - lo : 1.0;
  const auto bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
  p.bin_origin = lo;
  p.bin_width = width;
  p.bin_counts.assign(bins, 0);
  for (double v : s) {
    auto idx = static_cast<std::size_t>((v - lo) / width);
    p.bin_counts[std::min(idx, bins - 1)]++;
  }
}

}  // namespace

RandomSource derive_stream(std::uint64_t master_seed, std::uint64_t cell_index,
                           std::uint64_t block_index, std::uint64_t replication_index) {
  if (cell_index >= (1ULL << 16) || block_index >= (1ULL << 16) ||
      replication_index >= (1ULL << 32))
    throw DomainError("stream indices out of range");
  return RandomSource(master_seed, (cell_index << 48) | (block_index << 32) | replication_index);
}

unsigned default_worker_count() {
  if (const char* env = std::getenv("SEVERFIT_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ThresholdPair quantile_thresholds(Model model, double param, double x0, double a, double b) {
  if (!(a >= 0.0 && b >= 0.0 && a + b < 1.0))
    throw DomainError("tail probabilities must satisfy a, b >= 0 and a + b < 1");
  double d = 0.0;
  double u = kInf;
  if (model == Model::Exp) {
    const ExponentialModel m(param);
    d = exp_quantile(m, a);
    if (b > 0.0) u = exp_quantile(m, 1.0 - b);
  } else {
    const ParetoIModel m(param, x0);
    d = pareto1_quantile(m, a);
    if (b > 0.0) u = pareto1_quantile(m, 1.0 - b);
  }
  return ThresholdPair(d, u);
}

SimReport run_cell(const SimCell& cell, unsigned threads) {
  validate(cell);
  const std::size_t reps = cell.replications_per_block;
  const std::size_t total = reps * cell.blocks;
  std::vector<double> estimate(total, 0.0);
  std::vector<char> ok(total, 0);

  parallel_for(total, threads, [&](std::size_t i) {
    auto rng = derive_stream(cell.seed, cell.cell_index, i / reps, i % reps);
    const auto data = simulate(cell, rng);
    if (const auto e = try_fit(cell.method, cell.model, data, cell.thresholds, cell.x0)) {
      estimate[i] = *e;
      ok[i] = 1;
    }
  });

  SimReport rep;
  rep.cell = cell;
  rep.total = total;
  for (char c : ok) rep.failures += c ? 0 : 1;
  if (rep.failures > 0 && !cell.conditional) return rep;

  const double truth = cell.param_true;
  std::vector<double> block_ratio;
  std::vector<double> block_re;
  for (std::size_t blk = 0; blk < cell.blocks; ++blk) {
    double sum = 0.0;
    double sq = 0.0;
    std::size_t m = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const std::size_t i = blk * reps + r;
      if (!ok[i]) continue;
      sum += estimate[i];
      sq += (estimate[i] - truth) * (estimate[i] - truth);
      ++m;
    }
    if (m == 0) continue;
    block_ratio.push_back(sum / static_cast<double>(m) / truth);
    const double mse = sq / static_cast<double>(m);
    if (mse > 0.0) block_re.push_back(truth * truth / static_cast<double>(cell.n) / mse);
  }
  if (!block_ratio.empty()) {
    const auto s = mean_se(block_ratio);
    rep.mean_ratio = s.mean;
    rep.se_mean_ratio = s.se;
  }
  if (!block_re.empty()) {
    const auto s = mean_se(block_re);
    rep.re = s.mean;
    rep.se_re = s.se;
  }
  return rep;
}

std::vector<SimReport> run_table(std::span<const SimCell> cells, unsigned threads) {
  std::vector<SimReport> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(run_cell(c, threads));
  return out;
}

void write_sim_csv(std::ostream& out, std::span<const SimReport> reports, bool analytic) {
  CsvWriter w(out);
  w.row({"method", "a", "b", "d", "u", "n", "mean_ratio", "se_mean_ratio", "re", "se_re",
         "failures", "total"});
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : reports) {
    const auto& c = r.cell;
    w.row({std::string(to_string(c.method)), format_double(c.a), format_double(c.b),
           format_double(c.thresholds.d), format_double(c.thresholds.u), std::to_string(c.n),
           opt(r.mean_ratio), opt(r.se_mean_ratio), opt(r.re), opt(r.se_re),
           std::to_string(r.failures), std::to_string(r.total)});
  }
  if (!analytic) return;
  std::vector<const SimCell*> seen;
  for (const auto& r : reports) {
    const auto& c = r.cell;
    const bool dup = std::any_of(seen.begin(), seen.end(), [&](const SimCell* s) {
      return s->method == c.method && s->model == c.model && s->a == c.a && s->b == c.b &&
             s->param_true == c.param_true && s->thresholds == c.thresholds;
    });
    if (dup) continue;
    seen.push_back(&c);
    w.row({std::string(to_string(c.method)), format_double(c.a), format_double(c.b),
           format_double(c.thresholds.d), format_double(c.thresholds.u), "inf", "1", "0",
           format_double(analytic_are(c)), "0", "0", "0"});
  }
}

SimConfig parse_sim_config(std::istream& in) {
  SimConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (value.empty()) throw ConfigError("empty value for key '" + key + "'");

    if (key == "theta") {
      cfg.theta = parse_real(key, value);
      if (!(cfg.theta > 0.0 && std::isfinite(cfg.theta)))
        throw ConfigError("invalid value for key 'theta'");
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& item : split_list(value)) {
        const auto m = parse_method(item);
        if (!m) throw ConfigError("invalid value for key 'methods': " + item);
        cfg.methods.push_back(*m);
      }
    } else if (key == "design_points") {
      cfg.design_points.clear();
      static const std::regex pair_re(R"(\s*\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)\s*,?)");
      auto it = value.cbegin();
      std::smatch m;
      while (it != value.cend()) {
        if (!std::regex_search(it, value.cend(), m, pair_re, std::regex_constants::match_continuous))
          throw ConfigError("invalid value for key 'design_points'");
        const double a = parse_real(key, m[1].str());
        const double b = parse_real(key, m[2].str());
        if (!(a >= 0.0 && b >= 0.0 && a + b < 1.0))
          throw ConfigError("invalid value for key 'design_points': need a, b >= 0, a + b < 1");
        cfg.design_points.emplace_back(a, b);
        it = m[0].second;
      }
    } else if (key == "n_list") {
      cfg.n_list.clear();
      for (const auto& item : split_list(value)) {
        const auto n = parse_unsigned<std::size_t>(key, item);
        if (n == 0) throw ConfigError("invalid value for key 'n_list'");
        cfg.n_list.push_back(n);
      }
    } else if (key == "blocks") {
      cfg.blocks = parse_unsigned<std::size_t>(key, value);
      if (cfg.blocks == 0) throw ConfigError("invalid value for key 'blocks'");
    } else if (key == "reps") {
      cfg.reps = parse_unsigned<std::size_t>(key, value);
      if (cfg.reps == 0) throw ConfigError("invalid value for key 'reps'");
    } else if (key == "seed") {
      cfg.seed = parse_unsigned<std::uint64_t>(key, value);
    } else if (key == "out") {
      cfg.out = value;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  if (cfg.methods.empty() || cfg.design_points.empty() || cfg.n_list.empty())
    throw ConfigError("methods, design_points and n_list must be non-empty");
  return cfg;
}

std::vector<SimCell> expand_config(const SimConfig& cfg) {
  std::vector<SimCell> cells;
  std::uint64_t index = 0;
  for (const auto& [a, b] : cfg.design_points) {
    const auto t = quantile_thresholds(Model::Exp, cfg.theta, 1.0, a, b);
    for (std::size_t n : cfg.n_list) {
      for (Method m : cfg.methods) {
        SimCell c;
        c.n = n;
        c.method = m;
        c.param_true = cfg.theta;
        c.thresholds = t;
        c.a = a;
        c.b = b;
        c.replications_per_block = cfg.reps;
        c.blocks = cfg.blocks;
        c.seed = cfg.seed;
        c.cell_index = index++;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

double sample_skewness(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  double sum = 0.0;
  for (double v : x) sum += v;
  const double m = sum / static_cast<double>(x.size());
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : x) {
    const double dv = v - m;
    m2 += dv * dv;
    m3 += dv * dv * dv;
  }
  m2 /= static_cast<double>(x.size());
  m3 /= static_cast<double>(x.size());
  if (!(m2 > 0.0)) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

std::vector<HistogramPanel> histogram_study(const HistogramStudy& study, unsigned threads) {
  if (study.count < 2) throw ConfigError("histogram study needs count >= 2");
  if (study.n_list.empty() || study.methods.empty())
    throw ConfigError("histogram study needs n values and methods");
  const ExponentialModel model(study.theta);
  const std::size_t nn = study.n_list.size();
  const std::size_t nm = study.methods.size();
  std::vector<double> est(nn * study.count * nm, 0.0);
  std::vector<char> ok(est.size(), 0);

  parallel_for(nn * study.count, threads, [&](std::size_t i) {
    const std::size_t ni = i / study.count;
    const std::size_t r = i % study.count;
    auto rng = derive_stream(study.seed, ni, 0, r);
    const auto data = sample(model, study.n_list[ni], rng);
    for (std::size_t mi = 0; mi < nm; ++mi) {
      if (const auto e = try_fit(study.methods[mi], Model::Exp, data, study.thresholds, 1.0)) {
        est[i * nm + mi] = *e;
        ok[i * nm + mi] = 1;
      }
    }
  });

  std::vector<HistogramPanel> panels;
  for (std::size_t mi = 0; mi < nm; ++mi) {
    for (std::size_t ni = 0; ni < nn; ++ni) {
      HistogramPanel p;
      p.method = study.methods[mi];
      p.n = study.n_list[ni];
      for (std::size_t r = 0; r < study.count; ++r) {
        const std::size_t k = (ni * study.count + r) * nm + mi;
        if (ok[k]) {
          p.replicate.push_back(r);
          p.estimates.push_back(est[k]);
        } else {
          ++p.failures;
        }
      }
      p.skewness = sample_skewness(p.estimates);
      fill_bins(p);
      panels.push_back(std::move(p));
    }
  }
  return panels;
}

}  // namespace severfit
