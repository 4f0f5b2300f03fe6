#include "betacop/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "betacop/detail/parallel.hpp"
#include "betacop/rng.hpp"

namespace betacop {

namespace fs = std::filesystem;
using detail::pairwise_sum;

EstimatorSpec EstimatorSpec::parse(const std::string& token) {
  EstimatorSpec spec;
  spec.label = token;
  if (token == "empirical") {
    spec.kind = EstimatorKind::empirical;
  } else if (token == "checkerboard") {
    spec.kind = EstimatorKind::checkerboard;
  } else if (token == "beta") {
    spec.kind = EstimatorKind::beta;
  } else if (token == "oracle") {
    spec.oracle = true;
  } else if (token.rfind("bernstein=", 0) == 0) {
    spec.kind = EstimatorKind::bernstein;
    const std::string arg = token.substr(10);
    if (arg == "n/3") {
      spec.rule = DegreeRule::ceil_n_over_3;
    } else if (arg == "jsv") {
      spec.rule = DegreeRule::jsv;
    } else {
      try {
        spec.fixed_m = std::stoi(arg);
      } catch (const std::exception&) {
        fail(errc::config_error, "bad bernstein degree: " + token);
      }
      if (spec.fixed_m < 1) fail(errc::config_error, "bernstein degree must be >= 1");
      spec.rule = DegreeRule::fixed;
    }
  } else {
    fail(errc::config_error, "unknown estimator token: " + token);
  }
  return spec;
}

void ExperimentConfig::validate() const {
  if (replications < 2) fail(errc::config_error, "need at least 2 replications");
  if (n_values.empty()) fail(errc::config_error, "need at least one sample size");
  if (estimators.empty()) fail(errc::config_error, "need at least one estimator");
  for (std::size_t n : n_values)
    if (n < 1) fail(errc::config_error, "sample sizes must be positive");
}

namespace {

std::vector<int> degrees_for(const EstimatorSpec& spec, const ReferenceCopula& model,
                             std::size_t n, const std::vector<double>& v) {
  if (spec.kind != EstimatorKind::bernstein) return {};
  int m = 0;
  switch (spec.rule) {
    case DegreeRule::fixed:
      m = spec.fixed_m;
      break;
    case DegreeRule::ceil_n_over_3:
      m = static_cast<int>((n + 2) / 3);
      break;
    case DegreeRule::jsv:
      m = model.jsv_degree(v[0], v[1], n);
      break;
    case DegreeRule::none:
      fail(errc::config_error, "bernstein estimator needs a degree rule");
  }
  return std::vector<int>(model.dim(), m);
}

struct Stats {
  double mean, se;
};

Stats mean_se(const std::vector<double>& x) {
  const std::size_t L = x.size();
  const double mean = pairwise_sum(x.data(), L) / static_cast<double>(L);
  std::vector<double> sq(L);
  for (std::size_t i = 0; i < L; ++i) sq[i] = (x[i] - mean) * (x[i] - mean);
  const double var = pairwise_sum(sq.data(), L) / static_cast<double>(L - 1);
  return {mean, std::sqrt(var / static_cast<double>(L))};
}

void format_real(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

MeasureSamples run_measure_samples(const ExperimentConfig& cfg, std::size_t n) {
  cfg.validate();
  const std::size_t L = cfg.replications;
  const std::size_t d = cfg.model.dim();
  const std::size_t ne = cfg.estimators.size();

  MeasureSamples out;
  out.per_estimator.resize(ne);
  for (auto& a : out.per_estimator)
    for (auto& v : a) v.assign(L, 0.0);

  detail::parallel_chunks(L, 64, [&](std::size_t begin, std::size_t end) {
    std::vector<double> v(d);
    for (std::size_t ell = begin; ell < end; ++ell) {
      const Sample sample_a = cfg.model.sample(n, derive_seed(cfg.master_seed, kTagSampleA, n, ell));
      const Sample sample_b = cfg.model.sample(n, derive_seed(cfg.master_seed, kTagSampleB, n, ell));
      auto ranks_a = std::make_shared<const RankMatrix>(
          compute_ranks(sample_a, TiePolicy::random, derive_seed(cfg.master_seed, kTagTiesA, n, ell)));
      auto ranks_b = std::make_shared<const RankMatrix>(
          compute_ranks(sample_b, TiePolicy::random, derive_seed(cfg.master_seed, kTagTiesB, n, ell)));
      RngStream vstream(derive_seed(cfg.master_seed, kTagEvalPoint, n, ell));
      for (std::size_t j = 0; j < d; ++j) v[j] = vstream.open01();
      const double c_true = cfg.model.cdf(v);

      for (std::size_t e = 0; e < ne; ++e) {
        const EstimatorSpec& spec = cfg.estimators[e];
        double v1, v2;
        if (spec.oracle) {
          v1 = v2 = c_true;
        } else {
          const std::vector<int> degrees = degrees_for(spec, cfg.model, n, v);
          v1 = CopulaEstimate(spec.kind, ranks_a, degrees)(v);
          v2 = CopulaEstimate(spec.kind, ranks_b, degrees)(v);
        }
        const double e1 = v1 - c_true, e2 = v2 - c_true;
        out.per_estimator[e][0][ell] = e1 * e2;
        out.per_estimator[e][1][ell] = 0.5 * (v1 - v2) * (v1 - v2);
        out.per_estimator[e][2][ell] = 0.5 * (e1 * e1 + e2 * e2);
      }
    }
  });
  return out;
}

PerformanceReport run_measures(const ExperimentConfig& cfg) {
  cfg.validate();
  PerformanceReport report;
  report.model = cfg.model.name();
  report.replications = cfg.replications;
  report.master_seed = cfg.master_seed;
  for (std::size_t n : cfg.n_values) {
    const MeasureSamples samples = run_measure_samples(cfg, n);
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      MeasureRow row;
      row.estimator = cfg.estimators[e].label;
      row.n = n;
      const Stats isb = mean_se(samples.per_estimator[e][0]);
      const Stats ivar = mean_se(samples.per_estimator[e][1]);
      const Stats imse = mean_se(samples.per_estimator[e][2]);
      row.isb = isb.mean;
      row.ivar = ivar.mean;
      row.imse = imse.mean;
      row.se_isb = isb.se;
      row.se_ivar = ivar.se;
      row.se_imse = imse.se;
      row.isb_below_noise = row.isb < -3.0 * row.se_isb;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

namespace {

void check_box(const Box& cell, std::size_t d) {
  if (cell.lo.size() != d || cell.hi.size() != d)
    fail(errc::config_error, "limse: box rank mismatch");
  for (std::size_t j = 0; j < d; ++j)
    if (!(cell.lo[j] >= 0.0 && cell.lo[j] < cell.hi[j] && cell.hi[j] <= 1.0))
      fail(errc::config_error, "limse: box must have positive volume inside the unit cube");
}

}  // namespace

LimseEstimate run_limse_detail(const ExperimentConfig& cfg, const EstimatorSpec& est,
                               const Box& cell) {
  cfg.validate();
  const std::size_t d = cfg.model.dim();
  check_box(cell, d);
  const std::size_t L = cfg.replications;
  const std::size_t n = cfg.n_values.front();
  std::vector<double> sq(L, 0.0);

  detail::parallel_chunks(L, 64, [&](std::size_t begin, std::size_t end) {
    std::vector<double> v(d);
    for (std::size_t ell = begin; ell < end; ++ell) {
      const Sample s = cfg.model.sample(n, derive_seed(cfg.master_seed, kTagLimseSample, n, ell));
      auto ranks = std::make_shared<const RankMatrix>(
          compute_ranks(s, TiePolicy::random, derive_seed(cfg.master_seed, kTagLimseTies, n, ell)));
      RngStream vstream(derive_seed(cfg.master_seed, kTagLimsePoint, n, ell));
      for (std::size_t j = 0; j < d; ++j)
        v[j] = cell.lo[j] + vstream.open01() * (cell.hi[j] - cell.lo[j]);
      const double c_true = cfg.model.cdf(v);
      double fitted;
      if (est.oracle) {
        fitted = c_true;
      } else {
        fitted = CopulaEstimate(est.kind, ranks, degrees_for(est, cfg.model, n, v))(v);
      }
      sq[ell] = (fitted - c_true) * (fitted - c_true);
    }
  });
  const Stats st = mean_se(sq);
  return {st.mean, st.se};
}

double run_limse(const ExperimentConfig& cfg, const EstimatorSpec& est, const Box& cell) {
  return run_limse_detail(cfg, est, cell).value;
}

LreGrid run_lre_heatmap(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.lre_cells < 1) fail(errc::config_error, "lre: cells per axis not set");
  if (cfg.estimators.size() != 2)
    fail(errc::config_error, "lre: need exactly two estimators (numerator, denominator)");
  const std::size_t d = cfg.model.dim();
  const int c = cfg.lre_cells;
  const std::size_t ncells = static_cast<std::size_t>(c) * c;
  const std::size_t L = cfg.replications;
  const std::size_t n = cfg.n_values.front();

  // per-replicate squared errors, cell-major, reduced pairwise afterwards
  std::vector<std::vector<double>> sq_num(ncells, std::vector<double>(L, 0.0));
  std::vector<std::vector<double>> sq_den(ncells, std::vector<double>(L, 0.0));

  detail::parallel_chunks(L, 16, [&](std::size_t begin, std::size_t end) {
    std::vector<double> v(d);
    for (std::size_t ell = begin; ell < end; ++ell) {
      const Sample s = cfg.model.sample(n, derive_seed(cfg.master_seed, kTagLimseSample, n, ell));
      auto ranks = std::make_shared<const RankMatrix>(
          compute_ranks(s, TiePolicy::random, derive_seed(cfg.master_seed, kTagLimseTies, n, ell)));
      RngStream vstream(derive_seed(cfg.master_seed, kTagLimsePoint, n, ell));

      // fixed-degree estimators are fitted once per replicate and shared
      // across cells; jsv refits per cell (degree depends on the point)
      std::map<std::string, CopulaEstimate> cache;
      auto fitted_value = [&](const EstimatorSpec& spec, const std::vector<double>& pt,
                              double c_true) -> double {
        if (spec.oracle) return c_true;
        const std::vector<int> degrees = degrees_for(spec, cfg.model, n, pt);
        std::string key = spec.label;
        if (spec.rule == DegreeRule::jsv) key += "@" + std::to_string(degrees[0]);
        auto it = cache.find(key);
        if (it == cache.end())
          it = cache.emplace(key, CopulaEstimate(spec.kind, ranks, degrees)).first;
        return it->second(pt);
      };

      for (int j = 1; j <= c; ++j) {
        for (int k = 1; k <= c; ++k) {
          const double lo1 = static_cast<double>(j - 1) / c, hi1 = static_cast<double>(j) / c;
          const double lo2 = static_cast<double>(k - 1) / c, hi2 = static_cast<double>(k) / c;
          v[0] = lo1 + vstream.open01() * (hi1 - lo1);
          v[1] = lo2 + vstream.open01() * (hi2 - lo2);
          const double c_true = cfg.model.cdf(v);
          const double fn = fitted_value(cfg.estimators[0], v, c_true);
          const double fd = fitted_value(cfg.estimators[1], v, c_true);
          const std::size_t cell = static_cast<std::size_t>(j - 1) * c + (k - 1);
          sq_num[cell][ell] = (fn - c_true) * (fn - c_true);
          sq_den[cell][ell] = (fd - c_true) * (fd - c_true);
        }
      }
    }
  });

  LreGrid grid;
  grid.cells = c;
  grid.percent.resize(ncells);
  for (std::size_t cell = 0; cell < ncells; ++cell) {
    const double num = pairwise_sum(sq_num[cell].data(), L);
    const double den = pairwise_sum(sq_den[cell].data(), L);
    grid.percent[cell] = 100.0 * num / den;
  }
  return grid;
}

void run_study(const ExperimentConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(errc::io_error, "cannot create " + out_dir + ": " + ec.message());

  const PerformanceReport report = run_measures(cfg);
  const std::string model = report.model;
  const char* measures[3] = {"isb", "ivar", "imse"};
  std::vector<std::string> written;

  for (int m = 0; m < 3; ++m) {
    const fs::path path = fs::path(out_dir) / (model + "_" + measures[m] + ".csv");
    std::ofstream out(path);
    if (!out) fail(errc::io_error, "cannot open " + path.string());
    out << "n,estimator,value,stderr\n";
    for (const MeasureRow& row : report.rows) {
      const double value = m == 0 ? row.isb : m == 1 ? row.ivar : row.imse;
      const double se = m == 0 ? row.se_isb : m == 1 ? row.se_ivar : row.se_imse;
      out << row.n << ',' << row.estimator << ',';
      format_real(out, value);
      out << ',';
      format_real(out, se);
      out << '\n';
    }
    if (!out) fail(errc::io_error, "write failed: " + path.string());
    written.push_back(path.filename().string());
  }

  if (cfg.lre_cells > 0) {
    if (cfg.estimators.size() < 2)
      fail(errc::config_error, "lre heatmap needs two estimators");
    for (std::size_t n : cfg.n_values) {
      ExperimentConfig sub = cfg;
      sub.n_values = {n};
      sub.estimators = {cfg.estimators[0], cfg.estimators[1]};
      const LreGrid grid = run_lre_heatmap(sub);
      const fs::path path = fs::path(out_dir) / (model + "_lre_n" + std::to_string(n) + ".csv");
      std::ofstream out(path);
      if (!out) fail(errc::io_error, "cannot open " + path.string());
      out << "cell_j,cell_k,lre_percent\n";
      for (int j = 1; j <= grid.cells; ++j)
        for (int k = 1; k <= grid.cells; ++k) {
          out << j << ',' << k << ',';
          format_real(out, grid.percent[static_cast<std::size_t>(j - 1) * grid.cells + (k - 1)]);
          out << '\n';
        }
      if (!out) fail(errc::io_error, "write failed: " + path.string());
      written.push_back(path.filename().string());
    }
  }

  const fs::path manifest = fs::path(out_dir) / "manifest.txt";
  std::ofstream out(manifest);
  if (!out) fail(errc::io_error, "cannot open " + manifest.string());
  out << "tool=betacop 0.1.0\n";
  out << "model=" << model << "\n";
  out << "estimators=";
  for (std::size_t e = 0; e < cfg.estimators.size(); ++e)
    out << (e ? "," : "") << cfg.estimators[e].label;
  out << "\n";
  out << "n=";
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) out << (i ? "," : "") << cfg.n_values[i];
  out << "\n";
  out << "replications=" << cfg.replications << "\n";
  out << "master_seed=" << cfg.master_seed << "\n";
  out << "paired=true (common samples and evaluation points across estimators)\n";
  out << "substream_scheme=splitmix64(master_seed, tag, n, replicate)\n";
  out << "lre_cells=" << cfg.lre_cells << "\n";
  out << "files=";
  for (std::size_t i = 0; i < written.size(); ++i) out << (i ? "," : "") << written[i];
  out << "\n";
  if (!out) fail(errc::io_error, "write failed: " + manifest.string());
}

std::vector<std::size_t> parse_n_spec(const std::string& spec) {
  std::vector<std::size_t> out;
  auto parse_one = [&](const std::string& tok) -> std::size_t {
    try {
      const long v = std::stol(tok);
      if (v < 1) throw std::out_of_range("nonpositive");
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      fail(errc::config_error, "bad sample size: '" + tok + "'");
    }
  };
  if (spec.find(':') != std::string::npos) {
    std::stringstream ss(spec);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':'))
      fail(errc::config_error, "bad n range: " + spec);
    std::size_t step = 1;
    if (std::getline(ss, c, ':')) step = parse_one(c);
    if (step == 0) fail(errc::config_error, "n range step must be positive");
    for (std::size_t v = parse_one(a); v <= parse_one(b); v += step) out.push_back(v);
  } else {
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_one(tok));
  }
  if (out.empty()) fail(errc::config_error, "empty n spec");
  return out;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(errc::config_error, "config line without '=': " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  ExperimentConfig cfg;
  const auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  const std::string* model = get("model");
  if (!model) fail(errc::config_error, "config: missing model");
  double param = 0.0;
  for (const char* pkey : {"theta", "rho", "tau", "param"})
    if (const std::string* p = get(pkey)) param = std::stod(*p);
  cfg.model = make_reference_copula(*model, param);

  if (const std::string* est = get("estimators")) {
    std::stringstream es(*est);
    std::string tok;
    while (std::getline(es, tok, ',')) cfg.estimators.push_back(EstimatorSpec::parse(tok));
  }
  if (const std::string* n = get("n")) cfg.n_values = parse_n_spec(*n);
  if (const std::string* reps = get("reps")) cfg.replications = std::stoul(*reps);
  if (const std::string* seed = get("seed")) cfg.master_seed = std::stoull(*seed);
  if (const std::string* cells = get("cells")) cfg.lre_cells = std::stoi(*cells);
  return cfg;
}

}  // namespace betacop
