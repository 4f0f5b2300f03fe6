#include "betacop.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "betacop/beta_sampler.hpp"
#include "betacop/estimators.hpp"
#include "betacop/mc.hpp"
#include "betacop/reference.hpp"
#include "betacop/types.hpp"

using namespace betacop;

namespace {

thread_local std::string g_last_error;

bc_status status_of(errc code) {
  switch (code) {
    case errc::domain_error:
      return BC_EDOMAIN;
    case errc::dimension_mismatch:
      return BC_EDIM;
    case errc::non_finite_input:
      return BC_ENONFINITE;
    case errc::ties_present:
    case errc::tied_ranks:
      return BC_ETIES;
    case errc::parse_error:
      return BC_EPARSE;
    case errc::io_error:
      return BC_EIO;
    case errc::undefined_bandwidth:
      return BC_EBANDWIDTH;
    case errc::config_error:
      return BC_ECONFIG;
  }
  return BC_EINTERNAL;
}

template <typename Fn>
bc_status guarded(Fn&& fn) {
  try {
    fn();
    return BC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BC_EINTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BC_EINTERNAL;
  }
}

bc_status invalid(const char* msg) {
  g_last_error = msg;
  return BC_EINVAL;
}

}  // namespace

struct bc_sample {
  Sample value;
};
struct bc_ranks {
  std::shared_ptr<const RankMatrix> value;
};
struct bc_estimator {
  CopulaEstimate value;
};
struct bc_coeffs {
  CoefficientArray value;
};
struct bc_model {
  ReferenceCopula value;
};

extern "C" {

const char* bc_last_error(void) { return g_last_error.c_str(); }

const char* bc_version(void) { return "0.1.0"; }

/* ------------------------------------------------------------- samples -- */

bc_status bc_sample_create(const double* data, size_t rows, size_t cols, bc_sample** out) {
  if (!data || !out) return invalid("bc_sample_create: null argument");
  return guarded([&] {
    std::vector<double> values(data, data + rows * cols);
    *out = new bc_sample{Sample(rows, cols, std::move(values))};
  });
}

bc_status bc_sample_read_csv(const char* path, int has_header, bc_sample** out) {
  if (!path || !out) return invalid("bc_sample_read_csv: null argument");
  return guarded([&] { *out = new bc_sample{read_sample_csv(path, has_header != 0)}; });
}

size_t bc_sample_rows(const bc_sample* s) { return s ? s->value.rows() : 0; }
size_t bc_sample_cols(const bc_sample* s) { return s ? s->value.cols() : 0; }

bc_status bc_sample_copy_values(const bc_sample* s, double* buf) {
  if (!s || !buf) return invalid("bc_sample_copy_values: null argument");
  std::memcpy(buf, s->value.values().data(), s->value.values().size() * sizeof(double));
  return BC_OK;
}

void bc_sample_free(bc_sample* s) { delete s; }

/* --------------------------------------------------------------- ranks -- */

bc_status bc_ranks_compute(const bc_sample* s, int tie_policy, uint64_t tie_seed,
                           bc_ranks** out) {
  if (!s || !out) return invalid("bc_ranks_compute: null argument");
  if (tie_policy != BC_TIES_ERROR && tie_policy != BC_TIES_RANDOM)
    return invalid("bc_ranks_compute: bad tie policy");
  return guarded([&] {
    const TiePolicy policy =
        tie_policy == BC_TIES_ERROR ? TiePolicy::error_on_ties : TiePolicy::random;
    *out = new bc_ranks{
        std::make_shared<const RankMatrix>(compute_ranks(s->value, policy, tie_seed))};
  });
}

size_t bc_ranks_rows(const bc_ranks* r) { return r ? r->value->rows() : 0; }
size_t bc_ranks_cols(const bc_ranks* r) { return r ? r->value->cols() : 0; }

bc_status bc_ranks_copy_values(const bc_ranks* r, int* buf) {
  if (!r || !buf) return invalid("bc_ranks_copy_values: null argument");
  std::memcpy(buf, r->value->ranks().data(), r->value->ranks().size() * sizeof(int));
  return BC_OK;
}

void bc_ranks_free(bc_ranks* r) { delete r; }

/* ---------------------------------------------------------- estimators -- */

bc_status bc_estimator_create(const bc_ranks* r, int kind, const int* degrees,
                              size_t n_degrees, bc_estimator** out) {
  if (!r || !out) return invalid("bc_estimator_create: null argument");
  if (kind < BC_EST_EMPIRICAL || kind > BC_EST_BERNSTEIN)
    return invalid("bc_estimator_create: bad kind");
  if (n_degrees > 0 && !degrees) return invalid("bc_estimator_create: null degrees");
  return guarded([&] {
    std::vector<int> deg(degrees, degrees + n_degrees);
    *out = new bc_estimator{
        CopulaEstimate(static_cast<EstimatorKind>(kind), r->value, std::move(deg))};
  });
}

bc_status bc_estimator_eval(const bc_estimator* e, const double* u, size_t dim, double* out) {
  if (!e || !u || !out) return invalid("bc_estimator_eval: null argument");
  return guarded([&] { *out = e->value(std::span<const double>(u, dim)); });
}

bc_status bc_sup_distance(const bc_estimator* f, const bc_estimator* g,
                          int grid_points_per_axis, double* out) {
  if (!f || !g || !out) return invalid("bc_sup_distance: null argument");
  return guarded([&] { *out = sup_distance(f->value, g->value, grid_points_per_axis); });
}

bc_status bc_genuine_degrees(uint64_t n, const int* degrees, size_t n_degrees, int* out_flag) {
  if (!degrees || !out_flag) return invalid("bc_genuine_degrees: null argument");
  return guarded([&] {
    *out_flag = is_genuine_copula_degrees(static_cast<long>(n),
                                          std::span<const int>(degrees, n_degrees))
                    ? 1
                    : 0;
  });
}

void bc_estimator_free(bc_estimator* e) { delete e; }

/* --------------------------------------------------- coefficient arrays -- */

bc_status bc_coeffs_read_csv(const char* path, bc_coeffs** out) {
  if (!path || !out) return invalid("bc_coeffs_read_csv: null argument");
  return guarded([&] { *out = new bc_coeffs{read_coefficients_csv(path)}; });
}

bc_status bc_coeffs_write_csv(const bc_coeffs* a, const char* path) {
  if (!a || !path) return invalid("bc_coeffs_write_csv: null argument");
  return guarded([&] { write_coefficients_csv(a->value, path); });
}

bc_status bc_coeffs_from_ranks(const bc_ranks* r, const int* degrees, size_t n_degrees,
                               bc_coeffs** out) {
  if (!r || !degrees || !out) return invalid("bc_coeffs_from_ranks: null argument");
  return guarded([&] {
    *out = new bc_coeffs{
        empirical_coefficients(*r->value, std::span<const int>(degrees, n_degrees))};
  });
}

bc_status bc_coeffs_eval(const bc_coeffs* a, const double* u, size_t dim, double* out) {
  if (!a || !u || !out) return invalid("bc_coeffs_eval: null argument");
  return guarded([&] { *out = eval_bernstein(a->value, std::span<const double>(u, dim)); });
}

bc_status bc_coeffs_check(const bc_coeffs* a, int* ok_grounded, int* ok_margins,
                          int* ok_differences, char* report_buf, size_t report_len) {
  if (!a || !ok_grounded || !ok_margins || !ok_differences)
    return invalid("bc_coeffs_check: null argument");
  return guarded([&] {
    const ValidityReport rep = check_copula_conditions(a->value);
    *ok_grounded = rep.grounded ? 1 : 0;
    *ok_margins = rep.uniform_margins ? 1 : 0;
    *ok_differences = rep.nonneg_differences ? 1 : 0;
    if (report_buf && report_len > 0) {
      std::ostringstream text;
      auto dump = [&text](const char* what, const std::vector<ValidityReport::Witness>& ws) {
        for (const auto& w : ws) {
          text << what << " violated at (";
          for (std::size_t j = 0; j < w.index.size(); ++j) text << (j ? "," : "") << w.index[j];
          text << ") value " << w.value << "\n";
        }
      };
      dump("grounded", rep.c1_witnesses);
      dump("uniform-margins", rep.c2_witnesses);
      dump("nonneg-differences", rep.c3_witnesses);
      const std::string s = text.str();
      const std::size_t len = std::min(s.size(), report_len - 1);
      std::memcpy(report_buf, s.data(), len);
      report_buf[len] = '\0';
    }
  });
}

void bc_coeffs_free(bc_coeffs* a) { delete a; }

/* ------------------------------------------------------ beta sampling -- */

bc_status bc_sampler_draw(const bc_ranks* r, int scheme, uint64_t seed, size_t count,
                          double* out) {
  if (!r || !out) return invalid("bc_sampler_draw: null argument");
  if (scheme != BC_SCHEME_DIRECT && scheme != BC_SCHEME_ORDERSTAT)
    return invalid("bc_sampler_draw: bad scheme");
  return guarded([&] {
    BetaSamplerState state;
    state.ranks = r->value;
    state.scheme =
        scheme == BC_SCHEME_DIRECT ? SamplerScheme::direct_beta : SamplerScheme::order_statistic;
    state.rng_seed = seed;
    const Sample s = draw(state, count);
    std::memcpy(out, s.values().data(), s.values().size() * sizeof(double));
  });
}

/* ------------------------------------------------------- copula models -- */

bc_status bc_model_create(const char* family, double param, bc_model** out) {
  if (!family || !out) return invalid("bc_model_create: null argument");
  return guarded([&] { *out = new bc_model{make_reference_copula(family, param)}; });
}

bc_status bc_model_cdf(const bc_model* m, const double* u, size_t dim, double* out) {
  if (!m || !u || !out) return invalid("bc_model_cdf: null argument");
  return guarded([&] { *out = m->value.cdf(std::span<const double>(u, dim)); });
}

bc_status bc_model_partials(const bc_model* m, double u1, double u2, double out4[4]) {
  if (!m || !out4) return invalid("bc_model_partials: null argument");
  return guarded([&] {
    const auto pd = m->value.partial_derivatives(u1, u2);
    out4[0] = pd.dc1;
    out4[1] = pd.dc2;
    out4[2] = pd.d2c11;
    out4[3] = pd.d2c22;
  });
}

bc_status bc_model_sample(const bc_model* m, size_t n, uint64_t seed, bc_sample** out) {
  if (!m || !out) return invalid("bc_model_sample: null argument");
  return guarded([&] { *out = new bc_sample{m->value.sample(n, seed)}; });
}

bc_status bc_model_bernstein_transform(const bc_model* m, const int* degrees,
                                       size_t n_degrees, const double* u, size_t dim,
                                       double* out) {
  if (!m || !degrees || !u || !out) return invalid("bc_model_bernstein_transform: null argument");
  return guarded([&] {
    *out = m->value.bernstein_transform(std::span<const int>(degrees, n_degrees),
                                        std::span<const double>(u, dim));
  });
}

bc_status bc_model_jsv_degree(const bc_model* m, double u1, double u2, uint64_t n, int* out) {
  if (!m || !out) return invalid("bc_model_jsv_degree: null argument");
  return guarded([&] { *out = m->value.jsv_degree(u1, u2, n); });
}

void bc_model_free(bc_model* m) { delete m; }

/* ---------------------------------------------------------- MC harness -- */

bc_status bc_run_study(const char* config_text, const char* out_dir) {
  if (!config_text || !out_dir) return invalid("bc_run_study: null argument");
  return guarded([&] { run_study(parse_config_text(config_text), out_dir); });
}

bc_status bc_run_lre(const char* config_text, const char* out_path) {
  if (!config_text || !out_path) return invalid("bc_run_lre: null argument");
  return guarded([&] {
    ExperimentConfig cfg = parse_config_text(config_text);
    if (cfg.estimators.empty()) {
      cfg.estimators.push_back(EstimatorSpec::parse("beta"));
      cfg.estimators.push_back(EstimatorSpec::parse("empirical"));
    }
    if (cfg.estimators.size() > 2) cfg.estimators.resize(2);
    const LreGrid grid = run_lre_heatmap(cfg);
    std::ofstream out(out_path);
    if (!out) fail(errc::io_error, std::string("cannot open ") + out_path);
    out << "cell_j,cell_k,lre_percent\n";
    char buf[40];
    for (int j = 1; j <= grid.cells; ++j)
      for (int k = 1; k <= grid.cells; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g",
                      grid.percent[static_cast<std::size_t>(j - 1) * grid.cells + (k - 1)]);
        out << j << ',' << k << ',' << buf << '\n';
      }
    if (!out) fail(errc::io_error, std::string("write failed: ") + out_path);
  });
}

} /* extern "C" */
