#include "evcop/evcop.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "harness.hpp"
#include "model_io.hpp"

struct evcop_model {
  evcop::StoredModel stored;
  evcop::EvCopula copula;
};

namespace {

thread_local std::string g_last_error;

template <class F>
evcop_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return EVCOP_OK;
  } catch (const evcop::InputError& e) {
    g_last_error = e.what();
    return EVCOP_ERR_INPUT;
  } catch (const evcop::NumericalError& e) {
    g_last_error = e.what();
    return EVCOP_ERR_NUMERICAL;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return EVCOP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EVCOP_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw evcop::InputError(what);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

evcop_model* wrap(evcop::StoredModel s) {
  auto c = s.copula();
  return new evcop_model{std::move(s), std::move(c)};
}

evcop::FitConfig fit_config(const evcop_fit_options& o) {
  evcop::FitConfig c;
  c.basis_dim = o.dim;
  c.degree = o.degree;
  c.lambda = o.lambda;
  c.grid_k = o.grid_k;
  c.ordering_heuristic = o.flip_heuristic != 0;
  c.max_iter = o.max_iter;
  c.seed = o.seed;
  return c;
}

evcop_model* fit_rows(evcop::PairSample rows, const evcop_fit_options* opts) {
  evcop_fit_options o;
  evcop_fit_options_default(&o);
  if (opts) o = *opts;
  if (rows.size() < 30) throw evcop::InputError("fit: need at least 30 rows");
  if (o.pseudo) rows = evcop::pseudo_observations(rows);
  if (o.survival) rows = evcop::survival_transform(rows);
  const auto cfg = fit_config(o);
  auto stored = evcop::StoredModel::from_fit(evcop::optimize(evcop::z_transform(rows), cfg), cfg.normalize_w);
  stored.survival = o.survival != 0;
  return wrap(std::move(stored));
}

}  // namespace

extern "C" {

const char* evcop_version(void) { return "1.0.0"; }

const char* evcop_last_error(void) { return g_last_error.c_str(); }

void evcop_string_free(char* s) { std::free(s); }

void evcop_fit_options_default(evcop_fit_options* o) {
  if (!o) return;
  const evcop::FitConfig c;
  o->dim = c.basis_dim;
  o->degree = c.degree;
  o->lambda = c.lambda;
  o->grid_k = c.grid_k;
  o->flip_heuristic = 1;
  o->pseudo = 0;
  o->survival = 0;
  o->max_iter = c.max_iter;
  o->seed = 0;
}

void evcop_joint_options_default(evcop_joint_options* o) {
  if (!o) return;
  const evcop::JointConfig c;
  o->lower = c.lower;
  o->upper = c.upper;
  o->n_out = c.n_out;
  o->seed = 0;
}

evcop_status evcop_fit_pairs(const double* uv, size_t n, const evcop_fit_options* opts, evcop_model** out) {
  return guarded([&] {
    require(out && (uv || n == 0), "fit: null argument");
    evcop::PairSample rows(n);
    for (size_t i = 0; i < n; ++i) rows[i] = {uv[2 * i], uv[2 * i + 1]};
    *out = fit_rows(std::move(rows), opts);
  });
}

evcop_status evcop_fit_csv(const char* path, const evcop_fit_options* opts, evcop_model** out) {
  return guarded([&] {
    require(path && out, "fit: null argument");
    *out = fit_rows(evcop::read_pairs_file(path), opts);
  });
}

evcop_status evcop_model_load(const char* path, evcop_model** out) {
  return guarded([&] {
    require(path && out, "load: null argument");
    *out = wrap(evcop::load_model(path));
  });
}

evcop_status evcop_model_from_json(const char* json, evcop_model** out) {
  return guarded([&] {
    require(json && out, "from_json: null argument");
    *out = wrap(evcop::model_from_json(json));
  });
}

evcop_status evcop_model_save(const evcop_model* m, const char* path) {
  return guarded([&] {
    require(m && path, "save: null argument");
    evcop::save_model(m->stored, path);
  });
}

evcop_status evcop_model_to_json(const evcop_model* m, char** out) {
  return guarded([&] {
    require(m && out, "to_json: null argument");
    *out = dup_string(evcop::model_to_json(m->stored));
  });
}

void evcop_model_free(evcop_model* m) { delete m; }

evcop_status evcop_model_pickands(const evcop_model* m, double t, int order, double* out) {
  return guarded([&] {
    require(m && out, "pickands: null argument");
    require(t >= 0.0 && t <= 1.0, "pickands: t must lie in [0, 1]");
    require(order >= 0 && order <= 2, "pickands: order must be 0, 1 or 2");
    *out = m->copula.pickands()(t, order);
  });
}

evcop_status evcop_model_cdf(const evcop_model* m, double u, double v, double* out) {
  return guarded([&] {
    require(m && out, "cdf: null argument");
    require(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0, "cdf: arguments must lie in [0, 1]");
    *out = m->copula.cdf(u, v);
  });
}

evcop_status evcop_model_pdf(const evcop_model* m, double u, double v, double* out) {
  return guarded([&] {
    require(m && out, "pdf: null argument");
    require(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0, "pdf: arguments must lie in (0, 1)");
    *out = m->copula.pdf(u, v);
  });
}

evcop_status evcop_model_measures(const evcop_model* m, evcop_measures* out) {
  return guarded([&] {
    require(m && out, "measures: null argument");
    const auto r = evcop::evaluate_model(m->stored);
    *out = {r.gini_pickands, r.gini_density, r.gini_copula, r.blomqvist, r.upper_tail,
            r.fixed_point,   r.slope0,       r.slope1,      r.spectral_h0, r.spectral_h1,
            m->stored.loglik, m->stored.lambda, m->stored.flipped ? 1 : 0, m->stored.converged ? 1 : 0,
            m->stored.iterations};
  });
}

evcop_status evcop_model_pickands_table(const evcop_model* m, size_t n, const char* path) {
  return guarded([&] {
    require(m && path, "table: null argument");
    std::ofstream f(path);
    require(bool(f), "table: cannot write output file");
    evcop::write_pickands_table(f, m->stored, n);
  });
}

evcop_status evcop_model_simulate(const evcop_model* m, size_t n, uint64_t seed, double* out) {
  return guarded([&] {
    require(m && (out || n == 0), "simulate: null argument");
    const auto s = m->copula.simulate(n, seed);
    for (size_t i = 0; i < n; ++i) {
      out[2 * i] = s[i][0];
      out[2 * i + 1] = s[i][1];
    }
  });
}

evcop_status evcop_model_simulate_csv(const evcop_model* m, size_t n, uint64_t seed, const char* path) {
  return guarded([&] {
    require(m && path, "simulate: null argument");
    evcop::write_pairs_file(path, m->copula.simulate(n, seed));
  });
}

evcop_status evcop_study_run(const char* spec_path, const char* results_path, const char* summary_path,
                             char** summary, size_t* failures) {
  return guarded([&] {
    require(spec_path, "study: null spec path");
    std::ifstream in(spec_path);
    require(bool(in), "study: cannot read the spec file");
    std::stringstream text;
    text << in.rdbuf();
    const auto spec = evcop::study_spec_from_json(text.str());
    const auto res = evcop::run_study(spec);

    std::ostringstream table;
    if (spec.mode == evcop::StudySpec::Mode::Tvd) evcop::write_tvd_summary(table, evcop::tvd_summary(res));
    else evcop::write_envelope(table, evcop::bias_variance_envelope(res));
    if (results_path) {
      std::ofstream f(results_path);
      require(bool(f), "study: cannot write the results file");
      evcop::write_results_csv(f, res);
    }
    if (summary_path) {
      std::ofstream f(summary_path);
      require(bool(f), "study: cannot write the summary file");
      f << table.str();
    }
    if (failures) *failures = res.failures();
    if (summary) *summary = dup_string(table.str());
  });
}

evcop_status evcop_joint_run(const char* csv_path, const evcop_joint_options* opts, const char* out_dir) {
  return guarded([&] {
    require(csv_path && out_dir, "joint: null argument");
    evcop_joint_options o;
    evcop_joint_options_default(&o);
    if (opts) o = *opts;
    evcop::JointConfig cfg;
    cfg.lower = o.lower;
    cfg.upper = o.upper;
    cfg.n_out = o.n_out;
    cfg.seed = o.seed;
    const auto r = evcop::run_joint(evcop::read_pairs_file(csv_path), cfg);
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, "joint: cannot create the output directory");
    std::ofstream margin(dir / "margin.json");
    require(bool(margin), "joint: cannot write margin.json");
    margin << evcop::margin_to_json(r.margin, cfg.margin.lambda) << '\n';
    evcop::save_model(r.copula, (dir / "copula.json").string());
    evcop::write_pairs_file((dir / "sample.csv").string(), r.sample, "m1,m2");
  });
}

}  // extern "C"
