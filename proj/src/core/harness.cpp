#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "errors.hpp"
#include "williamson.hpp"

namespace evcop {

using nlohmann::json;

Measures evaluate_model(const StoredModel& m) {
  const ZBasis basis = m.basis();
  const WilliamsonGrid w = w_from_theta(basis, m.theta, m.center_applied, m.normalize_w);
  const Curve a = m.curve();
  const ClrDensity d(basis, m.theta, m.center_applied);

  Measures r;
  r.gini_pickands = gini_from_pickands(a);
  r.gini_density = gini_from_density([&](double x) { return d.pdf(x); }, d.grid());
  r.gini_copula = gini_copula(EvCopula(a));
  r.blomqvist = blomqvist_beta(a);
  r.upper_tail = upper_tail(a);
  // W(x*) = x* sits at t = 1/2, so the fixed point does not depend on the flip.
  r.fixed_point = fixed_point(w.as_curve());
  r.slope0 = a(0.0, 1);
  r.slope1 = a(1.0, 1);
  const auto s = spectral_from_w(w);
  r.spectral_h0 = m.flipped ? s.H1 : s.H0;
  r.spectral_h1 = m.flipped ? s.H0 : s.H1;
  return r;
}

void write_pickands_table(std::ostream& out, const StoredModel& m, std::size_t n) {
  if (n < 2) throw InputError("pickands table needs at least 2 points");
  const Curve a = m.curve();
  out << "t,A,dA,d2A\n" << std::setprecision(15);
  for (double t : linspace(0.0, 1.0, n)) out << t << ',' << a(t, 0) << ',' << a(t, 1) << ',' << a(t, 2) << '\n';
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EVCOP_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<unsigned>(n, unsigned(cap));
  }
  return n;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, unsigned(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  const auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void StudySpec::validate() const {
  if (replications < 1) throw InputError("study: replications must be >= 1");
  if (sample_sizes.empty()) throw InputError("study: no sample sizes");
  for (auto n : sample_sizes)
    if (n < 50) throw InputError("study: sample sizes must be >= 50");
  if (t_points < 2) throw InputError("study: t_points must be >= 2");
  if (families.empty() && random.count == 0) throw InputError("study: no copulas");
  for (const auto& f : families) f.truth.validate();
  fit.validate();
}

StudySpec study_spec_from_json(const std::string& text) {
  StudySpec s;
  try {
    const json j = json::parse(text);
    const auto mode = j.at("study").get<std::string>();
    if (mode == "bias-variance") s.mode = StudySpec::Mode::BiasVariance;
    else if (mode == "tvd") s.mode = StudySpec::Mode::Tvd;
    else throw InputError("study: unknown mode '" + mode + "'");
    s.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
    s.replications = j.value("replications", 1);
    s.seed = j.value("seed", std::uint64_t{0});
    s.t_points = j.value("t_points", std::size_t{101});
    if (j.contains("fit")) {
      const auto& f = j["fit"];
      s.fit.lambda = f.value("lambda", s.fit.lambda);
      s.fit.basis_dim = f.value("dim", s.fit.basis_dim);
      s.fit.grid_k = f.value("grid_k", s.fit.grid_k);
      s.fit.ordering_heuristic = f.value("flip_heuristic", s.fit.ordering_heuristic);
    }
    if (j.contains("families")) {
      for (const auto& f : j["families"]) {
        FamilyRun r;
        r.truth.family = family_from_name(f.at("family").get<std::string>());
        r.truth.theta = f.at("theta").get<double>();
        const double a = f.value("alpha", 1.0), b = f.value("beta", 1.0);
        if (a != 1.0 || b != 1.0) r.truth.khoudraji = std::pair{a, b};
        r.lambda = f.value("lambda", s.fit.lambda);
        s.families.push_back(r);
      }
    }
    if (j.contains("random")) {
      const auto& r = j["random"];
      s.random.lambda = r.value("lambda", s.random.lambda);
      s.random.radius = r.value("R", s.random.radius);
      s.random.dim = r.value("dim", s.random.dim);
      s.random.count = r.value("count", s.random.count);
    } else if (!s.families.empty()) {
      s.random.count = 0;
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("study spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::size_t StudyResult::failures() const {
  return std::size_t(std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return !r.ok; }));
}

StudyResult run_study(const StudySpec& spec, unsigned workers) {
  spec.validate();
  StudyResult res;
  res.spec = spec;
  res.t_grid = linspace(0.0, 1.0, spec.t_points);

  // Truth copulas and the penalty used to fit each of them.
  std::vector<EvCopula> truth;
  std::vector<double> lambdas;
  for (const auto& f : spec.families) {
    truth.emplace_back(f.truth);
    lambdas.push_back(f.lambda);
  }
  if (spec.families.empty()) {
    const ZBasis b(uniform_knots(spec.random.dim - 3, 3));
    for (auto& r : random_pickands(spec.random.lambda, spec.random.radius, spec.random.count, spec.seed, b)) {
      truth.emplace_back(r.pickands);
      lambdas.push_back(spec.fit.lambda);
    }
  }
  for (const auto& c : truth) {
    std::vector<double> a(res.t_grid.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = c.pickands()(res.t_grid[i], 0);
    res.truth.push_back(std::move(a));
  }

  const std::size_t n_sizes = spec.sample_sizes.size(), reps = std::size_t(spec.replications);
  res.runs.resize(truth.size() * n_sizes * reps);
  const bool keep_curve = spec.mode == StudySpec::Mode::BiasVariance;
  parallel_for(res.runs.size(), workers, [&](std::size_t idx) {
    RunRecord& r = res.runs[idx];
    r.copula_id = idx / (n_sizes * reps);
    r.sample_size = spec.sample_sizes[(idx / reps) % n_sizes];
    r.replicate = int(idx % reps);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const EvCopula& c = truth[r.copula_id];
      const auto z = z_transform(c.simulate(r.sample_size, run_seed(spec.seed, idx)));
      FitConfig cfg = spec.fit;
      cfg.lambda = lambdas[r.copula_id];
      const auto m = optimize(z, cfg);
      const EvCopula fitted(m.pickands);
      const Curve a = fitted.pickands();
      r.tvd = tvd_copulas(fitted, c).tvd;
      r.gini = gini_from_pickands(a);
      r.beta = blomqvist_beta(a);
      if (keep_curve) {
        r.a_grid.resize(res.t_grid.size());
        for (std::size_t i = 0; i < r.a_grid.size(); ++i) r.a_grid[i] = a(res.t_grid[i], 0);
      }
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
      r.tvd = r.gini = r.beta = std::nan("");
    }
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });
  return res;
}

void write_results_csv(std::ostream& out, const StudyResult& r) {
  out << "copula_id,sample_size,replicate,tvd,gini,beta,runtime_s\n" << std::setprecision(10);
  for (const auto& x : r.runs)
    out << x.copula_id << ',' << x.sample_size << ',' << x.replicate << ',' << x.tvd << ',' << x.gini << ','
        << x.beta << ',' << x.runtime_s << '\n';
}

std::vector<TvdSummary> tvd_summary(const StudyResult& r) {
  std::vector<TvdSummary> out;
  for (std::size_t n : r.spec.sample_sizes) {
    TvdSummary s;
    s.sample_size = n;
    std::vector<double> v;
    for (const auto& x : r.runs) {
      if (x.sample_size != n) continue;
      ++s.runs;
      if (x.ok) v.push_back(x.tvd);
      else ++s.failures;
    }
    if (!v.empty()) {
      double sum = 0.0;
      for (double d : v) sum += d;
      s.mean = sum / double(v.size());
      s.q10 = empirical_quantile(v, 0.10);
      s.q25 = empirical_quantile(v, 0.25);
      s.q50 = empirical_quantile(v, 0.50);
      s.q75 = empirical_quantile(v, 0.75);
      s.q90 = empirical_quantile(v, 0.90);
    } else {
      s.mean = s.q10 = s.q25 = s.q50 = s.q75 = s.q90 = std::nan("");
    }
    out.push_back(s);
  }
  return out;
}

void write_tvd_summary(std::ostream& out, const std::vector<TvdSummary>& s) {
  out << "sample_size,runs,failures,mean,q10,q25,q50,q75,q90\n" << std::setprecision(6);
  for (const auto& x : s)
    out << x.sample_size << ',' << x.runs << ',' << x.failures << ',' << x.mean << ',' << x.q10 << ',' << x.q25
        << ',' << x.q50 << ',' << x.q75 << ',' << x.q90 << '\n';
}

std::vector<EnvelopeRow> bias_variance_envelope(const StudyResult& r) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const RunRecord*>> groups;
  for (const auto& x : r.runs)
    if (x.ok && !x.a_grid.empty()) groups[{x.copula_id, x.sample_size}].push_back(&x);
  std::vector<EnvelopeRow> out;
  for (const auto& [key, runs] : groups) {
    for (std::size_t i = 0; i < r.t_grid.size(); ++i) {
      std::vector<double> v;
      double sum = 0.0;
      for (const auto* x : runs) {
        v.push_back(x->a_grid[i]);
        sum += x->a_grid[i];
      }
      out.push_back({key.first, key.second, r.t_grid[i], r.truth[key.first][i], sum / double(v.size()),
                     empirical_quantile(v, 0.01), empirical_quantile(v, 0.99)});
    }
  }
  return out;
}

void write_envelope(std::ostream& out, const std::vector<EnvelopeRow>& rows) {
  out << "copula_id,sample_size,t,truth,mean,q01,q99\n" << std::setprecision(10);
  for (const auto& x : rows)
    out << x.copula_id << ',' << x.sample_size << ',' << x.t << ',' << x.truth << ',' << x.mean << ',' << x.q01
        << ',' << x.q99 << '\n';
}

PairSample duplicate_swapped(const PairSample& data) {
  PairSample out = data;
  for (const auto& r : data) {
    if (r[0] < r[1]) throw InputError("joint: every row needs col1 >= col2");
    out.push_back({r[1], r[0]});
  }
  return out;
}

JointResult run_joint(const PairSample& data, const JointConfig& config) {
  if (data.size() < 15) throw InputError("joint: need at least 15 rows");
  auto dup = duplicate_swapped(data);

  // One shared margin: the first column of the duplicated sample holds every value.
  std::vector<double> pooled;
  for (const auto& r : dup) pooled.push_back(r[0]);
  auto margin = fit_univariate_density(pooled, config.lower, config.upper, config.margin);

  const auto u = survival_transform(pseudo_observations(dup));
  const auto fit = optimize(z_transform(u), config.copula);
  StoredModel model = StoredModel::from_fit(fit, config.copula.normalize_w);
  model.survival = true;
  model.symmetrize = true;

  PairSample sample = model.copula().simulate(config.n_out, config.seed);
  for (auto& r : sample) {
    const double x = margin.quantile(r[0]), y = margin.quantile(r[1]);
    r = {std::max(x, y), std::min(x, y)};
  }
  return {std::move(dup), std::move(margin), std::move(model), std::move(sample)};
}

std::string margin_to_json(const UnivariateFit& f, double lambda) {
  json j;
  j["lower"] = f.lower();
  j["upper"] = f.upper();
  j["degree"] = f.basis().degree();
  j["knots"] = f.basis().config().interior;
  j["theta"] = std::vector<double>(f.theta().data(), f.theta().data() + f.theta().size());
  j["lambda"] = lambda;
  return j.dump(2);
}

}  // namespace evcop
