#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fit.hpp"
#include "model_io.hpp"

namespace evcop {

// ---- measures -------------------------------------------------------------

struct Measures {
  double gini_pickands = 0.0;  // 4 (1 - int A)
  double gini_density = 0.0;   // 1 - E[X] under the spline density
  double gini_copula = 0.0;    // double integral over the copula
  double blomqvist = 0.0;
  double upper_tail = 0.0;
  double fixed_point = 0.0;  // x* with W(x*) = x*
  double slope0 = 0.0, slope1 = 0.0;  // A'(0+), A'(1-)
  double spectral_h0 = 0.0, spectral_h1 = 0.0;
};

/// Measures of the stored copula. The W-based entries (fixed point, spectral
/// masses) refer to the Pickands function before symmetrization.
Measures evaluate_model(const StoredModel& m);
void write_pickands_table(std::ostream& out, const StoredModel& m, std::size_t n);

// ---- parallel runs --------------------------------------------------------

/// Worker count: hardware concurrency, capped by EVCOP_THREADS when set.
unsigned worker_count();
/// Runs fn(0..n-1) on a fixed pool. Exceptions from fn are rethrown after
/// all workers have joined.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

std::uint64_t splitmix64(std::uint64_t x);
/// Per-run seed: seed xor a hash of the run index.
inline std::uint64_t run_seed(std::uint64_t seed, std::uint64_t index) { return seed ^ splitmix64(index); }

// ---- studies --------------------------------------------------------------

struct FamilyRun {
  ParametricPickands truth;
  double lambda = 1e-4;  // penalty used when fitting this family
};

struct RandomEvcSpec {
  double lambda = 1e-4;
  double radius = 5.0;
  int dim = 13;
  std::size_t count = 20;
};

struct StudySpec {
  enum class Mode { BiasVariance, Tvd } mode = Mode::Tvd;
  /// Explicit families; when empty the copulas come from the random prior.
  std::vector<FamilyRun> families;
  RandomEvcSpec random;
  std::vector<std::size_t> sample_sizes{1000};
  int replications = 1;
  std::uint64_t seed = 0;
  FitConfig fit;
  std::size_t t_points = 101;

  /// replications >= 1 and sample sizes >= 50.
  void validate() const;
};

/// Reads the JSON study description; throws InputError on bad input.
StudySpec study_spec_from_json(const std::string& text);

struct RunRecord {
  std::size_t copula_id = 0;
  std::size_t sample_size = 0;
  int replicate = 0;
  double tvd = 0.0, gini = 0.0, beta = 0.0, runtime_s = 0.0;
  bool ok = false;
  std::string error;
  /// Fitted A on the study t-grid (bias-variance mode).
  std::vector<double> a_grid;
};

struct StudyResult {
  StudySpec spec;
  std::vector<double> t_grid;
  /// True A on the t-grid for each copula.
  std::vector<std::vector<double>> truth;
  std::vector<RunRecord> runs;
  std::size_t failures() const;
};

StudyResult run_study(const StudySpec& spec, unsigned workers = worker_count());

/// copula_id,sample_size,replicate,tvd,gini,beta,runtime_s
void write_results_csv(std::ostream& out, const StudyResult& r);

struct TvdSummary {
  std::size_t sample_size = 0, runs = 0, failures = 0;
  double mean = 0.0, q10 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q90 = 0.0;
};
std::vector<TvdSummary> tvd_summary(const StudyResult& r);
void write_tvd_summary(std::ostream& out, const std::vector<TvdSummary>& s);

struct EnvelopeRow {
  std::size_t copula_id = 0, sample_size = 0;
  double t = 0.0, truth = 0.0, mean = 0.0, q01 = 0.0, q99 = 0.0;
};
/// Pointwise mean and 1%/99% quantiles of the fitted A per copula and size.
std::vector<EnvelopeRow> bias_variance_envelope(const StudyResult& r);
void write_envelope(std::ostream& out, const std::vector<EnvelopeRow>& rows);

// ---- joint model of an ordered pair ---------------------------------------

struct JointConfig {
  double lower = 1.0, upper = 100.0;
  std::size_t n_out = 1000;
  std::uint64_t seed = 0;
  UnivariateConfig margin;
  FitConfig copula = [] {
    FitConfig c;
    c.lambda = 1e-5;
    c.grid_k = 78;
    c.basis_dim = 13;
    return c;
  }();
};

struct JointResult {
  /// Rows of the input followed by the same rows with the columns swapped.
  PairSample duplicated;
  UnivariateFit margin;
  StoredModel copula;
  /// Simulated pairs ordered as (max, min).
  PairSample sample;
};

/// Throws InputError when a row has col1 < col2.
PairSample duplicate_swapped(const PairSample& data);
JointResult run_joint(const PairSample& data, const JointConfig& config);
std::string margin_to_json(const UnivariateFit& f, double lambda);

}  // namespace evcop
