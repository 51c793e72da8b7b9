#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gbcrypt/attacks.hpp"
#include "gbcrypt/platform.hpp"
#include "gbcrypt/words.hpp"

namespace gbc {

struct SamplerConfig {
  PlatformDescriptor platform;
  std::vector<std::size_t> lengths;
  std::size_t trials_per_length = 20;
  std::size_t pairs_per_instance = 2;
  std::size_t base_word_length = 8;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on empty lengths or zero counts.
  void validate() const;
};

struct SampledInstance {
  ConjugacyInstance instance;
  /// The generating conjugator. Kept for diagnostics; never used to score.
  Word hidden;
};

/// Base words and the hidden conjugator are uniform among freely reduced
/// words of their exact lengths. Stream keyed by (seed, n, id).
SampledInstance sample_instance(const SamplerConfig& cfg, std::size_t n, std::size_t id);

/// (h*b + d*(100-b)) / 100. Throws std::invalid_argument unless 0 <= b <= 100
/// and h, d >= 0.
double expected_time(double h, double d, double b);

struct TrialOutcome {
  bool success = false;
  std::uint64_t steps = 0;
  double elapsed_ms = 0.0;
};

/// The three solvers of a campaign. Replaceable so the bookkeeping can be
/// tested with stubs.
struct SolverSuite {
  std::function<TrialOutcome(const ConjugacyInstance&)> heuristic;
  std::function<TrialOutcome(const ConjugacyInstance&)> deterministic;
  std::function<TrialOutcome(const ConjugacyInstance&)> composite;
};

/// length_based_attack, brute_force_search and composite_run under `cfg`.
/// With `threaded_race` the composite runs H and D on two threads; step
/// counts and witnesses are unchanged, only wall time differs.
SolverSuite default_suite(const SolverConfig& cfg, bool threaded_race = false);

struct TrialRecord {
  std::size_t n = 0;
  std::size_t instance_id = 0;
  TrialOutcome heuristic;
  std::optional<TrialOutcome> deterministic;  // only run when H fails
  TrialOutcome composite;
};

struct FitOptions {
  double relative_residual_threshold = 0.1;
  double leading_coefficient_bound = 1e4;
};

struct FitModel {
  std::size_t degree = 0;
  std::vector<double> coefficients;  // ascending powers of n
  double residual_norm = 0.0;
  double relative_residual = 0.0;    // residual_norm / ||t||
  bool small_degree_fits = false;
};

/// Least squares polynomial fit. Throws std::invalid_argument when there are
/// fewer than degree + 1 distinct n values.
FitModel fit_polynomial(const std::vector<std::pair<double, double>>& points, std::size_t degree,
                        const FitOptions& options = {});

enum class Genericity { strongly_generic, generic_only, non_generic };
std::string to_string(Genericity g);

struct GenericityOptions {
  double relative_residual_threshold = 0.1;
  std::size_t min_lengths = 5;
};

struct GenericityEstimate {
  Genericity classification = Genericity::non_generic;
  double rho = 0.0;  // fitted decay per unit length, q(n) ~ c rho^n
  double c = 0.0;
  double relative_residual = 0.0;  // log space, relative to the spread of ln q
  std::size_t points_used = 0;
};

/// Fits ln q = ln c + n ln rho over the positive entries. Strongly generic
/// when rho < 1 and the fit is tight over enough lengths; generic-only when
/// q still decays; non-generic otherwise.
GenericityEstimate genericity_estimate(const std::vector<std::pair<double, double>>& failure_rates,
                                       const GenericityOptions& options = {});

/// p^r: probability that every one of r independent rounds is broken.
double multi_round_success(double p, std::size_t r);

struct MonteCarloCheck {
  double expected = 0.0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
  bool agrees = false;  // |estimate - expected| <= 4 standard errors
};

MonteCarloCheck monte_carlo_check(double p, std::size_t r, std::size_t trials, std::uint64_t seed);

struct LengthSummary {
  std::size_t n = 0;
  std::size_t trials = 0;
  double b = 0.0;  // heuristic success percentage
  double h = 0.0;  // max steps over heuristic successes
  double d = 0.0;  // max steps of D over heuristic failures
  bool d_observed = false;  // false: no heuristic failures, d recorded as 0
  double e = 0.0;
  double h_mean = 0.0;
  double d_mean = 0.0;
  double composite_mean = 0.0;
  double composite_max = 0.0;
  std::size_t composite_successes = 0;
  /// composite_mean <= (interleave_ratio + 1) * e + 1
  bool composite_within_bound = true;
};

struct CampaignConfig {
  SamplerConfig sampler;
  SolverConfig solver;
  std::size_t workers = 1;
  std::size_t fit_degree = 2;
  bool record_wall_time = false;
  bool threaded_race = false;
  FitOptions fit;
  GenericityOptions genericity;
};

/// Throws ParseError on malformed documents.
CampaignConfig campaign_from_json(std::string_view text);

struct BenchReport {
  PlatformDescriptor platform;
  std::uint64_t seed = 0;
  std::vector<LengthSummary> lengths;
  std::optional<FitModel> fit;  // of e(n); absent with a single length
  GenericityEstimate genericity;
  std::vector<TrialRecord> trials;
};

BenchReport run_experiment(const CampaignConfig& cfg, const SolverSuite& suite);
BenchReport run_experiment(const CampaignConfig& cfg);

/// report.json. Wall times never appear here.
std::string to_json(const BenchReport& report);

/// trials.csv with header `n,instance_id,solver,success,steps,elapsed_ms`.
/// elapsed_ms is left blank unless `with_wall_time`.
std::string trials_csv(const BenchReport& report, bool with_wall_time);

}  // namespace gbc
