#include "gbcrypt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "gbcrypt/errors.hpp"
#include "gbcrypt/random.hpp"
#include "json.hpp"

namespace gbc {

namespace {

using Json = nlohmann::ordered_json;

// Solves min ||A c - y|| by column-pivoted QR.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  return a.colPivHouseholderQr().solve(y);
}

Eigen::MatrixXd vandermonde(const std::vector<double>& xs, std::size_t degree) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(degree + 1));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double v = 1.0;
    for (std::size_t j = 0; j <= degree; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      v *= xs[i];
    }
  }
  return a;
}

TrialOutcome from_attack(const AttackOutcome& o) { return {o.witness.has_value(), o.steps, o.elapsed_ms}; }

Json fit_json(const FitModel& f) {
  Json j;
  j["degree"] = f.degree;
  j["coefficients"] = f.coefficients;
  j["residual_norm"] = f.residual_norm;
  j["relative_residual"] = f.relative_residual;
  j["small_degree_fits"] = f.small_degree_fits;
  return j;
}

}  // namespace

void SamplerConfig::validate() const {
  if (lengths.empty()) throw std::invalid_argument("sampler needs at least one length");
  if (trials_per_length == 0 || pairs_per_instance == 0 || base_word_length == 0) {
    throw std::invalid_argument("sampler counts must be positive");
  }
}

SampledInstance sample_instance(const SamplerConfig& cfg, std::size_t n, std::size_t id) {
  auto rng = make_rng({cfg.seed, n, id});
  const int r = cfg.platform.alphabet_size();
  SampledInstance out;
  out.instance.platform = cfg.platform;
  out.instance.promised = true;
  out.instance.instance_length = n;
  out.hidden = random_reduced_word(rng, r, n);
  for (std::size_t i = 0; i < cfg.pairs_per_instance; ++i) {
    Word a = random_reduced_word(rng, r, cfg.base_word_length);
    Word b = normal_form(cfg.platform, conjugate(a, out.hidden));
    out.instance.pairs.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

double expected_time(double h, double d, double b) {
  if (!(b >= 0.0 && b <= 100.0)) throw std::invalid_argument("success percentage b must lie in [0, 100]");
  if (!(h >= 0.0 && d >= 0.0)) throw std::invalid_argument("timings must be nonnegative");
  return (h * b + d * (100.0 - b)) / 100.0;
}

SolverSuite default_suite(const SolverConfig& cfg, bool threaded_race) {
  cfg.validate();
  SolverSuite s;
  s.heuristic = [cfg](const ConjugacyInstance& inst) { return from_attack(length_based_attack(inst, cfg)); };
  s.deterministic = [cfg](const ConjugacyInstance& inst) { return from_attack(brute_force_search(inst, cfg)); };
  if (threaded_race) {
    s.composite = [cfg](const ConjugacyInstance& inst) { return from_attack(composite_run_parallel(inst, cfg)); };
  } else {
    s.composite = [cfg](const ConjugacyInstance& inst) { return from_attack(composite_run(inst, cfg)); };
  }
  return s;
}

FitModel fit_polynomial(const std::vector<std::pair<double, double>>& points, std::size_t degree,
                        const FitOptions& options) {
  std::set<double> distinct;
  for (const auto& p : points) distinct.insert(p.first);
  if (distinct.size() < degree + 1) {
    throw std::invalid_argument("fit of degree " + std::to_string(degree) + " needs " +
                                std::to_string(degree + 1) + " distinct n values");
  }
  std::vector<double> xs;
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    xs.push_back(points[i].first);
    y(static_cast<Eigen::Index>(i)) = points[i].second;
  }
  const Eigen::MatrixXd a = vandermonde(xs, degree);
  const Eigen::VectorXd c = least_squares(a, y);

  FitModel f;
  f.degree = degree;
  f.coefficients.assign(c.data(), c.data() + c.size());
  f.residual_norm = (a * c - y).norm();
  const double scale = y.norm();
  f.relative_residual = scale > 0.0 ? f.residual_norm / scale : 0.0;
  f.small_degree_fits = f.relative_residual < options.relative_residual_threshold &&
                        std::abs(f.coefficients.back()) <= options.leading_coefficient_bound;
  return f;
}

std::string to_string(Genericity g) {
  switch (g) {
    case Genericity::strongly_generic:
      return "strongly-generic";
    case Genericity::generic_only:
      return "generic-only";
    case Genericity::non_generic:
      return "non-generic";
  }
  return {};
}

GenericityEstimate genericity_estimate(const std::vector<std::pair<double, double>>& failure_rates,
                                       const GenericityOptions& options) {
  for (const auto& [n, q] : failure_rates) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("failure rates must lie in [0, 1]");
  }
  GenericityEstimate est;
  std::vector<std::pair<double, double>> sorted = failure_rates;
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> xs;
  std::vector<double> logs;
  for (const auto& [n, q] : sorted) {
    if (q > 0.0) {
      xs.push_back(n);
      logs.push_back(std::log(q));
    }
  }
  est.points_used = xs.size();
  if (xs.empty()) {
    est.classification = Genericity::strongly_generic;
    return est;
  }
  const bool decays = sorted.size() >= 2 && sorted.back().second < sorted.front().second;
  std::set<double> distinct(xs.begin(), xs.end());
  if (distinct.size() < 2) {
    est.classification = decays ? Genericity::generic_only : Genericity::non_generic;
    return est;
  }

  const Eigen::MatrixXd a = vandermonde(xs, 1);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(logs.data(), static_cast<Eigen::Index>(logs.size()));
  const Eigen::VectorXd c = least_squares(a, y);
  est.c = std::exp(c(0));
  est.rho = std::exp(c(1));
  const double spread = (y.array() - y.mean()).matrix().norm();
  const double residual = (a * c - y).norm();
  est.relative_residual = spread > 0.0 ? residual / spread : 0.0;

  if (est.rho < 1.0 && distinct.size() >= options.min_lengths &&
      est.relative_residual < options.relative_residual_threshold) {
    est.classification = Genericity::strongly_generic;
  } else if (est.rho < 1.0 && decays) {
    est.classification = Genericity::generic_only;
  } else {
    est.classification = Genericity::non_generic;
  }
  return est;
}

double multi_round_success(double p, std::size_t r) {
  if (!(p >= 0.0 && p <= 1.0) || r == 0) throw std::invalid_argument("need 0 <= p <= 1 and r >= 1");
  return std::pow(p, static_cast<double>(r));
}

MonteCarloCheck monte_carlo_check(double p, std::size_t r, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("monte carlo check needs trials");
  MonteCarloCheck m;
  m.expected = multi_round_success(p, r);
  auto rng = make_rng({seed});
  std::bernoulli_distribution round_broken(p);
  std::size_t all_broken = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    bool broken = true;
    for (std::size_t i = 0; i < r; ++i) broken = round_broken(rng) && broken;
    all_broken += broken ? 1 : 0;
  }
  m.estimate = static_cast<double>(all_broken) / static_cast<double>(trials);
  m.standard_error = std::sqrt(m.expected * (1.0 - m.expected) / static_cast<double>(trials));
  const double diff = std::abs(m.estimate - m.expected);
  if (m.standard_error > 0.0) {
    m.z = (m.estimate - m.expected) / m.standard_error;
    m.agrees = diff <= 4.0 * m.standard_error;
  } else {
    m.agrees = diff == 0.0;
  }
  return m;
}

CampaignConfig campaign_from_json(std::string_view text) {
  CampaignConfig cfg;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_object()) throw ParseError("campaign config must be a JSON object");
    cfg.sampler.platform = PlatformDescriptor::parse(doc.at("platform").get<std::string>());
    cfg.sampler.lengths = doc.at("lengths").get<std::vector<std::size_t>>();
    cfg.sampler.trials_per_length = doc.value("trials", cfg.sampler.trials_per_length);
    cfg.sampler.pairs_per_instance = doc.value("pairs_per_instance", cfg.sampler.pairs_per_instance);
    cfg.sampler.base_word_length = doc.value("base_word_length", cfg.sampler.base_word_length);
    cfg.sampler.seed = doc.value("seed", cfg.sampler.seed);
    if (doc.contains("budgets")) {
      const auto& b = doc.at("budgets");
      cfg.solver.max_depth = b.value("max_depth", cfg.solver.max_depth);
      cfg.solver.max_steps = b.value("max_steps", cfg.solver.max_steps);
      cfg.solver.beam_width = b.value("beam_width", cfg.solver.beam_width);
      cfg.solver.restarts = b.value("restarts", cfg.solver.restarts);
      cfg.solver.interleave_ratio = b.value("interleave_ratio", cfg.solver.interleave_ratio);
    }
    cfg.solver.seed = cfg.sampler.seed;
    cfg.workers = doc.value("workers", cfg.workers);
    cfg.fit_degree = doc.value("fit_degree", cfg.fit_degree);
    cfg.record_wall_time = doc.value("record_wall_time", cfg.record_wall_time);
    cfg.threaded_race = doc.value("threaded_race", cfg.threaded_race);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad campaign config: ") + e.what());
  }
  try {
    cfg.sampler.validate();
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("bad campaign config: ") + e.what());
  }
  if (cfg.workers == 0) throw ParseError("bad campaign config: workers must be positive");
  return cfg;
}

BenchReport run_experiment(const CampaignConfig& cfg, const SolverSuite& suite) {
  cfg.sampler.validate();
  BenchReport report;
  report.platform = cfg.sampler.platform;
  report.seed = cfg.sampler.seed;

  for (std::size_t n : cfg.sampler.lengths) {
    for (std::size_t id = 0; id < cfg.sampler.trials_per_length; ++id) report.trials.push_back({n, id, {}, {}, {}});
  }

  // Each task fills its own slot, so the result does not depend on which
  // worker ran it.
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < report.trials.size(); i = next++) {
      auto& rec = report.trials[i];
      const auto sample = sample_instance(cfg.sampler, rec.n, rec.instance_id);
      rec.heuristic = suite.heuristic(sample.instance);
      if (!rec.heuristic.success) rec.deterministic = suite.deterministic(sample.instance);
      rec.composite = suite.composite(sample.instance);
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, report.trials.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<std::pair<double, double>> e_series;
  std::vector<std::pair<double, double>> q_series;
  for (std::size_t n : cfg.sampler.lengths) {
    LengthSummary s;
    s.n = n;
    std::size_t h_ok = 0, d_runs = 0;
    double h_sum = 0.0, d_sum = 0.0, c_sum = 0.0;
    for (const auto& rec : report.trials) {
      if (rec.n != n) continue;
      ++s.trials;
      if (rec.heuristic.success) {
        ++h_ok;
        h_sum += static_cast<double>(rec.heuristic.steps);
        s.h = std::max(s.h, static_cast<double>(rec.heuristic.steps));
      }
      if (rec.deterministic) {
        ++d_runs;
        d_sum += static_cast<double>(rec.deterministic->steps);
        s.d = std::max(s.d, static_cast<double>(rec.deterministic->steps));
      }
      c_sum += static_cast<double>(rec.composite.steps);
      s.composite_max = std::max(s.composite_max, static_cast<double>(rec.composite.steps));
      s.composite_successes += rec.composite.success ? 1 : 0;
    }
    s.b = 100.0 * static_cast<double>(h_ok) / static_cast<double>(s.trials);
    s.d_observed = d_runs > 0;
    s.h_mean = h_ok ? h_sum / static_cast<double>(h_ok) : 0.0;
    s.d_mean = d_runs ? d_sum / static_cast<double>(d_runs) : 0.0;
    s.composite_mean = c_sum / static_cast<double>(s.trials);
    s.e = expected_time(s.h, s.d, s.b);
    s.composite_within_bound =
        s.composite_mean <= static_cast<double>(cfg.solver.interleave_ratio + 1) * s.e + 1.0;
    report.lengths.push_back(s);
    e_series.emplace_back(static_cast<double>(n), s.e);
    q_series.emplace_back(static_cast<double>(n), 1.0 - s.b / 100.0);
  }

  std::set<double> distinct;
  for (const auto& p : e_series) distinct.insert(p.first);
  if (distinct.size() >= 2) {
    const std::size_t degree = std::min(cfg.fit_degree, distinct.size() - 1);
    report.fit = fit_polynomial(e_series, degree, cfg.fit);
  }
  report.genericity = genericity_estimate(q_series, cfg.genericity);
  return report;
}

BenchReport run_experiment(const CampaignConfig& cfg) {
  return run_experiment(cfg, default_suite(cfg.solver, cfg.threaded_race));
}

std::string to_json(const BenchReport& report) {
  Json doc;
  doc["platform"] = report.platform.to_string();
  doc["seed"] = report.seed;
  Json lengths = Json::array();
  for (const auto& s : report.lengths) {
    Json j;
    j["n"] = s.n;
    j["trials"] = s.trials;
    j["b"] = s.b;
    j["h"] = s.h;
    j["d"] = s.d;
    j["d_observed"] = s.d_observed;
    j["e"] = s.e;
    j["h_mean"] = s.h_mean;
    j["d_mean"] = s.d_mean;
    j["composite_mean"] = s.composite_mean;
    j["composite_max"] = s.composite_max;
    j["composite_successes"] = s.composite_successes;
    j["composite_within_bound"] = s.composite_within_bound;
    lengths.push_back(std::move(j));
  }
  doc["lengths"] = std::move(lengths);
  doc["fit"] = report.fit ? fit_json(*report.fit) : Json(nullptr);
  Json g;
  g["classification"] = to_string(report.genericity.classification);
  g["rho"] = report.genericity.rho;
  g["c"] = report.genericity.c;
  g["relative_residual"] = report.genericity.relative_residual;
  g["points_used"] = report.genericity.points_used;
  doc["genericity"] = std::move(g);
  return doc.dump(2) + "\n";
}

std::string trials_csv(const BenchReport& report, bool with_wall_time) {
  std::ostringstream out;
  out << "n,instance_id,solver,success,steps,elapsed_ms\n";
  auto row = [&](const TrialRecord& rec, const char* solver, const TrialOutcome& o) {
    out << rec.n << ',' << rec.instance_id << ',' << solver << ',' << (o.success ? 1 : 0) << ',' << o.steps << ',';
    if (with_wall_time) out << o.elapsed_ms;
    out << '\n';
  };
  for (const auto& rec : report.trials) {
    row(rec, "H", rec.heuristic);
    if (rec.deterministic) row(rec, "D", *rec.deterministic);
    row(rec, "HD", rec.composite);
  }
  return out.str();
}

}  // namespace gbc
