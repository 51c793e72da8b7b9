#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>

#include "doctest.h"
#include "gbcrypt/bench.hpp"
#include "gbcrypt/errors.hpp"
#include "gbcrypt/random.hpp"
#include "json.hpp"
#include "oracles.hpp"

using gbc::PlatformDescriptor;

namespace {

oracle::Signed to_signed(const gbc::Word& w) {
  oracle::Signed out;
  for (const auto& l : w.letters()) out.push_back(l.sign * l.generator);
  return out;
}

}  // namespace

TEST_CASE("expected time formula") {
  CHECK(gbc::expected_time(2, 200, 95) == doctest::Approx(11.9).epsilon(1e-15));
  CHECK(gbc::expected_time(7, 300, 100) == 7.0);
  CHECK(gbc::expected_time(7, 300, 0) == 300.0);
  CHECK_THROWS_AS(gbc::expected_time(1, 1, 100.5), std::invalid_argument);
  CHECK_THROWS_AS(gbc::expected_time(1, 1, -1), std::invalid_argument);
  CHECK_THROWS_AS(gbc::expected_time(-1, 1, 50), std::invalid_argument);
}

TEST_CASE("sampler produces promised instances of the requested length") {
  gbc::SamplerConfig s;
  s.platform = PlatformDescriptor::braid(5);
  s.lengths = {0, 3};
  s.pairs_per_instance = 3;
  const auto zero = gbc::sample_instance(s, 0, 0);
  CHECK(zero.hidden.empty());
  for (const auto& [a, b] : zero.instance.pairs) CHECK(b == gbc::normal_form(s.platform, a));

  for (std::size_t id = 0; id < 100; ++id) {
    const auto x = gbc::sample_instance(s, 3, id);
    CHECK(x.hidden.size() == 3);
    CHECK(x.instance.promised);
    CHECK(x.instance.instance_length == 3);
    CHECK(x.instance.pairs.size() == 3);
    CHECK(gbc::verify_witness(x.instance, x.hidden));
  }
  CHECK(gbc::sample_instance(s, 3, 5).instance.pairs == gbc::sample_instance(s, 3, 5).instance.pairs);
}

TEST_CASE("hidden conjugators are reduced and of exact length") {
  gbc::SamplerConfig s;
  s.platform = PlatformDescriptor::free_group(3);
  s.lengths = {6};
  s.pairs_per_instance = 1;
  s.base_word_length = 1;
  for (std::size_t id = 0; id < 10000; ++id) {
    const auto x = gbc::sample_instance(s, 6, id).hidden;
    REQUIRE(oracle::naive_reduce(to_signed(x)).size() == 6);
  }
}

TEST_CASE("length-3 conjugators are uniform") {
  // Rank 2: 4 * 3 * 3 = 36 reduced words, each with probability 1/36.
  gbc::SamplerConfig s;
  s.platform = PlatformDescriptor::free_group(2);
  s.lengths = {3};
  s.pairs_per_instance = 1;
  s.base_word_length = 1;
  s.seed = 99;
  std::map<oracle::Signed, std::size_t> counts;
  const std::size_t draws = 100000;
  for (std::size_t id = 0; id < draws; ++id) ++counts[to_signed(gbc::sample_instance(s, 3, id).hidden)];
  REQUIRE(counts.size() == 36);
  const double expected = static_cast<double>(draws) / 36.0;
  double chi2 = 0.0;
  for (const auto& [w, c] : counts) chi2 += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  const boost::math::chi_squared dist(35);
  CHECK(chi2 < boost::math::quantile(boost::math::complement(dist, 1e-3)));

  // Two fixed words differ by less than 5 sigma.
  const double p = 1.0 / (4.0 * 3.0 * 3.0);
  const double c1 = static_cast<double>(counts[{1, 2, 1}]), c2 = static_cast<double>(counts[{-2, -1, -1}]);
  const double sigma = std::sqrt(2.0 * draws * p * (1 - p));
  CHECK(std::abs(c1 - c2) < 5 * sigma);
}

TEST_CASE("polynomial fit") {
  std::vector<std::pair<double, double>> sq;
  for (int n = 1; n <= 8; ++n) sq.emplace_back(n, n * n);
  const auto f = gbc::fit_polynomial(sq, 2);
  REQUIRE(f.coefficients.size() == 3);
  CHECK(f.coefficients[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(f.coefficients[1]) < 1e-9);
  CHECK(f.coefficients[2] == doctest::Approx(1.0));
  CHECK(f.residual_norm < 1e-9);
  CHECK(f.small_degree_fits);

  const auto c = gbc::fit_polynomial({{1, 5}, {2, 5}, {3, 5}}, 0);
  CHECK(c.coefficients[0] == doctest::Approx(5.0));
  CHECK(c.residual_norm < 1e-12);

  CHECK_THROWS_AS(gbc::fit_polynomial({{1, 1}, {1, 2}}, 1), std::invalid_argument);
}

TEST_CASE("noisy quadratic fit matches the normal equations") {
  auto rng = gbc::make_rng({41});
  std::normal_distribution<double> noise(0.0, 3.0);
  std::vector<std::pair<double, double>> pts;
  for (int n = 1; n <= 20; ++n) pts.emplace_back(n, 2.0 + 0.5 * n + 1.5 * n * n + noise(rng));
  const auto f = gbc::fit_polynomial(pts, 2);
  const auto ref = oracle::normal_equations_fit(pts, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    const double r = static_cast<double>(ref[i]);
    CHECK(std::abs(f.coefficients[i] - r) <= 1e-9 * std::max(1.0, std::abs(r)));
  }
  // Refitting the fitted curve leaves nothing over.
  std::vector<std::pair<double, double>> again;
  for (const auto& [x, y] : pts) again.emplace_back(x, f.coefficients[0] + f.coefficients[1] * x + f.coefficients[2] * x * x);
  CHECK(gbc::fit_polynomial(again, 2).residual_norm < 1e-9);
}

TEST_CASE("exponential growth is not a small polynomial") {
  std::vector<std::pair<double, double>> pts;
  for (int n = 1; n <= 16; ++n) pts.emplace_back(n, std::pow(2.0, n));
  CHECK_FALSE(gbc::fit_polynomial(pts, 2).small_degree_fits);
}

TEST_CASE("genericity classification") {
  std::vector<std::pair<double, double>> exp2, inv, zero, flat;
  for (int n = 1; n <= 12; ++n) {
    exp2.emplace_back(n, std::pow(2.0, -n));
    inv.emplace_back(n, 1.0 / n);
    zero.emplace_back(n, 0.0);
    flat.emplace_back(n, 0.5);
  }
  const auto e = gbc::genericity_estimate(exp2);
  CHECK(e.classification == gbc::Genericity::strongly_generic);
  CHECK(e.rho == doctest::Approx(0.5));
  const auto i = gbc::genericity_estimate(inv);
  CHECK(i.classification == gbc::Genericity::generic_only);
  const auto z = gbc::genericity_estimate(zero);
  CHECK(z.classification == gbc::Genericity::strongly_generic);
  CHECK(z.rho == 0.0);
  CHECK(gbc::genericity_estimate(flat).classification == gbc::Genericity::non_generic);
  CHECK_THROWS_AS(gbc::genericity_estimate({{1, 1.5}}), std::invalid_argument);
}

TEST_CASE("multi-round model") {
  CHECK(gbc::multi_round_success(0.9, 50) == std::pow(0.9, 50));
  CHECK(gbc::multi_round_success(1.0, 17) == 1.0);
  CHECK(gbc::multi_round_success(0.5, 2) == 0.25);
  CHECK_THROWS_AS(gbc::multi_round_success(1.2, 2), std::invalid_argument);
  const auto m = gbc::monte_carlo_check(0.9, 5, 100000, 3);
  CHECK(m.agrees);
  CHECK(gbc::monte_carlo_check(1.0, 3, 100, 3).agrees);
}

TEST_CASE("stubbed campaign passes the formula through") {
  gbc::CampaignConfig cfg;
  cfg.sampler.platform = PlatformDescriptor::free_group(2);
  cfg.sampler.lengths = {1, 2, 3};
  cfg.sampler.trials_per_length = 10;

  // H fails on exactly one of every ten trials: route by call order is not
  // deterministic across workers, so key on the sampled instance instead.
  std::map<std::pair<std::size_t, std::size_t>, bool> failing;
  for (std::size_t n : cfg.sampler.lengths) failing[{n, 0}] = true;
  std::map<std::vector<oracle::Signed>, bool> fail_set;
  for (const auto& [key, f] : failing) {
    std::vector<oracle::Signed> sig;
    for (const auto& [a, b] : gbc::sample_instance(cfg.sampler, key.first, key.second).instance.pairs) {
      sig.push_back(to_signed(a));
      sig.push_back(to_signed(b));
    }
    fail_set[sig] = f;
  }
  auto is_failing = [fail_set](const gbc::ConjugacyInstance& inst) {
    std::vector<oracle::Signed> sig;
    for (const auto& [a, b] : inst.pairs) {
      sig.push_back(to_signed(a));
      sig.push_back(to_signed(b));
    }
    return fail_set.count(sig) > 0;
  };
  gbc::SolverSuite suite;
  suite.heuristic = [=](const gbc::ConjugacyInstance& inst) { return gbc::TrialOutcome{!is_failing(inst), 1, 0.0}; };
  suite.deterministic = [](const gbc::ConjugacyInstance&) { return gbc::TrialOutcome{true, 100, 0.0}; };
  suite.composite = [](const gbc::ConjugacyInstance&) { return gbc::TrialOutcome{true, 5, 0.0}; };

  for (std::size_t workers : {1, 3}) {
    cfg.workers = workers;
    const auto report = gbc::run_experiment(cfg, suite);
    REQUIRE(report.lengths.size() == 3);
    for (const auto& s : report.lengths) {
      CHECK(s.b == 90.0);
      CHECK(s.h == 1.0);
      CHECK(s.d == 100.0);
      CHECK(s.e == doctest::Approx(10.9).epsilon(1e-15));
      CHECK(s.e == gbc::expected_time(s.h, s.d, s.b));
    }
  }

  // No heuristic failures: d recorded as 0 and flagged.
  gbc::SolverSuite always = suite;
  always.heuristic = [](const gbc::ConjugacyInstance&) { return gbc::TrialOutcome{true, 2, 0.0}; };
  const auto report = gbc::run_experiment(cfg, always);
  CHECK(report.lengths[0].d == 0.0);
  CHECK_FALSE(report.lengths[0].d_observed);
  CHECK(report.lengths[0].e == 2.0);
}

TEST_CASE("real campaign is reproducible and self-consistent") {
  const auto cfg_text = R"({"platform":"braid:4","lengths":[1,2,3],"trials":8,"pairs_per_instance":2,
    "base_word_length":6,"seed":12,"budgets":{"max_depth":4,"max_steps":20000},"workers":1})";
  auto cfg = gbc::campaign_from_json(cfg_text);
  const auto one = gbc::run_experiment(cfg);
  cfg.workers = 4;
  const auto four = gbc::run_experiment(cfg);
  CHECK(gbc::to_json(one) == gbc::to_json(four));
  CHECK(gbc::trials_csv(one, false) == gbc::trials_csv(four, false));
  cfg.threaded_race = true;
  CHECK(gbc::to_json(gbc::run_experiment(cfg)) == gbc::to_json(one));

  const auto doc = nlohmann::json::parse(gbc::to_json(one));
  for (const auto& s : doc["lengths"]) {
    const double e = s["e"].get<double>();
    CHECK(e == gbc::expected_time(s["h"].get<double>(), s["d"].get<double>(), s["b"].get<double>()));
    CHECK(s["composite_within_bound"].get<bool>());
    CHECK(s["composite_mean"].get<double>() <= 2.0 * e + 1.0);
  }
  CHECK(gbc::trials_csv(one, false).rfind("n,instance_id,solver,success,steps,elapsed_ms\n", 0) == 0);
}

TEST_CASE("campaign config errors") {
  CHECK_THROWS_AS(gbc::campaign_from_json("[]"), gbc::ParseError);
  CHECK_THROWS_AS(gbc::campaign_from_json(R"({"platform":"braid:4"})"), gbc::ParseError);
  CHECK_THROWS_AS(gbc::campaign_from_json(R"({"platform":"braid:4","lengths":[]})"), gbc::ParseError);
  CHECK_THROWS_AS(gbc::campaign_from_json(R"({"platform":"knot:4","lengths":[1]})"), gbc::ParseError);
  CHECK_THROWS_AS(gbc::campaign_from_json(R"({"platform":"braid:4","lengths":[1],"budgets":{"beam_width":0}})"),
                  gbc::ParseError);
}
