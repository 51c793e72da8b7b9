#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gbcrypt/attacks.hpp"
#include "gbcrypt/bench.hpp"
#include "gbcrypt/errors.hpp"
#include "gbcrypt/exchange.hpp"
#include "gbcrypt/platform.hpp"
#include "gbcrypt/protocols.hpp"

namespace py = pybind11;

namespace {

gbc::Word word_on(const gbc::PlatformDescriptor& p, const std::string& text) {
  return gbc::parse_word(text, p.alphabet_size());
}

py::dict exchange(const std::string& protocol, const std::string& platform, std::uint64_t seed,
                  std::size_t public_length, std::size_t k, std::size_t m, std::size_t secret_length,
                  const std::string& transport) {
  gbc::ExchangeSpec spec{gbc::parse_protocol(protocol), gbc::PlatformDescriptor::parse(platform),
                         {public_length, k, m, secret_length}, seed};
  if (transport != "inproc" && transport != "tcp") throw gbc::ParseError("transport must be inproc or tcp");
  gbc::ExchangeResult r;
  {
    py::gil_scoped_release release;
    r = transport == "tcp" ? gbc::exchange_tcp_loopback(spec) : gbc::exchange_inproc(spec);
  }
  py::dict out;
  out["transcript"] = gbc::to_json(r.transcript);
  out["alice_key"] = gbc::to_hex(r.alice_key);
  out["bob_key"] = gbc::to_hex(r.bob_key);
  return out;
}

py::dict attack(const std::string& transcript, const std::string& solver, std::size_t max_depth,
                std::uint64_t max_steps, std::size_t beam_width, std::size_t restarts,
                std::size_t interleave_ratio, std::uint64_t seed) {
  const auto t = gbc::transcript_from_json(transcript);
  const gbc::SolverConfig cfg{max_depth, max_steps, beam_width, restarts, interleave_ratio, seed};
  const auto kind = gbc::parse_solver_kind(solver);
  gbc::TranscriptAttack r;
  {
    py::gil_scoped_release release;
    r = gbc::attack_transcript(t, kind, cfg);
  }
  py::dict out;
  out["solver"] = gbc::to_string(r.outcome.solver);
  out["witness"] = r.outcome.witness ? py::object(py::str(gbc::format_word(*r.outcome.witness))) : py::none();
  out["steps"] = r.outcome.steps;
  out["budget_exhausted"] = r.outcome.budget_exhausted;
  out["key_status"] = gbc::to_string(r.status);
  out["recovered_key"] = r.recovered_key ? py::object(py::str(gbc::to_hex(*r.recovered_key))) : py::none();
  return out;
}

py::tuple bench(const std::string& config, std::optional<std::size_t> workers) {
  auto cfg = gbc::campaign_from_json(config);
  if (workers) cfg.workers = *workers;
  gbc::BenchReport report;
  {
    py::gil_scoped_release release;
    report = gbc::run_experiment(cfg);
  }
  return py::make_tuple(gbc::to_json(report), gbc::trials_csv(report, cfg.record_wall_time));
}

}  // namespace

PYBIND11_MODULE(_gbcrypt, m) {
  m.doc() = "group-based key exchange toolkit";

  py::register_exception<gbc::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<gbc::ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);

  m.def(
      "normal_form",
      [](const std::string& platform, const std::string& word) {
        const auto p = gbc::PlatformDescriptor::parse(platform);
        return gbc::format_word(gbc::normal_form(p, word_on(p, word)));
      },
      py::arg("platform"), py::arg("word"));
  m.def(
      "equal",
      [](const std::string& platform, const std::string& u, const std::string& v) {
        const auto p = gbc::PlatformDescriptor::parse(platform);
        return gbc::equal(p, word_on(p, u), word_on(p, v));
      },
      py::arg("platform"), py::arg("u"), py::arg("v"));
  m.def(
      "word_length",
      [](const std::string& platform, const std::string& word) {
        const auto p = gbc::PlatformDescriptor::parse(platform);
        return gbc::word_length(p, word_on(p, word));
      },
      py::arg("platform"), py::arg("word"));
  m.def(
      "free_reduce",
      [](const std::string& word, int alphabet_size) {
        return gbc::format_word(gbc::free_reduce(gbc::parse_word(word, alphabet_size)));
      },
      py::arg("word"), py::arg("alphabet_size"));
  m.def(
      "conjugate",
      [](const std::string& a, const std::string& x, int alphabet_size) {
        return gbc::format_word(
            gbc::conjugate(gbc::parse_word(a, alphabet_size), gbc::parse_word(x, alphabet_size)));
      },
      py::arg("a"), py::arg("x"), py::arg("alphabet_size"), "x a x^-1, freely reduced");

  m.def("exchange", &exchange, py::arg("protocol"), py::arg("platform"), py::arg("seed") = 0,
        py::arg("public_length") = 8, py::arg("k") = 5, py::arg("m") = 5, py::arg("secret_length") = 20,
        py::arg("transport") = "inproc");
  m.def("attack", &attack, py::arg("transcript"), py::arg("solver") = "composite", py::arg("max_depth") = 8,
        py::arg("max_steps") = 1'000'000, py::arg("beam_width") = 4, py::arg("restarts") = 3,
        py::arg("interleave_ratio") = 1, py::arg("seed") = 0);
  m.def("bench", &bench, py::arg("config"), py::arg("workers") = py::none(),
        "returns (report.json, trials.csv) contents");

  m.def("expected_time", &gbc::expected_time, py::arg("h"), py::arg("d"), py::arg("b"));
  m.def("multi_round_success", &gbc::multi_round_success, py::arg("p"), py::arg("r"));
  m.def(
      "monte_carlo_check",
      [](double p, std::size_t r, std::size_t trials, std::uint64_t seed) {
        const auto c = gbc::monte_carlo_check(p, r, trials, seed);
        py::dict out;
        out["expected"] = c.expected;
        out["estimate"] = c.estimate;
        out["standard_error"] = c.standard_error;
        out["z"] = c.z;
        out["agrees"] = c.agrees;
        return out;
      },
      py::arg("p"), py::arg("r"), py::arg("trials"), py::arg("seed") = 0);
  m.def(
      "fit_polynomial",
      [](const std::vector<std::pair<double, double>>& points, std::size_t degree) {
        const auto f = gbc::fit_polynomial(points, degree);
        py::dict out;
        out["coefficients"] = f.coefficients;
        out["residual_norm"] = f.residual_norm;
        out["relative_residual"] = f.relative_residual;
        out["small_degree_fits"] = f.small_degree_fits;
        return out;
      },
      py::arg("points"), py::arg("degree"));
  m.def(
      "genericity_estimate",
      [](const std::vector<std::pair<double, double>>& rates) {
        const auto g = gbc::genericity_estimate(rates);
        py::dict out;
        out["classification"] = gbc::to_string(g.classification);
        out["rho"] = g.rho;
        out["relative_residual"] = g.relative_residual;
        return out;
      },
      py::arg("failure_rates"));
}
