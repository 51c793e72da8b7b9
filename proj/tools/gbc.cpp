// gbc: command-line front end for the key exchanges, attacks and benches.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gbcrypt/attacks.hpp"
#include "gbcrypt/bench.hpp"
#include "gbcrypt/errors.hpp"
#include "gbcrypt/exchange.hpp"
#include "gbcrypt/platform.hpp"
#include "gbcrypt/protocols.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kProtocol = 3,
  kBudget = 4,
  kConnection = 5,
  kFrame = 6,
};

struct Common {
  std::string platform = "braid:4";
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool platform_given = false;
};

struct ParamFlags {
  std::string protocol = "kolee";
  gbc::PublicParameters params;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--platform", c.platform, "free:r, sym:n or braid:n")->capture_default_str();
  cmd->add_option("--seed", c.seed, "seed for every random choice")->capture_default_str();
}

void add_params(CLI::App* cmd, ParamFlags& p) {
  cmd->add_option("--protocol", p.protocol, "kolee or aag")->check(CLI::IsMember({"kolee", "aag"}))->capture_default_str();
  cmd->add_option("--public-length", p.params.public_length, "letters per published word")->capture_default_str();
  cmd->add_option("--k", p.params.alice_count, "AAG: Alice's public words")->capture_default_str();
  cmd->add_option("--m", p.params.bob_count, "AAG: Bob's public words")->capture_default_str();
  cmd->add_option("--secret-length", p.params.secret_length, "letters per private word")->capture_default_str();
}

void add_solver(CLI::App* cmd, gbc::SolverConfig& s) {
  cmd->add_option("--max-depth", s.max_depth)->capture_default_str();
  cmd->add_option("--max-steps", s.max_steps)->capture_default_str();
  cmd->add_option("--beam-width", s.beam_width)->capture_default_str();
  cmd->add_option("--restarts", s.restarts)->capture_default_str();
  cmd->add_option("--interleave-ratio", s.interleave_ratio)->capture_default_str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gbc::ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw gbc::Error("cannot write '" + path.string() + "'");
}

gbc::ExchangeSpec make_spec(const Common& c, const ParamFlags& p) {
  return {gbc::parse_protocol(p.protocol), gbc::PlatformDescriptor::parse(c.platform), p.params, c.seed};
}

Json word_list(const std::vector<gbc::Word>& words) {
  Json arr = Json::array();
  for (const auto& w : words) arr.push_back(gbc::format_word(w));
  return arr;
}

int fail(const std::string& kind, const std::string& message, int code) {
  Json err;
  err["error"] = kind;
  err["message"] = message;
  err["exit_code"] = code;
  std::cerr << err.dump() << "\n";
  return code;
}

std::pair<std::string, std::uint16_t> split_host_port(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw gbc::ParseError("expected HOST:PORT, got '" + text + "'");
  const int port = std::stoi(text.substr(colon + 1));
  if (port <= 0 || port > 65535) throw gbc::ParseError("port out of range in '" + text + "'");
  return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

int cmd_nf(const Common& c, const std::string& word) {
  const auto p = gbc::PlatformDescriptor::parse(c.platform);
  std::cout << gbc::format_word(gbc::normal_form(p, gbc::parse_word(word, p.alphabet_size()))) << "\n";
  return kOk;
}

int cmd_keygen(const Common& c, const ParamFlags& f, const std::string& role_text, const std::string& secret_out) {
  const auto spec = make_spec(c, f);
  const auto role = role_text == "alice" ? gbc::Role::alice : gbc::Role::bob;
  auto rng = gbc::party_rng(spec.seed, 0, role);
  Json out;
  out["protocol"] = gbc::to_string(spec.protocol);
  out["platform"] = spec.platform.to_string();
  out["role"] = role_text;
  std::string secret;
  if (spec.protocol == gbc::Protocol::kolee) {
    const auto cfg = gbc::make_kolee_config(spec.platform, spec.params, spec.seed);
    const auto commit = gbc::kolee_commit(cfg, role, rng);
    out["published"] = word_list({cfg.base});
    out["tokens"] = word_list({commit.token});
    secret = gbc::format_word(commit.secret);
  } else {
    const auto cfg = gbc::make_aag_config(spec.platform, spec.params, spec.seed);
    const auto commit = gbc::aag_commit(cfg, role, rng);
    std::vector<gbc::Word> published = cfg.alice_public;
    published.insert(published.end(), cfg.bob_public.begin(), cfg.bob_public.end());
    out["published"] = word_list(published);
    out["tokens"] = word_list(commit.tokens);
    secret = gbc::format_word(commit.secret);
  }
  if (!secret_out.empty()) write_file(secret_out, secret + "\n");
  std::cout << out.dump(2) << "\n";
  return kOk;
}

struct ExchangeFlags {
  std::string transport = "inproc";
  std::string out_dir = ".";
  std::string tap;
  std::string role;
  std::uint16_t listen = 0;
  std::string connect;
};

int cmd_exchange(const Common& c, const ParamFlags& f, const ExchangeFlags& x) {
  const auto spec = make_spec(c, f);
  const fs::path dir(x.out_dir);

  if (!x.role.empty()) {
    if (x.transport != "tcp") throw gbc::ParseError("--role needs --transport tcp");
    const auto role = x.role == "alice" ? gbc::Role::alice : gbc::Role::bob;
    std::unique_ptr<gbc::Channel> ch;
    std::optional<gbc::TcpListener> listener;
    if (role == gbc::Role::bob) {
      if (x.listen == 0) throw gbc::ParseError("bob needs --listen PORT");
      listener.emplace(x.listen, "0.0.0.0");
      ch = listener->accept();
    } else {
      if (x.connect.empty()) throw gbc::ParseError("alice needs --connect HOST:PORT");
      const auto [host, port] = split_host_port(x.connect);
      ch = gbc::tcp_connect(host, port);
    }
    gbc::TapChannel tap(*ch);
    const auto result = gbc::run_party(tap, spec, role);
    write_file(dir / "transcript.json", gbc::to_json(result.transcript));
    write_file(dir / (x.role + ".key"), gbc::to_hex(result.key) + "\n");
    if (!x.tap.empty()) write_file(x.tap, gbc::to_json(gbc::transcript_from_frames(spec, tap.frames())));
    return kOk;
  }

  const auto result = x.transport == "tcp" ? gbc::exchange_tcp_loopback(spec) : gbc::exchange_inproc(spec);
  write_file(dir / "transcript.json", gbc::to_json(result.transcript));
  write_file(dir / "alice.key", gbc::to_hex(result.alice_key) + "\n");
  write_file(dir / "bob.key", gbc::to_hex(result.bob_key) + "\n");
  if (!x.tap.empty()) write_file(x.tap, gbc::to_json(result.tapped));
  Json out;
  out["transcript"] = (dir / "transcript.json").string();
  out["keys_match"] = result.alice_key == result.bob_key;
  std::cout << out.dump() << "\n";
  return result.alice_key == result.bob_key ? kOk : kProtocol;
}

int cmd_attack(const Common& c, gbc::SolverConfig solver, const std::string& transcript_path,
               const std::string& solver_name, const std::string& key_out) {
  const auto t = gbc::transcript_from_json(read_file(transcript_path));
  if (c.platform_given && gbc::PlatformDescriptor::parse(c.platform) != t.platform) {
    throw gbc::ProtocolError("transcript platform " + t.platform.to_string() + " differs from --platform");
  }
  solver.seed = c.seed;
  const auto result = gbc::attack_transcript(t, gbc::parse_solver_kind(solver_name), solver);
  Json out = Json::parse(gbc::to_json(result.outcome));
  out["key_status"] = gbc::to_string(result.status);
  out["used_fallback"] = result.used_fallback;
  if (result.recovered_key) {
    out["recovered_key"] = gbc::to_hex(*result.recovered_key);
    if (!key_out.empty()) write_file(key_out, gbc::to_hex(*result.recovered_key) + "\n");
  }
  std::cout << out.dump() << "\n";
  if (!result.outcome.witness) return kBudget;
  return kOk;
}

int cmd_bench(const Common& c, const std::string& config_path, const std::string& out_dir,
              std::optional<std::size_t> workers) {
  auto cfg = gbc::campaign_from_json(read_file(config_path));
  if (c.seed_given) cfg.sampler.seed = cfg.solver.seed = c.seed;
  if (c.platform_given) cfg.sampler.platform = gbc::PlatformDescriptor::parse(c.platform);
  if (workers) cfg.workers = *workers;
  const auto report = gbc::run_experiment(cfg);
  const fs::path dir(out_dir);
  write_file(dir / "report.json", gbc::to_json(report));
  write_file(dir / "trials.csv", gbc::trials_csv(report, cfg.record_wall_time));
  std::cout << gbc::to_json(report);
  return kOk;
}

int cmd_multiround(const Common& c, const ParamFlags& f, std::size_t rounds, double per_round_break) {
  const auto spec = make_spec(c, f);
  const auto result = spec.protocol == gbc::Protocol::kolee
                          ? gbc::multi_round(gbc::make_kolee_config(spec.platform, spec.params, spec.seed), rounds,
                                             spec.seed)
                          : gbc::multi_round(gbc::make_aag_config(spec.platform, spec.params, spec.seed), rounds,
                                             spec.seed);
  Json out;
  out["protocol"] = gbc::to_string(spec.protocol);
  out["platform"] = spec.platform.to_string();
  out["rounds"] = rounds;
  out["alice_key"] = gbc::to_hex(result.alice_key);
  out["bob_key"] = gbc::to_hex(result.bob_key);
  out["keys_match"] = result.alice_key == result.bob_key;
  out["per_round_break"] = per_round_break;
  out["all_rounds_break"] = gbc::multi_round_success(per_round_break, rounds);
  std::cout << out.dump(2) << "\n";
  return result.alice_key == result.bob_key ? kOk : kProtocol;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-based key exchange toolkit"};
  app.require_subcommand(1);

  Common common;
  ParamFlags params;

  auto* nf = app.add_subcommand("nf", "print the normal form of a word");
  std::string word;
  add_common(nf, common);
  nf->add_option("word", word, "word such as \"g1 g2^-1\"")->required();

  auto* keygen = app.add_subcommand("keygen", "public parameters and one party's token");
  std::string role = "alice", secret_out;
  add_common(keygen, common);
  add_params(keygen, params);
  keygen->add_option("--role", role)->check(CLI::IsMember({"alice", "bob"}))->capture_default_str();
  keygen->add_option("--secret-out", secret_out, "write the private word here");

  auto* exchange = app.add_subcommand("exchange", "run a full exchange");
  ExchangeFlags xflags;
  add_common(exchange, common);
  add_params(exchange, params);
  exchange->add_option("--transport", xflags.transport)->check(CLI::IsMember({"inproc", "tcp"}))->capture_default_str();
  exchange->add_option("--out-dir", xflags.out_dir)->capture_default_str();
  exchange->add_option("--tap", xflags.tap, "write the eavesdropper's view here");
  exchange->add_option("--role", xflags.role, "run one party only")->check(CLI::IsMember({"alice", "bob"}));
  exchange->add_option("--listen", xflags.listen, "bob: port to listen on");
  exchange->add_option("--connect", xflags.connect, "alice: HOST:PORT");

  auto* attack = app.add_subcommand("attack", "recover a key from a transcript");
  std::string transcript_path, solver_name = "composite", key_out;
  gbc::SolverConfig solver;
  add_common(attack, common);
  add_solver(attack, solver);
  attack->add_option("--transcript", transcript_path)->required();
  attack->add_option("--solver", solver_name)->check(CLI::IsMember({"bf", "lba", "composite"}))->capture_default_str();
  attack->add_option("--key-out", key_out, "write the recovered key here");

  auto* bench = app.add_subcommand("bench", "run a benchmark campaign");
  std::string config_path, bench_out = ".";
  std::optional<std::size_t> workers;
  add_common(bench, common);
  bench->add_option("--config", config_path)->required();
  bench->add_option("--out-dir", bench_out)->capture_default_str();
  bench->add_option("--workers", workers);

  auto* multi = app.add_subcommand("demo-multiround", "repeat the exchange and combine the keys");
  std::size_t rounds = 5;
  double per_round_break = 0.9;
  add_common(multi, common);
  add_params(multi, params);
  multi->add_option("--rounds", rounds)->check(CLI::PositiveNumber)->capture_default_str();
  multi->add_option("--per-round-break", per_round_break, "attack success per round")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    return fail("usage", e.what(), kUsage);
  }

  for (auto* sub : app.get_subcommands()) {
    common.seed_given = sub->count("--seed") > 0;
    common.platform_given = sub->count("--platform") > 0;
  }

  try {
    if (*nf) return cmd_nf(common, word);
    if (*keygen) return cmd_keygen(common, params, role, secret_out);
    if (*exchange) return cmd_exchange(common, params, xflags);
    if (*attack) return cmd_attack(common, solver, transcript_path, solver_name, key_out);
    if (*bench) return cmd_bench(common, config_path, bench_out, workers);
    if (*multi) return cmd_multiround(common, params, rounds, per_round_break);
  } catch (const gbc::ParseError& e) {
    return fail("malformed-input", e.what(), kUsage);
  } catch (const gbc::ProtocolError& e) {
    return fail("protocol", e.what(), kProtocol);
  } catch (const gbc::ConnectionError& e) {
    return fail("connection", e.what(), kConnection);
  } catch (const gbc::FrameError& e) {
    return fail("frame", e.what(), kFrame);
  } catch (const std::invalid_argument& e) {
    return fail("invalid-argument", e.what(), kUsage);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kFailure);
  }
  return kUsage;
}
