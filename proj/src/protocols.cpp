#include "gbcrypt/protocols.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <stdexcept>

#include "gbcrypt/errors.hpp"
#include "gbcrypt/random.hpp"
#include "json.hpp"

namespace gbc {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kPublicStream = 0;
constexpr std::uint64_t kAliceStream = 1;
constexpr std::uint64_t kBobStream = 2;

Key sha256(std::string_view bytes) {
  Key out{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return out;
}

void append_frame(std::string& out, std::string_view payload) {
  const auto n = static_cast<std::uint32_t>(payload.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(payload);
}

void check_pool(const PlatformDescriptor& p, const std::vector<int>& pool) {
  for (int g : pool) {
    if (g < 1 || g > p.alphabet_size()) {
      throw std::invalid_argument("generator " + std::to_string(g) + " outside platform " + p.to_string());
    }
  }
}

void check_over(const PlatformDescriptor& p, const Word& w, const char* what) {
  if (w.alphabet_size() != p.alphabet_size()) {
    throw std::invalid_argument(std::string(what) + " is not over the alphabet of " + p.to_string());
  }
}

}  // namespace

std::mt19937_64 party_rng(std::uint64_t seed, std::size_t round, Role role) {
  return make_rng({seed, role == Role::alice ? kAliceStream : kBobStream, round});
}

std::string to_string(Protocol p) { return p == Protocol::kolee ? "kolee" : "aag"; }

Protocol parse_protocol(std::string_view text) {
  if (text == "kolee") return Protocol::kolee;
  if (text == "aag") return Protocol::aag;
  throw ParseError("unknown protocol '" + std::string(text) + "' (expected kolee or aag)");
}

std::string to_hex(const Key& key) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * key.size());
  for (auto b : key) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

std::vector<int> standard_alice_pool(const PlatformDescriptor& p) {
  std::vector<int> pool;
  if (p.kind == PlatformKind::free_group) return pool;
  for (int g = 1; g <= p.rank / 2 - 1; ++g) pool.push_back(g);
  return pool;
}

std::vector<int> standard_bob_pool(const PlatformDescriptor& p) {
  std::vector<int> pool;
  if (p.kind == PlatformKind::free_group) return pool;
  for (int g = p.rank / 2 + 1; g <= p.rank - 1; ++g) pool.push_back(g);
  return pool;
}

KoLeeConfig KoLeeConfig::create(PlatformDescriptor platform, Word base, std::vector<int> alice_generators,
                                std::vector<int> bob_generators, std::size_t secret_length) {
  check_over(platform, base, "Ko-Lee base");
  check_pool(platform, alice_generators);
  check_pool(platform, bob_generators);
  const int r = platform.alphabet_size();
  for (int a : alice_generators) {
    for (int b : bob_generators) {
      if (a == b) throw std::invalid_argument("Ko-Lee pools share generator " + std::to_string(a));
      const Word ab = Word::from_signed(r, {a, b});
      const Word ba = Word::from_signed(r, {b, a});
      if (!equal(platform, ab, ba)) {
        throw std::invalid_argument("Ko-Lee pools do not commute: g" + std::to_string(a) + " and g" +
                                    std::to_string(b));
      }
    }
  }
  return KoLeeConfig{platform, std::move(base), std::move(alice_generators), std::move(bob_generators),
                     secret_length};
}

KoLeeConfig KoLeeConfig::standard(PlatformDescriptor platform, Word base, std::size_t secret_length) {
  return create(platform, std::move(base), standard_alice_pool(platform), standard_bob_pool(platform),
                secret_length);
}

AAGConfig AAGConfig::create(PlatformDescriptor platform, std::vector<Word> alice_public,
                            std::vector<Word> bob_public, std::size_t secret_length) {
  if (alice_public.empty() || bob_public.empty()) {
    throw std::invalid_argument("AAG needs at least one public word per side");
  }
  for (const auto& w : alice_public) check_over(platform, w, "AAG public word");
  for (const auto& w : bob_public) check_over(platform, w, "AAG public word");
  return AAGConfig{platform, std::move(alice_public), std::move(bob_public), secret_length};
}

KoLeeCommitment kolee_commit(const KoLeeConfig& cfg, Role role, std::mt19937_64& rng) {
  const auto& pool = role == Role::alice ? cfg.alice_generators : cfg.bob_generators;
  if (pool.empty()) {
    throw std::invalid_argument(std::string("Ko-Lee: empty generator set for ") +
                                (role == Role::alice ? "Alice" : "Bob"));
  }
  Word secret = random_reduced_word(rng, cfg.platform.alphabet_size(), cfg.secret_length, pool);
  Word token = normal_form(cfg.platform, conjugate(cfg.base, secret));
  return {std::move(secret), std::move(token)};
}

Word kolee_shared(const KoLeeConfig& cfg, const Word& secret, const Word& peer_token) {
  return normal_form(cfg.platform, conjugate(peer_token, secret));
}

AAGCommitment aag_commit(const AAGConfig& cfg, Role role, std::mt19937_64& rng) {
  const auto& own = role == Role::alice ? cfg.alice_public : cfg.bob_public;
  const auto& peer = role == Role::alice ? cfg.bob_public : cfg.alice_public;
  Word pattern = random_reduced_word(rng, static_cast<int>(peer.size()), cfg.secret_length);
  Word secret = substitute(pattern, peer);
  std::vector<Word> tokens;
  tokens.reserve(own.size());
  for (const auto& w : own) tokens.push_back(normal_form(cfg.platform, conjugate(w, secret)));
  return {std::move(pattern), std::move(secret), std::move(tokens)};
}

Word aag_shared(const AAGConfig& cfg, Role role, const Word& secret_template, const Word& own_secret,
                const std::vector<Word>& peer_tokens) {
  if (static_cast<std::size_t>(secret_template.alphabet_size()) != peer_tokens.size()) {
    throw std::invalid_argument("AAG: expected " + std::to_string(secret_template.alphabet_size()) +
                                " peer tokens, got " + std::to_string(peer_tokens.size()));
  }
  const Word conjugated = substitute(secret_template, peer_tokens);
  if (role == Role::alice) {
    return normal_form(cfg.platform, invert(conjugated * invert(own_secret)));
  }
  return normal_form(cfg.platform, conjugated * invert(own_secret));
}

std::string canonical_bytes(const PlatformDescriptor& p, const Word& w) {
  return p.to_string() + "\n" + format_word(normal_form(p, w));
}

Key derive_key(const PlatformDescriptor& p, const Word& shared) { return sha256(canonical_bytes(p, shared)); }

Key combine_round_keys(const PlatformDescriptor& p, const std::vector<Word>& shared) {
  std::string bytes;
  for (const auto& w : shared) append_frame(bytes, canonical_bytes(p, w));
  return sha256(bytes);
}

Transcript make_transcript(const KoLeeConfig& cfg, const Word& alice_token, const Word& bob_token) {
  return Transcript{Protocol::kolee, cfg.platform, {cfg.base}, {alice_token}, {bob_token}};
}

Transcript make_transcript(const AAGConfig& cfg, const std::vector<Word>& alice_tokens,
                           const std::vector<Word>& bob_tokens) {
  std::vector<Word> published = cfg.alice_public;
  published.insert(published.end(), cfg.bob_public.begin(), cfg.bob_public.end());
  return Transcript{Protocol::aag, cfg.platform, std::move(published), alice_tokens, bob_tokens};
}

std::string to_json(const Transcript& t) {
  auto words = [](const std::vector<Word>& ws) {
    ordered_json arr = ordered_json::array();
    for (const auto& w : ws) arr.push_back(format_word(w));
    return arr;
  };
  ordered_json doc;
  doc["protocol"] = to_string(t.protocol);
  doc["platform"] = t.platform.to_string();
  doc["published"] = words(t.published);
  doc["alice_tokens"] = words(t.alice_tokens);
  doc["bob_tokens"] = words(t.bob_tokens);
  return doc.dump(2) + "\n";
}

Transcript transcript_from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("transcript is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("transcript must be a JSON object");
  auto field = [&](const char* name) -> const ordered_json& {
    if (!doc.contains(name)) throw ParseError(std::string("transcript lacks field '") + name + "'");
    return doc.at(name);
  };
  auto text_field = [&](const char* name) {
    const auto& v = field(name);
    if (!v.is_string()) throw ParseError(std::string("transcript field '") + name + "' must be a string");
    return v.get<std::string>();
  };

  Transcript t;
  t.protocol = parse_protocol(text_field("protocol"));
  t.platform = PlatformDescriptor::parse(text_field("platform"));
  auto words = [&](const char* name) {
    const auto& v = field(name);
    if (!v.is_array()) throw ParseError(std::string("transcript field '") + name + "' must be an array");
    std::vector<Word> out;
    for (const auto& item : v) {
      if (!item.is_string()) throw ParseError(std::string("non-string word in '") + name + "'");
      out.push_back(parse_word(item.get<std::string>(), t.platform.alphabet_size()));
    }
    return out;
  };
  t.published = words("published");
  t.alice_tokens = words("alice_tokens");
  t.bob_tokens = words("bob_tokens");

  if (t.protocol == Protocol::kolee) {
    if (t.published.size() != 1 || t.alice_tokens.size() != 1 || t.bob_tokens.size() != 1) {
      throw ParseError("Ko-Lee transcript needs exactly one published word and one token per side");
    }
  } else {
    if (t.alice_tokens.empty() || t.bob_tokens.empty() ||
        t.published.size() != t.alice_tokens.size() + t.bob_tokens.size()) {
      throw ParseError("AAG transcript needs k + m published words matching the token counts");
    }
  }
  return t;
}

MultiRoundResult multi_round(const KoLeeConfig& cfg, std::size_t rounds, std::uint64_t seed) {
  if (rounds == 0) throw std::invalid_argument("multi_round needs at least one round");
  MultiRoundResult result;
  std::vector<Word> alice_shared, bob_shared;
  for (std::size_t r = 0; r < rounds; ++r) {
    auto alice_rng = party_rng(seed, r, Role::alice);
    auto bob_rng = party_rng(seed, r, Role::bob);
    const auto alice = kolee_commit(cfg, Role::alice, alice_rng);
    const auto bob = kolee_commit(cfg, Role::bob, bob_rng);
    RoundRecord rec{make_transcript(cfg, alice.token, bob.token), kolee_shared(cfg, alice.secret, bob.token),
                    kolee_shared(cfg, bob.secret, alice.token)};
    alice_shared.push_back(rec.alice_shared);
    bob_shared.push_back(rec.bob_shared);
    result.rounds.push_back(std::move(rec));
  }
  result.alice_key = combine_round_keys(cfg.platform, alice_shared);
  result.bob_key = combine_round_keys(cfg.platform, bob_shared);
  return result;
}

MultiRoundResult multi_round(const AAGConfig& cfg, std::size_t rounds, std::uint64_t seed) {
  if (rounds == 0) throw std::invalid_argument("multi_round needs at least one round");
  MultiRoundResult result;
  std::vector<Word> alice_shared, bob_shared;
  for (std::size_t r = 0; r < rounds; ++r) {
    auto alice_rng = party_rng(seed, r, Role::alice);
    auto bob_rng = party_rng(seed, r, Role::bob);
    const auto alice = aag_commit(cfg, Role::alice, alice_rng);
    const auto bob = aag_commit(cfg, Role::bob, bob_rng);
    RoundRecord rec{make_transcript(cfg, alice.tokens, bob.tokens),
                    aag_shared(cfg, Role::alice, alice.secret_template, alice.secret, bob.tokens),
                    aag_shared(cfg, Role::bob, bob.secret_template, bob.secret, alice.tokens)};
    alice_shared.push_back(rec.alice_shared);
    bob_shared.push_back(rec.bob_shared);
    result.rounds.push_back(std::move(rec));
  }
  result.alice_key = combine_round_keys(cfg.platform, alice_shared);
  result.bob_key = combine_round_keys(cfg.platform, bob_shared);
  return result;
}

KoLeeConfig make_kolee_config(const PlatformDescriptor& p, const PublicParameters& params,
                              std::uint64_t seed) {
  auto rng = make_rng({seed, kPublicStream, 0});
  Word base = random_reduced_word(rng, p.alphabet_size(), params.public_length);
  return KoLeeConfig::standard(p, std::move(base), params.secret_length);
}

AAGConfig make_aag_config(const PlatformDescriptor& p, const PublicParameters& params, std::uint64_t seed) {
  auto rng = make_rng({seed, kPublicStream, 0});
  std::vector<Word> alice_public, bob_public;
  for (std::size_t i = 0; i < params.alice_count; ++i) {
    alice_public.push_back(random_reduced_word(rng, p.alphabet_size(), params.public_length));
  }
  for (std::size_t i = 0; i < params.bob_count; ++i) {
    bob_public.push_back(random_reduced_word(rng, p.alphabet_size(), params.public_length));
  }
  return AAGConfig::create(p, std::move(alice_public), std::move(bob_public), params.secret_length);
}

}  // namespace gbc
