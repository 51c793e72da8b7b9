#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gbcrypt/platform.hpp"
#include "gbcrypt/words.hpp"

namespace gbc {

enum class Role { alice, bob };
enum class Protocol { kolee, aag };

std::string to_string(Protocol p);
Protocol parse_protocol(std::string_view text);

using Key = std::array<std::uint8_t, 32>;
std::string to_hex(const Key& key);

/// Ko-Lee exchange over a published base a. Alice's and Bob's secrets are
/// words in two generator pools that commute elementwise.
struct KoLeeConfig {
  PlatformDescriptor platform;
  Word base;
  std::vector<int> alice_generators;
  std::vector<int> bob_generators;
  std::size_t secret_length = 20;

  /// Validates the pools: in range, disjoint, and every Alice generator
  /// commutes with every Bob generator on the platform. Throws
  /// std::invalid_argument otherwise.
  static KoLeeConfig create(PlatformDescriptor platform, Word base, std::vector<int> alice_generators,
                            std::vector<int> bob_generators, std::size_t secret_length);

  /// Strand split for B_n and S_n: Alice gets 1..floor(n/2)-1 and Bob gets
  /// floor(n/2)+1..n-1.
  static KoLeeConfig standard(PlatformDescriptor platform, Word base, std::size_t secret_length);
};

std::vector<int> standard_alice_pool(const PlatformDescriptor& p);
std::vector<int> standard_bob_pool(const PlatformDescriptor& p);

struct AAGConfig {
  PlatformDescriptor platform;
  std::vector<Word> alice_public;  // a_1..a_k
  std::vector<Word> bob_public;    // b_1..b_m
  std::size_t secret_length = 20;

  static AAGConfig create(PlatformDescriptor platform, std::vector<Word> alice_public,
                          std::vector<Word> bob_public, std::size_t secret_length);
};

/// Everything a passive eavesdropper sees. For AAG, `published` is
/// a_1..a_k followed by b_1..b_m, with k = alice_tokens.size().
struct Transcript {
  Protocol protocol = Protocol::kolee;
  PlatformDescriptor platform;
  std::vector<Word> published;
  std::vector<Word> alice_tokens;
  std::vector<Word> bob_tokens;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

/// {protocol, platform, published[], alice_tokens[], bob_tokens[]}, words in
/// the textual word format.
std::string to_json(const Transcript& t);
/// Throws ParseError on malformed documents.
Transcript transcript_from_json(std::string_view text);

struct KoLeeCommitment {
  Word secret;
  Word token;
};

KoLeeCommitment kolee_commit(const KoLeeConfig& cfg, Role role, std::mt19937_64& rng);
Word kolee_shared(const KoLeeConfig& cfg, const Word& secret, const Word& peer_token);

struct AAGCommitment {
  Word secret_template;  // over the peer's public alphabet
  Word secret;           // template evaluated on the peer's public words
  std::vector<Word> tokens;
};

AAGCommitment aag_commit(const AAGConfig& cfg, Role role, std::mt19937_64& rng);

/// Alice: u = template(b_j^y) = y x y^-1, returns (u x^-1)^-1 = x y x^-1 y^-1.
/// Bob:   v = template(a_i^x) = x y x^-1, returns v y^-1.
/// Throws std::invalid_argument if peer_tokens does not match the template
/// alphabet.
Word aag_shared(const AAGConfig& cfg, Role role, const Word& secret_template, const Word& own_secret,
                const std::vector<Word>& peer_tokens);

/// Bytes hashed for a group element: platform descriptor, newline, textual
/// canonical word.
std::string canonical_bytes(const PlatformDescriptor& p, const Word& w);

/// SHA-256 of canonical_bytes.
Key derive_key(const PlatformDescriptor& p, const Word& shared);

Transcript make_transcript(const KoLeeConfig& cfg, const Word& alice_token, const Word& bob_token);
Transcript make_transcript(const AAGConfig& cfg, const std::vector<Word>& alice_tokens,
                           const std::vector<Word>& bob_tokens);

struct RoundRecord {
  Transcript transcript;
  Word alice_shared;
  Word bob_shared;
};

struct MultiRoundResult {
  std::vector<RoundRecord> rounds;
  Key alice_key{};
  Key bob_key{};
};

/// SHA-256 over the concatenation of (4-byte big-endian length, canonical
/// bytes) for each round's shared element.
Key combine_round_keys(const PlatformDescriptor& p, const std::vector<Word>& shared);

/// Secret randomness of one party in one round.
std::mt19937_64 party_rng(std::uint64_t seed, std::size_t round, Role role);

/// r independent runs over the same public parameters; secrets for round i
/// come from streams keyed by (seed, i, role).
MultiRoundResult multi_round(const KoLeeConfig& cfg, std::size_t rounds, std::uint64_t seed);
MultiRoundResult multi_round(const AAGConfig& cfg, std::size_t rounds, std::uint64_t seed);

/// Public parameters generated from a seed, shared by the CLI and the wire
/// exchange so both transports agree.
struct PublicParameters {
  std::size_t public_length = 8;  // letters per published word
  std::size_t alice_count = 5;    // k
  std::size_t bob_count = 5;      // m
  std::size_t secret_length = 20;
};

KoLeeConfig make_kolee_config(const PlatformDescriptor& p, const PublicParameters& params,
                              std::uint64_t seed);
AAGConfig make_aag_config(const PlatformDescriptor& p, const PublicParameters& params,
                          std::uint64_t seed);

}  // namespace gbc
