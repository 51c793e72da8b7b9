#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gbcrypt/platform.hpp"
#include "gbcrypt/protocols.hpp"
#include "gbcrypt/words.hpp"

namespace gbc {

/// Pairs (a_i, b_i) for which a common conjugator x with x a_i x^-1 = b_i is
/// sought. Candidate conjugators are words in `search_generators` (the
/// platform generators when empty); AAG attacks search over the published
/// opposite tuple.
struct ConjugacyInstance {
  PlatformDescriptor platform;
  std::vector<std::pair<Word, Word>> pairs;
  bool promised = false;
  std::size_t instance_length = 0;
  std::vector<Word> search_generators;
};

enum class SolverTag { heuristic, deterministic, composite_heuristic, composite_deterministic };
std::string to_string(SolverTag tag);

struct AttackOutcome {
  std::optional<Word> witness;
  /// The witness as a word over the search generators.
  std::optional<Word> witness_template;
  SolverTag solver = SolverTag::deterministic;
  std::uint64_t steps = 0;
  double elapsed_ms = 0.0;
  bool budget_exhausted = false;
};

/// {solver, witness?, steps, elapsed_ms, budget_exhausted}
std::string to_json(const AttackOutcome& outcome);

struct SolverConfig {
  std::size_t max_depth = 8;
  std::uint64_t max_steps = 1'000'000;
  std::size_t beam_width = 4;
  std::size_t restarts = 3;
  std::size_t interleave_ratio = 1;  // heuristic steps per deterministic step
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless every field is positive.
  void validate() const;
};

/// True iff equal(conjugate(a_i, x), b_i) for every pair.
bool verify_witness(const ConjugacyInstance& inst, const Word& x);

enum class EngineStatus { running, found, exhausted };

/// A solver advanced one elementary step at a time, so that several solvers
/// can be interleaved deterministically.
class SearchEngine {
 public:
  virtual ~SearchEngine() = default;
  virtual EngineStatus step() = 0;
  virtual EngineStatus status() const = 0;
  virtual std::uint64_t steps() const = 0;
  /// Valid once status() == found: the witness over the search generators.
  virtual const Word& witness_template() const = 0;
};

/// Breadth-first enumeration of freely reduced candidates, lexicographic
/// within each length; one candidate verified per step.
std::unique_ptr<SearchEngine> make_brute_force_engine(const ConjugacyInstance& inst,
                                                      const SolverConfig& cfg);

/// Beam descent on the total canonical length of the pulled-back pairs
/// x^-1 b_i x; one neighbour scored per step.
std::unique_ptr<SearchEngine> make_length_based_engine(const ConjugacyInstance& inst,
                                                       const SolverConfig& cfg);

AttackOutcome brute_force_search(const ConjugacyInstance& inst, const SolverConfig& cfg);
AttackOutcome length_based_attack(const ConjugacyInstance& inst, const SolverConfig& cfg);

/// H || D: interleave_ratio heuristic steps, then one brute-force step,
/// repeated until either finds a witness or both are exhausted.
AttackOutcome composite_run(const ConjugacyInstance& inst, const SolverConfig& cfg);

/// Same outcome as composite_run (except elapsed time), with H and D on two
/// threads. Ties are resolved by replaying the sequential schedule over the
/// recorded step counts.
AttackOutcome composite_run_parallel(const ConjugacyInstance& inst, const SolverConfig& cfg);

/// Total steps and winner the sequential schedule yields when H finishes
/// after `h_steps` steps (found or exhausted) and D after `d_steps`.
struct ScheduleResult {
  std::uint64_t total_steps = 0;
  SolverTag winner = SolverTag::composite_deterministic;
  bool found = false;
};
ScheduleResult replay_schedule(std::uint64_t h_steps, bool h_found, std::uint64_t d_steps, bool d_found,
                               std::size_t interleave_ratio);

enum class SolverKind { brute_force, length_based, composite };
SolverKind parse_solver_kind(std::string_view text);  // bf | lba | composite
AttackOutcome run_solver(SolverKind kind, const ConjugacyInstance& inst, const SolverConfig& cfg);

enum class KeyStatus { recovered, witness_found_key_mismatch, no_witness };
std::string to_string(KeyStatus status);

struct TranscriptAttack {
  AttackOutcome outcome;
  std::optional<Key> recovered_key;
  KeyStatus status = KeyStatus::no_witness;
  /// The restricted search failed and the full platform alphabet was used.
  bool used_fallback = false;
};

/// Ko-Lee: the pair (a, a^x), searched over Alice's commuting pool.
/// AAG: the pairs (a_i, a_i^x), searched over b_1..b_m.
/// Both fall back to the full alphabet when the restricted search fails.
ConjugacyInstance instance_from_transcript(const Transcript& t, bool full_alphabet = false);

/// Solves the instance and replays Alice's key computation with the witness.
/// A key is reported as recovered only when the witness is guaranteed to
/// reproduce it: a Ko-Lee witness commuting with Bob's pool, or an AAG
/// witness expressed in b_1..b_m.
TranscriptAttack attack_transcript(const Transcript& t, SolverKind kind, const SolverConfig& cfg);

}  // namespace gbc
