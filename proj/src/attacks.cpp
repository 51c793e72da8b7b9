#include "gbcrypt/attacks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "gbcrypt/errors.hpp"
#include "json.hpp"

namespace gbc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Checks candidate conjugators against precomputed targets. Braid targets
/// keep their Garside form and permutation so most candidates are rejected
/// by the permutation filter alone.
class PairChecker {
 public:
  explicit PairChecker(const ConjugacyInstance& inst) : platform_(inst.platform) {
    for (const auto& [a, b] : inst.pairs) {
      if (a.alphabet_size() != platform_.alphabet_size() || b.alphabet_size() != platform_.alphabet_size()) {
        throw std::invalid_argument("conjugacy instance word not over the platform alphabet");
      }
      sources_.push_back(a);
      if (platform_.kind == PlatformKind::braid) {
        braid_targets_.push_back(garside_normal_form(platform_.rank, b));
      }
      if (platform_.kind != PlatformKind::free_group) {
        source_perms_.push_back(permutation_image(platform_, a));
        target_perms_.push_back(permutation_image(platform_, b));
      }
      if (platform_.kind == PlatformKind::free_group) word_targets_.push_back(free_reduce(b));
    }
  }

  bool check(const Word& x) const {
    if (platform_.kind != PlatformKind::free_group) {
      const Permutation px = permutation_image(platform_, x);
      const Permutation px_inv = px.inverse();
      for (std::size_t i = 0; i < sources_.size(); ++i) {
        if (px * source_perms_[i] * px_inv != target_perms_[i]) return false;
      }
      if (platform_.kind == PlatformKind::symmetric) return true;
    }
    for (std::size_t i = 0; i < sources_.size(); ++i) {
      const Word image = conjugate(sources_[i], x);
      if (platform_.kind == PlatformKind::braid) {
        if (garside_normal_form(platform_.rank, image) != braid_targets_[i]) return false;
      } else if (image != word_targets_[i]) {
        return false;
      }
    }
    return true;
  }

 private:
  PlatformDescriptor platform_;
  std::vector<Word> sources_;
  std::vector<Word> word_targets_;
  std::vector<GarsideNormalForm> braid_targets_;
  std::vector<Permutation> source_perms_;
  std::vector<Permutation> target_perms_;
};

/// Maps words over the search alphabet (letter codes 0..2g-1) to platform
/// words.
class SearchAlphabet {
 public:
  explicit SearchAlphabet(const ConjugacyInstance& inst) : platform_(inst.platform) {
    images_ = inst.search_generators.empty() ? generators(inst.platform) : inst.search_generators;
    if (images_.empty()) throw std::invalid_argument("empty search alphabet");
    for (const auto& img : images_) {
      if (img.alphabet_size() != platform_.alphabet_size()) {
        throw std::invalid_argument("search generator not over the platform alphabet");
      }
      letters_.push_back(free_reduce(img));
      letters_.push_back(invert(free_reduce(img)));
    }
  }

  int letter_count() const { return static_cast<int>(letters_.size()); }
  int generator_count() const { return static_cast<int>(images_.size()); }
  const Word& image(int code) const { return letters_[static_cast<std::size_t>(code)]; }

  Word evaluate(const std::vector<int>& codes) const {
    std::vector<Letter> out;
    for (int c : codes) {
      const auto piece = image(c).letters();
      out.insert(out.end(), piece.begin(), piece.end());
    }
    return free_reduce(Word(platform_.alphabet_size(), std::move(out)));
  }

  Word pattern(const std::vector<int>& codes) const {
    std::vector<Letter> out;
    for (int c : codes) out.push_back(Letter::from_code(c));
    return Word(generator_count(), std::move(out));
  }

 private:
  PlatformDescriptor platform_;
  std::vector<Word> images_;
  std::vector<Word> letters_;
};

class BruteForceEngine final : public SearchEngine {
 public:
  BruteForceEngine(const ConjugacyInstance& inst, const SolverConfig& cfg)
      : checker_(inst), alphabet_(inst), cfg_(cfg) {
    cfg_.validate();
  }

  EngineStatus step() override {
    if (status_ != EngineStatus::running) return status_;
    if (steps_ >= cfg_.max_steps) return status_ = EngineStatus::exhausted;
    ++steps_;
    if (checker_.check(alphabet_.evaluate(codes_))) {
      witness_ = alphabet_.pattern(codes_);
      return status_ = EngineStatus::found;
    }
    if (!advance()) status_ = EngineStatus::exhausted;
    return status_;
  }

  EngineStatus status() const override { return status_; }
  std::uint64_t steps() const override { return steps_; }
  const Word& witness_template() const override { return witness_; }

 private:
  bool allowed(std::size_t pos, int code) const { return pos == 0 || code != (codes_[pos - 1] ^ 1); }

  void fill_from(std::size_t pos) {
    for (std::size_t q = pos; q < codes_.size(); ++q) {
      int c = 0;
      while (!allowed(q, c)) ++c;
      codes_[q] = c;
    }
  }

  // Next reduced word in (length, lexicographic) order.
  bool advance() {
    for (std::size_t pos = codes_.size(); pos-- > 0;) {
      for (int c = codes_[pos] + 1; c < alphabet_.letter_count(); ++c) {
        if (allowed(pos, c)) {
          codes_[pos] = c;
          fill_from(pos + 1);
          return true;
        }
      }
    }
    if (codes_.size() >= cfg_.max_depth) return false;
    codes_.assign(codes_.size() + 1, 0);
    fill_from(0);
    return true;
  }

  PairChecker checker_;
  SearchAlphabet alphabet_;
  SolverConfig cfg_;
  std::vector<int> codes_;
  EngineStatus status_ = EngineStatus::running;
  std::uint64_t steps_ = 0;
  Word witness_;
};

class LengthBasedEngine final : public SearchEngine {
 public:
  LengthBasedEngine(const ConjugacyInstance& inst, const SolverConfig& cfg)
      : inst_(inst), alphabet_(inst), cfg_(cfg), rng_(cfg.seed) {
    cfg_.validate();
    State root;
    for (const auto& [a, b] : inst.pairs) {
      targets_.push_back(normal_form(inst.platform, a));
      root.pulled.push_back(normal_form(inst.platform, b));
    }
    root.score = score(root.pulled);
    if (root.pulled == targets_) {
      witness_ = alphabet_.pattern({});
      status_ = EngineStatus::found;
      return;
    }
    visited_.insert(key(root.pulled));
    beam_.push_back(std::move(root));
    schedule_children();
  }

  EngineStatus step() override {
    if (status_ != EngineStatus::running) return status_;
    if (steps_ >= cfg_.max_steps) return status_ = EngineStatus::exhausted;
    ++steps_;

    const auto [parent_index, code] = pending_[next_++];
    const State& parent = beam_[parent_index];
    State child;
    child.codes = parent.codes;
    child.codes.push_back(code);
    child.parent_score = parent.score;
    const Word& g = alphabet_.image(code);
    const Word g_inv = invert(g);
    for (const auto& w : parent.pulled) {
      child.pulled.push_back(normal_form(inst_.platform, g_inv * w * g));
    }
    child.score = score(child.pulled);
    if (child.pulled == targets_) {
      witness_ = alphabet_.pattern(child.codes);
      return status_ = EngineStatus::found;
    }
    child.fresh = visited_.insert(key(child.pulled)).second;
    children_.push_back(std::move(child));

    if (next_ == pending_.size()) advance_beam();
    return status_;
  }

  EngineStatus status() const override { return status_; }
  std::uint64_t steps() const override { return steps_; }
  const Word& witness_template() const override { return witness_; }

 private:
  struct State {
    std::vector<int> codes;
    std::vector<Word> pulled;  // canonical x_prefix^-1 b_i x_prefix
    std::size_t score = 0;
    std::size_t parent_score = 0;
    bool fresh = true;
  };

  static std::size_t score(const std::vector<Word>& pulled) {
    std::size_t total = 0;
    for (const auto& w : pulled) total += w.size();
    return total;
  }

  static std::string key(const std::vector<Word>& pulled) {
    std::string k;
    for (const auto& w : pulled) {
      for (const auto& l : w.letters()) k.push_back(static_cast<char>(l.code()));
      k.push_back('\xff');
    }
    return k;
  }

  void schedule_children() {
    pending_.clear();
    next_ = 0;
    for (std::size_t i = 0; i < beam_.size(); ++i) {
      const auto& codes = beam_[i].codes;
      for (int c = 0; c < alphabet_.letter_count(); ++c) {
        if (!codes.empty() && c == (codes.back() ^ 1)) continue;
        pending_.emplace_back(i, c);
      }
    }
    if (pending_.empty()) status_ = EngineStatus::exhausted;
  }

  void advance_beam() {
    std::vector<State> accepted;
    for (auto& c : children_) {
      if (c.fresh && c.score < c.parent_score) accepted.push_back(c);
    }
    if (accepted.empty()) {
      // Plateau: kick to a random neighbour, or give up.
      if (restarts_used_ >= cfg_.restarts || children_.empty()) {
        status_ = EngineStatus::exhausted;
        return;
      }
      ++restarts_used_;
      std::uniform_int_distribution<std::size_t> pick(0, children_.size() - 1);
      accepted.push_back(children_[pick(rng_)]);
    } else {
      std::stable_sort(accepted.begin(), accepted.end(), [](const State& x, const State& y) {
        if (x.score != y.score) return x.score < y.score;
        return x.codes < y.codes;
      });
      if (accepted.size() > cfg_.beam_width) accepted.resize(cfg_.beam_width);
    }
    beam_ = std::move(accepted);
    children_.clear();
    schedule_children();
  }

  const ConjugacyInstance& inst_;
  SearchAlphabet alphabet_;
  SolverConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<Word> targets_;
  std::vector<State> beam_;
  std::vector<State> children_;
  std::vector<std::pair<std::size_t, int>> pending_;
  std::size_t next_ = 0;
  std::unordered_set<std::string> visited_;
  std::size_t restarts_used_ = 0;
  EngineStatus status_ = EngineStatus::running;
  std::uint64_t steps_ = 0;
  Word witness_;
};

/// Evaluates the witness pattern and re-verifies it before it leaves the
/// module.
void attach_witness(AttackOutcome& out, const ConjugacyInstance& inst, const Word& pattern) {
  const SearchAlphabet alphabet(inst);
  std::vector<int> codes;
  for (const auto& l : pattern.letters()) codes.push_back(l.code());
  Word x = alphabet.evaluate(codes);
  if (!verify_witness(inst, x)) throw std::logic_error("solver produced an invalid witness");
  out.witness = std::move(x);
  out.witness_template = pattern;
  out.budget_exhausted = false;
}

AttackOutcome run_alone(SearchEngine& engine, const ConjugacyInstance& inst, SolverTag tag,
                        Clock::time_point start) {
  while (engine.status() == EngineStatus::running) engine.step();
  AttackOutcome out;
  out.solver = tag;
  out.steps = engine.steps();
  out.budget_exhausted = engine.status() != EngineStatus::found;
  if (engine.status() == EngineStatus::found) attach_witness(out, inst, engine.witness_template());
  out.elapsed_ms = ms_since(start);
  return out;
}

}  // namespace

std::string to_string(SolverTag tag) {
  switch (tag) {
    case SolverTag::heuristic:
      return "heuristic";
    case SolverTag::deterministic:
      return "deterministic";
    case SolverTag::composite_heuristic:
      return "composite-H";
    case SolverTag::composite_deterministic:
      return "composite-D";
  }
  return {};
}

std::string to_string(KeyStatus status) {
  switch (status) {
    case KeyStatus::recovered:
      return "key-recovered";
    case KeyStatus::witness_found_key_mismatch:
      return "witness-found-key-mismatch";
    case KeyStatus::no_witness:
      return "no-witness";
  }
  return {};
}

std::string to_json(const AttackOutcome& outcome) {
  nlohmann::ordered_json doc;
  doc["solver"] = to_string(outcome.solver);
  if (outcome.witness) doc["witness"] = format_word(*outcome.witness);
  doc["steps"] = outcome.steps;
  doc["elapsed_ms"] = outcome.elapsed_ms;
  doc["budget_exhausted"] = outcome.budget_exhausted;
  return doc.dump();
}

void SolverConfig::validate() const {
  if (max_depth == 0 || max_steps == 0 || beam_width == 0 || restarts == 0 || interleave_ratio == 0) {
    throw std::invalid_argument("solver budgets, beam width, restarts and interleave ratio must be positive");
  }
}

bool verify_witness(const ConjugacyInstance& inst, const Word& x) {
  for (const auto& [a, b] : inst.pairs) {
    if (!equal(inst.platform, conjugate(a, x), b)) return false;
  }
  return true;
}

std::unique_ptr<SearchEngine> make_brute_force_engine(const ConjugacyInstance& inst, const SolverConfig& cfg) {
  return std::make_unique<BruteForceEngine>(inst, cfg);
}

std::unique_ptr<SearchEngine> make_length_based_engine(const ConjugacyInstance& inst,
                                                       const SolverConfig& cfg) {
  return std::make_unique<LengthBasedEngine>(inst, cfg);
}

AttackOutcome brute_force_search(const ConjugacyInstance& inst, const SolverConfig& cfg) {
  const auto start = Clock::now();
  BruteForceEngine engine(inst, cfg);
  return run_alone(engine, inst, SolverTag::deterministic, start);
}

AttackOutcome length_based_attack(const ConjugacyInstance& inst, const SolverConfig& cfg) {
  const auto start = Clock::now();
  LengthBasedEngine engine(inst, cfg);
  return run_alone(engine, inst, SolverTag::heuristic, start);
}

ScheduleResult replay_schedule(std::uint64_t h_steps, bool h_found, std::uint64_t d_steps, bool d_found,
                               std::size_t interleave_ratio) {
  ScheduleResult r;
  if (h_steps == 0 && h_found) return {0, SolverTag::composite_heuristic, true};
  if (d_steps == 0 && d_found) return {0, SolverTag::composite_deterministic, true};
  bool h_alive = h_steps > 0;
  bool d_alive = d_steps > 0;
  std::uint64_t h = 0, d = 0;
  while (h_alive || d_alive) {
    for (std::size_t i = 0; i < interleave_ratio && h_alive; ++i) {
      ++h;
      ++r.total_steps;
      if (h == h_steps) {
        if (h_found) return {r.total_steps, SolverTag::composite_heuristic, true};
        h_alive = false;
      }
    }
    if (d_alive) {
      ++d;
      ++r.total_steps;
      if (d == d_steps) {
        if (d_found) return {r.total_steps, SolverTag::composite_deterministic, true};
        d_alive = false;
      }
    }
  }
  return r;
}

AttackOutcome composite_run(const ConjugacyInstance& inst, const SolverConfig& cfg) {
  const auto start = Clock::now();
  LengthBasedEngine h(inst, cfg);
  BruteForceEngine d(inst, cfg);

  AttackOutcome out;
  auto finish = [&](SearchEngine* winner, SolverTag tag) {
    out.solver = tag;
    out.steps = h.steps() + d.steps();
    out.budget_exhausted = winner == nullptr;
    if (winner) attach_witness(out, inst, winner->witness_template());
    out.elapsed_ms = ms_since(start);
    return out;
  };

  if (h.status() == EngineStatus::found) return finish(&h, SolverTag::composite_heuristic);
  if (d.status() == EngineStatus::found) return finish(&d, SolverTag::composite_deterministic);
  while (h.status() == EngineStatus::running || d.status() == EngineStatus::running) {
    for (std::size_t i = 0; i < cfg.interleave_ratio && h.status() == EngineStatus::running; ++i) {
      if (h.step() == EngineStatus::found) return finish(&h, SolverTag::composite_heuristic);
    }
    if (d.status() == EngineStatus::running && d.step() == EngineStatus::found) {
      return finish(&d, SolverTag::composite_deterministic);
    }
  }
  return finish(nullptr, SolverTag::composite_deterministic);
}

AttackOutcome composite_run_parallel(const ConjugacyInstance& inst, const SolverConfig& cfg) {
  const auto start = Clock::now();
  constexpr auto kUnbounded = std::numeric_limits<std::uint64_t>::max();
  LengthBasedEngine h(inst, cfg);
  BruteForceEngine d(inst, cfg);

  // A solver may stop once the other has found a witness that the
  // sequential schedule would reach before any of its remaining steps.
  std::atomic<std::uint64_t> h_limit{kUnbounded};
  std::atomic<std::uint64_t> d_limit{kUnbounded};
  const std::uint64_t ratio = cfg.interleave_ratio;

  std::thread h_thread([&] {
    while (h.status() == EngineStatus::running && h.steps() < h_limit.load()) h.step();
    if (h.status() == EngineStatus::found) {
      d_limit.store(h.steps() == 0 ? 0 : (h.steps() - 1) / ratio);
    }
  });
  std::thread d_thread([&] {
    while (d.status() == EngineStatus::running && d.steps() < d_limit.load()) d.step();
    if (d.status() == EngineStatus::found) h_limit.store(d.steps() * ratio);
  });
  h_thread.join();
  d_thread.join();

  const bool h_found = h.status() == EngineStatus::found;
  const bool d_found = d.status() == EngineStatus::found;
  const auto h_end = h.status() == EngineStatus::running ? kUnbounded : h.steps();
  const auto d_end = d.status() == EngineStatus::running ? kUnbounded : d.steps();
  const ScheduleResult sched = replay_schedule(h_end, h_found, d_end, d_found, cfg.interleave_ratio);

  AttackOutcome out;
  out.solver = sched.winner;
  out.steps = sched.total_steps;
  out.budget_exhausted = !sched.found;
  if (sched.found) {
    const SearchEngine& winner =
        sched.winner == SolverTag::composite_heuristic ? static_cast<SearchEngine&>(h) : d;
    attach_witness(out, inst, winner.witness_template());
  }
  out.elapsed_ms = ms_since(start);
  return out;
}

SolverKind parse_solver_kind(std::string_view text) {
  if (text == "bf") return SolverKind::brute_force;
  if (text == "lba") return SolverKind::length_based;
  if (text == "composite") return SolverKind::composite;
  throw ParseError("unknown solver '" + std::string(text) + "' (expected bf, lba or composite)");
}

AttackOutcome run_solver(SolverKind kind, const ConjugacyInstance& inst, const SolverConfig& cfg) {
  switch (kind) {
    case SolverKind::brute_force:
      return brute_force_search(inst, cfg);
    case SolverKind::length_based:
      return length_based_attack(inst, cfg);
    case SolverKind::composite:
      return composite_run(inst, cfg);
  }
  return {};
}

ConjugacyInstance instance_from_transcript(const Transcript& t, bool full_alphabet) {
  ConjugacyInstance inst;
  inst.platform = t.platform;
  inst.promised = true;
  const int r = t.platform.alphabet_size();
  if (t.protocol == Protocol::kolee) {
    inst.pairs.emplace_back(t.published.at(0), t.alice_tokens.at(0));
    if (!full_alphabet) {
      for (int g : standard_alice_pool(t.platform)) inst.search_generators.push_back(Word::from_signed(r, {g}));
    }
  } else {
    const std::size_t k = t.alice_tokens.size();
    for (std::size_t i = 0; i < k; ++i) inst.pairs.emplace_back(t.published.at(i), t.alice_tokens[i]);
    if (!full_alphabet) {
      inst.search_generators.assign(t.published.begin() + static_cast<std::ptrdiff_t>(k), t.published.end());
    }
  }
  if (inst.search_generators.empty()) inst.search_generators = generators(t.platform);
  for (const auto& [a, b] : inst.pairs) inst.instance_length = std::max({inst.instance_length, a.size(), b.size()});
  return inst;
}

TranscriptAttack attack_transcript(const Transcript& t, SolverKind kind, const SolverConfig& cfg) {
  TranscriptAttack result;
  const auto restricted = instance_from_transcript(t, false);
  result.outcome = run_solver(kind, restricted, cfg);
  if (!result.outcome.witness) {
    const auto full = instance_from_transcript(t, true);
    if (full.search_generators.size() != restricted.search_generators.size() ||
        full.search_generators != restricted.search_generators) {
      const auto first = result.outcome;
      result.outcome = run_solver(kind, full, cfg);
      result.outcome.steps += first.steps;
      result.outcome.elapsed_ms += first.elapsed_ms;
      result.used_fallback = true;
    }
  }
  if (!result.outcome.witness) {
    result.status = KeyStatus::no_witness;
    return result;
  }

  const Word& x = *result.outcome.witness;
  if (t.protocol == Protocol::kolee) {
    const int r = t.platform.alphabet_size();
    bool commutes = true;
    for (int g : standard_bob_pool(t.platform)) {
      const Word gw = Word::from_signed(r, {g});
      commutes = commutes && equal(t.platform, x * gw, gw * x);
    }
    if (!commutes || standard_bob_pool(t.platform).empty()) {
      result.status = KeyStatus::witness_found_key_mismatch;
      return result;
    }
    const Word shared = normal_form(t.platform, conjugate(t.bob_tokens.at(0), x));
    result.recovered_key = derive_key(t.platform, shared);
    result.status = KeyStatus::recovered;
    return result;
  }

  if (result.used_fallback) {
    result.status = KeyStatus::witness_found_key_mismatch;
    return result;
  }
  const std::size_t k = t.alice_tokens.size();
  AAGConfig cfg_view{t.platform,
                     {t.published.begin(), t.published.begin() + static_cast<std::ptrdiff_t>(k)},
                     {t.published.begin() + static_cast<std::ptrdiff_t>(k), t.published.end()},
                     0};
  const Word shared = aag_shared(cfg_view, Role::alice, *result.outcome.witness_template, x, t.bob_tokens);
  result.recovered_key = derive_key(t.platform, shared);
  result.status = KeyStatus::recovered;
  return result;
}

}  // namespace gbc
