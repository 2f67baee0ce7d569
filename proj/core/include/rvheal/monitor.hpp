#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rvheal/ltl.hpp"

namespace rvheal::monitor {

using ltl::Formula;
using ltl::Letter;
using ltl::Verdict;

using StateId = std::uint32_t;
/// Letter encoded as a bit mask over a sorted alphabet (bit i <-> alphabet[i]).
using LetterMask = std::uint32_t;

/// Limits for the synthesis pipeline. Exceeding one raises ltl::BudgetExceeded.
struct SynthesisLimits {
  std::size_t max_states = std::size_t{1} << 16;
  std::size_t max_atoms = 12;
};

/// Conjunction of literals over the alphabet; `pos` atoms must hold, `neg`
/// atoms must not.
struct Guard {
  LetterMask pos = 0;
  LetterMask neg = 0;

  bool admits(LetterMask letter) const { return (letter & pos) == pos && (letter & neg) == 0; }
  friend bool operator==(const Guard&, const Guard&) = default;
};

struct NbaTransition {
  StateId from;
  Guard guard;
  StateId to;
};

/// State-based nondeterministic Buchi automaton.
struct NondetBuchiAutomaton {
  std::vector<std::string> alphabet;
  std::size_t state_count = 0;
  std::vector<NbaTransition> transitions;
  std::vector<StateId> initial;
  std::vector<bool> accepting;

  std::vector<std::vector<const NbaTransition*>> successors() const;
};

/// Tableau translation of an NNF formula: states are sets of pending
/// obligations, one generalized acceptance set per Until/Finally, then
/// degeneralized with a round-robin counter.
NondetBuchiAutomaton ltl_to_nba(const Formula& nnf, SynthesisLimits limits = {});

/// Same, over an explicit alphabet (which must contain every atom of `nnf`).
NondetBuchiAutomaton ltl_to_nba(const Formula& nnf, std::vector<std::string> alphabet,
                                SynthesisLimits limits = {});

/// States from which some accepting run exists.
std::vector<bool> nonempty_states(const NondetBuchiAutomaton& nba);

/// Membership of stem . loop^omega in L(nba), by product-with-lasso emptiness.
bool accepts_lasso(const NondetBuchiAutomaton& nba, const ltl::LassoWord& word);

/// Subset construction over the NBA read as an NFA accepting on `nonempty`.
/// State 0 is initial; the empty subset is an explicit rejecting sink.
struct PrefixDfa {
  std::vector<std::string> alphabet;
  std::vector<std::vector<StateId>> subsets;
  std::vector<std::vector<StateId>> delta;  // [state][letter]
  std::vector<bool> accepting;
  StateId initial = 0;

  std::size_t state_count() const { return subsets.size(); }
};

PrefixDfa determinize_prefix(const NondetBuchiAutomaton& nba, const std::vector<bool>& nonempty,
                             SynthesisLimits limits = {});

/// Deterministic Moore machine with a three-valued verdict per state.
class MooreMonitor {
 public:
  MooreMonitor() = default;
  MooreMonitor(std::vector<std::string> alphabet, std::vector<std::vector<StateId>> delta,
               std::vector<Verdict> output, StateId initial);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  std::size_t state_count() const { return output_.size(); }
  std::size_t letter_count() const { return std::size_t{1} << alphabet_.size(); }
  StateId initial() const { return initial_; }
  Verdict output(StateId q) const { return output_.at(q); }
  StateId next(StateId q, LetterMask letter) const { return delta_.at(q).at(letter); }

  /// Throws std::invalid_argument for propositions outside the alphabet.
  LetterMask encode(const Letter& letter) const;
  Letter decode(LetterMask mask) const;

  std::pair<StateId, Verdict> step(StateId q, const Letter& letter) const;
  std::pair<StateId, Verdict> step(StateId q, LetterMask letter) const;

  /// Final verdict after reading `trace` from the initial state.
  Verdict run(const std::vector<Letter>& trace) const;

  friend bool operator==(const MooreMonitor&, const MooreMonitor&) = default;

 private:
  std::vector<std::string> alphabet_;
  std::vector<std::vector<StateId>> delta_;
  std::vector<Verdict> output_;
  StateId initial_ = 0;
};

/// LTL3 monitor: product of the prefix automata for the formula and its
/// negation, minimized and canonically numbered.
MooreMonitor build_monitor(const Formula& f, SynthesisLimits limits = {});

/// Unminimized reachable product; exposed for tests.
MooreMonitor build_product(const Formula& f, SynthesisLimits limits = {});

/// Output-respecting partition refinement followed by BFS renumbering
/// (letters in ascending mask order). Idempotent.
MooreMonitor minimize(const MooreMonitor& m);

/// Reachable states renumbered in BFS order from the initial state.
MooreMonitor canonicalize(const MooreMonitor& m);

/// True iff every successor of a TOP state is TOP and of a BOTTOM state is BOTTOM.
bool verdicts_are_traps(const MooreMonitor& m);

/// Letter set rendered as a predicate in the LTL grammar (`true`, `!u`,
/// `(a && !b) || c`, ...).
std::string letters_to_predicate(const std::vector<LetterMask>& letters,
                                 const std::vector<std::string>& alphabet);

std::string export_dot(const MooreMonitor& m, const std::string& graph_name = "monitor");

/// One line per transition: `state \t {letter} \t next \t verdict(next)`.
std::string export_table(const MooreMonitor& m);

}  // namespace rvheal::monitor
