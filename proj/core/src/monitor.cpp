#include "rvheal/monitor.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <sstream>
#include <tuple>
#include <stdexcept>

namespace rvheal::monitor {

using ltl::Kind;

namespace {

std::vector<std::string> alphabet_of(const Formula& f) {
  std::vector<std::string> out;
  for (const auto& p : ltl::atoms(f)) out.push_back(p.grounded());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void check_alphabet(const std::vector<std::string>& alphabet, const SynthesisLimits& limits) {
  if (alphabet.size() > limits.max_atoms || alphabet.size() >= 32)
    throw ltl::BudgetExceeded("alphabet of " + std::to_string(alphabet.size()) +
                              " atoms exceeds the synthesis limit of " +
                              std::to_string(limits.max_atoms));
}

/// Subformula closure of an NNF formula, interned by text.
class Closure {
 public:
  struct Entry {
    Kind kind;
    int lhs = -1;
    int rhs = -1;
    LetterMask atom = 0;  // for Atom / Not(Atom)
    int until_index = -1;
  };

  Closure(const Formula& nnf, const std::vector<std::string>& alphabet) : alphabet_(alphabet) {
    root_ = intern(nnf);
  }

  int root() const { return root_; }
  const Entry& at(int i) const { return entries_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return entries_.size(); }
  int until_count() const { return untils_; }

 private:
  int intern(const Formula& f) {
    const std::string key = f.to_string();
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    Entry e{f.kind()};
    if (f.kind() == Kind::Atom) {
      e.atom = bit_of(f.proposition().grounded());
    } else if (f.kind() == Kind::Not) {
      if (f.lhs().kind() != Kind::Atom)
        throw std::invalid_argument("ltl_to_nba expects a formula in negation normal form");
      e.atom = bit_of(f.lhs().proposition().grounded());
    } else {
      if (f.is_unary() || f.is_binary()) e.lhs = intern(f.lhs());
      if (f.is_binary()) e.rhs = intern(f.rhs());
    }
    if (f.kind() == Kind::Until || f.kind() == Kind::Finally) {
      if (untils_ >= 32) throw ltl::BudgetExceeded("too many Until subformulas");
      e.until_index = untils_++;
    }
    entries_.push_back(e);
    const int id = static_cast<int>(entries_.size() - 1);
    index_.emplace(key, id);
    return id;
  }

  LetterMask bit_of(const std::string& name) const {
    auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), name);
    if (it == alphabet_.end() || *it != name)
      throw std::invalid_argument("atom '" + name + "' is not in the alphabet");
    return LetterMask{1} << (it - alphabet_.begin());
  }

  const std::vector<std::string>& alphabet_;
  std::vector<Entry> entries_;
  std::map<std::string, int> index_;
  int root_ = -1;
  int untils_ = 0;
};

/// One consistent way of discharging a set of obligations in the current
/// step: a guard, the obligations left for the next step, and the Until
/// formulas that were fulfilled (not postponed).
struct Cover {
  Guard guard;
  std::vector<int> next;
  std::uint32_t accepting = 0;

  friend bool operator<(const Cover& a, const Cover& b) {
    return std::tie(a.guard.pos, a.guard.neg, a.next, a.accepting) <
           std::tie(b.guard.pos, b.guard.neg, b.next, b.accepting);
  }
  friend bool operator==(const Cover& a, const Cover& b) {
    return a.guard == b.guard && a.next == b.next && a.accepting == b.accepting;
  }
};

class Expander {
 public:
  explicit Expander(const Closure& c) : c_(c) {}

  std::vector<Cover> covers(const std::vector<int>& obligations) {
    out_.clear();
    Partial p;
    p.processed.assign(c_.size(), false);
    p.todo = obligations;
    run(std::move(p));
    std::sort(out_.begin(), out_.end());
    out_.erase(std::unique(out_.begin(), out_.end()), out_.end());
    return out_;
  }

 private:
  struct Partial {
    std::vector<bool> processed;
    std::vector<int> todo;
    Guard guard;
    std::vector<int> next;
    std::uint32_t postponed = 0;
  };

  void run(Partial p) {
    while (!p.todo.empty()) {
      const int f = p.todo.back();
      p.todo.pop_back();
      if (p.processed[static_cast<std::size_t>(f)]) continue;
      p.processed[static_cast<std::size_t>(f)] = true;
      const auto& e = c_.at(f);
      switch (e.kind) {
        case Kind::True:
          break;
        case Kind::False:
          return;
        case Kind::Atom:
          p.guard.pos |= e.atom;
          if (p.guard.pos & p.guard.neg) return;
          break;
        case Kind::Not:
          p.guard.neg |= e.atom;
          if (p.guard.pos & p.guard.neg) return;
          break;
        case Kind::And:
          p.todo.push_back(e.lhs);
          p.todo.push_back(e.rhs);
          break;
        case Kind::Or: {
          Partial alt = p;
          alt.todo.push_back(e.rhs);
          run(std::move(alt));
          p.todo.push_back(e.lhs);
          break;
        }
        case Kind::Next:
          p.next.push_back(e.lhs);
          break;
        case Kind::Until: {
          Partial later = p;
          later.todo.push_back(e.lhs);
          later.next.push_back(f);
          later.postponed |= std::uint32_t{1} << e.until_index;
          run(std::move(later));
          p.todo.push_back(e.rhs);
          break;
        }
        case Kind::Finally: {
          Partial later = p;
          later.next.push_back(f);
          later.postponed |= std::uint32_t{1} << e.until_index;
          run(std::move(later));
          p.todo.push_back(e.lhs);
          break;
        }
        case Kind::Release: {
          Partial later = p;
          later.todo.push_back(e.rhs);
          later.next.push_back(f);
          run(std::move(later));
          p.todo.push_back(e.lhs);
          p.todo.push_back(e.rhs);
          break;
        }
        case Kind::Globally:
          p.todo.push_back(e.lhs);
          p.next.push_back(f);
          break;
        case Kind::Implies:
          throw std::invalid_argument("ltl_to_nba expects a formula in negation normal form");
      }
    }
    std::sort(p.next.begin(), p.next.end());
    p.next.erase(std::unique(p.next.begin(), p.next.end()), p.next.end());
    const std::uint32_t all =
        c_.until_count() == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << c_.until_count()) - 1;
    out_.push_back(Cover{p.guard, std::move(p.next), all & ~p.postponed});
  }

  const Closure& c_;
  std::vector<Cover> out_;
};

/// Tarjan's algorithm, iterative. Returns the SCC index of every vertex.
std::vector<int> strongly_connected(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  int counter = 0, comps = 0;
  struct Frame {
    std::size_t v;
    std::size_t edge;
  };
  std::vector<Frame> call;
  for (std::size_t s = 0; s < n; ++s) {
    if (index[s] != -1) continue;
    call.push_back({s, 0});
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = true;
    while (!call.empty()) {
      auto& fr = call.back();
      if (fr.edge < adj[fr.v].size()) {
        const std::size_t w = adj[fr.v][fr.edge++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
        continue;
      }
      const std::size_t v = fr.v;
      if (low[v] == index[v]) {
        while (true) {
          const std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comps;
          if (w == v) break;
        }
        ++comps;
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return comp;
}

/// Vertices that can reach an accepting vertex lying on a cycle.
std::vector<bool> reaches_accepting_cycle(const std::vector<std::vector<std::size_t>>& adj,
                                          const std::vector<bool>& accepting) {
  const std::size_t n = adj.size();
  const auto comp = strongly_connected(adj);
  std::map<int, std::size_t> comp_size;
  for (std::size_t v = 0; v < n; ++v) ++comp_size[comp[v]];
  std::vector<bool> good(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (!accepting[v]) continue;
    const bool self_loop = std::find(adj[v].begin(), adj[v].end(), v) != adj[v].end();
    if (comp_size[comp[v]] > 1 || self_loop) good[v] = true;
  }
  std::vector<std::vector<std::size_t>> rev(n);
  for (std::size_t v = 0; v < n; ++v)
    for (auto w : adj[v]) rev[w].push_back(v);
  std::vector<bool> out(n, false);
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v)
    if (good[v]) {
      out[v] = true;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto u : rev[v])
      if (!out[u]) {
        out[u] = true;
        queue.push_back(u);
      }
  }
  return out;
}

}  // namespace

std::vector<std::vector<const NbaTransition*>> NondetBuchiAutomaton::successors() const {
  std::vector<std::vector<const NbaTransition*>> out(state_count);
  for (const auto& t : transitions) out[t.from].push_back(&t);
  return out;
}

NondetBuchiAutomaton ltl_to_nba(const Formula& nnf, SynthesisLimits limits) {
  return ltl_to_nba(nnf, alphabet_of(nnf), limits);
}

NondetBuchiAutomaton ltl_to_nba(const Formula& nnf, std::vector<std::string> alphabet,
                                SynthesisLimits limits) {
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  check_alphabet(alphabet, limits);

  const Closure closure(nnf, alphabet);
  Expander expander(closure);
  const int k = closure.until_count();

  std::map<std::vector<int>, std::vector<Cover>> cover_cache;
  std::map<std::pair<std::vector<int>, int>, StateId> ids;
  std::vector<std::pair<std::vector<int>, int>> states;
  std::deque<StateId> work;

  auto state_id = [&](const std::vector<int>& obligations, int counter) {
    auto key = std::make_pair(obligations, counter);
    if (auto it = ids.find(key); it != ids.end()) return it->second;
    if (states.size() >= limits.max_states)
      throw ltl::BudgetExceeded("Buchi automaton exceeds " + std::to_string(limits.max_states) +
                                " states");
    const auto id = static_cast<StateId>(states.size());
    ids.emplace(key, id);
    states.push_back(std::move(key));
    work.push_back(id);
    return id;
  };

  NondetBuchiAutomaton nba;
  nba.alphabet = alphabet;
  // An empty obligation set already means `true`; keeps NBA(true) at one state.
  std::vector<int> root;
  if (nnf.kind() != Kind::True) root.push_back(closure.root());
  nba.initial.push_back(state_id(root, 0));

  while (!work.empty()) {
    const StateId q = work.front();
    work.pop_front();
    const auto obligations = states[q].first;
    const int counter = states[q].second;
    auto it = cover_cache.find(obligations);
    if (it == cover_cache.end()) it = cover_cache.emplace(obligations, expander.covers(obligations)).first;
    for (const auto& cover : it->second) {
      int j = counter == k ? 0 : counter;
      while (j < k && ((cover.accepting >> j) & 1U)) ++j;
      const StateId to = state_id(cover.next, j);
      nba.transitions.push_back({q, cover.guard, to});
    }
  }

  nba.state_count = states.size();
  nba.accepting.resize(states.size());
  for (std::size_t q = 0; q < states.size(); ++q) nba.accepting[q] = states[q].second == k;
  return nba;
}

std::vector<bool> nonempty_states(const NondetBuchiAutomaton& nba) {
  std::vector<std::vector<std::size_t>> adj(nba.state_count);
  for (const auto& t : nba.transitions) adj[t.from].push_back(t.to);
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return reaches_accepting_cycle(adj, nba.accepting);
}

bool accepts_lasso(const NondetBuchiAutomaton& nba, const ltl::LassoWord& word) {
  if (word.loop.empty()) throw std::invalid_argument("lasso loop must be nonempty");
  std::vector<LetterMask> letters;
  auto encode = [&](const Letter& l) {
    LetterMask m = 0;
    for (std::size_t i = 0; i < nba.alphabet.size(); ++i)
      if (l.count(nba.alphabet[i])) m |= LetterMask{1} << i;
    return m;
  };
  for (const auto& l : word.stem) letters.push_back(encode(l));
  for (const auto& l : word.loop) letters.push_back(encode(l));
  const std::size_t n = letters.size();
  const std::size_t loop_start = word.stem.size();
  const std::size_t vertices = nba.state_count * n;
  auto vid = [n](std::size_t q, std::size_t pos) { return q * n + pos; };

  const auto succ = nba.successors();
  std::vector<std::vector<std::size_t>> adj(vertices);
  std::vector<bool> accepting(vertices, false);
  for (std::size_t q = 0; q < nba.state_count; ++q) {
    for (std::size_t pos = 0; pos < n; ++pos) {
      accepting[vid(q, pos)] = nba.accepting[q];
      const std::size_t next_pos = pos + 1 < n ? pos + 1 : loop_start;
      for (const auto* t : succ[q])
        if (t->guard.admits(letters[pos])) adj[vid(q, pos)].push_back(vid(t->to, next_pos));
    }
  }
  const auto live = reaches_accepting_cycle(adj, accepting);
  return std::any_of(nba.initial.begin(), nba.initial.end(),
                     [&](StateId q0) { return live[vid(q0, 0)]; });
}

PrefixDfa determinize_prefix(const NondetBuchiAutomaton& nba, const std::vector<bool>& nonempty,
                             SynthesisLimits limits) {
  check_alphabet(nba.alphabet, limits);
  const std::size_t letters = std::size_t{1} << nba.alphabet.size();
  const auto succ = nba.successors();

  PrefixDfa dfa;
  dfa.alphabet = nba.alphabet;
  std::map<std::vector<StateId>, StateId> ids;
  std::deque<StateId> work;

  auto id_of = [&](std::vector<StateId> subset) {
    if (auto it = ids.find(subset); it != ids.end()) return it->second;
    if (dfa.subsets.size() >= limits.max_states)
      throw ltl::BudgetExceeded("prefix automaton exceeds " + std::to_string(limits.max_states) +
                                " states");
    const auto id = static_cast<StateId>(dfa.subsets.size());
    dfa.accepting.push_back(std::any_of(subset.begin(), subset.end(),
                                        [&](StateId q) { return nonempty[q]; }));
    ids.emplace(subset, id);
    dfa.subsets.push_back(std::move(subset));
    dfa.delta.emplace_back(letters, 0);
    work.push_back(id);
    return id;
  };

  std::vector<StateId> init = nba.initial;
  std::sort(init.begin(), init.end());
  init.erase(std::unique(init.begin(), init.end()), init.end());
  dfa.initial = id_of(std::move(init));

  while (!work.empty()) {
    const StateId d = work.front();
    work.pop_front();
    for (LetterMask letter = 0; letter < letters; ++letter) {
      std::vector<StateId> next;
      for (StateId q : dfa.subsets[d])
        for (const auto* t : succ[q])
          if (t->guard.admits(letter)) next.push_back(t->to);
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      const StateId to = id_of(std::move(next));
      dfa.delta[d][letter] = to;
    }
  }
  return dfa;
}

// ---------------------------------------------------------------------------
// MooreMonitor

MooreMonitor::MooreMonitor(std::vector<std::string> alphabet,
                           std::vector<std::vector<StateId>> delta, std::vector<Verdict> output,
                           StateId initial)
    : alphabet_(std::move(alphabet)),
      delta_(std::move(delta)),
      output_(std::move(output)),
      initial_(initial) {
  if (!std::is_sorted(alphabet_.begin(), alphabet_.end()))
    throw std::invalid_argument("monitor alphabet must be sorted");
  if (delta_.size() != output_.size() || output_.empty() || initial_ >= output_.size())
    throw std::invalid_argument("malformed monitor");
  for (const auto& row : delta_) {
    if (row.size() != letter_count()) throw std::invalid_argument("monitor transition not total");
    for (auto q : row)
      if (q >= output_.size()) throw std::invalid_argument("monitor transition out of range");
  }
}

LetterMask MooreMonitor::encode(const Letter& letter) const {
  LetterMask m = 0;
  for (const auto& p : letter) {
    auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), p);
    if (it == alphabet_.end() || *it != p)
      throw std::invalid_argument("proposition '" + p + "' is not in the monitor alphabet");
    m |= LetterMask{1} << (it - alphabet_.begin());
  }
  return m;
}

Letter MooreMonitor::decode(LetterMask mask) const {
  Letter out;
  for (std::size_t i = 0; i < alphabet_.size(); ++i)
    if ((mask >> i) & 1U) out.insert(alphabet_[i]);
  return out;
}

std::pair<StateId, Verdict> MooreMonitor::step(StateId q, LetterMask letter) const {
  const StateId to = next(q, letter);
  return {to, output_[to]};
}

std::pair<StateId, Verdict> MooreMonitor::step(StateId q, const Letter& letter) const {
  return step(q, encode(letter));
}

Verdict MooreMonitor::run(const std::vector<Letter>& trace) const {
  StateId q = initial_;
  for (const auto& l : trace) q = next(q, encode(l));
  return output_[q];
}

MooreMonitor build_product(const Formula& f, SynthesisLimits limits) {
  const auto alphabet = alphabet_of(f);
  check_alphabet(alphabet, limits);
  const auto pos_nba = ltl_to_nba(ltl::to_nnf(f), alphabet, limits);
  const auto neg_nba = ltl_to_nba(ltl::to_nnf(Formula::negation(f)), alphabet, limits);
  const auto pos = determinize_prefix(pos_nba, nonempty_states(pos_nba), limits);
  const auto neg = determinize_prefix(neg_nba, nonempty_states(neg_nba), limits);

  const std::size_t letters = std::size_t{1} << alphabet.size();
  std::map<std::pair<StateId, StateId>, StateId> ids;
  std::vector<std::pair<StateId, StateId>> pairs;
  std::vector<std::vector<StateId>> delta;
  std::deque<StateId> work;
  auto id_of = [&](std::pair<StateId, StateId> p) {
    if (auto it = ids.find(p); it != ids.end()) return it->second;
    if (pairs.size() >= limits.max_states)
      throw ltl::BudgetExceeded("monitor product exceeds " + std::to_string(limits.max_states) +
                                " states");
    const auto id = static_cast<StateId>(pairs.size());
    ids.emplace(p, id);
    pairs.push_back(p);
    delta.emplace_back(letters, 0);
    work.push_back(id);
    return id;
  };
  const StateId init = id_of({pos.initial, neg.initial});
  while (!work.empty()) {
    const StateId q = work.front();
    work.pop_front();
    const auto [a, b] = pairs[q];
    for (LetterMask l = 0; l < letters; ++l) delta[q][l] = id_of({pos.delta[a][l], neg.delta[b][l]});
  }

  std::vector<Verdict> output(pairs.size());
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const bool sat_possible = pos.accepting[pairs[q].first];
    const bool unsat_possible = neg.accepting[pairs[q].second];
    if (!sat_possible && !unsat_possible)
      throw std::logic_error("monitor product state rejects both the formula and its negation");
    output[q] = !sat_possible ? Verdict::Bottom : !unsat_possible ? Verdict::Top
                                                                  : Verdict::Inconclusive;
  }
  return MooreMonitor(alphabet, std::move(delta), std::move(output), init);
}

MooreMonitor build_monitor(const Formula& f, SynthesisLimits limits) {
  return minimize(build_product(f, limits));
}

MooreMonitor canonicalize(const MooreMonitor& m) {
  const std::size_t n = m.state_count();
  std::vector<StateId> renum(n, static_cast<StateId>(n));
  std::vector<StateId> order;
  std::deque<StateId> queue{m.initial()};
  renum[m.initial()] = 0;
  order.push_back(m.initial());
  while (!queue.empty()) {
    const StateId q = queue.front();
    queue.pop_front();
    for (LetterMask l = 0; l < m.letter_count(); ++l) {
      const StateId to = m.next(q, l);
      if (renum[to] == n) {
        renum[to] = static_cast<StateId>(order.size());
        order.push_back(to);
        queue.push_back(to);
      }
    }
  }
  std::vector<std::vector<StateId>> delta(order.size(), std::vector<StateId>(m.letter_count()));
  std::vector<Verdict> output(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    output[i] = m.output(order[i]);
    for (LetterMask l = 0; l < m.letter_count(); ++l) delta[i][l] = renum[m.next(order[i], l)];
  }
  return MooreMonitor(m.alphabet(), std::move(delta), std::move(output), 0);
}

MooreMonitor minimize(const MooreMonitor& m) {
  const std::size_t n = m.state_count();
  const std::size_t letters = m.letter_count();
  std::vector<std::size_t> block(n);
  for (std::size_t q = 0; q < n; ++q) block[q] = static_cast<std::size_t>(m.output(q));
  std::size_t blocks = 0;
  while (true) {
    std::map<std::vector<std::size_t>, std::size_t> signatures;
    std::vector<std::size_t> refined(n);
    for (std::size_t q = 0; q < n; ++q) {
      std::vector<std::size_t> sig;
      sig.reserve(letters + 1);
      sig.push_back(block[q]);
      for (LetterMask l = 0; l < letters; ++l) sig.push_back(block[m.next(static_cast<StateId>(q), l)]);
      auto it = signatures.emplace(std::move(sig), signatures.size()).first;
      refined[q] = it->second;
    }
    block = std::move(refined);
    if (signatures.size() == blocks) break;
    blocks = signatures.size();
  }
  std::vector<std::vector<StateId>> delta(blocks, std::vector<StateId>(letters));
  std::vector<Verdict> output(blocks);
  for (std::size_t q = 0; q < n; ++q) {
    output[block[q]] = m.output(static_cast<StateId>(q));
    for (LetterMask l = 0; l < letters; ++l)
      delta[block[q]][l] = static_cast<StateId>(block[m.next(static_cast<StateId>(q), l)]);
  }
  return canonicalize(MooreMonitor(m.alphabet(), std::move(delta), std::move(output),
                                   static_cast<StateId>(block[m.initial()])));
}

bool verdicts_are_traps(const MooreMonitor& m) {
  for (StateId q = 0; q < m.state_count(); ++q) {
    const Verdict v = m.output(q);
    if (v == Verdict::Inconclusive) continue;
    for (LetterMask l = 0; l < m.letter_count(); ++l)
      if (m.output(m.next(q, l)) != v) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

struct Implicant {
  LetterMask value;
  LetterMask care;
  friend auto operator<=>(const Implicant&, const Implicant&) = default;
};

std::string render_cube(const Implicant& c, const std::vector<std::string>& alphabet) {
  std::string out;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (!((c.care >> i) & 1U)) continue;
    if (!out.empty()) out += " && ";
    if (!((c.value >> i) & 1U)) out += '!';
    out += alphabet[i];
  }
  return out.empty() ? "true" : out;
}

}  // namespace

std::string letters_to_predicate(const std::vector<LetterMask>& letters,
                                 const std::vector<std::string>& alphabet) {
  const std::size_t n = alphabet.size();
  const LetterMask full = n == 0 ? 0 : static_cast<LetterMask>((std::uint64_t{1} << n) - 1);
  std::vector<LetterMask> minterms(letters);
  std::sort(minterms.begin(), minterms.end());
  minterms.erase(std::unique(minterms.begin(), minterms.end()), minterms.end());
  if (minterms.empty()) return "false";
  if (minterms.size() == (std::size_t{1} << n)) return "true";

  // Quine-McCluskey prime implicants.
  std::vector<Implicant> current;
  for (auto m : minterms) current.push_back({m, full});
  std::vector<Implicant> primes;
  while (!current.empty()) {
    std::vector<bool> merged(current.size(), false);
    std::vector<Implicant> next;
    for (std::size_t i = 0; i < current.size(); ++i) {
      for (std::size_t j = i + 1; j < current.size(); ++j) {
        if (current[i].care != current[j].care) continue;
        const LetterMask diff = current[i].value ^ current[j].value;
        if (std::popcount(diff) != 1) continue;
        merged[i] = merged[j] = true;
        next.push_back({current[i].value & ~diff, current[i].care & ~diff});
      }
    }
    for (std::size_t i = 0; i < current.size(); ++i)
      if (!merged[i]) primes.push_back(current[i]);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    current = std::move(next);
  }
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());

  auto covers = [](const Implicant& p, LetterMask m) { return (m & p.care) == p.value; };
  std::vector<Implicant> chosen;
  std::vector<LetterMask> uncovered = minterms;
  // Essential primes, then greedy by coverage (fewest literals on ties).
  for (auto m : minterms) {
    const Implicant* only = nullptr;
    int count = 0;
    for (const auto& p : primes)
      if (covers(p, m)) {
        only = &p;
        ++count;
      }
    if (count == 1 && std::find(chosen.begin(), chosen.end(), *only) == chosen.end())
      chosen.push_back(*only);
  }
  auto prune = [&] {
    std::erase_if(uncovered, [&](LetterMask m) {
      return std::any_of(chosen.begin(), chosen.end(), [&](const Implicant& p) { return covers(p, m); });
    });
  };
  prune();
  while (!uncovered.empty()) {
    const Implicant* best = nullptr;
    std::size_t best_cover = 0;
    for (const auto& p : primes) {
      const auto c = static_cast<std::size_t>(std::count_if(
          uncovered.begin(), uncovered.end(), [&](LetterMask m) { return covers(p, m); }));
      if (c > best_cover ||
          (c == best_cover && best && c > 0 && std::popcount(p.care) < std::popcount(best->care))) {
        best = &p;
        best_cover = c;
      }
    }
    chosen.push_back(*best);
    prune();
  }

  std::vector<std::pair<int, std::string>> cubes;
  for (const auto& c : chosen) cubes.emplace_back(std::popcount(c.care), render_cube(c, alphabet));
  std::sort(cubes.begin(), cubes.end());
  if (cubes.size() == 1) return cubes.front().second;
  std::string out;
  for (const auto& [lits, text] : cubes) {
    if (!out.empty()) out += " || ";
    out += lits > 1 ? "(" + text + ")" : text;
  }
  return out;
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string export_dot(const MooreMonitor& m, const std::string& graph_name) {
  std::ostringstream os;
  os << "digraph " << dot_quote(graph_name) << " {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=circle];\n";
  os << "  init [shape=point, label=\"\"];\n";
  for (StateId q = 0; q < m.state_count(); ++q) {
    os << "  q" << q << " [label="
       << dot_quote("q" + std::to_string(q) + "/" + std::string(ltl::to_string(m.output(q))));
    if (m.output(q) != Verdict::Inconclusive) os << ", shape=doublecircle";
    os << "];\n";
  }
  os << "  init -> q" << m.initial() << ";\n";
  for (StateId q = 0; q < m.state_count(); ++q) {
    std::map<StateId, std::vector<LetterMask>> by_target;
    for (LetterMask l = 0; l < m.letter_count(); ++l) by_target[m.next(q, l)].push_back(l);
    for (const auto& [to, letters] : by_target)
      os << "  q" << q << " -> q" << to
         << " [label=" << dot_quote(letters_to_predicate(letters, m.alphabet())) << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string export_table(const MooreMonitor& m) {
  std::ostringstream os;
  for (StateId q = 0; q < m.state_count(); ++q)
    for (LetterMask l = 0; l < m.letter_count(); ++l) {
      const StateId to = m.next(q, l);
      os << q << '\t' << ltl::to_string(m.decode(l)) << '\t' << to << '\t'
         << ltl::to_string(m.output(to)) << '\n';
    }
  return os.str();
}

}  // namespace rvheal::monitor
