#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rvheal/ltl.hpp"

namespace rvheal::testing {

/// All 2^n letters over `alphabet`, bit i of the index selecting alphabet[i].
inline std::vector<ltl::Letter> all_letters(const std::vector<std::string>& alphabet) {
  std::vector<ltl::Letter> out;
  for (std::uint32_t mask = 0; mask < (1u << alphabet.size()); ++mask) {
    ltl::Letter l;
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      if (mask >> i & 1u) l.insert(alphabet[i]);
    out.push_back(std::move(l));
  }
  return out;
}

inline std::vector<std::string> alphabet_of(const ltl::Formula& f) {
  std::vector<std::string> out;
  for (const auto& p : ltl::atoms(f)) out.push_back(p.grounded());
  return out;
}

/// Calls `visit` on every word of length min_len..max_len over `letters`.
inline void for_each_word(const std::vector<ltl::Letter>& letters, int min_len, int max_len,
                          const std::function<void(const std::vector<ltl::Letter>&)>& visit) {
  std::vector<ltl::Letter> word;
  std::function<void()> rec = [&] {
    if (static_cast<int>(word.size()) >= min_len) visit(word);
    if (static_cast<int>(word.size()) == max_len) return;
    for (const auto& l : letters) {
      word.push_back(l);
      rec();
      word.pop_back();
    }
  };
  rec();
}

inline std::vector<ltl::Letter> random_word(std::mt19937_64& gen, const std::vector<ltl::Letter>& letters,
                                            int min_len, int max_len) {
  const int len = min_len + static_cast<int>(gen() % static_cast<std::uint64_t>(max_len - min_len + 1));
  std::vector<ltl::Letter> w;
  for (int i = 0; i < len; ++i) w.push_back(letters[gen() % letters.size()]);
  return w;
}

/// Random formula with at most `size` nodes over the given atom names.
inline ltl::Formula random_formula(std::mt19937_64& gen, int size, const std::vector<std::string>& atoms) {
  using ltl::Formula;
  if (size <= 1) {
    const auto pick = gen() % (atoms.size() + 2);
    if (pick == atoms.size()) return Formula::top();
    if (pick == atoms.size() + 1) return Formula::bottom();
    return Formula::atom({atoms[pick], std::nullopt});
  }
  const auto op = gen() % 11;
  if (op < 5 || size == 2) {
    auto sub = random_formula(gen, size - 1, atoms);
    switch (op % 5) {
      case 0:
        return Formula::negation(sub);
      case 1:
        return Formula::next(sub);
      case 2:
        return Formula::globally(sub);
      case 3:
        return Formula::finally(sub);
      default:
        return Formula::negation(sub);
    }
  }
  const int left = 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(size - 2));
  auto l = random_formula(gen, left, atoms);
  auto r = random_formula(gen, size - 1 - left, atoms);
  switch (op) {
    case 5:
      return Formula::conjunction(l, r);
    case 6:
      return Formula::disjunction(l, r);
    case 7:
      return Formula::implication(l, r);
    case 8:
      return Formula::until(l, r);
    default:
      return Formula::release(l, r);
  }
}

/// Verdict by literal enumeration of prefix . w . v^omega with eval_lasso;
/// independent of the progression-based oracle.
inline ltl::Verdict naive_verdict(const ltl::Formula& f, const std::vector<ltl::Letter>& prefix,
                                  int stem_bound, int loop_bound) {
  const auto letters = all_letters(alphabet_of(f));
  bool some_true = false, some_false = false;
  for_each_word(letters, 0, stem_bound, [&](const std::vector<ltl::Letter>& w) {
    for_each_word(letters, 1, loop_bound, [&](const std::vector<ltl::Letter>& v) {
      ltl::LassoWord lasso{prefix, v};
      lasso.stem.insert(lasso.stem.end(), w.begin(), w.end());
      (ltl::eval_lasso(f, lasso) ? some_true : some_false) = true;
    });
  });
  if (!some_true) return ltl::Verdict::Bottom;
  if (!some_false) return ltl::Verdict::Top;
  return ltl::Verdict::Inconclusive;
}

inline const std::vector<std::string>& corpus_texts() {
  static const std::vector<std::string> texts = {
      "G (!isUnknown)",
      "G (isStarted && lowException)",
      "G (present)",
      "G (isStartedComponent1 && isStartedComponent2 && connector)",
      "F a",
      "X a",
      "a U b",
      "a R b",
      "G F a",
      "F G a",
  };
  return texts;
}

}  // namespace rvheal::testing
