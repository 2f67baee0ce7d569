#include <gtest/gtest.h>

#include <cctype>
#include <random>

#include "rvheal/monitor.hpp"
#include "support.hpp"

namespace {

using namespace rvheal::monitor;
using rvheal::ltl::LassoWord;
using rvheal::ltl::parse;
using rvheal::ltl::to_nnf;
using rvheal::ltl::unparse;
using rvheal::testing::all_letters;
using rvheal::testing::alphabet_of;
using rvheal::testing::corpus_texts;
using rvheal::testing::for_each_word;

// Minimal checker for the DOT subset: digraph ID { stmt* } where stmt is
// `ID = ID;`, `(graph|node|edge) attrs;`, `ID attrs?;` or `ID -> ID attrs?;`.
class DotChecker {
 public:
  explicit DotChecker(const std::string& text) : s_(text) {}

  bool valid() {
    try {
      expect_id("digraph");
      if (peek() != "{") id();
      expect("{");
      while (peek() != "}") stmt();
      expect("}");
      return peek().empty();
    } catch (const std::runtime_error&) {
      return false;
    }
  }

 private:
  std::string next_token() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ >= s_.size()) return {};
    const char c = s_[pos_];
    if (c == '"') {
      std::size_t end = pos_ + 1;
      while (end < s_.size() && s_[end] != '"') end += s_[end] == '\\' ? 2 : 1;
      if (end >= s_.size()) throw std::runtime_error("unterminated string");
      std::string tok = s_.substr(pos_, end + 1 - pos_);
      pos_ = end + 1;
      return tok;
    }
    if (s_.compare(pos_, 2, "->") == 0) {
      pos_ += 2;
      return "->";
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
      std::string tok = s_.substr(pos_, end - pos_);
      pos_ = end;
      return tok;
    }
    ++pos_;
    return std::string(1, c);
  }
  std::string peek() {
    const auto saved = pos_;
    auto t = next_token();
    pos_ = saved;
    return t;
  }
  static bool is_id(const std::string& t) {
    return !t.empty() && (t[0] == '"' || std::isalnum(static_cast<unsigned char>(t[0])) || t[0] == '_');
  }
  std::string id() {
    auto t = next_token();
    if (!is_id(t)) throw std::runtime_error("expected id, got " + t);
    return t;
  }
  void expect(const std::string& t) {
    if (next_token() != t) throw std::runtime_error("expected " + t);
  }
  void expect_id(const std::string& t) {
    if (id() != t) throw std::runtime_error("expected " + t);
  }
  void attrs() {
    expect("[");
    while (peek() != "]") {
      id();
      expect("=");
      id();
      if (peek() == "," || peek() == ";") next_token();
    }
    expect("]");
  }
  void stmt() {
    const auto first = id();
    if (first == "graph" || first == "node" || first == "edge") {
      attrs();
    } else if (peek() == "=") {
      next_token();
      id();
    } else {
      if (peek() == "->") {
        next_token();
        id();
      }
      if (peek() == "[") attrs();
    }
    if (peek() == ";") next_token();
  }

  std::string s_;
  std::size_t pos_ = 0;
};

TEST(DotChecker, SanityOnHandWrittenGraphs) {
  EXPECT_TRUE(DotChecker("digraph g { a -> b [label=\"x\"]; }").valid());
  EXPECT_FALSE(DotChecker("digraph g { a -> ; }").valid());
  EXPECT_FALSE(DotChecker("digraph g { a -> b ").valid());
}

TEST(Nba, GloballyA) {
  const auto nba = ltl_to_nba(to_nnf(parse("G a")));
  EXPECT_TRUE(accepts_lasso(nba, {{}, {{"a"}}}));
  EXPECT_FALSE(accepts_lasso(nba, {{}, {{}}}));
  EXPECT_FALSE(accepts_lasso(nba, {{{"a"}}, {{"a"}, {}}}));
}

TEST(Nba, FalseIsEmpty) {
  const auto nba = ltl_to_nba(to_nnf(parse("false")));
  const auto ne = nonempty_states(nba);
  for (auto s : nba.initial) EXPECT_FALSE(ne[s]);
  EXPECT_FALSE(accepts_lasso(nba, {{}, {{}}}));
}

TEST(Nba, FinallyB) {
  const auto nba = ltl_to_nba(to_nnf(parse("F b")));
  EXPECT_TRUE(accepts_lasso(nba, {{{}}, {{"b"}}}));
  EXPECT_FALSE(accepts_lasso(nba, {{{}}, {{}}}));
}

TEST(Nonempty, Examples) {
  // G a: the a-self-loop is an accepting cycle.
  const auto ga = ltl_to_nba(to_nnf(parse("G a")));
  const auto ne = nonempty_states(ga);
  for (auto s : ga.initial) EXPECT_TRUE(ne[s]);

  NondetBuchiAutomaton dead;
  dead.alphabet = {"a"};
  dead.state_count = 1;
  dead.initial = {0};
  dead.accepting = {true};
  EXPECT_FALSE(nonempty_states(dead)[0]);

  NondetBuchiAutomaton loop = dead;
  loop.transitions.push_back({0, Guard{}, 0});
  EXPECT_TRUE(nonempty_states(loop)[0]);

  const auto t = ltl_to_nba(to_nnf(parse("true")));
  const auto all = nonempty_states(t);
  for (std::size_t s = 0; s < t.state_count; ++s) EXPECT_TRUE(all[s]);
}

TEST(Determinize, Examples) {
  const auto ga = ltl_to_nba(to_nnf(parse("G a")));
  const auto dfa = determinize_prefix(ga, nonempty_states(ga));
  ASSERT_EQ(dfa.alphabet, std::vector<std::string>{"a"});
  EXPECT_TRUE(dfa.accepting[dfa.initial]);
  const StateId on_a = dfa.delta[dfa.initial][1];
  const StateId on_empty = dfa.delta[dfa.initial][0];
  EXPECT_TRUE(dfa.accepting[on_a]);
  EXPECT_FALSE(dfa.accepting[on_empty]);
  EXPECT_TRUE(dfa.subsets[on_empty].empty());

  const auto t = ltl_to_nba(to_nnf(parse("true")));
  const auto dt = determinize_prefix(t, nonempty_states(t));
  EXPECT_EQ(t.state_count, 1u);
  EXPECT_EQ(dt.state_count(), 1u);
  EXPECT_TRUE(dt.accepting[dt.initial]);
  EXPECT_EQ(dt.delta[dt.initial][0], dt.initial);

  const auto f = ltl_to_nba(to_nnf(parse("false")));
  const auto df = determinize_prefix(f, nonempty_states(f));
  EXPECT_FALSE(df.accepting[df.initial]);
}

TEST(Nba, LanguageMatchesSemanticsOnCorpus) {
  std::mt19937_64 gen(21);
  for (const auto& text : corpus_texts()) {
    const auto f = parse(text);
    const auto nba = ltl_to_nba(to_nnf(f));
    const auto letters = all_letters(alphabet_of(f));
    std::size_t checked = 0;
    auto check = [&](const std::vector<rvheal::ltl::Letter>& stem, const std::vector<rvheal::ltl::Letter>& loop) {
      const LassoWord w{stem, loop};
      ASSERT_EQ(accepts_lasso(nba, w), rvheal::ltl::eval_lasso(f, w)) << text;
      ++checked;
    };
    if (letters.size() <= 4) {
      for_each_word(letters, 0, 3, [&](const auto& stem) {
        for_each_word(letters, 1, 3, [&](const auto& loop) { check(stem, loop); });
      });
    } else {
      for (int i = 0; i < 600; ++i)
        check(rvheal::testing::random_word(gen, letters, 0, 3), rvheal::testing::random_word(gen, letters, 1, 3));
    }
    if (letters.size() > 4) {
      EXPECT_GE(checked, 500u) << text;
    }
  }
}

TEST(Nba, LanguageMatchesSemanticsOnRandomFormulas) {
  std::mt19937_64 gen(22);
  for (int i = 0; i < 150; ++i) {
    const auto f = rvheal::testing::random_formula(gen, 1 + static_cast<int>(gen() % 10), {"a", "b"});
    const auto nba = ltl_to_nba(to_nnf(f));
    const auto letters = all_letters(alphabet_of(f));
    for_each_word(letters, 0, 2, [&](const auto& stem) {
      for_each_word(letters, 1, 2, [&](const auto& loop) {
        const LassoWord w{stem, loop};
        ASSERT_EQ(accepts_lasso(nba, w), rvheal::ltl::eval_lasso(f, w)) << unparse(f);
      });
    });
  }
}

TEST(Nba, BudgetIsEnforced) {
  SynthesisLimits tiny;
  tiny.max_states = 2;
  EXPECT_THROW(ltl_to_nba(to_nnf(parse("G F a && G F b && G F c")), tiny), rvheal::ltl::BudgetExceeded);
  EXPECT_THROW(build_monitor(parse("G F a && G F b && G F c"), tiny), rvheal::ltl::BudgetExceeded);
}

TEST(BuildMonitor, GloballyNotUnknown) {
  const auto m = build_monitor(parse("G(!isUnknown)"));
  ASSERT_EQ(m.state_count(), 2u);
  EXPECT_EQ(m.output(m.initial()), Verdict::Inconclusive);
  const auto [q0, v0] = m.step(m.initial(), rvheal::ltl::Letter{});
  EXPECT_EQ(q0, m.initial());
  EXPECT_EQ(v0, Verdict::Inconclusive);
  const auto [trap, vb] = m.step(m.initial(), rvheal::ltl::Letter{"isUnknown"});
  EXPECT_EQ(vb, Verdict::Bottom);
  EXPECT_EQ(m.step(trap, rvheal::ltl::Letter{}), std::make_pair(trap, Verdict::Bottom));
  EXPECT_THROW(m.step(m.initial(), rvheal::ltl::Letter{"other"}), std::invalid_argument);
}

TEST(BuildMonitor, TrueAndFinally) {
  const auto t = build_monitor(parse("true"));
  ASSERT_EQ(t.state_count(), 1u);
  EXPECT_EQ(t.output(0), Verdict::Top);
  EXPECT_EQ(export_table(t), "0\t{}\t0\ttop\n");

  const auto fa = build_monitor(parse("F a"));
  ASSERT_EQ(fa.state_count(), 2u);
  EXPECT_EQ(fa.output(fa.initial()), Verdict::Inconclusive);
  EXPECT_EQ(fa.step(fa.initial(), rvheal::ltl::Letter{}).first, fa.initial());
  const auto [top, v] = fa.step(fa.initial(), rvheal::ltl::Letter{"a"});
  EXPECT_EQ(v, Verdict::Top);
  EXPECT_EQ(fa.step(top, rvheal::ltl::Letter{}).second, Verdict::Top);
}

TEST(BuildMonitor, GoldenTable) {
  EXPECT_EQ(export_table(build_monitor(parse("a U b"))),
            "0\t{}\t1\tbottom\n"
            "0\t{a}\t0\tinconclusive\n"
            "0\t{b}\t2\ttop\n"
            "0\t{a,b}\t2\ttop\n"
            "1\t{}\t1\tbottom\n"
            "1\t{a}\t1\tbottom\n"
            "1\t{b}\t1\tbottom\n"
            "1\t{a,b}\t1\tbottom\n"
            "2\t{}\t2\ttop\n"
            "2\t{a}\t2\ttop\n"
            "2\t{b}\t2\ttop\n"
            "2\t{a,b}\t2\ttop\n");
}

TEST(BuildMonitor, StructuralInvariantsOnCorpus) {
  for (const auto& text : corpus_texts()) {
    const auto m = build_monitor(parse(text));
    EXPECT_TRUE(verdicts_are_traps(m)) << text;
    for (StateId q = 0; q < m.state_count(); ++q)
      for (LetterMask l = 0; l < m.letter_count(); ++l) ASSERT_LT(m.next(q, l), m.state_count());
    EXPECT_EQ(m.output(m.initial()), Verdict::Inconclusive) << text;
  }
}

TEST(BuildMonitor, Duality) {
  for (const auto& text : corpus_texts()) {
    const auto f = parse(text);
    const auto pos = build_monitor(f);
    const auto neg = build_monitor(rvheal::ltl::Formula::negation(f));
    for_each_word(all_letters(alphabet_of(f)), 0, 5, [&](const auto& u) {
      const auto a = pos.run(u), b = neg.run(u);
      ASSERT_EQ(a == Verdict::Bottom, b == Verdict::Top) << text;
      ASSERT_EQ(a == Verdict::Top, b == Verdict::Bottom) << text;
    });
  }
}

TEST(Minimize, PreservesVerdictsAndIsIdempotent) {
  std::vector<std::string> texts = corpus_texts();
  std::mt19937_64 gen(23);
  for (int i = 0; i < 60; ++i)
    texts.push_back(unparse(rvheal::testing::random_formula(gen, 1 + static_cast<int>(gen() % 9), {"a", "b"})));
  for (const auto& text : texts) {
    const auto f = parse(text);
    const auto product = build_product(f);
    const auto min = minimize(product);
    EXPECT_LE(min.state_count(), product.state_count()) << text;
    EXPECT_EQ(minimize(min), min) << text;
    EXPECT_EQ(build_monitor(f), min) << text;
    const int len = alphabet_of(f).size() <= 2 ? 6 : 4;
    for_each_word(all_letters(alphabet_of(f)), 0, len, [&](const auto& u) {
      ASSERT_EQ(min.run(u), product.run(u)) << text;
    });
  }
}

TEST(Minimize, MergesBisimilarStates) {
  // Three-state G(!u) product with two equivalent inconclusive states.
  const MooreMonitor m({"u"}, {{1, 2}, {1, 2}, {2, 2}},
                       {Verdict::Inconclusive, Verdict::Inconclusive, Verdict::Bottom}, 0);
  const auto min = minimize(m);
  EXPECT_EQ(min.state_count(), 2u);
  EXPECT_EQ(min, build_monitor(parse("G(!u)")));

  const MooreMonitor top({}, {{0}}, {Verdict::Top}, 0);
  EXPECT_EQ(minimize(top), top);
}

TEST(Predicate, Rendering) {
  const std::vector<std::string> ab = {"a", "b"};
  EXPECT_EQ(letters_to_predicate({0, 1, 2, 3}, ab), "true");
  EXPECT_EQ(letters_to_predicate({}, ab), "false");
  EXPECT_EQ(letters_to_predicate({1, 3}, ab), "a");
  EXPECT_EQ(letters_to_predicate({0, 2}, ab), "!a");
  // The rendered predicate must denote exactly the letter set.
  for (LetterMask set = 0; set < 16; ++set) {
    std::vector<LetterMask> letters;
    for (LetterMask l = 0; l < 4; ++l)
      if (set >> l & 1u) letters.push_back(l);
    const auto pred = parse(letters_to_predicate(letters, ab));
    for (LetterMask l = 0; l < 4; ++l) {
      rvheal::ltl::Letter letter;
      if (l & 1u) letter.insert("a");
      if (l & 2u) letter.insert("b");
      EXPECT_EQ(rvheal::ltl::eval_lasso(pred, {{letter}, {{}}}), (set >> l & 1u) != 0)
          << letters_to_predicate(letters, ab);
    }
  }
}

TEST(Dot, GloballyNotU) {
  const auto dot = export_dot(build_monitor(parse("G(!u)")));
  EXPECT_NE(dot.find("q0/inconclusive"), std::string::npos);
  EXPECT_NE(dot.find("q1/bottom"), std::string::npos);
  EXPECT_NE(dot.find("label=\"!u\""), std::string::npos);
  EXPECT_NE(dot.find("label=\"u\""), std::string::npos);
  EXPECT_NE(dot.find("shape=point"), std::string::npos);
  EXPECT_TRUE(DotChecker(dot).valid()) << dot;
}

TEST(Dot, SingleTopState) {
  const auto dot = export_dot(build_monitor(parse("true")));
  EXPECT_NE(dot.find("q0/top"), std::string::npos);
  EXPECT_EQ(dot.find("q1"), std::string::npos);
  EXPECT_TRUE(DotChecker(dot).valid()) << dot;
}

TEST(Dot, CorpusOutputsParse) {
  for (const auto& text : corpus_texts()) {
    const auto dot = export_dot(build_monitor(parse(text)), "m");
    EXPECT_TRUE(DotChecker(dot).valid()) << dot;
  }
}

}  // namespace
