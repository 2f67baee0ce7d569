#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rvheal::ltl {

/// Atomic proposition, optionally grounded on a component or connector
/// (`isUnknown@Query_Service`).
struct Proposition {
  std::string name;
  std::optional<std::string> target;

  /// The name a monitor alphabet uses: `name` or `name@target`.
  std::string grounded() const;

  friend bool operator==(const Proposition&, const Proposition&) = default;
  friend auto operator<=>(const Proposition&, const Proposition&) = default;
};

bool is_identifier(std::string_view s);

/// Grounded proposition names true at one observation instant.
using Letter = std::set<std::string>;

std::string to_string(const Letter& letter);

/// Ultimately periodic word stem . loop^omega.
struct LassoWord {
  std::vector<Letter> stem;
  std::vector<Letter> loop;
};

enum class Verdict { Top, Bottom, Inconclusive };

std::string_view to_string(Verdict v);

enum class Kind {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  Until,
  Release,
  Globally,
  Finally,
};

/// Immutable LTL syntax tree. Copies share structure.
class Formula {
 public:
  static Formula top();
  static Formula bottom();
  static Formula atom(Proposition p);
  static Formula atom(std::string name);
  static Formula negation(Formula f);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula next(Formula f);
  static Formula until(Formula lhs, Formula rhs);
  static Formula release(Formula lhs, Formula rhs);
  static Formula globally(Formula f);
  static Formula finally(Formula f);

  Kind kind() const;
  const Proposition& proposition() const;
  /// Operand of a unary node, left operand of a binary one.
  const Formula& lhs() const;
  const Formula& rhs() const;
  bool is_unary() const;
  bool is_binary() const;

  std::size_t size() const;

  /// Fully parenthesized text accepted by `parse`.
  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line, std::size_t column,
             std::vector<std::string> expected);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operator precedence, loosest first: `->` (right), `||`, `&&`
/// (right-folded), `U`/`R` (right), then prefix `!`, `G`, `F`, `X`.
Formula parse(std::string_view text);

std::string unparse(const Formula& f);

/// Negation normal form: `Not` only directly above atoms.
Formula to_nnf(const Formula& f);

std::set<Proposition> atoms(const Formula& f);

/// Replaces the targets of atoms according to `binding` (ungrounded name ->
/// grounded proposition). Atoms without an entry are left as they are.
Formula substitute(const Formula& f,
                   const std::vector<std::pair<std::string, Proposition>>& binding);

/// Standard LTL semantics on stem . loop^omega.
bool eval_lasso(const Formula& f, const LassoWord& w);

/// One-letter formula progression: `prefix . x |= f` iff `x |= progress(f, letter)`.
/// Results are simplified so that repeated progression stays finite.
Formula progress(const Formula& f, const Letter& letter);

struct OracleBounds {
  std::size_t stem = 4;
  std::size_t loop = 4;
  /// Upper bound on the number of lasso extensions enumerated per check.
  std::size_t budget = 50'000'000;
};

/// Three-valued verdict of a finite prefix, decided by enumerating every
/// extension prefix . w . v^omega with |w| <= bounds.stem and
/// 1 <= |v| <= bounds.loop over 2^atoms(f). Sound only relative to the bounds.
Verdict verdict_oracle(const Formula& f, const std::vector<Letter>& prefix,
                       OracleBounds bounds = {});

/// Same verdicts as `verdict_oracle`, memoized on the progressed residual so
/// that many prefixes of one formula can be checked cheaply.
class VerdictOracle {
 public:
  explicit VerdictOracle(Formula f, OracleBounds bounds = {});

  Verdict operator()(const std::vector<Letter>& prefix);

  /// Verdict for the residual obtained by progressing the formula.
  Verdict of_residual(const Formula& residual);

  const Formula& formula() const { return formula_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }

 private:
  Formula formula_;
  OracleBounds bounds_;
  std::vector<std::string> alphabet_;
  std::unordered_map<std::string, Verdict> memo_;
};

}  // namespace rvheal::ltl
