#include "rvheal/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <utility>

namespace rvheal::ltl {

std::string Proposition::grounded() const {
  return target ? name + "@" + *target : name;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front())))
    return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string to_string(const Letter& letter) {
  std::string out = "{";
  bool first = true;
  for (const auto& p : letter) {
    if (!first) out += ',';
    out += p;
    first = false;
  }
  out += '}';
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Top:
      return "top";
    case Verdict::Bottom:
      return "bottom";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

// ---------------------------------------------------------------------------
// Formula

struct Formula::Node {
  Kind kind;
  Proposition prop;
  std::vector<Formula> children;
  std::size_t size;
};

Formula::Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

namespace {

std::size_t child_size(const std::vector<Formula>& cs) {
  std::size_t n = 1;
  for (const auto& c : cs) n += c.size();
  return n;
}

}  // namespace

Formula Formula::top() {
  static const Formula f{std::make_shared<const Node>(Node{Kind::True, {}, {}, 1})};
  return f;
}

Formula Formula::bottom() {
  static const Formula f{std::make_shared<const Node>(Node{Kind::False, {}, {}, 1})};
  return f;
}

Formula Formula::atom(Proposition p) {
  if (!is_identifier(p.name) || (p.target && !is_identifier(*p.target)))
    throw std::invalid_argument("invalid proposition name: " + p.grounded());
  return Formula{std::make_shared<const Node>(Node{Kind::Atom, std::move(p), {}, 1})};
}

Formula Formula::atom(std::string name) {
  return atom(Proposition{std::move(name), std::nullopt});
}

#define RVHEAL_UNARY(fn, K)                                                  \
  Formula Formula::fn(Formula f) {                                           \
    std::vector<Formula> cs{std::move(f)};                                   \
    auto n = child_size(cs);                                                 \
    return Formula{std::make_shared<const Node>(Node{K, {}, std::move(cs), n})}; \
  }
#define RVHEAL_BINARY(fn, K)                                                 \
  Formula Formula::fn(Formula lhs, Formula rhs) {                            \
    std::vector<Formula> cs{std::move(lhs), std::move(rhs)};                 \
    auto n = child_size(cs);                                                 \
    return Formula{std::make_shared<const Node>(Node{K, {}, std::move(cs), n})}; \
  }

RVHEAL_UNARY(negation, Kind::Not)
RVHEAL_UNARY(next, Kind::Next)
RVHEAL_UNARY(globally, Kind::Globally)
RVHEAL_UNARY(finally, Kind::Finally)
RVHEAL_BINARY(conjunction, Kind::And)
RVHEAL_BINARY(disjunction, Kind::Or)
RVHEAL_BINARY(implication, Kind::Implies)
RVHEAL_BINARY(until, Kind::Until)
RVHEAL_BINARY(release, Kind::Release)

#undef RVHEAL_UNARY
#undef RVHEAL_BINARY

Kind Formula::kind() const { return node_->kind; }

const Proposition& Formula::proposition() const {
  if (node_->kind != Kind::Atom) throw std::logic_error("not an atom");
  return node_->prop;
}

const Formula& Formula::lhs() const {
  if (node_->children.empty()) throw std::logic_error("formula has no operand");
  return node_->children[0];
}

const Formula& Formula::rhs() const {
  if (node_->children.size() < 2) throw std::logic_error("formula is not binary");
  return node_->children[1];
}

bool Formula::is_unary() const { return node_->children.size() == 1; }
bool Formula::is_binary() const { return node_->children.size() == 2; }
std::size_t Formula::size() const { return node_->size; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  if (a.kind() == Kind::Atom) return a.node_->prop == b.node_->prop;
  const auto& ca = a.node_->children;
  const auto& cb = b.node_->children;
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (!(ca[i] == cb[i])) return false;
  return true;
}

namespace {

std::string_view binary_symbol(Kind k) {
  switch (k) {
    case Kind::And:
      return "&&";
    case Kind::Or:
      return "||";
    case Kind::Implies:
      return "->";
    case Kind::Until:
      return "U";
    case Kind::Release:
      return "R";
    default:
      return "?";
  }
}

std::string_view unary_symbol(Kind k) {
  switch (k) {
    case Kind::Not:
      return "!";
    case Kind::Next:
      return "X";
    case Kind::Globally:
      return "G";
    case Kind::Finally:
      return "F";
    default:
      return "?";
  }
}

void write(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Kind::True:
      out += "true";
      return;
    case Kind::False:
      out += "false";
      return;
    case Kind::Atom:
      out += f.proposition().grounded();
      return;
    default:
      break;
  }
  if (f.is_unary()) {
    out += unary_symbol(f.kind());
    const auto& op = f.lhs();
    if (op.is_binary()) {
      write(op, out);
    } else if (f.kind() == Kind::Not) {
      write(op, out);
    } else {
      out += ' ';
      write(op, out);
    }
    return;
  }
  out += '(';
  write(f.lhs(), out);
  out += ' ';
  out += binary_symbol(f.kind());
  out += ' ';
  write(f.rhs(), out);
  out += ')';
}

}  // namespace

std::string Formula::to_string() const {
  std::string out;
  write(*this, out);
  return out;
}

std::string unparse(const Formula& f) { return f.to_string(); }

// ---------------------------------------------------------------------------
// Parser

ParseError::ParseError(std::string message, std::size_t line, std::size_t column,
                       std::vector<std::string> expected)
    : std::runtime_error([&] {
        std::string m = std::to_string(line) + ":" + std::to_string(column) + ": " + message;
        if (!expected.empty()) {
          m += " (expected one of:";
          for (const auto& e : expected) m += " " + e;
          m += ")";
        }
        return m;
      }()),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

enum class Tok {
  Ident,
  At,
  LParen,
  RParen,
  Not,
  And,
  Or,
  Implies,
  Globally,
  Finally,
  Next,
  Until,
  Release,
  True,
  False,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "end of input", line_, col_});
        return out;
      }
      const std::size_t l = line_, c = col_;
      const char ch = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(ch))) {
        std::size_t end = pos_;
        while (end < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
          ++end;
        std::string word(src_.substr(pos_, end - pos_));
        advance(end - pos_);
        out.push_back({keyword(word), word, l, c});
        continue;
      }
      auto two = src_.substr(pos_, 2);
      if (two == "&&") {
        advance(2);
        out.push_back({Tok::And, "&&", l, c});
      } else if (two == "||") {
        advance(2);
        out.push_back({Tok::Or, "||", l, c});
      } else if (two == "->") {
        advance(2);
        out.push_back({Tok::Implies, "->", l, c});
      } else if (ch == '!') {
        advance(1);
        out.push_back({Tok::Not, "!", l, c});
      } else if (ch == '(') {
        advance(1);
        out.push_back({Tok::LParen, "(", l, c});
      } else if (ch == ')') {
        advance(1);
        out.push_back({Tok::RParen, ")", l, c});
      } else if (ch == '@') {
        advance(1);
        out.push_back({Tok::At, "@", l, c});
      } else {
        std::size_t end = pos_ + 1;
        while (end < src_.size() && std::ispunct(static_cast<unsigned char>(src_[end])) &&
               src_[end] != '(' && src_[end] != ')' && src_[end] != '!')
          ++end;
        throw ParseError("unknown operator '" + std::string(src_.substr(pos_, end - pos_)) + "'",
                         l, c, {});
      }
    }
  }

 private:
  static Tok keyword(const std::string& w) {
    static const std::map<std::string, Tok, std::less<>> kw = {
        {"G", Tok::Globally}, {"F", Tok::Finally}, {"X", Tok::Next},
        {"U", Tok::Until},    {"R", Tok::Release}, {"true", Tok::True},
        {"false", Tok::False},
    };
    auto it = kw.find(w);
    return it == kw.end() ? Tok::Ident : it->second;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance(1);
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i, ++pos_) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula run() {
    Formula f = implies();
    if (peek().kind != Tok::End)
      fail("unexpected '" + peek().text + "'", {"&&", "||", "->", "U", "R", "end of input"});
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
    throw ParseError(msg, peek().line, peek().column, std::move(expected));
  }

  Formula implies() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::Implies) {
      take();
      return Formula::implication(std::move(lhs), implies());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    if (peek().kind == Tok::Or) {
      take();
      return Formula::disjunction(std::move(lhs), disjunction());
    }
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = temporal();
    if (peek().kind == Tok::And) {
      take();
      return Formula::conjunction(std::move(lhs), conjunction());
    }
    return lhs;
  }

  Formula temporal() {
    Formula lhs = unary();
    if (peek().kind == Tok::Until) {
      take();
      return Formula::until(std::move(lhs), temporal());
    }
    if (peek().kind == Tok::Release) {
      take();
      return Formula::release(std::move(lhs), temporal());
    }
    return lhs;
  }

  Formula unary() {
    switch (peek().kind) {
      case Tok::Not:
        take();
        return Formula::negation(unary());
      case Tok::Globally:
        take();
        return Formula::globally(unary());
      case Tok::Finally:
        take();
        return Formula::finally(unary());
      case Tok::Next:
        take();
        return Formula::next(unary());
      default:
        return primary();
    }
  }

  Formula primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::True:
        take();
        return Formula::top();
      case Tok::False:
        take();
        return Formula::bottom();
      case Tok::Ident: {
        std::string name = take().text;
        if (peek().kind == Tok::At) {
          take();
          if (peek().kind != Tok::Ident) fail("expected grounding target", {"identifier"});
          return Formula::atom(Proposition{std::move(name), take().text});
        }
        return Formula::atom(Proposition{std::move(name), std::nullopt});
      }
      case Tok::LParen: {
        take();
        Formula f = implies();
        if (peek().kind != Tok::RParen)
          fail("unexpected '" + peek().text + "'", {")", "&&", "||", "->", "U", "R"});
        take();
        return f;
      }
      default:
        fail("unexpected '" + t.text + "'",
             {"!", "G", "F", "X", "true", "false", "identifier", "("});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(Lexer(text).run()).run(); }

// ---------------------------------------------------------------------------
// Rewriting

namespace {

Formula nnf_neg(const Formula& f);

Formula nnf_pos(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
      return f;
    case Kind::Not:
      return nnf_neg(f.lhs());
    case Kind::And:
      return Formula::conjunction(nnf_pos(f.lhs()), nnf_pos(f.rhs()));
    case Kind::Or:
      return Formula::disjunction(nnf_pos(f.lhs()), nnf_pos(f.rhs()));
    case Kind::Implies:
      return Formula::disjunction(nnf_neg(f.lhs()), nnf_pos(f.rhs()));
    case Kind::Next:
      return Formula::next(nnf_pos(f.lhs()));
    case Kind::Until:
      return Formula::until(nnf_pos(f.lhs()), nnf_pos(f.rhs()));
    case Kind::Release:
      return Formula::release(nnf_pos(f.lhs()), nnf_pos(f.rhs()));
    case Kind::Globally:
      return Formula::globally(nnf_pos(f.lhs()));
    case Kind::Finally:
      return Formula::finally(nnf_pos(f.lhs()));
  }
  return f;
}

Formula nnf_neg(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
      return Formula::bottom();
    case Kind::False:
      return Formula::top();
    case Kind::Atom:
      return Formula::negation(f);
    case Kind::Not:
      return nnf_pos(f.lhs());
    case Kind::And:
      return Formula::disjunction(nnf_neg(f.lhs()), nnf_neg(f.rhs()));
    case Kind::Or:
      return Formula::conjunction(nnf_neg(f.lhs()), nnf_neg(f.rhs()));
    case Kind::Implies:
      return Formula::conjunction(nnf_pos(f.lhs()), nnf_neg(f.rhs()));
    case Kind::Next:
      return Formula::next(nnf_neg(f.lhs()));
    case Kind::Until:
      return Formula::release(nnf_neg(f.lhs()), nnf_neg(f.rhs()));
    case Kind::Release:
      return Formula::until(nnf_neg(f.lhs()), nnf_neg(f.rhs()));
    case Kind::Globally:
      return Formula::finally(nnf_neg(f.lhs()));
    case Kind::Finally:
      return Formula::globally(nnf_neg(f.lhs()));
  }
  return f;
}

void collect_atoms(const Formula& f, std::set<Proposition>& out) {
  if (f.kind() == Kind::Atom) {
    out.insert(f.proposition());
    return;
  }
  if (f.is_unary() || f.is_binary()) collect_atoms(f.lhs(), out);
  if (f.is_binary()) collect_atoms(f.rhs(), out);
}

Formula rebuild(const Formula& f, Formula lhs) {
  switch (f.kind()) {
    case Kind::Not:
      return Formula::negation(std::move(lhs));
    case Kind::Next:
      return Formula::next(std::move(lhs));
    case Kind::Globally:
      return Formula::globally(std::move(lhs));
    case Kind::Finally:
      return Formula::finally(std::move(lhs));
    default:
      throw std::logic_error("rebuild: not a unary node");
  }
}

Formula rebuild(const Formula& f, Formula lhs, Formula rhs) {
  switch (f.kind()) {
    case Kind::And:
      return Formula::conjunction(std::move(lhs), std::move(rhs));
    case Kind::Or:
      return Formula::disjunction(std::move(lhs), std::move(rhs));
    case Kind::Implies:
      return Formula::implication(std::move(lhs), std::move(rhs));
    case Kind::Until:
      return Formula::until(std::move(lhs), std::move(rhs));
    case Kind::Release:
      return Formula::release(std::move(lhs), std::move(rhs));
    default:
      throw std::logic_error("rebuild: not a binary node");
  }
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf_pos(f); }

std::set<Proposition> atoms(const Formula& f) {
  std::set<Proposition> out;
  collect_atoms(f, out);
  return out;
}

Formula substitute(const Formula& f,
                   const std::vector<std::pair<std::string, Proposition>>& binding) {
  if (f.kind() == Kind::Atom) {
    for (const auto& [name, p] : binding)
      if (name == f.proposition().grounded()) return Formula::atom(p);
    return f;
  }
  if (f.is_unary()) return rebuild(f, substitute(f.lhs(), binding));
  if (f.is_binary()) return rebuild(f, substitute(f.lhs(), binding), substitute(f.rhs(), binding));
  return f;
}

// ---------------------------------------------------------------------------
// Lasso semantics

namespace {

/// Postorder node table evaluated over positions of a lasso whose letters
/// are bit masks over `alphabet`.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const std::vector<std::string>& alphabet) {
    compile(f, alphabet);
  }

  bool eval(const std::vector<std::uint32_t>& word, std::size_t loop_start) {
    const std::size_t n = word.size();
    values_.assign(nodes_.size() * n, 0);
    auto succ = [&](std::size_t i) { return i + 1 < n ? i + 1 : loop_start; };
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const auto& node = nodes_[k];
      std::uint8_t* v = &values_[k * n];
      const std::uint8_t* a = node.lhs >= 0 ? &values_[node.lhs * n] : nullptr;
      const std::uint8_t* b = node.rhs >= 0 ? &values_[node.rhs * n] : nullptr;
      switch (node.kind) {
        case Kind::True:
          std::fill(v, v + n, 1);
          break;
        case Kind::False:
          break;
        case Kind::Atom:
          for (std::size_t i = 0; i < n; ++i)
            v[i] = node.atom >= 0 && ((word[i] >> node.atom) & 1U);
          break;
        case Kind::Not:
          for (std::size_t i = 0; i < n; ++i) v[i] = !a[i];
          break;
        case Kind::And:
          for (std::size_t i = 0; i < n; ++i) v[i] = a[i] && b[i];
          break;
        case Kind::Or:
          for (std::size_t i = 0; i < n; ++i) v[i] = a[i] || b[i];
          break;
        case Kind::Implies:
          for (std::size_t i = 0; i < n; ++i) v[i] = !a[i] || b[i];
          break;
        case Kind::Next:
          for (std::size_t i = 0; i < n; ++i) v[i] = a[succ(i)];
          break;
        case Kind::Until:
          fixpoint(v, n, false, succ, [&](std::size_t i, bool nx) { return b[i] || (a[i] && nx); });
          break;
        case Kind::Release:
          fixpoint(v, n, true, succ, [&](std::size_t i, bool nx) { return b[i] && (a[i] || nx); });
          break;
        case Kind::Globally:
          fixpoint(v, n, true, succ, [&](std::size_t i, bool nx) { return a[i] && nx; });
          break;
        case Kind::Finally:
          fixpoint(v, n, false, succ, [&](std::size_t i, bool nx) { return a[i] || nx; });
          break;
      }
    }
    return values_[(nodes_.size() - 1) * n] != 0;
  }

 private:
  struct Node {
    Kind kind;
    int atom = -1;
    int lhs = -1;
    int rhs = -1;
  };

  int compile(const Formula& f, const std::vector<std::string>& alphabet) {
    Node node{f.kind()};
    if (f.kind() == Kind::Atom) {
      auto it = std::find(alphabet.begin(), alphabet.end(), f.proposition().grounded());
      node.atom = it == alphabet.end() ? -1 : static_cast<int>(it - alphabet.begin());
    }
    if (f.is_unary() || f.is_binary()) node.lhs = compile(f.lhs(), alphabet);
    if (f.is_binary()) node.rhs = compile(f.rhs(), alphabet);
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
  }

  template <typename Succ, typename Step>
  static void fixpoint(std::uint8_t* v, std::size_t n, bool greatest, Succ succ, Step step) {
    std::fill(v, v + n, greatest ? 1 : 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t j = n; j-- > 0;) {
        const std::uint8_t nv = step(j, v[succ(j)] != 0);
        if (nv != v[j]) {
          v[j] = nv;
          changed = true;
        }
      }
    }
  }

  std::vector<Node> nodes_;
  std::vector<std::uint8_t> values_;
};

std::vector<std::string> sorted_alphabet(const Formula& f) {
  std::vector<std::string> out;
  for (const auto& p : atoms(f)) out.push_back(p.grounded());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::uint32_t encode(const Letter& letter, const std::vector<std::string>& alphabet) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (letter.count(alphabet[i])) mask |= 1U << i;
  return mask;
}

}  // namespace

bool eval_lasso(const Formula& f, const LassoWord& w) {
  if (w.loop.empty()) throw std::invalid_argument("lasso loop must be nonempty");
  const auto alphabet = sorted_alphabet(f);
  if (alphabet.size() > 32) throw BudgetExceeded("eval_lasso supports at most 32 atoms");
  std::vector<std::uint32_t> word;
  word.reserve(w.stem.size() + w.loop.size());
  for (const auto& l : w.stem) word.push_back(encode(l, alphabet));
  for (const auto& l : w.loop) word.push_back(encode(l, alphabet));
  CompiledFormula compiled(f, alphabet);
  return compiled.eval(word, w.stem.size());
}

// ---------------------------------------------------------------------------
// Progression

namespace {

void flatten(const Formula& f, Kind k, std::map<std::string, Formula>& out) {
  if (f.kind() == k) {
    flatten(f.lhs(), k, out);
    flatten(f.rhs(), k, out);
  } else {
    out.emplace(f.to_string(), f);
  }
}

Formula simplify_junction(Kind k, const Formula& a, const Formula& b) {
  const Kind absorbing = k == Kind::And ? Kind::False : Kind::True;
  const Kind neutral = k == Kind::And ? Kind::True : Kind::False;
  if (a.kind() == absorbing || b.kind() == absorbing) return a.kind() == absorbing ? a : b;
  if (a.kind() == neutral) return b;
  if (b.kind() == neutral) return a;
  std::map<std::string, Formula> parts;
  flatten(a, k, parts);
  flatten(b, k, parts);
  std::optional<Formula> out;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (!out) {
      out = it->second;
    } else {
      out = k == Kind::And ? Formula::conjunction(it->second, *out)
                           : Formula::disjunction(it->second, *out);
    }
  }
  return *out;
}

Formula simplify_not(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
      return Formula::bottom();
    case Kind::False:
      return Formula::top();
    case Kind::Not:
      return f.lhs();
    default:
      return Formula::negation(f);
  }
}

}  // namespace

Formula progress(const Formula& f, const Letter& letter) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
      return f;
    case Kind::Atom:
      return letter.count(f.proposition().grounded()) ? Formula::top() : Formula::bottom();
    case Kind::Not:
      return simplify_not(progress(f.lhs(), letter));
    case Kind::And:
      return simplify_junction(Kind::And, progress(f.lhs(), letter), progress(f.rhs(), letter));
    case Kind::Or:
      return simplify_junction(Kind::Or, progress(f.lhs(), letter), progress(f.rhs(), letter));
    case Kind::Implies:
      return simplify_junction(Kind::Or, simplify_not(progress(f.lhs(), letter)),
                               progress(f.rhs(), letter));
    case Kind::Next:
      return f.lhs();
    case Kind::Globally:
      return simplify_junction(Kind::And, progress(f.lhs(), letter), f);
    case Kind::Finally:
      return simplify_junction(Kind::Or, progress(f.lhs(), letter), f);
    case Kind::Until:
      return simplify_junction(
          Kind::Or, progress(f.rhs(), letter),
          simplify_junction(Kind::And, progress(f.lhs(), letter), f));
    case Kind::Release:
      return simplify_junction(
          Kind::And, progress(f.rhs(), letter),
          simplify_junction(Kind::Or, progress(f.lhs(), letter), f));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Bounded three-valued oracle

namespace {

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > SIZE_MAX / a) return SIZE_MAX;
  return a * b;
}

std::size_t words_up_to(std::size_t letters, std::size_t min_len, std::size_t max_len) {
  std::size_t total = 0;
  std::size_t count = 1;
  for (std::size_t len = 0; len <= max_len; ++len) {
    if (len >= min_len) total = std::min<std::size_t>(SIZE_MAX - 1, total + count);
    count = saturating_mul(count, letters);
  }
  return total;
}

// Advances `digits` (base `radix`) like an odometer; false once it wraps.
bool increment(std::vector<std::uint32_t>& digits, std::uint32_t radix) {
  for (auto& d : digits) {
    if (++d < radix) return true;
    d = 0;
  }
  return false;
}

}  // namespace

VerdictOracle::VerdictOracle(Formula f, OracleBounds bounds)
    : formula_(std::move(f)), bounds_(bounds), alphabet_(sorted_alphabet(formula_)) {
  if (bounds_.loop < 1) throw std::invalid_argument("oracle loop bound must be >= 1");
  if (alphabet_.size() >= 16)
    throw BudgetExceeded("alphabet of " + std::to_string(alphabet_.size()) +
                         " atoms is too large for exhaustive enumeration");
  const std::size_t letters = std::size_t{1} << alphabet_.size();
  const std::size_t lassos = saturating_mul(words_up_to(letters, 0, bounds_.stem),
                                            words_up_to(letters, 1, bounds_.loop));
  if (lassos > bounds_.budget)
    throw BudgetExceeded("oracle would enumerate " + std::to_string(lassos) +
                         " lasso extensions over " + std::to_string(alphabet_.size()) +
                         " atoms (budget " + std::to_string(bounds_.budget) + ")");
}

Verdict VerdictOracle::operator()(const std::vector<Letter>& prefix) {
  Formula residual = formula_;
  for (const auto& letter : prefix) residual = progress(residual, letter);
  return of_residual(residual);
}

Verdict VerdictOracle::of_residual(const Formula& residual) {
  if (residual.kind() == Kind::True) return Verdict::Top;
  if (residual.kind() == Kind::False) return Verdict::Bottom;
  const std::string key = residual.to_string();
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  const auto radix = static_cast<std::uint32_t>(1U << alphabet_.size());
  CompiledFormula compiled(residual, alphabet_);
  bool some_sat = false;
  bool some_unsat = false;
  std::vector<std::uint32_t> word;
  for (std::size_t ws = 0; ws <= bounds_.stem && !(some_sat && some_unsat); ++ws) {
    for (std::size_t vs = 1; vs <= bounds_.loop && !(some_sat && some_unsat); ++vs) {
      std::vector<std::uint32_t> stem(ws, 0);
      do {
        std::vector<std::uint32_t> loop(vs, 0);
        do {
          word.assign(stem.begin(), stem.end());
          word.insert(word.end(), loop.begin(), loop.end());
          if (compiled.eval(word, ws))
            some_sat = true;
          else
            some_unsat = true;
        } while (!(some_sat && some_unsat) && increment(loop, radix));
      } while (!(some_sat && some_unsat) && increment(stem, radix));
    }
  }
  const Verdict v = !some_sat ? Verdict::Bottom : !some_unsat ? Verdict::Top : Verdict::Inconclusive;
  memo_.emplace(key, v);
  return v;
}

Verdict verdict_oracle(const Formula& f, const std::vector<Letter>& prefix, OracleBounds bounds) {
  VerdictOracle oracle(f, bounds);
  return oracle(prefix);
}

}  // namespace rvheal::ltl
