#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "potluck/simplex.hpp"

namespace potluck {

enum class NodeKind : std::uint8_t { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func : std::uint8_t { Min, Max, Abs, Exp, Log, Sin, Cos };

std::string_view func_name(Func f);
std::size_t func_arity(Func f);

/// Syntax tree node. Equality compares structure only; the source span is
/// carried for error messages and ignored by operator==.
struct Node {
  NodeKind kind = NodeKind::Number;
  double value = 0.0;       // Number
  std::size_t var = 0;      // Var
  Func func = Func::Min;    // Call
  std::vector<Node> children;

  std::size_t pos = 0;
  std::size_t len = 0;

  friend bool operator==(const Node& a, const Node& b);
};

/// A parsed reward expression over the coordinates u0..ud of a DistPoint.
///
/// Grammar (precedence ^ > unary minus > * / > + -, ^ right-associative):
///
///   expr  := term (('+'|'-') term)*
///   term  := unary (('*'|'/') unary)*
///   unary := '-' unary | power
///   power := atom ('^' unary)?
///   atom  := NUMBER | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')'
///
/// The tree is compiled to a postfix program at construction; `eval` runs
/// that program. Domain errors (x/0, log(x<=0), 0^negative, fractional power
/// of a negative base) throw EvalError naming the offending sub-expression.
class Expr {
 public:
  Expr(Node root, std::size_t dim, std::string source);

  double eval(const DistPoint& u) const;
  double eval(std::span<const double> u) const;

  const Node& root() const noexcept { return root_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& source() const noexcept { return source_; }

  friend bool operator==(const Expr& a, const Expr& b) {
    return a.dim_ == b.dim_ && a.root_ == b.root_;
  }

 private:
  struct Instr {
    NodeKind kind;
    Func func;
    double value;
    std::size_t var;
    std::size_t pos;
    std::size_t len;
  };

  void compile(const Node& n);
  [[noreturn]] void domain_error(const Instr& in, const std::string& what) const;

  Node root_;
  std::size_t dim_;
  std::string source_;
  std::vector<Instr> program_;
  std::size_t max_stack_ = 0;
};

// Parses `src` as an expression over u0..ud. Throws ParseError with the byte
// offset and the set of expected tokens on failure.
Expr parse(std::string_view src, std::size_t d);

// Fully parenthesized rendering that re-parses to the same tree.
std::string to_string(const Node& n);
inline std::string to_string(const Expr& e) { return to_string(e.root()); }

}  // namespace potluck
