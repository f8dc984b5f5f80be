#include "potluck/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "potluck/csv.hpp"
#include "potluck/error.hpp"

namespace potluck {

namespace {

constexpr std::size_t kMaxDepth = 200;

struct FuncEntry {
  std::string_view name;
  Func func;
  std::size_t arity;
};

constexpr std::array<FuncEntry, 7> kFuncs{{
    {"min", Func::Min, 2},
    {"max", Func::Max, 2},
    {"abs", Func::Abs, 1},
    {"exp", Func::Exp, 1},
    {"log", Func::Log, 1},
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
}};

class Parser {
 public:
  Parser(std::string_view src, std::size_t d) : src_(src), d_(d) {}

  Node parse_all() {
    skip_ws();
    Node n = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character", "operator, ')' or end of input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::string_view expected) const {
    std::ostringstream os;
    os << "syntax error at offset " << pos_ << ": " << msg;
    if (pos_ < src_.size()) os << " '" << src_[pos_] << "'";
    os << "; expected " << expected;
    throw ParseError(os.str(), pos_);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxDepth) p_.fail("expression nested too deeply", "shallower nesting");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  static Node binary(NodeKind k, Node lhs, Node rhs) {
    Node n;
    n.kind = k;
    n.pos = lhs.pos;
    n.len = rhs.pos + rhs.len - lhs.pos;
    n.children.push_back(std::move(lhs));
    n.children.push_back(std::move(rhs));
    return n;
  }

  Node expr() {
    DepthGuard guard(*this);
    Node lhs = term();
    for (;;) {
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      Node rhs = term();
      lhs = binary(c == '+' ? NodeKind::Add : NodeKind::Sub, std::move(lhs), std::move(rhs));
    }
  }

  Node term() {
    Node lhs = unary();
    for (;;) {
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      Node rhs = unary();
      lhs = binary(c == '*' ? NodeKind::Mul : NodeKind::Div, std::move(lhs), std::move(rhs));
    }
  }

  Node unary() {
    if (peek() == '-') {
      DepthGuard guard(*this);
      const std::size_t start = pos_++;
      Node operand = unary();
      Node n;
      n.kind = NodeKind::Neg;
      n.pos = start;
      n.len = operand.pos + operand.len - start;
      n.children.push_back(std::move(operand));
      return n;
    }
    return power();
  }

  Node power() {
    Node base = atom();
    if (accept('^')) {
      Node exponent = unary();
      return binary(NodeKind::Pow, std::move(base), std::move(exponent));
    }
    return base;
  }

  Node atom() {
    const char c = peek();
    const std::size_t start = pos_;
    if (c == '(') {
      ++pos_;
      Node inner = expr();
      if (!accept(')')) fail("unbalanced parenthesis", "')'");
      inner.pos = start;
      inner.len = pos_ - start;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(c == '\0' ? "unexpected end of input" : "unexpected character",
         "number, variable, function call, '(' or '-'");
  }

  Node number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      fail("malformed number", "digit");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent", "digit");
    }
    Node n;
    n.kind = NodeKind::Number;
    n.pos = start;
    n.len = pos_ - start;
    const char* first = src_.data() + start;
    auto [ptr, ec] = std::from_chars(first, src_.data() + pos_, n.value);
    if (ec != std::errc{} || ptr != src_.data() + pos_ || !std::isfinite(n.value)) {
      pos_ = start;
      fail("number out of range", "finite number");
    }
    return n;
  }

  Node identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name.size() == 2 && name[0] == 'u' && std::isdigit(static_cast<unsigned char>(name[1]))) {
      const std::size_t index = static_cast<std::size_t>(name[1] - '0');
      if (index > d_) {
        std::ostringstream os;
        os << "variable index out of range: " << name << " at offset " << start
           << " (dimension d = " << d_ << " allows u0..u" << d_ << ")";
        throw ParseError(os.str(), start);
      }
      Node n;
      n.kind = NodeKind::Var;
      n.var = index;
      n.pos = start;
      n.len = name.size();
      return n;
    }

    for (const auto& entry : kFuncs) {
      if (entry.name != name) continue;
      if (!accept('(')) fail("function name must be followed by an argument list", "'('");
      Node call;
      call.kind = NodeKind::Call;
      call.func = entry.func;
      call.pos = start;
      do {
        call.children.push_back(expr());
      } while (accept(','));
      if (!accept(')')) fail("unterminated argument list", "',' or ')'");
      if (call.children.size() != entry.arity) {
        std::ostringstream os;
        os << "function " << name << " takes " << entry.arity << " argument"
           << (entry.arity == 1 ? "" : "s") << ", got " << call.children.size();
        throw ParseError(os.str(), start);
      }
      call.len = pos_ - start;
      return call;
    }

    std::ostringstream os;
    os << "unknown identifier '" << name << "' at offset " << start
       << "; expected u0..u" << d_ << " or one of min, max, abs, exp, log, sin, cos";
    throw ParseError(os.str(), start);
  }

  std::string_view src_;
  std::size_t d_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
};

char op_char(NodeKind k) {
  switch (k) {
    case NodeKind::Add: return '+';
    case NodeKind::Sub: return '-';
    case NodeKind::Mul: return '*';
    case NodeKind::Div: return '/';
    case NodeKind::Pow: return '^';
    default: return '?';
  }
}

}  // namespace

std::string_view func_name(Func f) {
  for (const auto& e : kFuncs)
    if (e.func == f) return e.name;
  return "?";
}

std::size_t func_arity(Func f) {
  for (const auto& e : kFuncs)
    if (e.func == f) return e.arity;
  return 0;
}

bool operator==(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Number: return a.value == b.value;
    case NodeKind::Var: return a.var == b.var;
    case NodeKind::Call:
      if (a.func != b.func) return false;
      break;
    default: break;
  }
  return a.children == b.children;
}

Expr parse(std::string_view src, std::size_t d) {
  if (src.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError("empty expression; expected number, variable, function call, '(' or '-'", 0);
  }
  Parser p(src, d);
  return Expr(p.parse_all(), d, std::string(src));
}

std::string to_string(const Node& n) {
  switch (n.kind) {
    case NodeKind::Number: return format_real(n.value);
    case NodeKind::Var: return "u" + std::to_string(n.var);
    case NodeKind::Neg: return "(-" + to_string(n.children[0]) + ")";
    case NodeKind::Call: {
      std::string s(func_name(n.func));
      s += '(';
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) s += ", ";
        s += to_string(n.children[i]);
      }
      return s + ')';
    }
    default:
      return "(" + to_string(n.children[0]) + " " + op_char(n.kind) + " " +
             to_string(n.children[1]) + ")";
  }
}

Expr::Expr(Node root, std::size_t dim, std::string source)
    : root_(std::move(root)), dim_(dim), source_(std::move(source)) {
  if (source_.empty()) source_ = to_string(root_);
  compile(root_);
  // Stack depth of a postfix program: simulate pushes and pops.
  std::size_t depth = 0;
  for (const auto& in : program_) {
    switch (in.kind) {
      case NodeKind::Number:
      case NodeKind::Var: ++depth; break;
      case NodeKind::Neg: break;
      case NodeKind::Call: depth -= func_arity(in.func) - 1; break;
      default: --depth; break;
    }
    max_stack_ = std::max(max_stack_, depth);
  }
}

void Expr::compile(const Node& n) {
  for (const auto& c : n.children) compile(c);
  program_.push_back(Instr{n.kind, n.func, n.value, n.var, n.pos, n.len});
  if (n.kind == NodeKind::Var && n.var > dim_) {
    throw ParseError("variable u" + std::to_string(n.var) + " exceeds dimension " +
                         std::to_string(dim_),
                     n.pos);
  }
}

void Expr::domain_error(const Instr& in, const std::string& what) const {
  std::string sub = (in.pos + in.len <= source_.size() && in.len > 0)
                        ? source_.substr(in.pos, in.len)
                        : source_;
  throw EvalError(what + " in '" + sub + "' (expression '" + source_ + "')");
}

double Expr::eval(const DistPoint& u) const { return eval(u.weights()); }

double Expr::eval(std::span<const double> u) const {
  if (u.size() != dim_ + 1) {
    throw ValidationError("expression over u0..u" + std::to_string(dim_) +
                          " evaluated at a point of size " + std::to_string(u.size()));
  }
  std::array<double, 64> small{};
  std::vector<double> large;
  double* stack = small.data();
  if (max_stack_ > small.size()) {
    large.resize(max_stack_);
    stack = large.data();
  }
  std::size_t top = 0;

  for (const auto& in : program_) {
    double r = 0.0;
    switch (in.kind) {
      case NodeKind::Number: stack[top++] = in.value; continue;
      case NodeKind::Var: stack[top++] = u[in.var]; continue;
      case NodeKind::Neg: stack[top - 1] = -stack[top - 1]; continue;
      case NodeKind::Call: {
        if (func_arity(in.func) == 2) {
          const double b = stack[--top];
          const double a = stack[top - 1];
          r = in.func == Func::Min ? std::min(a, b) : std::max(a, b);
        } else {
          const double a = stack[top - 1];
          switch (in.func) {
            case Func::Abs: r = std::abs(a); break;
            case Func::Exp: r = std::exp(a); break;
            case Func::Log:
              if (!(a > 0.0)) domain_error(in, "log of non-positive value " + format_real(a));
              r = std::log(a);
              break;
            case Func::Sin: r = std::sin(a); break;
            case Func::Cos: r = std::cos(a); break;
            default: break;
          }
        }
        break;
      }
      default: {
        const double b = stack[--top];
        const double a = stack[top - 1];
        switch (in.kind) {
          case NodeKind::Add: r = a + b; break;
          case NodeKind::Sub: r = a - b; break;
          case NodeKind::Mul: r = a * b; break;
          case NodeKind::Div:
            if (b == 0.0) domain_error(in, "division by zero");
            r = a / b;
            break;
          case NodeKind::Pow:
            if (a == 0.0 && b < 0.0) domain_error(in, "zero raised to a negative power");
            if (a < 0.0 && b != std::trunc(b)) {
              domain_error(in, "negative base raised to a non-integer power");
            }
            r = std::pow(a, b);
            break;
          default: break;
        }
        break;
      }
    }
    if (!std::isfinite(r)) domain_error(in, "non-finite result");
    stack[top - 1] = r;
  }
  return stack[0];
}

}  // namespace potluck
