#include "hcert/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

namespace hcert::expr {

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

enum class Kind { Literal, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Node {
  Kind kind = Kind::Literal;
  double value = 0.0;
  Func func = Func::Sin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

constexpr std::array<std::pair<std::string_view, Func>, 7> kFunctions{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"tan", Func::Tan},
    {"exp", Func::Exp},
    {"log", Func::Log},
    {"sqrt", Func::Sqrt},
    {"abs", Func::Abs},
}};

std::optional<Func> lookup_function(std::string_view name) {
  for (const auto& [n, f] : kFunctions) {
    if (n == name) return f;
  }
  return std::nullopt;
}

std::string_view function_name(Func f) {
  for (const auto& [n, g] : kFunctions) {
    if (g == f) return n;
  }
  return "?";
}

NodePtr make_literal(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Literal;
  n->value = v;
  return n;
}

NodePtr make_var() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  return n;
}

NodePtr make_unary(Kind k, NodePtr child) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(child);
  return n;
}

NodePtr make_binary(Kind k, NodePtr l, NodePtr r) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

NodePtr make_call(Func f, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->func = f;
  n->lhs = std::move(arg);
  return n;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render(const Node& n, const std::string& var) {
  switch (n.kind) {
    case Kind::Literal:
      return n.value < 0.0 ? "(-" + format_double(-n.value) + ")" : format_double(n.value);
    case Kind::Var:
      return var;
    case Kind::Neg:
      return "(-" + render(*n.lhs, var) + ")";
    case Kind::Call:
      return std::string(function_name(n.func)) + "(" + render(*n.lhs, var) + ")";
    default:
      break;
  }
  char op = '?';
  switch (n.kind) {
    case Kind::Add: op = '+'; break;
    case Kind::Sub: op = '-'; break;
    case Kind::Mul: op = '*'; break;
    case Kind::Div: op = '/'; break;
    case Kind::Pow: op = '^'; break;
    default: break;
  }
  return "(" + render(*n.lhs, var) + op + render(*n.rhs, var) + ")";
}

class Parser {
 public:
  Parser(std::string_view text, std::string_view var) : text_(text), var_(var) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    NodePtr n = parse_sum();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at position " + std::to_string(pos_) + " in \"" +
                         std::string(text_) + "\"",
                     pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(Kind::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = make_binary(Kind::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(Kind::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_binary(Kind::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_unary(Kind::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    // Exponent may carry its own sign: 2^-t == 2^(-t); right-associative.
    if (accept('^')) return make_binary(Kind::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string lexeme(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(lexeme.c_str(), &end);
    if (end != lexeme.c_str() + lexeme.size()) {
      pos_ = start;
      fail("malformed number '" + lexeme + "'");
    }
    if (!std::isfinite(v)) {
      pos_ = start;
      fail("number out of range '" + lexeme + "'");
    }
    return make_literal(v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    if (name == var_) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '(') fail("variable '" + name + "' is not callable");
      return make_var();
    }
    if (auto f = lookup_function(name)) {
      expect('(');
      NodePtr arg = parse_sum();
      expect(')');
      return make_call(*f, arg);
    }
    throw UnknownIdentifierError("unknown identifier '" + name + "' at position " +
                                     std::to_string(start) + " in \"" + std::string(text_) + "\"",
                                 start, name);
  }

  std::string_view text_;
  std::string_view var_;
  std::size_t pos_ = 0;
};

[[noreturn]] void domain_fail(const Node& n, const std::string& var, const std::string& why) {
  const std::string sub = render(n, var);
  throw EvalError("domain error in '" + sub + "': " + why, sub);
}

double evaluate(const Node& n, const std::string& var, double x) {
  double r = 0.0;
  switch (n.kind) {
    case Kind::Literal:
      return n.value;
    case Kind::Var:
      return x;
    case Kind::Neg:
      return -evaluate(*n.lhs, var, x);
    case Kind::Add:
      r = evaluate(*n.lhs, var, x) + evaluate(*n.rhs, var, x);
      break;
    case Kind::Sub:
      r = evaluate(*n.lhs, var, x) - evaluate(*n.rhs, var, x);
      break;
    case Kind::Mul:
      r = evaluate(*n.lhs, var, x) * evaluate(*n.rhs, var, x);
      break;
    case Kind::Div: {
      const double num = evaluate(*n.lhs, var, x);
      const double den = evaluate(*n.rhs, var, x);
      if (den == 0.0) domain_fail(n, var, "division by zero");
      r = num / den;
      break;
    }
    case Kind::Pow: {
      const double base = evaluate(*n.lhs, var, x);
      const double expo = evaluate(*n.rhs, var, x);
      if (base < 0.0 && expo != std::floor(expo)) {
        domain_fail(n, var, "negative base with non-integer exponent");
      }
      if (base == 0.0 && expo < 0.0) domain_fail(n, var, "zero raised to a negative power");
      r = std::pow(base, expo);
      break;
    }
    case Kind::Call: {
      const double a = evaluate(*n.lhs, var, x);
      switch (n.func) {
        case Func::Sin: r = std::sin(a); break;
        case Func::Cos: r = std::cos(a); break;
        case Func::Tan: r = std::tan(a); break;
        case Func::Exp: r = std::exp(a); break;
        case Func::Log:
          if (!(a > 0.0)) domain_fail(n, var, "log of a non-positive number");
          r = std::log(a);
          break;
        case Func::Sqrt:
          if (a < 0.0) domain_fail(n, var, "sqrt of a negative number");
          r = std::sqrt(a);
          break;
        case Func::Abs: r = std::abs(a); break;
      }
      break;
    }
  }
  if (!std::isfinite(r)) domain_fail(n, var, "non-finite result");
  return r;
}

bool depends_on_var(const Node& n) {
  if (n.kind == Kind::Var) return true;
  if (n.lhs && depends_on_var(*n.lhs)) return true;
  if (n.rhs && depends_on_var(*n.rhs)) return true;
  return false;
}

}  // namespace

TimeExpr::TimeExpr() : TimeExpr(make_literal(0.0), "t") {}

TimeExpr::TimeExpr(std::shared_ptr<const Node> root, std::string var)
    : root_(std::move(root)), var_(std::move(var)) {}

namespace {

bool valid_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return !lookup_function(s);
}

}  // namespace

TimeExpr TimeExpr::parse(std::string_view text, std::string_view var_name) {
  if (!valid_identifier(var_name)) {
    throw InputError("invalid variable name '" + std::string(var_name) + "'");
  }
  Parser p(text, var_name);
  return TimeExpr(p.parse_all(), std::string(var_name));
}

TimeExpr TimeExpr::constant(double value, std::string_view var_name) {
  if (!valid_identifier(var_name)) {
    throw InputError("invalid variable name '" + std::string(var_name) + "'");
  }
  if (!std::isfinite(value)) throw InputError("constant expression must be finite");
  return TimeExpr(make_literal(value), std::string(var_name));
}

double TimeExpr::eval(double value) const { return evaluate(*root_, var_, value); }

std::string TimeExpr::to_string() const { return render(*root_, var_); }

bool TimeExpr::is_constant() const { return !depends_on_var(*root_); }

}  // namespace hcert::expr
