#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "hcert/errors.hpp"

namespace hcert::expr {

/// Malformed expression text; position() is a 0-based byte offset.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InputError(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A symbol that is neither the free variable nor a whitelisted function.
class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(const std::string& what, std::size_t position, std::string name)
      : ParseError(what, position), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Evaluation left the domain of an operation (sqrt/log of a negative
/// number, division by zero, non-finite result).
class EvalError : public DomainError {
 public:
  EvalError(const std::string& what, std::string subexpression)
      : DomainError(what), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

struct Node;

/// Immutable arithmetic expression in a single free variable.
///
/// Grammar (lowest to highest precedence): `+ -` (left), `* /` (left),
/// unary `-`, `^` (right-associative). Functions: sin cos tan exp log sqrt abs.
/// Copies share the tree and are safe to evaluate concurrently.
class TimeExpr {
 public:
  /// The constant 0 in variable "t".
  TimeExpr();

  static TimeExpr parse(std::string_view text, std::string_view var_name = "t");
  static TimeExpr constant(double value, std::string_view var_name = "t");

  double eval(double value) const;
  double operator()(double value) const { return eval(value); }

  /// Fully parenthesized text that parses back to an identical tree.
  std::string to_string() const;

  const std::string& var_name() const noexcept { return var_; }
  bool is_constant() const;

  friend bool operator==(const TimeExpr& a, const TimeExpr& b) {
    return a.var_ == b.var_ && a.to_string() == b.to_string();
  }

 private:
  TimeExpr(std::shared_ptr<const Node> root, std::string var);

  std::shared_ptr<const Node> root_;
  std::string var_;
};

inline TimeExpr parse(std::string_view text, std::string_view var_name) {
  return TimeExpr::parse(text, var_name);
}
inline double eval(const TimeExpr& e, double value) { return e.eval(value); }
inline std::string print(const TimeExpr& e) { return e.to_string(); }

}  // namespace hcert::expr
