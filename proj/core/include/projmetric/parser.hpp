#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "projmetric/expr.hpp"

namespace projmetric {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, DivisionByZero };
  ParseError(Kind kind, std::size_t position, const std::string& message);
  Kind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

// Named expressions usable as identifiers (derivative aliases, defined
// functions, fixed parameters).
using Aliases = std::map<std::string, Expr, std::less<>>;

// Grammar: integers, identifiers (coordinates, function symbols, parameters,
// aliases), + - * / ^ with integer exponents, parentheses.
Expr parse_expression(std::string_view text, const Chart& chart, const Aliases* aliases = nullptr);

}  // namespace projmetric
