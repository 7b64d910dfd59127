#include "projmetric/parser.hpp"

#include <cctype>

namespace projmetric {

ParseError::ParseError(Kind kind, std::size_t position, const std::string& message)
    : std::runtime_error("at position " + std::to_string(position) + ": " + message), kind_(kind), position_(position) {}

namespace {

class Parser {
 public:
  Parser(std::string_view s, const Chart& chart, const Aliases* aliases) : s_(s), chart_(chart), aliases_(aliases) {}

  Expr parse() {
    skip();
    if (at_end()) fail("empty expression");
    Expr e = sum();
    skip();
    if (!at_end()) fail(std::string("unexpected character '") + s_[pos_] + "'");
    return e;
  }

 private:
  std::string_view s_;
  const Chart& chart_;
  const Aliases* aliases_;
  std::size_t pos_ = 0;

  bool at_end() const { return pos_ >= s_.size(); }
  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return at_end() ? '\0' : s_[pos_];
  }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) {
    throw ParseError(ParseError::Kind::Syntax, at, msg);
  }
  [[noreturn]] void fail(const std::string& msg) { fail(msg, pos_); }

  Expr sum() {
    Expr acc = product();
    for (;;) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        acc += product();
      } else if (c == '-') {
        ++pos_;
        acc -= product();
      } else {
        return acc;
      }
    }
  }

  Expr product() {
    Expr acc = unary();
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        acc *= unary();
      } else if (c == '/') {
        std::size_t at = pos_++;
        Expr d = unary();
        if (d.is_zero()) throw ParseError(ParseError::Kind::DivisionByZero, at, "division by zero");
        acc /= d;
      } else {
        return acc;
      }
    }
  }

  Expr unary() {
    char c = peek();
    if (c == '-') {
      ++pos_;
      return -unary();
    }
    if (c == '+') {
      ++pos_;
      return unary();
    }
    return power();
  }

  Expr power() {
    std::size_t base_at = pos_;
    Expr base = primary();
    if (peek() != '^') return base;
    ++pos_;
    skip();
    bool neg = false;
    if (!at_end() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      neg = s_[pos_] == '-';
      ++pos_;
      skip();
    }
    if (at_end() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected integer exponent");
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ - start > 6) fail("exponent too large", start);
    int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
    if (!at_end() && (s_[pos_] == '.' || s_[pos_] == '\'')) fail("exponent must be an integer");
    if (neg) {
      if (base.is_zero()) throw ParseError(ParseError::Kind::DivisionByZero, base_at, "division by zero");
      e = -e;
    }
    if (peek() == '^') fail("chained exponents need parentheses");
    return base.pow(e);
  }

  Expr primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (!at_end() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
        fail("only integer literals are allowed", pos_);
      return Expr(Poly(Int(std::string(s_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (!at_end() && s_[pos_] == '\'') fail("derivative ticks are not allowed in input", pos_);
      return identifier(name, start);
    }
    if (c == '\0') fail("unexpected end of input");
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr identifier(const std::string& name, std::size_t at) {
    if (aliases_) {
      auto it = aliases_->find(name);
      if (it != aliases_->end()) return it->second;
    }
    if (auto i = chart_.coordinate_index(name)) return chart_.x(*i);
    if (auto i = chart_.function_index(name)) return chart_.f(*i);
    if (auto i = chart_.parameter_index(name)) return Expr(Poly::var(chart_.parameter(*i)));
    throw ParseError(ParseError::Kind::UnknownIdentifier, at, "unknown identifier '" + name + "'");
  }
};

}  // namespace

Expr parse_expression(std::string_view text, const Chart& chart, const Aliases* aliases) {
  return Parser(text, chart, aliases).parse();
}

}  // namespace projmetric
