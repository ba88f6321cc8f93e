#pragma once

/**
 * @file expr.hpp
 * @brief Scalar expressions in u and t for user-supplied f(u) and h(t).
 *
 * Grammar (whitespace between tokens is ignored):
 * @code
 *   expr    := term   { ("+" | "-") term }
 *   term    := unary  { ("*" | "/") unary }
 *   unary   := "-" unary | power
 *   power   := primary [ "^" unary ]              (right-associative)
 *   primary := number | "u" | "t" | "(" expr ")"
 *            | name "(" expr { "," expr } ")"
 *   name    := abs | exp | log | sqrt | sin | cos | min | max | pow
 *   number  := digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
 *            | "." digits [ exponent ]
 * @endcode
 * min, max and pow take two arguments, the other functions one.
 */

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tscale {

inline constexpr const char* kExpressionGrammar =
    "  expr    := term { (\"+\" | \"-\") term }\n"
    "  term    := unary { (\"*\" | \"/\") unary }\n"
    "  unary   := \"-\" unary | power\n"
    "  power   := primary [ \"^\" unary ]            (right-associative)\n"
    "  primary := number | \"u\" | \"t\" | \"(\" expr \")\"\n"
    "           | name \"(\" expr { \",\" expr } \")\"\n"
    "  name    := abs | exp | log | sqrt | sin | cos | min | max | pow\n"
    "  number  := digits [ \".\" digits ] [ (\"e\" | \"E\") [ \"+\" | \"-\" ] digits ]\n"
    "  min, max, pow take two arguments; the others take one.\n";

class ExprSyntaxError : public std::invalid_argument {
 public:
  ExprSyntaxError(std::size_t offset, const std::string& what)
      : std::invalid_argument("at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ExprEvalError : public std::domain_error {
 public:
  ExprEvalError(const std::string& what, std::string subexpression)
      : std::domain_error(what + " in '" + subexpression + "'"),
        subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

enum class Variable { u, t };
enum class BinaryOp { add, sub, mul, div, pow };
enum class Function { abs, exp, log, sqrt, sin, cos, min, max, pow };

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { number, variable, negate, binary, call };

  Kind kind = Kind::number;
  double value = 0.0;
  Variable variable = Variable::u;
  BinaryOp op = BinaryOp::add;
  Function function = Function::abs;
  std::vector<ExprNodePtr> args;
};

namespace detail {

struct FunctionInfo {
  std::string_view name;
  Function fn;
  std::size_t arity;
};

inline constexpr FunctionInfo kFunctions[] = {
    {"abs", Function::abs, 1},  {"exp", Function::exp, 1}, {"log", Function::log, 1},
    {"sqrt", Function::sqrt, 1}, {"sin", Function::sin, 1}, {"cos", Function::cos, 1},
    {"min", Function::min, 2},  {"max", Function::max, 2}, {"pow", Function::pow, 2},
};

inline const FunctionInfo& info(Function fn) {
  for (const auto& f : kFunctions)
    if (f.fn == fn) return f;
  throw std::logic_error("unknown function");
}

inline bool same_tree(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprNode::Kind::number:
      return a.value == b.value;
    case ExprNode::Kind::variable:
      return a.variable == b.variable;
    case ExprNode::Kind::negate:
      return same_tree(*a.args[0], *b.args[0]);
    case ExprNode::Kind::binary:
      return a.op == b.op && same_tree(*a.args[0], *b.args[0]) &&
             same_tree(*a.args[1], *b.args[1]);
    case ExprNode::Kind::call:
      if (a.function != b.function || a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!same_tree(*a.args[i], *b.args[i])) return false;
      return true;
  }
  return false;
}

// Binding strength used by the printer; mirrors the parser levels.
inline int precedence(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::binary:
      switch (n.op) {
        case BinaryOp::add:
        case BinaryOp::sub:
          return 1;
        case BinaryOp::mul:
        case BinaryOp::div:
          return 2;
        case BinaryOp::pow:
          return 4;
      }
      return 0;
    case ExprNode::Kind::negate:
      return 3;
    case ExprNode::Kind::number:
      return n.value < 0.0 ? 3 : 5;
    default:
      return 5;
  }
}

inline void print_node(const ExprNode& n, std::string& out);

inline void print_child(const ExprNode& child, int min_prec, std::string& out) {
  const bool paren = precedence(child) < min_prec;
  if (paren) out += '(';
  print_node(child, out);
  if (paren) out += ')';
}

inline void print_node(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case ExprNode::Kind::number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case ExprNode::Kind::variable:
      out += n.variable == Variable::u ? 'u' : 't';
      return;
    case ExprNode::Kind::negate:
      out += '-';
      print_child(*n.args[0], 3, out);
      return;
    case ExprNode::Kind::binary: {
      static constexpr const char* kSymbols[] = {" + ", " - ", " * ", " / ", "^"};
      const int p = precedence(n);
      if (n.op == BinaryOp::pow) {
        print_child(*n.args[0], 5, out);
        out += kSymbols[static_cast<int>(n.op)];
        print_child(*n.args[1], 3, out);
      } else {
        print_child(*n.args[0], p, out);
        out += kSymbols[static_cast<int>(n.op)];
        print_child(*n.args[1], p + 1, out);
      }
      return;
    }
    case ExprNode::Kind::call:
      out += info(n.function).name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

inline std::string print(const ExprNode& n) {
  std::string s;
  print_node(n, s);
  return s;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprNodePtr parse() {
    skip_ws();
    if (pos_ == text_.size()) throw ExprSyntaxError(0, "empty expression");
    auto e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') throw ExprSyntaxError(pos_, "unbalanced ')'");
      throw ExprSyntaxError(pos_, "unexpected character '" + std::string(1, text_[pos_]) + "'");
    }
    return e;
  }

 private:
  static ExprNodePtr make_binary(BinaryOp op, ExprNodePtr l, ExprNodePtr r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::binary;
    n->op = op;
    n->args = {std::move(l), std::move(r)};
    return n;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char ch) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprNodePtr parse_expr() {
    auto lhs = parse_term();
    while (true) {
      if (accept('+'))
        lhs = make_binary(BinaryOp::add, lhs, parse_term());
      else if (accept('-'))
        lhs = make_binary(BinaryOp::sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  ExprNodePtr parse_term() {
    auto lhs = parse_unary();
    while (true) {
      if (accept('*'))
        lhs = make_binary(BinaryOp::mul, lhs, parse_unary());
      else if (accept('/'))
        lhs = make_binary(BinaryOp::div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  ExprNodePtr parse_unary() {
    if (accept('-')) {
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::negate;
      n->args = {parse_unary()};
      return n;
    }
    return parse_power();
  }

  ExprNodePtr parse_power() {
    auto base = parse_primary();
    if (accept('^')) return make_binary(BinaryOp::pow, base, parse_unary());
    return base;
  }

  ExprNodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ExprSyntaxError(pos_, "unexpected end of expression");
    const char ch = text_[pos_];
    if (ch == '(') {
      const std::size_t open = pos_++;
      auto inner = parse_expr();
      if (!accept(')')) throw ExprSyntaxError(open, "unbalanced '('");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') return parse_identifier();
    if (ch == ')') throw ExprSyntaxError(pos_, "unbalanced ')'");
    throw ExprSyntaxError(pos_, "unexpected character '" + std::string(1, ch) + "'");
  }

  ExprNodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ExprSyntaxError(start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ExprSyntaxError(mark, "malformed exponent");
    }
    const std::string literal(text_.substr(start, pos_ - start));
    auto node = std::make_shared<ExprNode>();
    node->kind = ExprNode::Kind::number;
    node->value = std::strtod(literal.c_str(), nullptr);
    return node;
  }

  ExprNodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    if (name == "u" || name == "t") {
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprNode::Kind::variable;
      node->variable = name == "u" ? Variable::u : Variable::t;
      return node;
    }
    const FunctionInfo* fi = nullptr;
    for (const auto& f : kFunctions)
      if (f.name == name) fi = &f;
    if (!fi) throw ExprSyntaxError(start, "unknown identifier '" + std::string(name) + "'");

    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '(')
      throw ExprSyntaxError(pos_, "expected '(' after '" + std::string(name) + "'");
    const std::size_t open = pos_++;
    auto node = std::make_shared<ExprNode>();
    node->kind = ExprNode::Kind::call;
    node->function = fi->fn;
    node->args.push_back(parse_expr());
    while (accept(',')) node->args.push_back(parse_expr());
    if (!accept(')')) throw ExprSyntaxError(open, "unbalanced '('");
    if (node->args.size() != fi->arity)
      throw ExprSyntaxError(start, std::string(name) + " takes " + std::to_string(fi->arity) +
                                       " argument(s), got " + std::to_string(node->args.size()));
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline double eval_node(const ExprNode& n, const std::optional<double>& u,
                        const std::optional<double>& t) {
  auto fail = [&](const std::string& what) -> double { throw ExprEvalError(what, print(n)); };
  switch (n.kind) {
    case ExprNode::Kind::number:
      return n.value;
    case ExprNode::Kind::variable: {
      const auto& b = n.variable == Variable::u ? u : t;
      if (!b) return fail(std::string("unbound variable '") +
                          (n.variable == Variable::u ? 'u' : 't') + "'");
      return *b;
    }
    case ExprNode::Kind::negate:
      return -eval_node(*n.args[0], u, t);
    case ExprNode::Kind::binary: {
      const double l = eval_node(*n.args[0], u, t);
      const double r = eval_node(*n.args[1], u, t);
      switch (n.op) {
        case BinaryOp::add:
          return l + r;
        case BinaryOp::sub:
          return l - r;
        case BinaryOp::mul:
          return l * r;
        case BinaryOp::div:
          if (r == 0.0) return fail("division by zero");
          return l / r;
        case BinaryOp::pow: {
          const double v = std::pow(l, r);
          if (std::isnan(v) && !std::isnan(l) && !std::isnan(r))
            return fail("negative base with non-integer exponent");
          return v;
        }
      }
      return fail("bad operator");
    }
    case ExprNode::Kind::call: {
      const double a = eval_node(*n.args[0], u, t);
      switch (n.function) {
        case Function::abs:
          return std::abs(a);
        case Function::exp:
          return std::exp(a);
        case Function::log:
          if (!(a > 0.0)) return fail("log of non-positive value");
          return std::log(a);
        case Function::sqrt:
          if (a < 0.0) return fail("sqrt of negative value");
          return std::sqrt(a);
        case Function::sin:
          return std::sin(a);
        case Function::cos:
          return std::cos(a);
        case Function::min:
          return std::min(a, eval_node(*n.args[1], u, t));
        case Function::max:
          return std::max(a, eval_node(*n.args[1], u, t));
        case Function::pow: {
          const double b = eval_node(*n.args[1], u, t);
          const double v = std::pow(a, b);
          if (std::isnan(v) && !std::isnan(a) && !std::isnan(b))
            return fail("negative base with non-integer exponent");
          return v;
        }
      }
      return fail("bad function");
    }
  }
  return fail("bad node");
}

inline bool uses(const ExprNode& n, Variable v) {
  if (n.kind == ExprNode::Kind::variable) return n.variable == v;
  for (const auto& a : n.args)
    if (uses(*a, v)) return true;
  return false;
}

}  // namespace detail

/// Immutable parsed expression. Copies share the tree.
class Expr {
 public:
  /// The constant 0.
  Expr() : root_(std::make_shared<ExprNode>()) {}

  static Expr parse(std::string_view text) { return Expr(detail::Parser(text).parse()); }

  static Expr constant(double c) {
    auto n = std::make_shared<ExprNode>();
    n->value = c;
    return Expr(std::move(n));
  }

  double eval(std::optional<double> u = std::nullopt, std::optional<double> t = std::nullopt) const {
    return detail::eval_node(*root_, u, t);
  }

  bool uses(Variable v) const { return detail::uses(*root_, v); }
  const ExprNode& root() const noexcept { return *root_; }

  /// Minimal-parenthesis text that parses back to the same tree.
  std::string to_string() const { return detail::print(*root_); }

  friend bool operator==(const Expr& a, const Expr& b) {
    return detail::same_tree(*a.root_, *b.root_);
  }

 private:
  explicit Expr(ExprNodePtr root) : root_(std::move(root)) {}

  ExprNodePtr root_;
};

struct PositivityReport {
  double min_value = 0.0;
  double argmin = 0.0;
  bool positive = false;
  std::size_t samples = 0;
};

/**
 * Samples `e` at `samples` equispaced points of [lo, hi] in variable `var`.
 * A non-positive minimum is a warning condition for callers, not an error.
 */
inline PositivityReport check_positivity(const Expr& e, Variable var, double lo, double hi,
                                         std::size_t samples) {
  if (!(lo < hi)) throw std::invalid_argument("check_positivity needs lo < hi");
  if (samples < 2) throw std::invalid_argument("check_positivity needs at least two samples");
  PositivityReport r;
  r.samples = samples;
  r.min_value = INFINITY;
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
    const double v = var == Variable::u ? e.eval(x, std::nullopt) : e.eval(std::nullopt, x);
    if (v < r.min_value) {
      r.min_value = v;
      r.argmin = x;
    }
  }
  r.positive = r.min_value > 0.0;
  return r;
}

}  // namespace tscale
