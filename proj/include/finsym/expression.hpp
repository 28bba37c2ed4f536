#pragma once

/// Closed-form scalar field expressions.
///
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := ('-' | '+') factor | base ('^' signed-number)?
///   base   := number | identifier | '(' expr ')' | 'sqrt(' expr ')'
///
/// Identifiers are the declared variable names (x1..xn, y1..yn). Whitespace
/// is insignificant. Trees are immutable and shared between copies.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "finsym/errors.hpp"
#include "finsym/jet.hpp"

namespace finsym {

namespace detail {

inline double checked_sqrt(double v) {
  if (!(v >= 0.0)) throw DomainError("sqrt of a negative argument");
  return std::sqrt(v);
}
inline Jet checked_sqrt(const Jet& v) { return sqrt(v); }

inline double checked_pow(double base, double p) {
  if (p == std::round(p)) {
    if (base == 0.0 && p < 0.0) throw DomainError("negative power of zero");
    return std::pow(base, p);
  }
  if (base < 0.0 || (base == 0.0 && p < 0.0)) throw DomainError("fractional power of a nonpositive argument");
  return std::pow(base, p);
}
inline Jet checked_pow(const Jet& base, double p) { return pow(base, p); }

inline double checked_div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return a / b;
}
inline Jet checked_div(const Jet& a, const Jet& b) { return a / b; }

inline double make_constant(double v, std::span<const double>) { return v; }
inline Jet make_constant(double v, std::span<const Jet> like) {
  if (like.empty()) throw DomainError("constant jet needs at least one coordinate");
  return Jet(like.front().space(), v);
}

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

class ScalarField {
 public:
  enum class Kind { constant, variable, negate, add, subtract, multiply, divide, power, sqrt };

  struct Node {
    Kind kind;
    double number = 0.0;  // constant value, or exponent for power
    std::size_t var = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  ScalarField() = default;

  static ScalarField parse(std::string_view text, std::vector<std::string> variables) {
    Parser p{text, variables};
    NodePtr root = p.parse_all();
    return ScalarField(std::move(root), std::move(variables));
  }

  static ScalarField constant(double v, std::vector<std::string> variables) {
    return ScalarField(std::make_shared<const Node>(Node{Kind::constant, v, 0, nullptr, nullptr}), std::move(variables));
  }

  const std::vector<std::string>& variables() const noexcept { return vars_; }
  const NodePtr& root() const noexcept { return root_; }

  /// True when the tree references no variable.
  bool is_constant() const { return !references_variable(*root_); }

  template <class T>
  T eval(std::span<const T> args) const {
    if (args.size() < vars_.size()) throw DimensionMismatchError("field evaluated with too few coordinates");
    return eval_node(*root_, args);
  }

  double operator()(std::span<const double> args) const { return eval(args); }
  Jet operator()(std::span<const Jet> args) const { return eval(args); }

  /// Fully parenthesized text that re-parses to an identical tree.
  std::string to_string() const { return print(*root_); }

  /// Replace variable k by replacements[k]; the result is declared over the
  /// replacements' variables.
  ScalarField substitute(std::span<const ScalarField> replacements) const {
    if (replacements.size() < vars_.size()) throw DimensionMismatchError("substitution needs one field per variable");
    return ScalarField(subst(root_, replacements), replacements.front().vars_);
  }

  friend bool operator==(const ScalarField& a, const ScalarField& b) {
    return a.vars_ == b.vars_ && same_tree(*a.root_, *b.root_);
  }

 private:
  ScalarField(NodePtr root, std::vector<std::string> vars) : root_(std::move(root)), vars_(std::move(vars)) {}

  struct Parser {
    std::string_view text;
    const std::vector<std::string>& vars;
    std::size_t pos = 0;

    NodePtr parse_all() {
      NodePtr e = expr();
      skip_ws();
      if (pos != text.size()) throw ParseError(pos, "unexpected '" + std::string(1, text[pos]) + "'");
      return e;
    }

    void skip_ws() {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool accept(char c) {
      skip_ws();
      if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    void expect(char c) {
      if (!accept(c)) throw ParseError(pos, std::string("expected '") + c + "'");
    }

    static NodePtr binary(Kind k, NodePtr l, NodePtr r) {
      return std::make_shared<const Node>(Node{k, 0.0, 0, std::move(l), std::move(r)});
    }

    NodePtr expr() {
      NodePtr lhs = term();
      while (true) {
        if (accept('+'))
          lhs = binary(Kind::add, lhs, term());
        else if (accept('-'))
          lhs = binary(Kind::subtract, lhs, term());
        else
          return lhs;
      }
    }

    NodePtr term() {
      NodePtr lhs = factor();
      while (true) {
        if (accept('*'))
          lhs = binary(Kind::multiply, lhs, factor());
        else if (accept('/'))
          lhs = binary(Kind::divide, lhs, factor());
        else
          return lhs;
      }
    }

    NodePtr factor() {
      if (accept('-')) return std::make_shared<const Node>(Node{Kind::negate, 0.0, 0, factor(), nullptr});
      if (accept('+')) return factor();
      NodePtr b = base();
      if (accept('^')) {
        skip_ws();
        const double p = number(true);
        return std::make_shared<const Node>(Node{Kind::power, p, 0, std::move(b), nullptr});
      }
      return b;
    }

    NodePtr base() {
      skip_ws();
      if (pos >= text.size()) throw ParseError(pos, "unexpected end of expression");
      const char c = text[pos];
      if (c == '(') {
        ++pos;
        NodePtr e = expr();
        expect(')');
        return e;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
        return std::make_shared<const Node>(Node{Kind::constant, number(false), 0, nullptr, nullptr});
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos]))) ++pos;
        const std::string name(text.substr(start, pos - start));
        if (name == "sqrt") {
          expect('(');
          NodePtr e = expr();
          expect(')');
          return std::make_shared<const Node>(Node{Kind::sqrt, 0.0, 0, std::move(e), nullptr});
        }
        for (std::size_t k = 0; k < vars.size(); ++k)
          if (vars[k] == name) return std::make_shared<const Node>(Node{Kind::variable, 0.0, k, nullptr, nullptr});
        throw UnknownVariableError(start, name);
      }
      throw ParseError(pos, "unexpected '" + std::string(1, c) + "'");
    }

    double number(bool allow_sign) {
      const std::size_t start = pos;
      std::size_t end = pos;
      if (allow_sign && end < text.size() && (text[end] == '-' || text[end] == '+')) ++end;
      const std::size_t digits_start = end;
      while (end < text.size() && (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.')) ++end;
      if (end == digits_start) throw ParseError(start, "expected a number");
      if (end < text.size() && (text[end] == 'e' || text[end] == 'E')) {
        std::size_t e = end + 1;
        if (e < text.size() && (text[e] == '-' || text[e] == '+')) ++e;
        if (e < text.size() && std::isdigit(static_cast<unsigned char>(text[e]))) {
          while (e < text.size() && std::isdigit(static_cast<unsigned char>(text[e]))) ++e;
          end = e;
        }
      }
      std::string literal(text.substr(start, end - start));
      if (!literal.empty() && literal.front() == '+') literal.erase(0, 1);
      double v = 0.0;
      auto res = std::from_chars(literal.data(), literal.data() + literal.size(), v);
      if (res.ec != std::errc() || res.ptr != literal.data() + literal.size())
        throw ParseError(start, "malformed number '" + literal + "'");
      pos = end;
      return v;
    }
  };

  template <class T>
  static T eval_node(const Node& n, std::span<const T> args) {
    switch (n.kind) {
      case Kind::constant:
        return detail::make_constant(n.number, args);
      case Kind::variable:
        return args[n.var];
      case Kind::negate:
        return -eval_node(*n.lhs, args);
      case Kind::add:
        return eval_node(*n.lhs, args) + eval_node(*n.rhs, args);
      case Kind::subtract:
        return eval_node(*n.lhs, args) - eval_node(*n.rhs, args);
      case Kind::multiply:
        return eval_node(*n.lhs, args) * eval_node(*n.rhs, args);
      case Kind::divide:
        return detail::checked_div(eval_node(*n.lhs, args), eval_node(*n.rhs, args));
      case Kind::power:
        return detail::checked_pow(eval_node(*n.lhs, args), n.number);
      case Kind::sqrt:
        return detail::checked_sqrt(eval_node(*n.lhs, args));
    }
    throw DomainError("corrupt expression tree");
  }

  std::string print(const Node& n) const {
    switch (n.kind) {
      case Kind::constant:
        return detail::format_number(n.number);
      case Kind::variable:
        return vars_[n.var];
      case Kind::negate:
        return "(-" + print(*n.lhs) + ")";
      case Kind::add:
        return "(" + print(*n.lhs) + " + " + print(*n.rhs) + ")";
      case Kind::subtract:
        return "(" + print(*n.lhs) + " - " + print(*n.rhs) + ")";
      case Kind::multiply:
        return "(" + print(*n.lhs) + " * " + print(*n.rhs) + ")";
      case Kind::divide:
        return "(" + print(*n.lhs) + " / " + print(*n.rhs) + ")";
      case Kind::power: {
        const bool atom = n.lhs->kind == Kind::variable || n.lhs->kind == Kind::sqrt;
        const std::string b = atom ? print(*n.lhs) : "(" + print(*n.lhs) + ")";
        return b + "^" + detail::format_number(n.number);
      }
      case Kind::sqrt:
        return "sqrt(" + print(*n.lhs) + ")";
    }
    return {};
  }

  static bool same_tree(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Kind::constant:
        return a.number == b.number;
      case Kind::variable:
        return a.var == b.var;
      case Kind::power:
        return a.number == b.number && same_tree(*a.lhs, *b.lhs);
      case Kind::negate:
      case Kind::sqrt:
        return same_tree(*a.lhs, *b.lhs);
      default:
        return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
    }
  }

  static bool references_variable(const Node& n) {
    if (n.kind == Kind::variable) return true;
    if (n.kind == Kind::constant) return false;
    return references_variable(*n.lhs) || (n.rhs && references_variable(*n.rhs));
  }

  static NodePtr subst(const NodePtr& n, std::span<const ScalarField> reps) {
    switch (n->kind) {
      case Kind::constant:
        return n;
      case Kind::variable:
        return reps[n->var].root_;
      default: {
        Node copy = *n;
        copy.lhs = subst(n->lhs, reps);
        if (n->rhs) copy.rhs = subst(n->rhs, reps);
        return std::make_shared<const Node>(std::move(copy));
      }
    }
  }

  NodePtr root_;
  std::vector<std::string> vars_;
};

inline ScalarField parse_field(std::string_view text, std::vector<std::string> variables) {
  return ScalarField::parse(text, std::move(variables));
}

/// Names x1..xn (and y1..yn when `with_fiber`).
inline std::vector<std::string> coordinate_names(std::size_t n, bool with_fiber = false) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  if (with_fiber)
    for (std::size_t i = 1; i <= n; ++i) names.push_back("y" + std::to_string(i));
  return names;
}

}  // namespace finsym
