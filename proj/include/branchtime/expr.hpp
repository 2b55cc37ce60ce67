#pragma once

// Scalar expression DSL for autonomous right-hand sides f(x).
//
// Grammar (see docs/grammar.md):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?            right-associative
//   atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
//   func   := 'sin' | 'cos' | 'exp' | 'tanh' | 'abs'
//
// Expressions are immutable after parse and safe to share across threads.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace branchtime {

// Parse failure; offset() is the byte offset of the offending token.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Raised by eval() when any subexpression produces a non-finite value.
class eval_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BinaryOp { add, sub, mul, div, pow };
enum class Func { sin, cos, exp, tanh, abs };

namespace detail {
class ExprParser;
}

class Expr {
 public:
  Expr() = default;

  // Evaluates f(x); throws eval_error instead of returning NaN or infinity.
  double eval(double x) const {
    double out;
    if (!try_eval(x, out))
      throw eval_error("expression evaluated to a non-finite value");
    return out;
  }

  // Non-throwing eval; returns false (out unspecified) on non-finite results.
  bool try_eval(double x, double& out) const noexcept {
    return eval_node(*node_, x, out);
  }

  // Renders the expression with minimal parentheses. Feeding the result back
  // through parse() yields a structurally equal Expr.
  std::string print() const {
    std::string s;
    print_node(*node_, 0, s);
    return s;
  }

  friend bool operator==(const Expr& a, const Expr& b) {
    return nodes_equal(*a.node_, *b.node_);
  }
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  bool valid() const noexcept { return node_ != nullptr; }

  friend Expr parse(std::string_view text);
  friend class detail::ExprParser;

 private:
  enum class Kind { literal, variable, unary_minus, binary, call };

  struct Node {
    Kind kind;
    double literal = 0.0;
    BinaryOp op = BinaryOp::add;
    Func fn = Func::sin;
    std::shared_ptr<const Node> lhs, rhs;
  };

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static bool eval_node(const Node& n, double x, double& out) noexcept {
    double a, b;
    switch (n.kind) {
      case Kind::literal:
        out = n.literal;
        break;
      case Kind::variable:
        out = x;
        break;
      case Kind::unary_minus:
        if (!eval_node(*n.lhs, x, a)) return false;
        out = -a;
        break;
      case Kind::binary:
        if (!eval_node(*n.lhs, x, a) || !eval_node(*n.rhs, x, b)) return false;
        switch (n.op) {
          case BinaryOp::add: out = a + b; break;
          case BinaryOp::sub: out = a - b; break;
          case BinaryOp::mul: out = a * b; break;
          case BinaryOp::div: out = a / b; break;
          case BinaryOp::pow: out = std::pow(a, b); break;
        }
        break;
      case Kind::call:
        if (!eval_node(*n.lhs, x, a)) return false;
        switch (n.fn) {
          case Func::sin: out = std::sin(a); break;
          case Func::cos: out = std::cos(a); break;
          case Func::exp: out = std::exp(a); break;
          case Func::tanh: out = std::tanh(a); break;
          case Func::abs: out = std::abs(a); break;
        }
        break;
    }
    return std::isfinite(out);
  }

  // Precedence used for printing: higher binds tighter.
  static int precedence(const Node& n) {
    switch (n.kind) {
      case Kind::binary:
        switch (n.op) {
          case BinaryOp::add:
          case BinaryOp::sub: return 1;
          case BinaryOp::mul:
          case BinaryOp::div: return 2;
          case BinaryOp::pow: return 4;
        }
        return 1;
      case Kind::unary_minus: return 3;
      default: return 5;
    }
  }

  static const char* func_name(Func f) {
    switch (f) {
      case Func::sin: return "sin";
      case Func::cos: return "cos";
      case Func::exp: return "exp";
      case Func::tanh: return "tanh";
      case Func::abs: return "abs";
    }
    return "";
  }

  static void print_literal(double v, std::string& out) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
  }

  // parent_prec is the binding strength required of this subtree; wraps in
  // parentheses when the subtree binds looser.
  static void print_node(const Node& n, int parent_prec, std::string& out) {
    int prec = precedence(n);
    bool parens = prec < parent_prec;
    if (parens) out.push_back('(');
    switch (n.kind) {
      case Kind::literal:
        print_literal(n.literal, out);
        break;
      case Kind::variable:
        out.push_back('x');
        break;
      case Kind::unary_minus:
        out.push_back('-');
        print_node(*n.lhs, prec, out);
        break;
      case Kind::binary: {
        char op_ch;
        switch (n.op) {
          case BinaryOp::add: op_ch = '+'; break;
          case BinaryOp::sub: op_ch = '-'; break;
          case BinaryOp::mul: op_ch = '*'; break;
          case BinaryOp::div: op_ch = '/'; break;
          default: op_ch = '^'; break;
        }
        if (n.op == BinaryOp::pow) {
          // right-associative: the left operand must bind strictly tighter
          print_node(*n.lhs, prec + 1, out);
          out.push_back(op_ch);
          print_node(*n.rhs, prec, out);
        } else {
          print_node(*n.lhs, prec, out);
          out.push_back(op_ch);
          // left-associative: equal precedence on the right needs parens
          print_node(*n.rhs, prec + 1, out);
        }
        break;
      }
      case Kind::call:
        out.append(func_name(n.fn));
        out.push_back('(');
        print_node(*n.lhs, 0, out);
        out.push_back(')');
        break;
    }
    if (parens) out.push_back(')');
  }

  static bool nodes_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Kind::literal:
        // literals compare by bit pattern; parse never produces NaN
        return a.literal == b.literal;
      case Kind::variable: return true;
      case Kind::unary_minus: return nodes_equal(*a.lhs, *b.lhs);
      case Kind::binary:
        return a.op == b.op && nodes_equal(*a.lhs, *b.lhs) &&
               nodes_equal(*a.rhs, *b.rhs);
      case Kind::call: return a.fn == b.fn && nodes_equal(*a.lhs, *b.lhs);
    }
    return false;
  }

  std::shared_ptr<const Node> node_;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  using NodePtr = std::shared_ptr<const Expr::Node>;

  NodePtr parse_full() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw parse_error("syntax error: unexpected '" +
                            std::string(1, text_[pos_]) + "'",
                        pos_);
    return e;
  }

 private:
  using Kind = Expr::Kind;
  using Node = Expr::Node;

  static NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t')) {
      ++pos_;
    }
  }

  bool at_end() {
    skip_ws();
    return pos_ == text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      NodePtr rhs = parse_term();
      Node n;
      n.kind = Kind::binary;
      n.op = c == '+' ? BinaryOp::add : BinaryOp::sub;
      n.lhs = std::move(lhs);
      n.rhs = std::move(rhs);
      lhs = make(std::move(n));
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      NodePtr rhs = parse_unary();
      Node n;
      n.kind = Kind::binary;
      n.op = c == '*' ? BinaryOp::mul : BinaryOp::div;
      n.lhs = std::move(lhs);
      n.rhs = std::move(rhs);
      lhs = make(std::move(n));
    }
  }

  NodePtr parse_unary() {
    if (peek() == '-') {
      ++pos_;
      Node n;
      n.kind = Kind::unary_minus;
      n.lhs = parse_unary();
      return make(std::move(n));
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (peek() == '^') {
      ++pos_;
      Node n;
      n.kind = Kind::binary;
      n.op = BinaryOp::pow;
      n.lhs = std::move(base);
      n.rhs = parse_unary();  // right-associative; exponent may be negated
      return make(std::move(n));
    }
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ == text_.size())
      throw parse_error("syntax error: unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      skip_ws();
      if (pos_ == text_.size() || text_[pos_] != ')')
        throw parse_error("syntax error: expected ')'", pos_);
      ++pos_;
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (is_ident_char(c)) return parse_identifier();
    throw parse_error("syntax error: unexpected '" + std::string(1, c) + "'",
                      pos_);
  }

  static bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      } else {
        pos_ = mark;  // trailing 'e' belongs to something else; not ours
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_ ||
        !std::isfinite(value))
      throw parse_error("invalid number '" +
                            std::string(text_.substr(start, pos_ - start)) + "'",
                        start);
    Node n;
    n.kind = Kind::literal;
    n.literal = value;
    return make(std::move(n));
  }

  NodePtr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") {
      Node n;
      n.kind = Kind::variable;
      return make(std::move(n));
    }
    Func fn;
    if (name == "sin") fn = Func::sin;
    else if (name == "cos") fn = Func::cos;
    else if (name == "exp") fn = Func::exp;
    else if (name == "tanh") fn = Func::tanh;
    else if (name == "abs") fn = Func::abs;
    else
      throw parse_error("unknown identifier '" + std::string(name) + "'", start);
    skip_ws();
    if (pos_ == text_.size() || text_[pos_] != '(')
      throw parse_error("syntax error: expected '(' after '" +
                            std::string(name) + "'",
                        pos_);
    ++pos_;
    NodePtr arg = parse_expr();
    skip_ws();
    if (pos_ == text_.size() || text_[pos_] != ')')
      throw parse_error("syntax error: expected ')'", pos_);
    ++pos_;
    Node n;
    n.kind = Kind::call;
    n.fn = fn;
    n.lhs = std::move(arg);
    return make(std::move(n));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view text) {
  detail::ExprParser p(text);
  return Expr(p.parse_full());
}

}  // namespace branchtime
