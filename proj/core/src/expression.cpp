#include "chds/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "chds/error.hpp"

namespace chds {

namespace {

struct Dual {
  double v, dx, dy;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy}; }
Dual operator/(Dual a, Dual b) {
  const double inv = 1.0 / b.v;
  return {a.v * inv, (a.dx * b.v - a.v * b.dx) * inv * inv, (a.dy * b.v - a.v * b.dy) * inv * inv};
}

enum class Op { Number, X, Y, Add, Sub, Mul, Div, Neg, Sin, Cos };

}  // namespace

struct Expression::Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;

  Dual eval(double x, double y) const {
    switch (op) {
      case Op::Number: return {value, 0.0, 0.0};
      case Op::X: return {x, 1.0, 0.0};
      case Op::Y: return {y, 0.0, 1.0};
      case Op::Add: return a->eval(x, y) + b->eval(x, y);
      case Op::Sub: return a->eval(x, y) - b->eval(x, y);
      case Op::Mul: return a->eval(x, y) * b->eval(x, y);
      case Op::Div: return a->eval(x, y) / b->eval(x, y);
      case Op::Neg: {
        const Dual d = a->eval(x, y);
        return {-d.v, -d.dx, -d.dy};
      }
      case Op::Sin: {
        const Dual d = a->eval(x, y);
        const double c = std::cos(d.v);
        return {std::sin(d.v), c * d.dx, c * d.dy};
      }
      case Op::Cos: {
        const Dual d = a->eval(x, y);
        const double s = -std::sin(d.v);
        return {std::cos(d.v), s * d.dx, s * d.dy};
      }
    }
    return {0.0, 0.0, 0.0};
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Config, "expression '" + s_ + "' at position " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    n->value = v;
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Op::Add, lhs, term());
      else if (accept('-')) lhs = make(Op::Sub, lhs, term());
      else return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Op::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Op::Div, lhs, unary());
      else return lhs;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return primary();
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Op::Number, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return make(Op::X);
      if (name == "y") return make(Op::Y);
      if (name == "pi") return make(Op::Number, nullptr, nullptr, std::numbers::pi);
      if (name == "sin" || name == "cos") {
        if (!accept('(')) fail("expected '(' after " + name);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(name == "sin" ? Op::Sin : Op::Cos, arg);
      }
      pos_ = start;
      fail("unknown name '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace

Expression::Expression(std::string text) : text_(std::move(text)) { root_ = Parser(text_).parse(); }
Expression::~Expression() = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

double Expression::operator()(double x, double y) const { return root_->eval(x, y).v; }

Vec2 Expression::gradient(double x, double y) const {
  const Dual d = root_->eval(x, y);
  return {d.dx, d.dy};
}

ScalarField Expression::field() const {
  auto root = root_;
  return {[root](const Point& p) { return root->eval(p.x, p.y).v; },
          [root](const Point& p) {
            const Dual d = root->eval(p.x, p.y);
            return Vec2{d.dx, d.dy};
          }};
}

}  // namespace chds
