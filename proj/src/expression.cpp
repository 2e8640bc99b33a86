#include "bem2d/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bem2d {

struct Expression::Node {
  enum class Kind { Constant, Variable, Unary, Binary, Call };
  Kind kind = Kind::Constant;
  double value = 0.0;
  int var = 0;  // 0:x1 1:x2 2:t
  char op = 0;
  std::string fn;
  std::vector<std::unique_ptr<Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

struct Parser {
  const std::string& src;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression error at position " + std::to_string(pos) + ": " +
                                what);
  }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos != src.size()) fail("trailing input");
    return e;
  }

  NodePtr expr() {
    NodePtr left = term();
    for (;;) {
      skip_ws();
      if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) {
        const char op = src[pos++];
        NodePtr n = std::make_unique<Node>();
        n->kind = Node::Kind::Binary;
        n->op = op;
        n->args.push_back(std::move(left));
        n->args.push_back(term());
        left = std::move(n);
      } else {
        return left;
      }
    }
  }

  NodePtr term() {
    NodePtr left = unary();
    for (;;) {
      skip_ws();
      if (pos < src.size() && (src[pos] == '*' || src[pos] == '/')) {
        const char op = src[pos++];
        NodePtr n = std::make_unique<Node>();
        n->kind = Node::Kind::Binary;
        n->op = op;
        n->args.push_back(std::move(left));
        n->args.push_back(unary());
        left = std::move(n);
      } else {
        return left;
      }
    }
  }

  NodePtr unary() {
    skip_ws();
    if (pos < src.size() && (src[pos] == '-' || src[pos] == '+')) {
      const char op = src[pos++];
      NodePtr n = std::make_unique<Node>();
      n->kind = Node::Kind::Unary;
      n->op = op;
      n->args.push_back(unary());
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    skip_ws();
    if (pos < src.size() && src[pos] == '^') {
      ++pos;
      NodePtr n = std::make_unique<Node>();
      n->kind = Node::Kind::Binary;
      n->op = '^';
      n->args.push_back(std::move(base));
      n->args.push_back(unary());  // right-associative
      return n;
    }
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    const char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
    if (c == '(') {
      ++pos;
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    std::size_t end = 0;
    double v;
    try {
      v = std::stod(src.substr(pos), &end);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos += end;
    NodePtr n = std::make_unique<Node>();
    n->kind = Node::Kind::Constant;
    n->value = v;
    return n;
  }

  NodePtr ident() {
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    const std::string name = src.substr(start, pos - start);
    NodePtr n = std::make_unique<Node>();
    if (eat('(')) {
      n->kind = Node::Kind::Call;
      n->fn = name;
      n->args.push_back(expr());
      while (eat(',')) n->args.push_back(expr());
      if (!eat(')')) fail("expected ')' after arguments of " + name);
      const bool two = name == "pow" || name == "atan2" || name == "min" || name == "max" ||
                       name == "hypot";
      if (two ? n->args.size() != 2 : n->args.size() != 1)
        fail("wrong argument count for " + name);
      return n;
    }
    if (name == "pi") {
      n->kind = Node::Kind::Constant;
      n->value = std::numbers::pi;
    } else if (name == "e") {
      n->kind = Node::Kind::Constant;
      n->value = std::numbers::e;
    } else if (name == "x1" || name == "x2" || name == "t") {
      n->kind = Node::Kind::Variable;
      n->var = name == "x1" ? 0 : (name == "x2" ? 1 : 2);
    } else {
      fail("unknown identifier '" + name + "'");
    }
    return n;
  }
};

double eval_node(const Node& n, double x1, double x2, double t) {
  switch (n.kind) {
    case Node::Kind::Constant:
      return n.value;
    case Node::Kind::Variable:
      return n.var == 0 ? x1 : (n.var == 1 ? x2 : t);
    case Node::Kind::Unary: {
      const double a = eval_node(*n.args[0], x1, x2, t);
      return n.op == '-' ? -a : a;
    }
    case Node::Kind::Binary: {
      const double a = eval_node(*n.args[0], x1, x2, t);
      const double b = eval_node(*n.args[1], x1, x2, t);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return std::pow(a, b);
      }
      break;
    }
    case Node::Kind::Call: {
      const double a = eval_node(*n.args[0], x1, x2, t);
      if (n.fn == "sin") return std::sin(a);
      if (n.fn == "cos") return std::cos(a);
      if (n.fn == "tan") return std::tan(a);
      if (n.fn == "atan") return std::atan(a);
      if (n.fn == "exp") return std::exp(a);
      if (n.fn == "log") return std::log(a);
      if (n.fn == "sqrt") return std::sqrt(a);
      if (n.fn == "abs") return std::abs(a);
      const double b = eval_node(*n.args[1], x1, x2, t);
      if (n.fn == "pow") return std::pow(a, b);
      if (n.fn == "atan2") return std::atan2(a, b);
      if (n.fn == "min") return std::min(a, b);
      if (n.fn == "max") return std::max(a, b);
      if (n.fn == "hypot") return std::hypot(a, b);
      throw std::invalid_argument("unknown function '" + n.fn + "'");
    }
  }
  throw std::logic_error("expression: bad node");
}

}  // namespace

Expression::Expression(const std::string& src) {
  Parser p{src};
  root_ = p.parse();
}

Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::~Expression() = default;

double Expression::eval(double x1, double x2, double t) const {
  return eval_node(*root_, x1, x2, t);
}

}  // namespace bem2d
