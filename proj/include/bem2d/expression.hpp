#pragma once

#include <memory>
#include <string>

namespace bem2d {

// Arithmetic expression over the variables x1, x2, t for nodewise boundary
// data.  Supports + - * / ^, parentheses, the constants pi and e, and the
// functions sin cos tan atan exp log sqrt abs and the two-argument pow,
// atan2, min, max, hypot.
class Expression {
 public:
  explicit Expression(const std::string& src);  // throws std::invalid_argument on parse errors
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;
  ~Expression();

  double eval(double x1, double x2, double t) const;

  struct Node;

 private:
  std::unique_ptr<Node> root_;
};

}  // namespace bem2d
