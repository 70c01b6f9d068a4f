#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace eulab::expr {

struct Node;

/// A closed-form real function of one variable, parsed from text such as
/// "1 + rho" or "2*cos(z) - sin(z)^2". Supports + - * / ^ (constant
/// exponent), unary minus, pi, and sin/cos/tan/exp/log/sqrt. Derivatives are
/// symbolic, so they are exact up to rounding.
class Expression {
 public:
  static Expression parse(std::string_view text, std::string_view variable);
  static Expression constant(double value);

  Expression derivative() const;
  double operator()(double x) const;

  std::string to_string() const;
  const std::string& variable() const { return variable_; }
  bool is_constant() const;

 private:
  struct Instr {
    int op;
    double value;
  };

  Expression(std::shared_ptr<const Node> root, std::string variable);
  void compile();

  std::shared_ptr<const Node> root_;
  std::string variable_;
  std::vector<Instr> program_;
  int max_depth_ = 0;
};

}  // namespace eulab::expr
