#pragma once

#include <memory>
#include <string>
#include <variant>

#include "eulab/expr.hpp"
#include "eulab/spline.hpp"

namespace eulab {

/// Real function of one variable with up to three exact derivatives:
/// either a closed-form expression (symbolic derivatives) or a cubic spline
/// (analytic piecewise derivatives). Immutable and cheap to copy.
class ScalarFunction {
 public:
  static ScalarFunction expression(std::string_view text, std::string_view variable);
  static ScalarFunction constant(double value);
  static ScalarFunction spline(CubicSpline spline);

  double operator()(double x) const { return eval(x, 0); }
  double eval(double x, int order) const;

  bool is_spline() const;
  /// Expression text (closed form) or an empty string for splines.
  std::string expression_text() const;
  const CubicSpline* as_spline() const;

 private:
  struct Closed {
    std::string text;
    expr::Expression d[4];
  };
  explicit ScalarFunction(std::shared_ptr<const Closed> c) : impl_(std::move(c)) {}
  explicit ScalarFunction(std::shared_ptr<const CubicSpline> s) : impl_(std::move(s)) {}

  std::variant<std::shared_ptr<const Closed>, std::shared_ptr<const CubicSpline>> impl_;
};

}  // namespace eulab
