#include "eulab/function.hpp"

#include <cmath>
#include <sstream>

#include "eulab/errors.hpp"

namespace eulab {

ScalarFunction ScalarFunction::expression(std::string_view text, std::string_view variable) {
  auto e0 = expr::Expression::parse(text, variable);
  auto e1 = e0.derivative();
  auto e2 = e1.derivative();
  auto e3 = e2.derivative();
  return ScalarFunction(std::make_shared<const Closed>(Closed{std::string(text), {e0, e1, e2, e3}}));
}

ScalarFunction ScalarFunction::constant(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return expression(os.str(), "x");
}

ScalarFunction ScalarFunction::spline(CubicSpline spline) {
  return ScalarFunction(std::make_shared<const CubicSpline>(std::move(spline)));
}

double ScalarFunction::eval(double x, int order) const {
  if (order < 0 || order > 3) throw Error(ErrorCode::evaluation, "derivative order must be 0..3");
  double v;
  if (const auto* c = std::get_if<std::shared_ptr<const Closed>>(&impl_)) {
    v = (*c)->d[order](x);
  } else {
    v = std::get<std::shared_ptr<const CubicSpline>>(impl_)->eval(x, order);
  }
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "function not evaluable at " << x << " (derivative order " << order << ")";
    throw Error(ErrorCode::evaluation, os.str());
  }
  return v;
}

bool ScalarFunction::is_spline() const {
  return std::holds_alternative<std::shared_ptr<const CubicSpline>>(impl_);
}

std::string ScalarFunction::expression_text() const {
  if (const auto* c = std::get_if<std::shared_ptr<const Closed>>(&impl_)) return (*c)->text;
  return {};
}

const CubicSpline* ScalarFunction::as_spline() const {
  if (const auto* s = std::get_if<std::shared_ptr<const CubicSpline>>(&impl_)) return s->get();
  return nullptr;
}

}  // namespace eulab
