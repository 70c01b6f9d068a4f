#pragma once

#include <span>
#include <vector>

namespace eulab {

/// C² cubic interpolating spline on strictly increasing nodes. Periodic
/// splines require equal end values and evaluate with wrap-around; natural
/// splines refuse arguments outside the node range.
class CubicSpline {
 public:
  enum class Boundary { natural, periodic };

  CubicSpline(std::vector<double> nodes, std::vector<double> values,
              Boundary boundary = Boundary::natural);

  /// `order` in 0..3; derivatives are those of the piecewise cubic.
  double eval(double x, int order = 0) const;

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  Boundary boundary() const { return boundary_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the nodes
  Boundary boundary_;
};

}  // namespace eulab
