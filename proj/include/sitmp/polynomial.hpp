#pragma once

#include <span>
#include <string>
#include <vector>

namespace sitmp {

/// Real polynomial, coefficients lowest degree first.
class Polynomial {
 public:
  static constexpr int kMaxDegree = 5;

  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  double operator()(double x) const;
  Polynomial derivative() const;
  /// Degree after trimming trailing zeros; the zero polynomial reports 0.
  int degree() const;
  const std::vector<double>& coeffs() const { return c_; }

  Polynomial operator-(double k) const;

  /// Min and max of the polynomial over [a, b].
  std::pair<double, double> range(double a, double b) const;

  std::string toString() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<double> c_;
};

/// Real roots of `p` inside [a, b], ascending, with isolation on the monotone
/// pieces between critical points and a safeguarded Newton/bisection polish to
/// `tol`. Tangential roots at critical points are reported once. The zero
/// polynomial has no isolated roots and returns an empty list.
/// Throws NumericalError if polishing fails to converge.
std::vector<double> realRoots(const Polynomial& p, double a, double b, double tol = 1e-9);

}  // namespace sitmp
