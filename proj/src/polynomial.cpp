#include "sitmp/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sitmp/types.hpp"

namespace sitmp {

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
  if (c_.empty()) c_.push_back(0.0);
  if (degree() > kMaxDegree)
    throw InputError("polynomial degree " + std::to_string(degree()) + " exceeds cap " +
                     std::to_string(kMaxDegree));
  for (double v : c_)
    if (!std::isfinite(v)) throw InputError("polynomial coefficient is not finite");
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
  return Polynomial(std::move(d));
}

int Polynomial::degree() const { return static_cast<int>(c_.size()) - 1; }

Polynomial Polynomial::operator-(double k) const {
  std::vector<double> d = c_;
  d[0] -= k;
  return Polynomial(std::move(d));
}

std::pair<double, double> Polynomial::range(double a, double b) const {
  double lo = std::min((*this)(a), (*this)(b));
  double hi = std::max((*this)(a), (*this)(b));
  if (degree() >= 2) {
    for (double r : realRoots(derivative(), a, b)) {
      const double v = (*this)(r);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

std::string Polynomial::toString() const {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (size_t i = 0; i < c_.size(); ++i) os << (i ? ", " : "") << c_[i];
  os << "]";
  return os.str();
}

namespace {

// Root of a polynomial known to change sign on [a, b] and to be monotone there.
double polishRoot(const Polynomial& p, const Polynomial& dp, double a, double b, double tol) {
  double fa = p(a);
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double fx = p(x);
    if (fx == 0.0) return x;
    if ((fx < 0) == (fa < 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    if (b - a <= tol) return 0.5 * (a + b);
    // Newton step, rejected when it leaves the bracket.
    const double d = dp(x);
    double next = (d != 0.0) ? x - fx / d : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - x) <= 0.25 * tol) return next;
    x = next;
  }
  throw NumericalError("root polishing did not converge for polynomial " + p.toString());
}

}  // namespace

std::vector<double> realRoots(const Polynomial& p, double a, double b, double tol) {
  std::vector<double> roots;
  if (a > b) return roots;
  const int deg = p.degree();
  const auto& c = p.coeffs();
  if (deg == 0) return roots;
  if (deg == 1) {
    const double r = -c[0] / c[1];
    if (r >= a && r <= b) roots.push_back(r);
    return roots;
  }

  const Polynomial dp = p.derivative();
  std::vector<double> knots{a};
  for (double r : realRoots(dp, a, b, tol)) knots.push_back(r);
  knots.push_back(b);

  // Scale used to decide whether a critical value counts as a touching root.
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  const double zeroTol = 1e-12 * std::max(1.0, scale);

  auto pushUnique = [&](double r) {
    if (roots.empty() || r - roots.back() > tol) roots.push_back(r);
  };

  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    const double lo = knots[i];
    const double hi = knots[i + 1];
    const double flo = p(lo);
    const double fhi = p(hi);
    if (std::abs(flo) <= zeroTol) {
      pushUnique(lo);
      continue;
    }
    if (std::abs(fhi) <= zeroTol) continue;  // picked up as next piece's lo
    if ((flo < 0) != (fhi < 0)) pushUnique(polishRoot(p, dp, lo, hi, tol));
  }
  if (std::abs(p(b)) <= zeroTol) pushUnique(b);
  return roots;
}

}  // namespace sitmp
