#include "gevmle/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <stdexcept>

namespace gevmle {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double tolerance) {
  if (!(a < b)) throw std::invalid_argument("integrate: requires a < b");
  auto guarded = [&f](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : 0.0;
  };

  QuadratureResult out;
  const bool lower_inf = std::isinf(a);
  const bool upper_inf = std::isinf(b);
  if (lower_inf && upper_inf) {
    boost::math::quadrature::sinh_sinh<double> rule;
    out.value = rule.integrate(guarded, tolerance, &out.error);
  } else if (lower_inf || upper_inf) {
    boost::math::quadrature::exp_sinh<double> rule;
    out.value = rule.integrate(guarded, a, b, tolerance, &out.error);
  } else {
    boost::math::quadrature::tanh_sinh<double> rule;
    out.value = rule.integrate(guarded, a, b, tolerance, &out.error);
  }
  return out;
}

}  // namespace gevmle
