#include "gjcm/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "gjcm/errors.hpp"

namespace gjcm {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

struct Panel {
  double a;
  double b;
  double kronrod;
  double error;  // |K15 - G7|
};

// Both rules are stored as the non-negative half of a symmetric set, zero first.
template <class Rule>
double apply_rule(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  double sum = w[0] * f(mid);
  for (std::size_t k = 1; k < x.size(); ++k) {
    sum += w[k] * (f(mid - half * x[k]) + f(mid + half * x[k]));
  }
  return half * sum;
}

Panel make_panel(const std::function<double(double)>& f, double a, double b) {
  const double k = apply_rule<Kronrod>(f, a, b);
  const double g = apply_rule<Gauss>(f, a, b);
  return {a, b, k, std::abs(k - g)};
}

}  // namespace

QuadratureResult quadrature(const std::function<double(double)>& integrand, double a, double b,
                            double tolerance, unsigned max_depth) {
  if (a == b) return {0.0, 0.0};
  // Depth-first bisection: a panel is accepted once its |K - G| falls below its
  // share of the tolerance budget (relative to the running magnitude estimate).
  const Panel whole = make_panel(integrand, a, b);
  const double magnitude = std::abs(whole.kronrod);
  const double budget = tolerance * (magnitude > 0.0 ? magnitude : 1.0);
  const double length = std::abs(b - a);

  double value = 0.0;
  double error = 0.0;
  std::vector<std::pair<Panel, unsigned>> stack{{whole, 0u}};
  while (!stack.empty()) {
    auto [panel, depth] = stack.back();
    stack.pop_back();
    const double share = budget * std::abs(panel.b - panel.a) / length;
    if (panel.error <= share || depth >= max_depth) {
      value += panel.kronrod;
      error += panel.error;
      continue;
    }
    const double mid = 0.5 * (panel.a + panel.b);
    stack.push_back({make_panel(integrand, mid, panel.b), depth + 1});
    stack.push_back({make_panel(integrand, panel.a, mid), depth + 1});
  }
  if (!std::isfinite(value)) throw ConvergenceError("quadrature produced a non-finite value");
  const double scale = std::abs(value) > 0.0 ? std::abs(value) : 1.0;
  if (error > tolerance * scale) {
    std::ostringstream msg;
    msg << "quadrature on [" << a << ", " << b << "] did not reach tolerance " << tolerance
        << " (error estimate " << error << ")";
    throw ConvergenceError(msg.str());
  }
  return {value, error};
}

}  // namespace gjcm
