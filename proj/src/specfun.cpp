#include "shearlet/specfun.hpp"

#include <cmath>
#include <limits>

#include "shearlet/error.hpp"

namespace shearlet {

namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw Error(Errc::domain, std::string(what) + " needs a finite positive argument");
}

}  // namespace

double gamma(double x) {
  require_positive(x, "gamma");
  double scale = 1.0;
  while (x < 0.5) {
    scale /= x;
    x += 1.0;
  }
  double z = x - 1.0;
  double sum = kLanczos[0];
  for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (z + i);
  double t = z + kLanczosG + 0.5;
  // Split the power so that moderate arguments do not overflow early.
  double half = std::pow(t, 0.5 * (z + 0.5));
  return scale * std::sqrt(2.0 * kPi) * half * (half * std::exp(-t)) * sum;
}

double digamma(double x) {
  require_positive(x, "digamma");
  double acc = 0.0;
  while (x < 6.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  // B2/2, B4/4, ..., B12/12 with alternating structure folded into the signs.
  double series = inv2 * (1.0 / 12.0 -
                  inv2 * (1.0 / 120.0 -
                  inv2 * (1.0 / 252.0 -
                  inv2 * (1.0 / 240.0 -
                  inv2 * (1.0 / 132.0 -
                  inv2 * (691.0 / 32760.0))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double pitt_constant(double lambda, int n) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw Error(Errc::domain, "lambda must lie in [0, 1)");
  if (n < 2) throw Error(Errc::dimension, "dimension must be at least 2");
  if (lambda == 0.0) return 1.0;
  double ratio = gamma((n - lambda) / 4.0) / gamma((n + lambda) / 4.0);
  return std::pow(kPi, lambda) * ratio * ratio;
}

double pitt_derivative_at_zero(int n) {
  if (n < 2) throw Error(Errc::dimension, "dimension must be at least 2");
  return std::log(kPi) - digamma(n / 4.0);
}

UncertaintyConstants uncertainty_constants(int n) {
  if (n < 2) throw Error(Errc::dimension, "dimension must be at least 2");
  UncertaintyConstants c;
  c.n = n;
  c.beckner = digamma(n / 4.0) - std::log(kPi);
  c.sobolev = digamma(n / 2.0);
  c.heisenberg_quarter_pi = n == 2 ? 1.0 / (4.0 * kPi) : std::numeric_limits<double>::quiet_NaN();
  c.heisenberg_digamma = std::exp(c.beckner);
  return c;
}

}  // namespace shearlet
