#pragma once

namespace shearlet {

double gamma(double x);
double digamma(double x);

// pi^lambda [Gamma((n - lambda)/4) / Gamma((n + lambda)/4)]^2, lambda in [0, 1).
double pitt_constant(double lambda, int n);
// ln(pi) - digamma(n/4).
double pitt_derivative_at_zero(int n);

struct UncertaintyConstants {
  int n = 0;
  double beckner = 0.0;             // digamma(n/4) - ln(pi)
  double sobolev = 0.0;             // digamma(n/2)
  double heisenberg_quarter_pi = 0.0;    // 1/(4 pi); NaN unless n == 2
  double heisenberg_digamma = 0.0;  // exp(beckner)
};

UncertaintyConstants uncertainty_constants(int n);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

}  // namespace shearlet
