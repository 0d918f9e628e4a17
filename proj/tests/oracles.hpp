#pragma once

// Slow reference implementations used only by the tests.

#include <algorithm>
#include <cmath>

namespace oracle {

// Newton on w e^w = x in long double.
inline long double lambert_w0(long double x) {
  long double w = x < 1 ? 0.5L * std::log1p(2 * x) : std::log(x) - std::log(std::log(x) + 1);
  if (x < -0.3L) w = -1 + std::sqrt(2 * (1 + 2.718281828459045235360287L * x));
  for (int i = 0; i < 500; ++i) {
    const long double e = std::exp(w);
    const long double step = (w * e - x) / (e * (w + 1));
    w -= step;
    if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(w))) break;
  }
  return w;
}

// Power series sum (x/2)^{2m} / (m!)^2 in long double.
inline long double bessel_i0(long double x) {
  long double term = 1, sum = 1;
  const long double q = x * x / 4;
  for (int m = 1; m < 5000; ++m) {
    term *= q / (static_cast<long double>(m) * m);
    sum += term;
    if (term < 1e-22L * sum) break;
  }
  return sum;
}

// lambda (W0(mu e^mu I0(nu sqrt(2P))) / mu - 1)^2 composed from the oracles.
inline long double rectifier(long double p, long double mu = 0.03L, long double nu = 2400.0L,
                             long double lambda = 1e-10L) {
  const long double w = lambert_w0(mu * std::exp(mu) * bessel_i0(nu * std::sqrt(2 * p)));
  const long double r = w / mu - 1;
  return lambda * r * r;
}

}  // namespace oracle
