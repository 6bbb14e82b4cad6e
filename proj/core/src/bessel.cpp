#include <cmath>
#include <numbers>

#include "dsris/channel.hpp"

namespace dsris {

namespace {

// Ascending series sum_k (-x^2/4)^k / (k!)^2.
double j0_series(double x) {
  const double q = -0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

// Hankel asymptotic expansion, truncated at the smallest term.
double j0_asymptotic(double x) {
  const double eight_x = 8.0 * x;
  double p = 1.0;
  double q = 0.0;
  double c = 1.0;
  double last = 1.0;
  for (int j = 1; j < 60; ++j) {
    const double odd = 2.0 * j - 1.0;
    c *= -(odd * odd) / (static_cast<double>(j) * eight_x);
    if (std::abs(c) > last) break;
    last = std::abs(c);
    // c_j carries the product prod (0 - (2i-1)^2); P takes even j with sign
    // (-1)^(j/2), Q takes odd j with sign (-1)^((j-1)/2).
    if (j % 2 == 0) {
      p += ((j / 2) % 2 == 0 ? 1.0 : -1.0) * c;
    } else {
      q += (((j - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * c;
    }
  }
  const double chi = x - std::numbers::pi / 4.0;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) {
  x = std::abs(x);
  return x < 8.0 ? j0_series(x) : j0_asymptotic(x);
}

}  // namespace dsris
