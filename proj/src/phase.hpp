#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace dcpd::detail {

// exp(j pi num / m) with num reduced modulo 2m first, so the phase argument
// stays exact for every integer index.
inline std::complex<double> unit_phase(long long num, int m) {
  const long long period = 2LL * m;
  num %= period;
  if (num < 0) num += period;
  if (num == 0) return {1.0, 0.0};
  const double angle = std::numbers::pi * static_cast<double>(num) / m;
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace dcpd::detail
