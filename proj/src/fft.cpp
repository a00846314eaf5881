#include "fft.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <utility>

namespace dcpd::detail {

Fft::Fft(std::size_t n) : n_(n), twiddle_(n / 2), bitrev_(n) {
  const int bits = std::countr_zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b) {
      r |= ((i >> b) & 1U) << (bits - 1 - b);
    }
    bitrev_[i] = r;
  }
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(n);
    twiddle_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void Fft::forward(std::span<std::complex<double>> data) const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const auto w = twiddle_[j * stride];
        const auto a = data[start + j];
        const auto b = data[start + j + half];
        const std::complex<double> t{w.real() * b.real() - w.imag() * b.imag(),
                                     w.real() * b.imag() + w.imag() * b.real()};
        data[start + j] = a + t;
        data[start + j + half] = a - t;
      }
    }
  }
}

}  // namespace dcpd::detail
