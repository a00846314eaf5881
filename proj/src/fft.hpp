#pragma once

#include <complex>
#include <span>
#include <vector>

namespace dcpd::detail {

/// In-place iterative radix-2 forward transform, kernel exp(-j 2 pi k m / n),
/// no scaling. n must be a power of two.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  void forward(std::span<std::complex<double>> data) const;

 private:
  std::size_t n_;
  std::vector<std::complex<double>> twiddle_;
  std::vector<std::size_t> bitrev_;
};

}  // namespace dcpd::detail
