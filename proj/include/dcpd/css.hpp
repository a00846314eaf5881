#pragma once

// LoRa chirp generation and the DFT-based demodulator front end.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace dcpd {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr int kMinSf = 5;
inline constexpr int kMaxSf = 12;

/// The M cyclic shifts of the basic upchirp at one spreading factor.
///
/// Only the basic upchirp is stored; chirp k at sample m is the basic chirp
/// at cyclic index (m + k) mod M, so the full M x M table is never
/// materialised (it would be 256 MiB at SF 12). Samples are 0-based.
class ChirpTable {
 public:
  explicit ChirpTable(int sf);

  /// Process-wide cached instance, built on first use.
  static std::shared_ptr<const ChirpTable> shared(int sf);

  int sf() const noexcept { return sf_; }
  int m() const noexcept { return m_; }

  cplx sample(int chirp, int m) const noexcept {
    return base_[static_cast<std::size_t>((chirp + m) & (m_ - 1))];
  }
  CVec chirp(int index) const;
  std::span<const cplx> base() const noexcept { return base_; }
  std::span<const cplx> base_conj() const noexcept { return base_conj_; }

  /// exp(-j theta_k), the factor that strips the bin-dependent phase offset.
  std::span<const cplx> phase_correction() const noexcept { return derotate_; }

 private:
  int sf_;
  int m_;
  CVec base_;
  CVec base_conj_;
  CVec derotate_;
};

/// theta_k = 2 pi (k^2 / 2M - k / 2), reduced to (-pi, pi].
double bin_phase(int k, int m);

struct BinSpectrum {
  CVec values;     // V[k], unitary DFT of the dechirped window
  CVec corrected;  // V[k] exp(-j theta_k)
};

struct BinPowerVector {
  std::vector<double> powers;
};

CVec dechirp(std::span<const cplx> window, const ChirpTable& table);

/// Unitary DFT (1/sqrt(M)) of the dechirped window, so an aligned unit
/// channel chirp lands as sqrt(M) on its bin.
BinSpectrum demod_bins(std::span<const cplx> window, const ChirpTable& table);

/// One phase-corrected bin by direct correlation, O(M).
cplx demod_bin(std::span<const cplx> window, const ChirpTable& table, int k);

BinPowerVector square_law_combine(std::span<const BinSpectrum> spectra);

}  // namespace dcpd
