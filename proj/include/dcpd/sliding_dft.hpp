#pragma once

// Per-sample recursive update of the dechirped-window DFT.
//
// With V_n the unitary DFT of the dechirped window y[n .. n+M-1], sliding the
// window by one sample obeys
//
//   V_{n+1}[k] = a[k] * (V_n[k-1] + (y[n+M] - y[n]) / sqrt(M)),
//   a[k]       = exp(j 2 pi (1/2 - 1/2M)) exp(j 2 pi k / M),
//
// i.e. a one-bin rotation, a per-bin twiddle and the DFT of a single nonzero
// sample. The replaced element is the one wrapping around (y[n]), not
// y[n+M-1].

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "dcpd/css.hpp"

namespace dcpd {

class SlidingDft {
 public:
  SlidingDft(std::span<const cplx> window, std::shared_ptr<const ChirpTable> table);

  void advance(cplx sample);
  /// Recompute the spectrum from the ring buffer with a full transform.
  void resync();

  /// Uncorrected bins V[k].
  CVec spectrum() const;
  cplx bin(int k) const noexcept {
    const auto i = static_cast<std::size_t>(k);
    return {re_[i], im_[i]};
  }
  cplx corrected(int k) const noexcept { return bin(k) * derotate_[static_cast<std::size_t>(k)]; }
  /// Current window contents, oldest sample first.
  CVec window() const;

  std::uint64_t position() const noexcept { return position_; }
  int m() const noexcept { return m_; }

  /// Advances between automatic resyncs; 0 disables them. Default 16 M.
  void set_resync_interval(std::uint64_t advances) noexcept { resync_interval_ = advances; }
  std::uint64_t resync_interval() const noexcept { return resync_interval_; }

  /// Complex multiply-adds spent in advance() (resyncs excluded).
  std::uint64_t update_ops() const noexcept { return update_ops_; }
  std::uint64_t resync_count() const noexcept { return resyncs_; }

  /// Per-bin factors of the update, shared by all states with the same M.
  struct Twiddles {
    std::vector<double> re, im;
  };

 private:
  std::shared_ptr<const ChirpTable> table_;
  int m_;
  double inv_sqrt_m_;
  void load(const CVec& spectrum);

  // Split storage so the update loop vectorizes.
  std::vector<double> re_, im_;
  std::shared_ptr<const Twiddles> tw_;
  CVec ring_;
  std::span<const cplx> derotate_;
  std::size_t head_ = 0;
  std::uint64_t position_ = 0;
  std::uint64_t since_resync_ = 0;
  std::uint64_t resync_interval_;
  std::uint64_t update_ops_ = 0;
  std::uint64_t resyncs_ = 0;
};

}  // namespace dcpd
