#pragma once

// Asynchronous multiuser uplink synthesis: Rayleigh block fading to L
// antennas, AWGN, superposition of per-ED packets.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dcpd/css.hpp"
#include "dcpd/preamble.hpp"

namespace dcpd {

using Rng = std::mt19937_64;

struct ChannelVector {
  CVec gains;

  double norm_sq() const;
};

/// i.i.d. CN(0, 1) per antenna, held for the whole trial.
ChannelVector draw_channel(int l_antennas, Rng& rng);

/// Sorted ToAs: the first at `first_offset`, later ones separated by
/// exponential gaps of mean `mean_gap` samples (M when 0), rounded to
/// whole samples.
std::vector<std::int64_t> draw_toas(int n_users, int m, Rng& rng, std::int64_t first_offset = 0,
                                    double mean_gap = 0.0);

struct PacketPlan {
  int ed_id = 0;
  std::int64_t toa = 0;
  PreambleAssignment assignment;
  int n_preamble = 8;
  std::vector<int> payload;

  std::size_t length(int m) const {
    return static_cast<std::size_t>(n_preamble + static_cast<int>(payload.size())) *
           static_cast<std::size_t>(m);
  }
};

PacketPlan draw_packet(const PreambleAssignment& assignment, int n_preamble, int payload_len,
                       std::int64_t toa, Rng& rng, int m);

/// N repetitions of the double-chirp symbol followed by the payload chirps.
CVec build_packet(const PacketPlan& packet, const ChirpTable& table);
CVec build_packet(const PreambleAssignment& assignment, int n_preamble, int payload_len, Rng& rng,
                  const ChirpTable& table);

struct ReceptionStream {
  int l = 0;
  int m = 0;
  double noise_var = 0.0;
  std::vector<CVec> samples;  // one sequence per antenna

  std::size_t length() const { return samples.empty() ? 0 : samples.front().size(); }
};

/// Noise-free part: y[l][n] = sum_u h_u[l] x_u[n - toa_u].
/// `channels` is indexed like `packets`.
ReceptionStream superpose(std::span<const PacketPlan> packets, std::span<const ChannelVector> channels,
                          int l_antennas, std::size_t length, const ChirpTable& table);

/// Source of CN(0, noise_var) samples drawn time-major: all antennas of
/// sample 0, then sample 1, and so on. Draws nothing when noise_var is 0.
class NoiseSource {
 public:
  NoiseSource(double noise_var, Rng& rng);
  void add(std::span<cplx> instant);

 private:
  Rng& rng_;
  bool active_;
  std::normal_distribution<double> gauss_;
};

/// superpose() plus noise from a NoiseSource.
ReceptionStream synthesize(std::span<const PacketPlan> packets, std::span<const ChannelVector> channels,
                           double noise_var, int l_antennas, std::size_t length, Rng& rng,
                           const ChirpTable& table);

/// Binary dump: 32-byte little-endian header
///   0  "CNIQ"      4  u32 version (1)   8  u32 L   12 u32 T   16 u32 M
///   20 u32 zero    24 f64 noise variance
/// then L antenna blocks of T interleaved (re, im) f64 samples.
inline constexpr std::uint32_t kStreamVersion = 1;
void write_stream(const ReceptionStream& stream, const std::string& path);
ReceptionStream read_stream(const std::string& path);

}  // namespace dcpd
