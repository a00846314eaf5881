#include "dcpd/channel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dcpd/error.hpp"

namespace dcpd {

double ChannelVector::norm_sq() const {
  double s = 0.0;
  for (const auto& g : gains) s += std::norm(g);
  return s;
}

ChannelVector draw_channel(int l_antennas, Rng& rng) {
  if (l_antennas < 1) fail(ErrorCode::config, "need at least one antenna");
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  ChannelVector h;
  h.gains.resize(static_cast<std::size_t>(l_antennas));
  for (auto& g : h.gains) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    g = {re, im};
  }
  return h;
}

std::vector<std::int64_t> draw_toas(int n_users, int m, Rng& rng, std::int64_t first_offset,
                                    double mean_gap) {
  if (n_users < 1) fail(ErrorCode::config, "need at least one ED");
  if (first_offset < 0) fail(ErrorCode::config, "first ToA offset must be nonnegative");
  const double mean = mean_gap > 0.0 ? mean_gap : static_cast<double>(m);
  std::exponential_distribution<double> gap(1.0 / mean);
  std::vector<std::int64_t> toas(static_cast<std::size_t>(n_users));
  toas[0] = first_offset;
  for (std::size_t u = 1; u < toas.size(); ++u) toas[u] = toas[u - 1] + std::llround(gap(rng));
  return toas;
}

PacketPlan draw_packet(const PreambleAssignment& assignment, int n_preamble, int payload_len,
                       std::int64_t toa, Rng& rng, int m) {
  if (payload_len < 0) fail(ErrorCode::config, "payload length must be nonnegative");
  if (n_preamble < 1) fail(ErrorCode::config, "preamble length must be positive");
  PacketPlan p;
  p.ed_id = assignment.ed_id;
  p.toa = toa;
  p.assignment = assignment;
  p.n_preamble = n_preamble;
  std::uniform_int_distribution<int> symbol(0, m - 1);
  p.payload.resize(static_cast<std::size_t>(payload_len));
  for (auto& s : p.payload) s = symbol(rng);
  return p;
}

CVec build_packet(const PacketPlan& packet, const ChirpTable& table) {
  const int m = table.m();
  const auto symbol = build_preamble_symbol(packet.assignment, table);
  CVec out;
  out.reserve(packet.length(m));
  for (int r = 0; r < packet.n_preamble; ++r) out.insert(out.end(), symbol.begin(), symbol.end());
  for (const int s : packet.payload) {
    for (int i = 0; i < m; ++i) out.push_back(table.sample(s, i));
  }
  return out;
}

CVec build_packet(const PreambleAssignment& assignment, int n_preamble, int payload_len, Rng& rng,
                  const ChirpTable& table) {
  return build_packet(draw_packet(assignment, n_preamble, payload_len, 0, rng, table.m()), table);
}

ReceptionStream superpose(std::span<const PacketPlan> packets, std::span<const ChannelVector> channels,
                          int l_antennas, std::size_t length, const ChirpTable& table) {
  if (l_antennas < 1) fail(ErrorCode::config, "need at least one antenna");
  if (packets.size() != channels.size()) {
    fail(ErrorCode::dimension, "one channel vector per packet is required");
  }
  ReceptionStream out;
  out.l = l_antennas;
  out.m = table.m();
  out.samples.assign(static_cast<std::size_t>(l_antennas), CVec(length));

  for (std::size_t p = 0; p < packets.size(); ++p) {
    const auto& pkt = packets[p];
    const auto& h = channels[p];
    if (h.gains.size() != static_cast<std::size_t>(l_antennas)) {
      fail(ErrorCode::dimension, "channel of ED " + std::to_string(pkt.ed_id) + " has wrong antenna count");
    }
    if (pkt.toa < 0 || static_cast<std::size_t>(pkt.toa) + pkt.length(table.m()) > length) {
      fail(ErrorCode::config, "packet of ED " + std::to_string(pkt.ed_id) + " overruns the stream");
    }
    const auto x = build_packet(pkt, table);
    const auto start = static_cast<std::size_t>(pkt.toa);
    for (std::size_t l = 0; l < out.samples.size(); ++l) {
      auto& y = out.samples[l];
      const cplx g = h.gains[l];
      for (std::size_t i = 0; i < x.size(); ++i) y[start + i] += g * x[i];
    }
  }
  return out;
}

NoiseSource::NoiseSource(double noise_var, Rng& rng)
    : rng_(rng), active_(noise_var > 0.0), gauss_(0.0, std::sqrt(std::max(noise_var, 0.0) / 2.0)) {
  if (noise_var < 0.0 || !std::isfinite(noise_var)) fail(ErrorCode::config, "noise variance must be nonnegative");
}

void NoiseSource::add(std::span<cplx> instant) {
  if (!active_) return;
  for (auto& v : instant) {
    const double re = gauss_(rng_);
    const double im = gauss_(rng_);
    v += cplx{re, im};
  }
}

ReceptionStream synthesize(std::span<const PacketPlan> packets, std::span<const ChannelVector> channels,
                           double noise_var, int l_antennas, std::size_t length, Rng& rng,
                           const ChirpTable& table) {
  NoiseSource noise(noise_var, rng);
  auto out = superpose(packets, channels, l_antennas, length, table);
  out.noise_var = noise_var;
  if (noise_var > 0.0) {
    CVec instant(out.samples.size());
    for (std::size_t t = 0; t < length; ++t) {
      for (std::size_t l = 0; l < instant.size(); ++l) instant[l] = out.samples[l][t];
      noise.add(instant);
      for (std::size_t l = 0; l < instant.size(); ++l) out.samples[l][t] = instant[l];
    }
  }
  return out;
}

namespace {

template <typename T>
void put_le(std::ofstream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::ifstream& in, const std::string& path) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    fail(ErrorCode::io, "'" + path + "' is truncated");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_stream(const ReceptionStream& stream, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  out.write("CNIQ", 4);
  put_le<std::uint32_t>(out, kStreamVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(stream.l));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(stream.length()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(stream.m));
  put_le<std::uint32_t>(out, 0U);
  put_le<double>(out, stream.noise_var);
  for (const auto& y : stream.samples) {
    for (const auto& v : y) {
      put_le<double>(out, v.real());
      put_le<double>(out, v.imag());
    }
  }
  if (!out) fail(ErrorCode::io, "write to '" + path + "' failed");
}

ReceptionStream read_stream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "' for reading");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "CNIQ", 4) != 0) {
    fail(ErrorCode::io, "'" + path + "' is not a CNIQ stream");
  }
  const auto version = get_le<std::uint32_t>(in, path);
  if (version != kStreamVersion) fail(ErrorCode::io, "unsupported CNIQ version " + std::to_string(version));
  ReceptionStream s;
  s.l = static_cast<int>(get_le<std::uint32_t>(in, path));
  const auto t = get_le<std::uint32_t>(in, path);
  s.m = static_cast<int>(get_le<std::uint32_t>(in, path));
  (void)get_le<std::uint32_t>(in, path);
  s.noise_var = get_le<double>(in, path);
  s.samples.assign(static_cast<std::size_t>(s.l), CVec(t));
  for (auto& y : s.samples) {
    for (auto& v : y) {
      const double re = get_le<double>(in, path);
      const double im = get_le<double>(in, path);
      v = {re, im};
    }
  }
  return s;
}

}  // namespace dcpd
