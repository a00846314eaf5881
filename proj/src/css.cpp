#include "dcpd/css.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <string>

#include "dcpd/error.hpp"
#include "fft.hpp"
#include "phase.hpp"

namespace dcpd {
namespace {

using detail::unit_phase;

void require_window(std::span<const cplx> window, const ChirpTable& table) {
  if (window.size() != static_cast<std::size_t>(table.m())) {
    fail(ErrorCode::dimension, "window length " + std::to_string(window.size()) +
                                   " does not match M = " + std::to_string(table.m()));
  }
}

const detail::Fft& fft_for(int sf) {
  static std::array<std::unique_ptr<detail::Fft>, kMaxSf + 1> cache;
  static std::mutex guard;
  std::lock_guard lock(guard);
  auto& slot = cache[static_cast<std::size_t>(sf)];
  if (!slot) slot = std::make_unique<detail::Fft>(std::size_t{1} << sf);
  return *slot;
}

}  // namespace

ChirpTable::ChirpTable(int sf) : sf_(sf), m_(0) {
  if (sf < kMinSf || sf > kMaxSf) {
    fail(ErrorCode::config, "spreading factor " + std::to_string(sf) +
                                " outside supported range 5..12");
  }
  m_ = 1 << sf;
  base_.resize(static_cast<std::size_t>(m_));
  base_conj_.resize(base_.size());
  derotate_.resize(base_.size());
  for (int i = 0; i < m_; ++i) {
    // (i^2 / 2M - i / 2) * 2 pi  ==  pi (i^2 - i M) / M
    const long long num = static_cast<long long>(i) * i - static_cast<long long>(i) * m_;
    base_[static_cast<std::size_t>(i)] = unit_phase(num, m_);
    base_conj_[static_cast<std::size_t>(i)] = std::conj(base_[static_cast<std::size_t>(i)]);
    derotate_[static_cast<std::size_t>(i)] = unit_phase(-num, m_);
  }
}

std::shared_ptr<const ChirpTable> ChirpTable::shared(int sf) {
  if (sf < kMinSf || sf > kMaxSf) {
    fail(ErrorCode::config, "spreading factor " + std::to_string(sf) +
                                " outside supported range 5..12");
  }
  static std::array<std::shared_ptr<const ChirpTable>, kMaxSf + 1> cache;
  static std::mutex guard;
  std::lock_guard lock(guard);
  auto& slot = cache[static_cast<std::size_t>(sf)];
  if (!slot) slot = std::make_shared<const ChirpTable>(sf);
  return slot;
}

CVec ChirpTable::chirp(int index) const {
  CVec out(static_cast<std::size_t>(m_));
  for (int i = 0; i < m_; ++i) out[static_cast<std::size_t>(i)] = sample(index, i);
  return out;
}

double bin_phase(int k, int m) {
  return std::arg(unit_phase(static_cast<long long>(k) * k - static_cast<long long>(k) * m, m));
}

CVec dechirp(std::span<const cplx> window, const ChirpTable& table) {
  require_window(window, table);
  const auto ref = table.base_conj();
  CVec out(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) out[i] = window[i] * ref[i];
  return out;
}

BinSpectrum demod_bins(std::span<const cplx> window, const ChirpTable& table) {
  BinSpectrum spec;
  spec.values = dechirp(window, table);
  fft_for(table.sf()).forward(spec.values);
  const double scale = 1.0 / std::sqrt(static_cast<double>(table.m()));
  const auto rot = table.phase_correction();
  spec.corrected.resize(spec.values.size());
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    spec.values[k] *= scale;
    spec.corrected[k] = spec.values[k] * rot[k];
  }
  return spec;
}

cplx demod_bin(std::span<const cplx> window, const ChirpTable& table, int k) {
  require_window(window, table);
  const int m = table.m();
  // conj(s0[i]) exp(-j 2 pi k i / M) exp(-j theta_k) == conj(s_k[i])
  cplx acc{0.0, 0.0};
  for (int i = 0; i < m; ++i) {
    acc += window[static_cast<std::size_t>(i)] * std::conj(table.sample(k, i));
  }
  return acc / std::sqrt(static_cast<double>(m));
}

BinPowerVector square_law_combine(std::span<const BinSpectrum> spectra) {
  if (spectra.empty()) fail(ErrorCode::dimension, "square-law combining needs at least one antenna");
  const std::size_t m = spectra.front().corrected.size();
  BinPowerVector out;
  out.powers.assign(m, 0.0);
  for (const auto& spec : spectra) {
    if (spec.corrected.size() != m) {
      fail(ErrorCode::dimension, "antenna spectra differ in length");
    }
    for (std::size_t k = 0; k < m; ++k) out.powers[k] += std::norm(spec.corrected[k]);
  }
  return out;
}

}  // namespace dcpd
