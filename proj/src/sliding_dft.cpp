#include "dcpd/sliding_dft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "dcpd/error.hpp"
#include "phase.hpp"

namespace dcpd {
namespace {

// exp(j pi (M - 1) / M) * exp(j 2 pi k / M), shared by every state of one M.
std::shared_ptr<const SlidingDft::Twiddles> twiddles(int m) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const SlidingDft::Twiddles>> cache;
  const std::lock_guard lock(mutex);
  auto& slot = cache[m];
  if (!slot) {
    auto t = std::make_shared<SlidingDft::Twiddles>();
    for (int k = 0; k < m; ++k) {
      const cplx a = detail::unit_phase(2LL * k + m - 1, m);
      t->re.push_back(a.real());
      t->im.push_back(a.imag());
    }
    slot = std::move(t);
  }
  return slot;
}

}  // namespace

SlidingDft::SlidingDft(std::span<const cplx> window, std::shared_ptr<const ChirpTable> table)
    : table_(std::move(table)),
      m_(table_ ? table_->m() : 0),
      inv_sqrt_m_(0.0),
      resync_interval_(16ULL * static_cast<std::uint64_t>(m_)) {
  if (!table_) fail(ErrorCode::config, "sliding DFT needs a chirp table");
  if (window.size() != static_cast<std::size_t>(m_)) {
    fail(ErrorCode::dimension, "window length " + std::to_string(window.size()) +
                                   " does not match M = " + std::to_string(m_));
  }
  inv_sqrt_m_ = 1.0 / std::sqrt(static_cast<double>(m_));
  ring_.assign(window.begin(), window.end());
  const auto m = ring_.size();
  re_.resize(m);
  im_.resize(m);
  tw_ = twiddles(m_);
  derotate_ = table_->phase_correction();
  load(demod_bins(ring_, *table_).values);
}

void SlidingDft::load(const CVec& spectrum) {
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    re_[k] = spectrum[k].real();
    im_[k] = spectrum[k].imag();
  }
}

CVec SlidingDft::spectrum() const {
  CVec out(re_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {re_[k], im_[k]};
  return out;
}

void SlidingDft::advance(cplx sample) {
  const cplx delta = (sample - ring_[head_]) * inv_sqrt_m_;
  ring_[head_] = sample;
  head_ = head_ + 1 == ring_.size() ? 0 : head_ + 1;

  // In place, highest bin first, so V[k-1] is still the old value when
  // bin k reads it.
  const std::size_t m = ring_.size();
  const double er = delta.real();
  const double ei = delta.imag();
  double* re = re_.data();
  double* im = im_.data();
  const double* tr = tw_->re.data();
  const double* ti = tw_->im.data();
  const double wr = re[m - 1] + er;
  const double wi = im[m - 1] + ei;
  for (std::size_t k = m - 1; k > 0; --k) {
    const double vr = re[k - 1] + er;
    const double vi = im[k - 1] + ei;
    re[k] = tr[k] * vr - ti[k] * vi;
    im[k] = tr[k] * vi + ti[k] * vr;
  }
  re[0] = tr[0] * wr - ti[0] * wi;
  im[0] = tr[0] * wi + ti[0] * wr;
  update_ops_ += m;
  ++position_;

  if (resync_interval_ != 0 && ++since_resync_ >= resync_interval_) resync();
}

void SlidingDft::resync() {
  load(demod_bins(window(), *table_).values);
  since_resync_ = 0;
  ++resyncs_;
}

CVec SlidingDft::window() const {
  CVec out(ring_.size());
  for (std::size_t i = 0; i < ring_.size(); ++i) {
    out[i] = ring_[(head_ + i) % ring_.size()];
  }
  return out;
}

}  // namespace dcpd
