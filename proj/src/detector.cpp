#include "dcpd/detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "dcpd/error.hpp"

namespace dcpd {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2 pi)

double family_mean(const DetectorParams& p, PeakFamily f) {
  return f == PeakFamily::preamble ? p.peak_mean : 0.0;
}
double family_var(const DetectorParams& p, PeakFamily f) {
  return f == PeakFamily::preamble ? p.sigma_pp_sq : p.sigma_r_sq;
}
double family_cov(const DetectorParams& p, PeakFamily f) {
  return f == PeakFamily::preamble ? p.pp_cov : p.rpp_cov;
}

bool is_peak(int index, int peaks, int n, bool reversed) {
  return reversed ? index >= n - peaks : index < peaks;
}

Hypothesis make_hypothesis(const DetectorParams& params, PeakFamily family, int peaks, bool reversed) {
  Hypothesis h;
  h.family = family;
  h.peaks = peaks;
  h.reversed = reversed;
  h.mean = hypothesis_mean(params, family, peaks, reversed);
  h.covariance = hypothesis_covariance(params, family, peaks, reversed);
  const Eigen::LLT<Eigen::MatrixXd> llt(h.covariance);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::internal, "window covariance with " + std::to_string(peaks) +
                                  " peaks is not positive definite");
  }
  const Eigen::MatrixXd factor = llt.matrixL();
  h.log_det = 2.0 * factor.diagonal().array().log().sum();
  h.precision = llt.solve(Eigen::MatrixXd::Identity(params.n, params.n));
  h.log_norm = -0.5 * (params.n * kLog2Pi + h.log_det);
  return h;
}

// Prefix/suffix statistics of one window, enough to evaluate every
// hypothesis in O(1): a peak block has covariance a I + c 1 1^T, so
//   (x - mu)^T A^-1 (x - mu) = css / a + p (mean - mu)^2 / (a + p c)
// where css is the centred sum of squares of the block.
struct WindowStats {
  int n = 0;
  std::array<double, kMaxPreambleLength + 1> head_mean{};
  std::array<double, kMaxPreambleLength + 1> head_css{};
  std::array<double, kMaxPreambleLength + 1> tail_mean{};
  std::array<double, kMaxPreambleLength + 1> tail_css{};
  std::array<double, kMaxPreambleLength + 1> head_sq{};  // sum of z^2 over the first p
  std::array<double, kMaxPreambleLength + 1> tail_sq{};  // sum of z^2 over the last p

  explicit WindowStats(std::span<const double> z) : n(static_cast<int>(z.size())) {
    double mean = 0.0;
    double css = 0.0;
    double sq = 0.0;
    for (int p = 1; p <= n; ++p) {
      const double v = z[static_cast<std::size_t>(p - 1)];
      const double d = v - mean;
      mean += d / p;
      css += d * (v - mean);
      sq += v * v;
      head_mean[static_cast<std::size_t>(p)] = mean;
      head_css[static_cast<std::size_t>(p)] = css;
      head_sq[static_cast<std::size_t>(p)] = sq;
    }
    mean = css = sq = 0.0;
    for (int p = 1; p <= n; ++p) {
      const double v = z[static_cast<std::size_t>(n - p)];
      const double d = v - mean;
      mean += d / p;
      css += d * (v - mean);
      sq += v * v;
      tail_mean[static_cast<std::size_t>(p)] = mean;
      tail_css[static_cast<std::size_t>(p)] = css;
      tail_sq[static_cast<std::size_t>(p)] = sq;
    }
  }
};

double structured_log_density(const WindowStats& s, const DetectorParams& params, const Hypothesis& h) {
  const int p = h.peaks;
  const int rest = s.n - p;
  const auto up = static_cast<std::size_t>(p);
  const auto ur = static_cast<std::size_t>(rest);
  const double noise_ss = h.reversed ? s.head_sq[ur] : s.tail_sq[ur];
  double q = noise_ss / params.sigma_n_sq;
  if (p > 0) {
    const double c = family_cov(params, h.family);
    const double a = family_var(params, h.family) - c;
    const double mean = h.reversed ? s.tail_mean[up] : s.head_mean[up];
    const double css = h.reversed ? s.tail_css[up] : s.head_css[up];
    const double off = mean - family_mean(params, h.family);
    q += css / a + p * off * off / (a + p * c);
  }
  return h.log_norm - 0.5 * q;
}

double noise_log_density(const WindowStats& s, const DetectorParams& params) {
  return -s.head_sq[static_cast<std::size_t>(s.n)] / (2.0 * params.sigma_n_sq) -
         0.5 * s.n * (kLog2Pi + std::log(params.sigma_n_sq));
}

void require_window(std::span<const double> z, const DetectorParams& params) {
  if (static_cast<int>(z.size()) != params.n) {
    fail(ErrorCode::dimension, "BCP window has " + std::to_string(z.size()) + " entries, expected N = " +
                                   std::to_string(params.n));
  }
}

// Log densities of every component of one family, written to `out`.
std::size_t family_terms(const WindowStats& s, const DetectorParams& params,
                         const std::vector<Hypothesis>& family, double* out) {
  for (std::size_t i = 0; i < family.size(); ++i) out[i] = structured_log_density(s, params, family[i]);
  return family.size();
}

}  // namespace

DetectorParams make_params(int m, int l, int n, double sigma_sq, int n_thr) {
  if (m < 4 || (m & (m - 1)) != 0) fail(ErrorCode::config, "M must be a power of two >= 4");
  if (l < 1) fail(ErrorCode::config, "need at least one antenna");
  if (n < 1 || n > kMaxPreambleLength) {
    fail(ErrorCode::config, "preamble length must be in 1.." + std::to_string(kMaxPreambleLength));
  }
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) fail(ErrorCode::config, "noise variance must be positive");
  if (n_thr < 1 || n_thr > n) fail(ErrorCode::config, "peak threshold must be in 1..N");

  DetectorParams p;
  p.m = m;
  p.l = l;
  p.n = n;
  p.n_thr = n_thr;
  p.noise_var = sigma_sq;
  const double md = m;
  const double ld = l;
  const double s4 = sigma_sq * sigma_sq;
  p.sigma_n_sq = s4 / (2.0 * ld);
  p.pp_cov = md * md / (4.0 * ld);
  p.rpp_cov = md * md / (8.0 * ld);
  p.sigma_pp_sq = p.pp_cov + md * sigma_sq / (2.0 * ld) + p.sigma_n_sq;
  p.sigma_r_sq = p.rpp_cov + md * sigma_sq / (2.0 * ld) + p.sigma_n_sq;
  p.peak_mean = md / 2.0;

  for (int k = n_thr; k <= n; ++k) p.preamble.push_back(make_hypothesis(p, PeakFamily::preamble, k, false));
  for (int k = n_thr; k <= n - 1; ++k) p.preamble.push_back(make_hypothesis(p, PeakFamily::preamble, k, true));
  for (int k = 1; k <= n; ++k) p.resembled.push_back(make_hypothesis(p, PeakFamily::resembled, k, false));
  for (int k = 1; k <= n - 1; ++k) p.resembled.push_back(make_hypothesis(p, PeakFamily::resembled, k, true));
  return p;
}

Eigen::VectorXd hypothesis_mean(const DetectorParams& params, PeakFamily family, int peaks, bool reversed) {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(params.n);
  for (int i = 0; i < params.n; ++i) {
    if (is_peak(i, peaks, params.n, reversed)) mu(i) = family_mean(params, family);
  }
  return mu;
}

Eigen::MatrixXd hypothesis_covariance(const DetectorParams& params, PeakFamily family, int peaks,
                                      bool reversed) {
  const int n = params.n;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const bool pi = is_peak(i, peaks, n, reversed);
    cov(i, i) = pi ? family_var(params, family) : params.sigma_n_sq;
    if (!pi) continue;
    for (int j = 0; j < n; ++j) {
      if (j != i && is_peak(j, peaks, n, reversed)) cov(i, j) = family_cov(params, family);
    }
  }
  return cov;
}

double log_density(const Hypothesis& h, std::span<const double> z) {
  const Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
  const Eigen::VectorXd d = zv - h.mean;
  return h.log_norm - 0.5 * d.dot(h.precision * d);
}

double bcp(std::span<const cplx> bin1, std::span<const cplx> bin2) {
  if (bin1.size() != bin2.size() || bin1.empty()) {
    fail(ErrorCode::dimension, "BCP needs the same nonzero antenna count on both bins");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < bin1.size(); ++i) {
    acc += bin1[i].real() * bin2[i].real() + bin1[i].imag() * bin2[i].imag();
  }
  return acc / static_cast<double>(bin1.size());
}

double bcp(std::span<const BinSpectrum> spectra, int kappa1, int kappa2) {
  CVec b1;
  CVec b2;
  for (const auto& s : spectra) {
    b1.push_back(s.corrected.at(static_cast<std::size_t>(kappa1)));
    b2.push_back(s.corrected.at(static_cast<std::size_t>(kappa2)));
  }
  return bcp(b1, b2);
}

double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (const double t : terms) acc += std::exp(t - hi);
  return hi + std::log(acc);
}

double log_likelihood_noise(std::span<const double> z, const DetectorParams& params) {
  require_window(z, params);
  return noise_log_density(WindowStats(z), params);
}

double log_likelihood_preamble(std::span<const double> z, const DetectorParams& params) {
  require_window(z, params);
  std::array<double, 2 * kMaxPreambleLength> terms;
  const auto k = family_terms(WindowStats(z), params, params.preamble, terms.data());
  return log_sum_exp(std::span<const double>(terms.data(), k));
}

double log_likelihood_resembled(std::span<const double> z, const DetectorParams& params) {
  require_window(z, params);
  std::array<double, 2 * kMaxPreambleLength> terms;
  const auto k = family_terms(WindowStats(z), params, params.resembled, terms.data());
  return log_sum_exp(std::span<const double>(terms.data(), k));
}

LogLikelihoods evaluate(std::span<const double> z, const DetectorParams& params) {
  require_window(z, params);
  const WindowStats stats(z);
  std::array<double, 2 * kMaxPreambleLength> terms;
  LogLikelihoods ll;
  auto k = family_terms(stats, params, params.preamble, terms.data());
  ll.preamble = log_sum_exp(std::span<const double>(terms.data(), k));
  k = family_terms(stats, params, params.resembled, terms.data());
  ll.resembled = log_sum_exp(std::span<const double>(terms.data(), k));
  ll.noise = noise_log_density(stats, params);
  return ll;
}

bool decide(const LogLikelihoods& ll) {
  const std::array<double, 2> rest{ll.noise, ll.resembled};
  return ll.preamble > log_sum_exp(rest);
}

bool decide(std::span<const double> z, const DetectorParams& params) {
  require_window(z, params);
  const WindowStats stats(z);
  std::array<double, 2 * kMaxPreambleLength> pre;
  std::array<double, 2 * kMaxPreambleLength + 1> rest;
  const auto kp = family_terms(stats, params, params.preamble, pre.data());
  auto kr = family_terms(stats, params, params.resembled, rest.data());
  rest[kr++] = noise_log_density(stats, params);

  // log sum over kp terms lies in [max, max + log kp]; the competing sum is at
  // least its largest term. Settle the clear cases before paying for exp().
  const double pre_max = *std::max_element(pre.begin(), pre.begin() + static_cast<std::ptrdiff_t>(kp));
  const double rest_max = *std::max_element(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(kr));
  if (pre_max + std::log(static_cast<double>(kp)) <= rest_max) return false;
  return log_sum_exp(std::span<const double>(pre.data(), kp)) >
         log_sum_exp(std::span<const double>(rest.data(), kr));
}

// --- streaming detector ----------------------------------------------------

StreamingDetector::StreamingDetector(const AssignmentPlan& plan, DetectorParams params,
                                     std::shared_ptr<const ChirpTable> table, DetectionOptions options)
    : params_(std::move(params)), table_(std::move(table)), options_(options) {
  if (!table_) fail(ErrorCode::config, "detector needs a chirp table");
  if (plan.m != params_.m || table_->m() != params_.m) {
    fail(ErrorCode::config, "plan, detector and chirp table disagree on M");
  }
  if (plan.n_preamble != params_.n) fail(ErrorCode::config, "plan and detector disagree on N");
  const auto derot = table_->phase_correction();
  for (const auto& a : plan.assignments) {
    if (a.kappa1 < 0 || a.kappa1 >= params_.m || a.kappa2 < 0 || a.kappa2 >= params_.m) {
      fail(ErrorCode::config, "ED " + std::to_string(a.ed_id) + ": chirp index outside 0..M-1");
    }
    const auto k1 = static_cast<std::size_t>(a.kappa1);
    const auto k2 = static_cast<std::size_t>(a.kappa2);
    eds_.push_back({a.ed_id, a.kappa1, a.kappa2, std::conj(derot[k1]) * derot[k2]});
  }
  undetected_ = eds_.size();
  depth_ = static_cast<std::size_t>(params_.n - 1) * static_cast<std::size_t>(params_.m) + 1;
  history_.assign(eds_.size(), std::vector<double>(depth_, 0.0));
  warmup_.assign(static_cast<std::size_t>(params_.l), CVec{});
  window_.resize(static_cast<std::size_t>(params_.n));
}

void StreamingDetector::push(std::span<const cplx> samples, std::vector<DetectionEvent>& events) {
  if (samples.size() != static_cast<std::size_t>(params_.l)) {
    fail(ErrorCode::dimension, "expected one sample per antenna (" + std::to_string(params_.l) + ")");
  }
  ++seen_;
  if (dfts_.empty()) {
    for (std::size_t l = 0; l < samples.size(); ++l) warmup_[l].push_back(samples[l]);
    if (seen_ < params_.m) return;
    for (auto& w : warmup_) {
      dfts_.emplace_back(w, table_);
      if (options_.resync_interval != 0) dfts_.back().set_resync_interval(options_.resync_interval);
      CVec{}.swap(w);
    }
  } else {
    for (std::size_t l = 0; l < samples.size(); ++l) dfts_[l].advance(samples[l]);
  }
  evaluate_instant(events);
}

void StreamingDetector::evaluate_instant(std::vector<DetectionEvent>& events) {
  const double inv_l = 1.0 / static_cast<double>(params_.l);
  for (std::size_t u = 0; u < eds_.size(); ++u) {
    const auto& ed = eds_[u];
    if (ed.detected) continue;
    cplx acc{0.0, 0.0};
    for (const auto& dft : dfts_) acc += std::conj(dft.bin(ed.kappa1)) * dft.bin(ed.kappa2);
    history_[u][slot_] = (ed.phase * acc).real() * inv_l;
  }

  if (++stored_ >= depth_) {
    const std::size_t m = static_cast<std::size_t>(params_.m);
    const std::size_t n = static_cast<std::size_t>(params_.n);
    for (std::size_t u = 0; u < eds_.size(); ++u) {
      auto& ed = eds_[u];
      if (ed.detected) continue;
      const auto& h = history_[u];
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lag = (n - 1 - i) * m;
        window_[i] = h[(slot_ + depth_ - lag) % depth_];
      }
      if (decide(window_, params_)) {
        events.push_back({ed.ed_id, seen_ - 1, evaluate(window_, params_)});
        ed.detected = true;
        --undetected_;
      }
    }
  }
  slot_ = slot_ + 1 == depth_ ? 0 : slot_ + 1;
}

std::vector<DetectionEvent> run_detection(const ReceptionStream& stream, const AssignmentPlan& plan,
                                          const DetectorParams& params,
                                          std::shared_ptr<const ChirpTable> table, DetectionOptions options) {
  if (stream.m != params.m) fail(ErrorCode::config, "stream and detector disagree on M");
  if (stream.l != params.l || stream.samples.size() != static_cast<std::size_t>(params.l)) {
    fail(ErrorCode::config, "stream and detector disagree on the antenna count");
  }
  StreamingDetector det(plan, params, std::move(table), options);
  std::vector<DetectionEvent> events;
  CVec instant(stream.samples.size());
  const std::size_t t_end = stream.length();
  for (std::size_t t = 0; t < t_end; ++t) {
    for (std::size_t l = 0; l < instant.size(); ++l) instant[l] = stream.samples[l][t];
    det.push(instant, events);
    if (options.stop_when_all_detected && det.all_detected()) break;
  }
  return events;
}

std::vector<std::vector<double>> bcp_series(const ReceptionStream& stream, const AssignmentPlan& plan,
                                            std::shared_ptr<const ChirpTable> table) {
  if (!table || stream.m != table->m() || plan.m != table->m()) {
    fail(ErrorCode::config, "stream, plan and chirp table disagree on M");
  }
  const auto m = static_cast<std::size_t>(table->m());
  const std::size_t t_end = stream.length();
  std::vector<std::vector<double>> out(plan.assignments.size());
  if (t_end < m) return out;

  std::vector<SlidingDft> dfts;
  for (const auto& y : stream.samples) dfts.emplace_back(std::span<const cplx>(y.data(), m), table);
  const auto derot = table->phase_correction();
  CVec bin1(dfts.size());
  CVec bin2(dfts.size());
  for (std::size_t t = m - 1; t < t_end; ++t) {
    if (t >= m) {
      for (std::size_t l = 0; l < dfts.size(); ++l) dfts[l].advance(stream.samples[l][t]);
    }
    for (std::size_t u = 0; u < plan.assignments.size(); ++u) {
      const auto k1 = static_cast<std::size_t>(plan.assignments[u].kappa1);
      const auto k2 = static_cast<std::size_t>(plan.assignments[u].kappa2);
      for (std::size_t l = 0; l < dfts.size(); ++l) {
        bin1[l] = dfts[l].bin(static_cast<int>(k1)) * derot[k1];
        bin2[l] = dfts[l].bin(static_cast<int>(k2)) * derot[k2];
      }
      out[u].push_back(bcp(bin1, bin2));
    }
  }
  return out;
}

int longest_peak_run(std::span<const double> series, double threshold, std::size_t spacing) {
  if (spacing == 0) fail(ErrorCode::config, "peak spacing must be positive");
  int best = 0;
  for (std::size_t phase = 0; phase < spacing && phase < series.size(); ++phase) {
    int run = 0;
    for (std::size_t i = phase; i < series.size(); i += spacing) {
      run = series[i] > threshold ? run + 1 : 0;
      best = std::max(best, run);
    }
  }
  return best;
}

std::string format_events_csv(std::span<const DetectionEvent> events) {
  std::string out = "ed_id,sample_index,log_l_preamble,log_l_noise,log_l_resembled\n";
  char line[160];
  for (const auto& e : events) {
    std::snprintf(line, sizeof line, "%d,%lld,%.10g,%.10g,%.10g\n", e.ed_id,
                  static_cast<long long>(e.sample_index), e.ll.preamble, e.ll.noise, e.ll.resembled);
    out += line;
  }
  return out;
}

void write_events_csv(std::span<const DetectionEvent> events, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << format_events_csv(events);
  if (!out) fail(ErrorCode::io, "write to '" + path + "' failed");
}

}  // namespace dcpd
