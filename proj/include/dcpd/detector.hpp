#pragma once

// Non-coherent ML detection of double-chirp preambles.
//
// For each ED the detector tracks the bin-combined preamble (BCP) signal
//
//   Z[t] = (1/L) Re{ sum_l conj(V_l[kappa1]) V_l[kappa2] }
//
// and, once N samples spaced M apart are available, compares three Gaussian
// mixture likelihoods of the window z = [Z[t-(N-1)M], ..., Z[t]]: a partial
// true preamble, pure noise, and a jointly resembled preamble. Everything is
// evaluated in the log domain.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcpd/channel.hpp"
#include "dcpd/css.hpp"
#include "dcpd/preamble.hpp"
#include "dcpd/sliding_dft.hpp"

namespace dcpd {

inline constexpr int kMaxPreambleLength = 32;

enum class PeakFamily { preamble, resembled };

/// One Gaussian component: `peaks` leading (or trailing, when `reversed`)
/// entries are peaks sharing a common fading term, the rest are noise.
struct Hypothesis {
  PeakFamily family = PeakFamily::preamble;
  int peaks = 0;
  bool reversed = false;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd precision;
  double log_det = 0.0;
  double log_norm = 0.0;  // -(N log 2 pi + log det) / 2
};

struct DetectorParams {
  int m = 0;
  int l = 0;
  int n = 0;
  int n_thr = 0;
  double noise_var = 0.0;

  double sigma_n_sq = 0.0;   // sigma^4 / 2L
  double sigma_pp_sq = 0.0;  // M^2/4L + M sigma^2/2L + sigma^4/2L
  double sigma_r_sq = 0.0;   // M^2/8L + M sigma^2/2L + sigma^4/2L
  double pp_cov = 0.0;       // M^2/4L between two true peaks
  double rpp_cov = 0.0;      // M^2/8L between two resembled peaks
  double peak_mean = 0.0;    // M/2

  std::vector<Hypothesis> preamble;   // first p = n_thr..N, last p = n_thr..N-1
  std::vector<Hypothesis> resembled;  // first p = 1..N, last p = 1..N-1
};

DetectorParams make_params(int m, int l, int n, double sigma_sq, int n_thr);

/// Mean and covariance of the window given `peaks` peaks of `family`;
/// p = 0 gives the all-noise model.
Eigen::VectorXd hypothesis_mean(const DetectorParams& params, PeakFamily family, int peaks, bool reversed);
Eigen::MatrixXd hypothesis_covariance(const DetectorParams& params, PeakFamily family, int peaks,
                                      bool reversed);

/// Dense evaluation through the precomputed precision matrix.
double log_density(const Hypothesis& h, std::span<const double> z);

/// (1/L) Re{ bin1^H bin2 } over L antennas of phase-corrected bins.
double bcp(std::span<const cplx> bin1, std::span<const cplx> bin2);
double bcp(std::span<const BinSpectrum> spectra, int kappa1, int kappa2);

struct LogLikelihoods {
  double preamble = 0.0;
  double noise = 0.0;
  double resembled = 0.0;
};

double log_likelihood_noise(std::span<const double> z, const DetectorParams& params);
double log_likelihood_preamble(std::span<const double> z, const DetectorParams& params);
double log_likelihood_resembled(std::span<const double> z, const DetectorParams& params);
LogLikelihoods evaluate(std::span<const double> z, const DetectorParams& params);

/// log L_p > log(L_n + L_r).
bool decide(const LogLikelihoods& ll);
bool decide(std::span<const double> z, const DetectorParams& params);

double log_sum_exp(std::span<const double> terms);

struct DetectionEvent {
  int ed_id = 0;
  std::int64_t sample_index = 0;  // newest sample of the deciding window
  LogLikelihoods ll;
};

struct DetectionOptions {
  bool stop_when_all_detected = true;
  std::uint64_t resync_interval = 0;  // 0 keeps the sliding-DFT default
};

/// Sample-by-sample detector over L antenna streams. Each ED is latched
/// after its first event and no longer evaluated.
class StreamingDetector {
 public:
  StreamingDetector(const AssignmentPlan& plan, DetectorParams params,
                    std::shared_ptr<const ChirpTable> table, DetectionOptions options = {});

  /// One new sample per antenna; appends any events fired at this instant.
  void push(std::span<const cplx> samples, std::vector<DetectionEvent>& events);

  bool all_detected() const noexcept { return undetected_ == 0; }
  std::int64_t samples_seen() const noexcept { return seen_; }
  const DetectorParams& params() const noexcept { return params_; }

 private:
  struct EdState {
    int ed_id;
    int kappa1;
    int kappa2;
    cplx phase;  // conj(derotate[kappa1]) * derotate[kappa2]
    bool detected = false;
  };

  void evaluate_instant(std::vector<DetectionEvent>& events);

  DetectorParams params_;
  std::shared_ptr<const ChirpTable> table_;
  DetectionOptions options_;
  std::vector<EdState> eds_;
  std::vector<SlidingDft> dfts_;
  std::vector<CVec> warmup_;
  std::vector<std::vector<double>> history_;  // per ED, ring of depth (N-1)M+1
  std::size_t depth_ = 0;
  std::size_t slot_ = 0;
  std::uint64_t stored_ = 0;
  std::int64_t seen_ = 0;
  std::size_t undetected_ = 0;
  std::vector<double> window_;
};

std::vector<DetectionEvent> run_detection(const ReceptionStream& stream, const AssignmentPlan& plan,
                                          const DetectorParams& params,
                                          std::shared_ptr<const ChirpTable> table,
                                          DetectionOptions options = {});

/// Z[t] for every ED and every t >= M - 1; element j of each series is the
/// instant t = M - 1 + j.
std::vector<std::vector<double>> bcp_series(const ReceptionStream& stream, const AssignmentPlan& plan,
                                            std::shared_ptr<const ChirpTable> table);

/// Longest run of entries spaced `spacing` apart that all exceed `threshold`.
int longest_peak_run(std::span<const double> series, double threshold, std::size_t spacing);

std::string format_events_csv(std::span<const DetectionEvent> events);
void write_events_csv(std::span<const DetectionEvent> events, const std::string& path);

}  // namespace dcpd
