#pragma once

// Monte Carlo driver: per-trial synthesis, detection and scoring, PER
// aggregation over an SNR grid, CSV output and named reproductions.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcpd/channel.hpp"
#include "dcpd/detector.hpp"
#include "dcpd/preamble.hpp"

namespace dcpd {

enum class PolicyKind { sequential, seeded_random, explicit_pairs };

struct SimConfig {
  int sf = 7;
  int l_antennas = 32;
  int n_users = 1;
  int n_preamble = 8;
  int n_thr = 4;
  std::vector<double> snr_grid_db;  // default -20..0 dB in 1 dB steps
  std::int64_t trials = 2000;
  std::uint64_t master_seed = 1;
  PolicyKind policy = PolicyKind::sequential;
  std::vector<PreambleAssignment> explicit_pairs;  // policy = explicit
  int payload_min = 20;
  int payload_max = 30;
  double toa_mean_gap = 0.0;  // samples; 0 means M
  int threads = 0;            // 0 means hardware concurrency

  int m() const { return 1 << sf; }
};

SimConfig default_config();

/// Flat `key = value` text; see README for the key list. Unknown keys and
/// out-of-range values raise configuration errors.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::string& path);
std::string format_config(const SimConfig& config);
void set_config_value(SimConfig& config, std::string_view key, std::string_view value);
void validate_config(const SimConfig& config);

/// Plan used by every trial of an experiment. Explicit pairs are not
/// checked against the assignment constraints, so duplicate deltas can be
/// simulated on purpose.
AssignmentPlan build_plan(const SimConfig& config);

double noise_var_from_snr_db(double snr_db);

enum class EdOutcome { correct, missed, wrong };

struct TrialOutcome {
  std::vector<EdOutcome> outcomes;  // indexed like plan.assignments
  std::vector<std::int64_t> toas;
  std::vector<DetectionEvent> events;
};

/// An event for ED u is correct when it sits on a symbol boundary of u's
/// preamble (within one sample) and no later than the last instant at
/// which a window can still hold n_thr of its preamble peaks.
bool event_matches(std::int64_t sample_index, std::int64_t toa, int m, int n_preamble);

/// Deterministic given (master_seed, trial_index); the SNR only scales the
/// noise, so all grid points share the same channels, ToAs and payloads.
TrialOutcome run_trial(const SimConfig& config, const AssignmentPlan& plan, const DetectorParams& params,
                       double snr_db, std::uint64_t trial_index);
TrialOutcome run_trial(const SimConfig& config, double snr_db, std::uint64_t trial_index);

/// Stream of one trial before detection.
ReceptionStream synthesize_trial(const SimConfig& config, const AssignmentPlan& plan, double snr_db,
                                 std::uint64_t trial_index, std::vector<std::int64_t>* toas = nullptr);

struct PerPoint {
  double snr_db = 0.0;
  double per_overall = 0.0;
  double per_missed = 0.0;
  double per_wrong = 0.0;
  std::int64_t trials = 0;
  double ci_halfwidth = 0.0;
  std::int64_t missed = 0;  // ED-trials
  std::int64_t wrong = 0;
};

struct PerResult {
  std::vector<PerPoint> points;
};

PerPoint make_point(double snr_db, std::int64_t trials, int n_users, std::int64_t missed, std::int64_t wrong);

/// `done` counts finished trials over the whole grid.
using ProgressFn = std::function<void(std::int64_t done, std::int64_t total)>;

PerResult run_experiment(const SimConfig& config, const ProgressFn& progress = {});

std::string format_csv(const PerResult& result);
void emit_csv(const PerResult& result, const std::string& path);
PerResult parse_csv(std::string_view text);

/// SNR at which the overall PER first falls to `target`, interpolating
/// log10(PER) linearly between grid points. Empty when never reached.
std::optional<double> crossing_snr(const PerResult& result, double target = 1e-3);

/// Noiseless resemblance reproductions.
struct Example1Report {
  int ed1_run = 0;  // longest peak run on the transmitting ED's own series
  int ed2_run = 0;
  int ed3_run = 0;
  double ed1_peak = 0.0;  // largest Z of ED 1, expected M/2 * |h|^2 / L
  double expected_peak = 0.0;
  int n_preamble = 8;

  /// Full run on ED 1 and ED 3 (resembled), none on ED 2.
  bool passed() const { return ed1_run == n_preamble && ed2_run == 0 && ed3_run == n_preamble; }
};
Example1Report run_example1(std::uint64_t seed);

struct Example2Report {
  std::vector<DetectionEvent> events;
  int ed3_run = 0;          // resembled peaks on the idle ED's series
  double ed3_peak = 0.0;    // largest |Z| of ED 3
  bool ed1_detected = false;
  bool ed2_detected = false;
  bool ed3_detected = false;

  bool passed() const { return ed1_detected && ed2_detected && !ed3_detected; }
};
Example2Report run_example2(std::uint64_t seed);

struct SelfResemblanceReport {
  int peaks = 0;       // longest run of peaks spaced M/2
  int run_at_m = 0;    // longest run spaced M
  int n_preamble = 8;

  bool passed() const { return peaks == 2 * n_preamble; }
};
SelfResemblanceReport run_self_resemblance(std::uint64_t seed);

/// Named reproductions of the PER experiments.
struct ScenarioSeries {
  std::string label;
  SimConfig config;
};

struct ScenarioSpec {
  std::string name;
  std::string description;
  std::vector<ScenarioSeries> series;
  std::optional<double> transition_snr_db;  // where rate orderings are compared
};

const std::vector<std::string>& scenario_names();
/// Throws a configuration error for names without a PER experiment.
ScenarioSpec scenario_spec(std::string_view name);

}  // namespace dcpd
