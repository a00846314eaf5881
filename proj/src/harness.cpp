#include "dcpd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "dcpd/error.hpp"
#include "dcpd/keyvalue.hpp"

namespace dcpd {
namespace {

constexpr double kZ95 = 1.959963984540054;

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int s = -20; s <= 0; ++s) g.push_back(s);
  return g;
}

const char* policy_name(PolicyKind p) {
  switch (p) {
    case PolicyKind::sequential: return "sequential";
    case PolicyKind::seeded_random: return "seeded-random";
    case PolicyKind::explicit_pairs: return "explicit";
  }
  return "sequential";
}

Rng trial_rng(std::uint64_t master_seed, std::uint64_t trial_index) {
  const std::uint64_t s = master_seed + trial_index;
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
  return Rng(seq);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SimConfig default_config() {
  SimConfig c;
  c.snr_grid_db = default_grid();
  return c;
}

void set_config_value(SimConfig& c, std::string_view key_in, std::string_view value) {
  const KeyValue kv{std::string(key_in), std::string(value), 0};
  const auto& key = kv.key;
  if (key == "sf") {
    c.sf = parse_int(kv);
  } else if (key == "l_antennas") {
    c.l_antennas = parse_int(kv);
  } else if (key == "n_users") {
    c.n_users = parse_int(kv);
  } else if (key == "n_preamble") {
    c.n_preamble = parse_int(kv);
  } else if (key == "n_thr") {
    c.n_thr = parse_int(kv);
  } else if (key == "snr_grid_db") {
    c.snr_grid_db = parse_double_list(kv);
  } else if (key == "trials") {
    c.trials = static_cast<std::int64_t>(parse_u64(kv));
  } else if (key == "master_seed") {
    c.master_seed = parse_u64(kv);
  } else if (key == "policy") {
    if (kv.value == "explicit") {
      c.policy = PolicyKind::explicit_pairs;
    } else {
      c.policy = parse_policy(kv.value) == AssignmentPolicy::sequential ? PolicyKind::sequential
                                                                        : PolicyKind::seeded_random;
    }
  } else if (key == "payload_min") {
    c.payload_min = parse_int(kv);
  } else if (key == "payload_max") {
    c.payload_max = parse_int(kv);
  } else if (key == "toa_mean_gap") {
    c.toa_mean_gap = parse_double(kv);
  } else if (key == "threads") {
    c.threads = parse_int(kv);
  } else if (key.starts_with("ed.")) {
    const int id = parse_int({key, key.substr(3), kv.line});
    const auto ks = parse_int_list(kv);
    if (ks.size() != 2) fail(ErrorCode::config, key + " needs two chirp indices");
    std::erase_if(c.explicit_pairs, [id](const PreambleAssignment& a) { return a.ed_id == id; });
    c.explicit_pairs.push_back({id, ks[0], ks[1], 0});
  } else {
    fail(ErrorCode::config, "unknown config key '" + key + "'");
  }
}

SimConfig parse_config(std::string_view text) {
  SimConfig c = default_config();
  bool users_given = false;
  for (const auto& kv : parse_key_values(text)) {
    try {
      set_config_value(c, kv.key, kv.value);
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(kv.line) + ": " + e.what());
    }
    users_given = users_given || kv.key == "n_users";
  }
  if (c.policy == PolicyKind::explicit_pairs && !users_given) c.n_users = static_cast<int>(c.explicit_pairs.size());
  std::sort(c.explicit_pairs.begin(), c.explicit_pairs.end(),
            [](const auto& a, const auto& b) { return a.ed_id < b.ed_id; });
  validate_config(c);
  return c;
}

SimConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string format_config(const SimConfig& c) {
  std::ostringstream out;
  out << "sf = " << c.sf << "\n";
  out << "l_antennas = " << c.l_antennas << "\n";
  out << "n_users = " << c.n_users << "\n";
  out << "n_preamble = " << c.n_preamble << "\n";
  out << "n_thr = " << c.n_thr << "\n";
  out << "snr_grid_db = ";
  for (std::size_t i = 0; i < c.snr_grid_db.size(); ++i) {
    out << (i ? ", " : "") << fmt_double(c.snr_grid_db[i]);
  }
  out << "\n";
  out << "trials = " << c.trials << "\n";
  out << "master_seed = " << c.master_seed << "\n";
  out << "policy = " << policy_name(c.policy) << "\n";
  out << "payload_min = " << c.payload_min << "\n";
  out << "payload_max = " << c.payload_max << "\n";
  out << "toa_mean_gap = " << fmt_double(c.toa_mean_gap) << "\n";
  out << "threads = " << c.threads << "\n";
  for (const auto& a : c.explicit_pairs) out << "ed." << a.ed_id << " = " << a.kappa1 << ", " << a.kappa2 << "\n";
  return out.str();
}

void validate_config(const SimConfig& c) {
  if (c.sf < kMinSf || c.sf > kMaxSf) {
    fail(ErrorCode::config, "sf must be in " + std::to_string(kMinSf) + ".." + std::to_string(kMaxSf));
  }
  if (c.l_antennas < 1) fail(ErrorCode::config, "l_antennas must be positive");
  if (c.n_users < 1) fail(ErrorCode::config, "n_users must be positive");
  if (c.n_preamble < 1 || c.n_preamble > kMaxPreambleLength) {
    fail(ErrorCode::config, "n_preamble must be in 1.." + std::to_string(kMaxPreambleLength));
  }
  if (c.n_thr < 1 || c.n_thr > c.n_preamble) fail(ErrorCode::config, "n_thr must be in 1..n_preamble");
  if (c.trials < 1) fail(ErrorCode::config, "trials must be positive");
  if (c.payload_min < 0 || c.payload_max < c.payload_min) {
    fail(ErrorCode::config, "payload bounds must satisfy 0 <= payload_min <= payload_max");
  }
  if (c.toa_mean_gap < 0.0 || !std::isfinite(c.toa_mean_gap)) fail(ErrorCode::config, "toa_mean_gap must be >= 0");
  if (c.threads < 0) fail(ErrorCode::config, "threads must be >= 0");
  for (const double s : c.snr_grid_db) {
    if (!std::isfinite(s)) fail(ErrorCode::config, "SNR grid values must be finite");
  }
  if (c.policy == PolicyKind::explicit_pairs) {
    if (static_cast<int>(c.explicit_pairs.size()) != c.n_users) {
      fail(ErrorCode::config, "explicit policy lists " + std::to_string(c.explicit_pairs.size()) +
                                  " EDs but n_users = " + std::to_string(c.n_users));
    }
    for (const auto& a : c.explicit_pairs) {
      if (a.kappa1 < 0 || a.kappa1 >= c.m() || a.kappa2 < 0 || a.kappa2 >= c.m() || a.kappa1 == a.kappa2) {
        fail(ErrorCode::config, "ED " + std::to_string(a.ed_id) + ": chirp pair must be two distinct indices in 0..M-1");
      }
    }
  } else if (c.n_users > max_users(c.m())) {
    fail(ErrorCode::capacity, std::to_string(c.n_users) + " EDs exceed the assignment bound M/2 - 1 = " +
                                  std::to_string(max_users(c.m())));
  }
}

AssignmentPlan build_plan(const SimConfig& c) {
  validate_config(c);
  if (c.policy != PolicyKind::explicit_pairs) {
    const auto policy =
        c.policy == PolicyKind::sequential ? AssignmentPolicy::sequential : AssignmentPolicy::seeded_random;
    return assign_preambles(c.n_users, c.m(), policy, c.master_seed, c.n_preamble);
  }
  AssignmentPlan plan;
  plan.m = c.m();
  plan.n_preamble = c.n_preamble;
  for (const auto& a : c.explicit_pairs) plan.assignments.push_back(make_assignment(a.ed_id, a.kappa1, a.kappa2, c.m()));
  return plan;
}

double noise_var_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

bool event_matches(std::int64_t sample_index, std::int64_t toa, int m, int n_preamble) {
  const std::int64_t first_peak = toa + m - 1;
  const std::int64_t d = sample_index - first_peak;
  const std::int64_t last = static_cast<std::int64_t>(2 * n_preamble - 2) * m;
  if (d < -1 || d > last + 1) return false;
  const std::int64_t r = ((d % m) + m) % m;
  return r <= 1 || r >= m - 1;
}

namespace {

// Channels, ToAs and payloads of one trial, superposed without noise. The
// generator is left where noise drawing starts.
ReceptionStream draw_trial(const SimConfig& c, const AssignmentPlan& plan, Rng& rng,
                           std::vector<std::int64_t>& toas) {
  const int m = c.m();
  const auto table = ChirpTable::shared(c.sf);
  const auto n = plan.assignments.size();

  std::vector<ChannelVector> channels;
  channels.reserve(n);
  for (std::size_t u = 0; u < n; ++u) channels.push_back(draw_channel(c.l_antennas, rng));

  const std::int64_t pad = static_cast<std::int64_t>(c.n_preamble) * m;
  toas = draw_toas(static_cast<int>(n), m, rng, pad, c.toa_mean_gap);
  std::shuffle(toas.begin(), toas.end(), rng);

  std::uniform_int_distribution<int> payload_len(c.payload_min, c.payload_max);
  std::vector<PacketPlan> packets;
  packets.reserve(n);
  std::int64_t end = 0;
  for (std::size_t u = 0; u < n; ++u) {
    const int len = payload_len(rng);
    packets.push_back(draw_packet(plan.assignments[u], c.n_preamble, len, toas[u], rng, m));
    end = std::max(end, toas[u] + static_cast<std::int64_t>(packets.back().length(m)));
  }
  return superpose(packets, channels, c.l_antennas, static_cast<std::size_t>(end + pad), *table);
}

}  // namespace

ReceptionStream synthesize_trial(const SimConfig& c, const AssignmentPlan& plan, double snr_db,
                                 std::uint64_t trial_index, std::vector<std::int64_t>* toas_out) {
  Rng rng = trial_rng(c.master_seed, trial_index);
  std::vector<std::int64_t> toas;
  auto stream = draw_trial(c, plan, rng, toas);
  const double nv = noise_var_from_snr_db(snr_db);
  stream.noise_var = nv;
  NoiseSource noise(nv, rng);
  CVec instant(stream.samples.size());
  for (std::size_t t = 0; t < stream.length(); ++t) {
    for (std::size_t l = 0; l < instant.size(); ++l) instant[l] = stream.samples[l][t];
    noise.add(instant);
    for (std::size_t l = 0; l < instant.size(); ++l) stream.samples[l][t] = instant[l];
  }
  if (toas_out) *toas_out = std::move(toas);
  return stream;
}

TrialOutcome run_trial(const SimConfig& c, const AssignmentPlan& plan, const DetectorParams& params,
                       double snr_db, std::uint64_t trial_index) {
  TrialOutcome out;
  Rng rng = trial_rng(c.master_seed, trial_index);
  const auto clean = draw_trial(c, plan, rng, out.toas);

  // Noise is drawn sample by sample so the trial stops paying for it once
  // every ED has fired; the samples match synthesize_trial().
  NoiseSource noise(noise_var_from_snr_db(snr_db), rng);
  StreamingDetector det(plan, params, ChirpTable::shared(c.sf));
  CVec instant(clean.samples.size());
  for (std::size_t t = 0; t < clean.length() && !det.all_detected(); ++t) {
    for (std::size_t l = 0; l < instant.size(); ++l) instant[l] = clean.samples[l][t];
    noise.add(instant);
    det.push(instant, out.events);
  }

  out.outcomes.assign(plan.assignments.size(), EdOutcome::missed);
  for (const auto& e : out.events) {
    for (std::size_t u = 0; u < plan.assignments.size(); ++u) {
      if (plan.assignments[u].ed_id != e.ed_id) continue;
      out.outcomes[u] = event_matches(e.sample_index, out.toas[u], c.m(), c.n_preamble) ? EdOutcome::correct
                                                                                      : EdOutcome::wrong;
    }
  }
  return out;
}

TrialOutcome run_trial(const SimConfig& c, double snr_db, std::uint64_t trial_index) {
  const auto plan = build_plan(c);
  const auto params = make_params(c.m(), c.l_antennas, c.n_preamble, noise_var_from_snr_db(snr_db), c.n_thr);
  return run_trial(c, plan, params, snr_db, trial_index);
}

PerPoint make_point(double snr_db, std::int64_t trials, int n_users, std::int64_t missed, std::int64_t wrong) {
  PerPoint p;
  p.snr_db = snr_db;
  p.trials = trials;
  p.missed = missed;
  p.wrong = wrong;
  const double denom = static_cast<double>(trials) * n_users;
  p.per_missed = static_cast<double>(missed) / denom;
  p.per_wrong = static_cast<double>(wrong) / denom;
  p.per_overall = static_cast<double>(missed + wrong) / denom;
  p.ci_halfwidth = kZ95 * std::sqrt(p.per_overall * (1.0 - p.per_overall) / static_cast<double>(trials));
  return p;
}

PerResult run_experiment(const SimConfig& c, const ProgressFn& progress) {
  validate_config(c);
  const auto plan = build_plan(c);
  const int workers = c.threads > 0 ? c.threads : std::max(1U, std::thread::hardware_concurrency());
  const std::int64_t total = c.trials * static_cast<std::int64_t>(c.snr_grid_db.size());
  std::int64_t done_before = 0;
  std::mutex progress_mutex;

  PerResult result;
  for (const double snr : c.snr_grid_db) {
    const auto params = make_params(c.m(), c.l_antennas, c.n_preamble, noise_var_from_snr_db(snr), c.n_thr);
    std::atomic<std::int64_t> next{0};
    std::atomic<std::int64_t> missed{0};
    std::atomic<std::int64_t> wrong{0};
    std::atomic<std::int64_t> finished{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
      try {
        for (std::int64_t t = next++; t < c.trials; t = next++) {
          const auto o = run_trial(c, plan, params, snr, static_cast<std::uint64_t>(t));
          for (const auto r : o.outcomes) {
            if (r == EdOutcome::missed) ++missed;
            if (r == EdOutcome::wrong) ++wrong;
          }
          const auto f = ++finished;
          if (progress) {
            const std::lock_guard lock(progress_mutex);
            progress(done_before + f, total);
          }
        }
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = c.trials;
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    result.points.push_back(make_point(snr, c.trials, c.n_users, missed, wrong));
    done_before += c.trials;
  }
  return result;
}

std::string format_csv(const PerResult& result) {
  std::string out = "snr_db,per_overall,per_missed,per_wrong,trials,ci_halfwidth\n";
  char line[256];
  for (const auto& p : result.points) {
    std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%.6f,%lld,%.6f\n", p.snr_db, p.per_overall, p.per_missed,
                  p.per_wrong, static_cast<long long>(p.trials), p.ci_halfwidth);
    out += line;
  }
  return out;
}

void emit_csv(const PerResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << format_csv(result);
  if (!out) fail(ErrorCode::io, "write to '" + path + "' failed");
}

PerResult parse_csv(std::string_view text) {
  PerResult r;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      if (!line.starts_with("snr_db,")) fail(ErrorCode::io, "PER CSV is missing its header row");
      continue;
    }
    const auto fields = split_list(line);
    if (fields.size() != 6) fail(ErrorCode::io, "line " + std::to_string(lineno) + ": expected 6 fields");
    auto num = [&](std::size_t i) { return parse_double({"csv", fields[i], lineno}); };
    PerPoint p;
    p.snr_db = num(0);
    p.per_overall = num(1);
    p.per_missed = num(2);
    p.per_wrong = num(3);
    p.trials = static_cast<std::int64_t>(parse_u64({"csv", fields[4], lineno}));
    p.ci_halfwidth = num(5);
    r.points.push_back(p);
  }
  return r;
}

std::optional<double> crossing_snr(const PerResult& result, double target) {
  const auto& pts = result.points;
  if (pts.empty() || pts.back().per_overall > target) return std::nullopt;
  // Last grid point still above the target; the curve stays at or below it
  // from the next point on.
  std::size_t i = pts.size();
  while (i > 0 && pts[i - 1].per_overall <= target) --i;
  if (i == 0) return std::nullopt;
  const auto& a = pts[i - 1];
  const auto& b = pts[i];
  double frac;
  if (b.per_overall > 0.0) {
    const double la = std::log10(a.per_overall);
    const double lb = std::log10(b.per_overall);
    frac = la == lb ? 0.0 : (la - std::log10(target)) / (la - lb);
  } else {
    frac = (a.per_overall - target) / a.per_overall;
  }
  return a.snr_db + frac * (b.snr_db - a.snr_db);
}

// --- resemblance reproductions ----------------------------------------------

namespace {

struct NoiselessRun {
  ReceptionStream stream;
  std::vector<ChannelVector> channels;
};

NoiselessRun preamble_only(const AssignmentPlan& plan, const std::vector<int>& transmitting,
                           const std::vector<std::int64_t>& toas, int l, double noise_var, std::uint64_t seed,
                           const ChirpTable& table) {
  Rng rng(seed);
  const int m = table.m();
  NoiselessRun r;
  std::vector<PacketPlan> packets;
  std::int64_t end = 0;
  for (std::size_t i = 0; i < transmitting.size(); ++i) {
    const auto& a = plan.assignments[static_cast<std::size_t>(transmitting[i])];
    packets.push_back(draw_packet(a, plan.n_preamble, 0, toas[i] + static_cast<std::int64_t>(plan.n_preamble) * m,
                                  rng, m));
    r.channels.push_back(draw_channel(l, rng));
    end = std::max(end, packets.back().toa + static_cast<std::int64_t>(packets.back().length(m)));
  }
  const auto length = static_cast<std::size_t>(end + static_cast<std::int64_t>(plan.n_preamble) * m);
  r.stream = synthesize(packets, r.channels, noise_var, l, length, rng, table);
  return r;
}

double max_of(const std::vector<double>& v, bool absolute) {
  double best = 0.0;
  for (const double x : v) best = std::max(best, absolute ? std::abs(x) : x);
  return best;
}

}  // namespace

Example1Report run_example1(std::uint64_t seed) {
  constexpr int kL = 64;
  const auto table = ChirpTable::shared(7);
  const int m = table->m();
  AssignmentPlan plan;
  plan.m = m;
  plan.n_preamble = 8;
  plan.assignments = {make_assignment(1, 0, 30, m), make_assignment(2, 8, 24, m), make_assignment(3, 2, 32, m)};
  const auto run = preamble_only(plan, {0}, {0}, kL, 0.0, seed, *table);
  const auto series = bcp_series(run.stream, plan, table);
  Example1Report r;
  r.expected_peak = m / 2.0 * run.channels[0].norm_sq() / kL;
  const double threshold = r.expected_peak / 2.0;
  r.ed1_run = longest_peak_run(series[0], threshold, static_cast<std::size_t>(m));
  r.ed2_run = longest_peak_run(series[1], threshold, static_cast<std::size_t>(m));
  r.ed3_run = longest_peak_run(series[2], threshold, static_cast<std::size_t>(m));
  r.ed1_peak = max_of(series[0], false);
  return r;
}

Example2Report run_example2(std::uint64_t seed) {
  constexpr int kL = 64;
  constexpr double kNoiseVar = 1e-3;  // 30 dB; the detector needs a nonzero noise floor
  const auto table = ChirpTable::shared(7);
  const int m = table->m();
  AssignmentPlan plan;
  plan.m = m;
  plan.n_preamble = 8;
  plan.assignments = {make_assignment(1, 0, 30, m), make_assignment(2, 2, 24, m), make_assignment(3, 2, 39, m)};
  const auto run = preamble_only(plan, {0, 1}, {0, 31}, kL, kNoiseVar, seed, *table);
  const auto series = bcp_series(run.stream, plan, table);

  Example2Report r;
  r.ed3_peak = max_of(series[2], true);
  // Resembled peaks are far below true ones; count any entry clearly above
  // the noise floor.
  const double noise_sd = std::sqrt(kNoiseVar * kNoiseVar / (2.0 * kL));
  const double rpp_threshold = std::max(100.0 * noise_sd, r.ed3_peak / 4.0);
  std::vector<double> magnitude(series[2].size());
  std::transform(series[2].begin(), series[2].end(), magnitude.begin(), [](double v) { return std::abs(v); });
  r.ed3_run = longest_peak_run(magnitude, rpp_threshold, static_cast<std::size_t>(m));

  const auto params = make_params(m, kL, plan.n_preamble, kNoiseVar, 4);
  DetectionOptions opts;
  opts.stop_when_all_detected = false;
  r.events = run_detection(run.stream, plan, params, table, opts);
  for (const auto& e : r.events) {
    r.ed1_detected = r.ed1_detected || e.ed_id == 1;
    r.ed2_detected = r.ed2_detected || e.ed_id == 2;
    r.ed3_detected = r.ed3_detected || e.ed_id == 3;
  }
  return r;
}

SelfResemblanceReport run_self_resemblance(std::uint64_t seed) {
  const auto table = ChirpTable::shared(7);
  const int m = table->m();
  AssignmentPlan plan;
  plan.m = m;
  plan.n_preamble = 8;
  plan.assignments = {make_assignment(1, 0, 64, m)};
  const auto run = preamble_only(plan, {0}, {0}, 8, 0.0, seed, *table);
  const auto series = bcp_series(run.stream, plan, table);
  const double threshold = m / 4.0 * run.channels[0].norm_sq() / 8.0;
  SelfResemblanceReport r;
  r.peaks = longest_peak_run(series[0], threshold, static_cast<std::size_t>(m / 2));
  r.run_at_m = longest_peak_run(series[0], threshold, static_cast<std::size_t>(m));
  return r;
}

// --- named PER experiments -----------------------------------------------------

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"fig8", "fig9", "fig10", "fig11", "fig4", "example1", "example2"};
  return names;
}

ScenarioSpec scenario_spec(std::string_view name) {
  auto base = [] {
    SimConfig c = default_config();
    c.sf = 7;
    c.l_antennas = 32;
    c.n_preamble = 8;
    c.n_thr = 4;
    c.n_users = 5;
    return c;
  };
  auto grid = [](double lo, double hi, double step) {
    std::vector<double> g;
    for (double s = lo; s <= hi + 1e-9; s += step) g.push_back(s);
    return g;
  };

  ScenarioSpec spec;
  spec.name = std::string(name);
  if (name == "fig8") {
    spec.description = "missed and wrong preamble rates for N_thr in {4, 6, 8}; L=32, N=8, 5 EDs";
    spec.transition_snr_db = -23.0;
    for (const int thr : {4, 6, 8}) {
      SimConfig c = base();
      c.n_thr = thr;
      c.snr_grid_db = grid(-25, -19, 1);
      spec.series.push_back({"nthr" + std::to_string(thr), c});
    }
  } else if (name == "fig9") {
    spec.description = "PER versus number of EDs; L=32, N=8, N_thr=4";
    for (const int users : {1, 5, 10, 15}) {
      SimConfig c = base();
      c.n_users = users;
      c.snr_grid_db = grid(-23, -16, 1);
      spec.series.push_back({"users" + std::to_string(users), c});
    }
  } else if (name == "fig10") {
    spec.description = "PER versus antenna count; N=8, 5 EDs";
    for (const int l : {32, 64}) {
      SimConfig c = base();
      c.l_antennas = l;
      c.snr_grid_db = l == 32 ? grid(-23, -18, 1) : grid(-25, -20, 1);
      spec.series.push_back({"l" + std::to_string(l), c});
    }
  } else if (name == "fig11") {
    spec.description = "PER versus preamble length; L=32, 5 EDs";
    for (const int n : {6, 8, 10}) {
      SimConfig c = base();
      c.n_preamble = n;
      c.snr_grid_db = grid(-24, -18, 1);
      spec.series.push_back({"n" + std::to_string(n), c});
    }
  } else if (name == "fig4") {
    spec.description = "unique versus duplicate delta assignment; L=32, N=8, 5 EDs";
    SimConfig unique = base();
    unique.snr_grid_db = grid(-18, -10, 4);
    spec.series.push_back({"unique", unique});
    SimConfig dup = unique;
    dup.policy = PolicyKind::explicit_pairs;
    for (int u = 1; u <= dup.n_users; ++u) dup.explicit_pairs.push_back({u, 8 * (u - 1), 8 * (u - 1) + 30, 0});
    spec.series.push_back({"duplicate", dup});
  } else {
    fail(ErrorCode::config, "no PER experiment named '" + std::string(name) + "'");
  }
  return spec;
}

}  // namespace dcpd
