#include "dcpd/dcpd.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "dcpd/channel.hpp"
#include "dcpd/detector.hpp"
#include "dcpd/error.hpp"
#include "dcpd/harness.hpp"
#include "dcpd/keyvalue.hpp"
#include "dcpd/preamble.hpp"

struct dcpd_config {
  dcpd::SimConfig value;
};

struct dcpd_result {
  dcpd::PerResult value;
};

struct dcpd_plan {
  dcpd::AssignmentPlan value;
  std::vector<std::string> violations;
};

struct dcpd_stream {
  dcpd::ReceptionStream value;
};

namespace {

thread_local std::string g_last_error;

dcpd_status set_error(dcpd_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Every entry point funnels through here so no exception crosses the C boundary.
template <class F>
dcpd_status guarded(F&& body) {
  try {
    body();
    return DCPD_OK;
  } catch (const dcpd::Error& e) {
    return set_error(static_cast<dcpd_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return set_error(DCPD_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(DCPD_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return set_error(DCPD_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(DCPD_ERR_INTERNAL, "unknown error");
  }
}

#define DCPD_REQUIRE(cond, what) \
  if (!(cond)) return set_error(DCPD_ERR_ARGUMENT, what)

dcpd::ProgressFn wrap(dcpd_progress_fn fn, void* user, std::int64_t offset = 0, std::int64_t total = -1) {
  if (fn == nullptr) return {};
  return [=](std::int64_t done, std::int64_t n) { fn(offset + done, total < 0 ? n : total, user); };
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string run_per_scenario(const dcpd::ScenarioSpec& spec, const dcpd_scenario_options& opt,
                             dcpd_progress_fn progress, void* user) {
  std::vector<dcpd::SimConfig> configs;
  std::int64_t total = 0;
  for (const auto& s : spec.series) {
    dcpd::SimConfig c = s.config;
    if (opt.has_seed) c.master_seed = opt.seed;
    if (opt.trials > 0) c.trials = opt.trials;
    if (opt.threads > 0) c.threads = opt.threads;
    dcpd::validate_config(c);
    total += c.trials * static_cast<std::int64_t>(c.snr_grid_db.size());
    configs.push_back(std::move(c));
  }
  if (opt.out != nullptr) std::filesystem::create_directories(opt.out);

  std::ostringstream report;
  report << spec.name << ": " << spec.description << "\n";
  std::int64_t offset = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& label = spec.series[i].label;
    const auto result = dcpd::run_experiment(configs[i], wrap(progress, user, offset, total));
    offset += configs[i].trials * static_cast<std::int64_t>(configs[i].snr_grid_db.size());
    if (opt.out != nullptr) {
      dcpd::emit_csv(result, (std::filesystem::path(opt.out) / (spec.name + "_" + label + ".csv")).string());
    }
    const auto cross = dcpd::crossing_snr(result);
    report << "  " << label << ": PER 1e-3 at "
           << (cross ? fmt("%.2f dB", *cross) : std::string("not reached on grid")) << "\n";
    if (spec.transition_snr_db) {
      for (const auto& p : result.points) {
        if (p.snr_db != *spec.transition_snr_db) continue;
        report << "    at " << fmt("%g dB", p.snr_db) << ": missed " << fmt("%.4f", p.per_missed) << ", wrong "
               << fmt("%.4f", p.per_wrong) << "\n";
      }
    }
  }
  return report.str();
}

}  // namespace

extern "C" {

const char* dcpd_last_error(void) { return g_last_error.c_str(); }

const char* dcpd_version(void) { return "1.0.0"; }

// --- config -------------------------------------------------------------------

dcpd_status dcpd_config_default(dcpd_config** out) {
  DCPD_REQUIRE(out != nullptr, "null output handle");
  return guarded([&] { *out = new dcpd_config{dcpd::default_config()}; });
}

dcpd_status dcpd_config_parse(const char* text, dcpd_config** out) {
  DCPD_REQUIRE(text != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new dcpd_config{dcpd::parse_config(text)}; });
}

dcpd_status dcpd_config_load(const char* path, dcpd_config** out) {
  DCPD_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new dcpd_config{dcpd::load_config(path)}; });
}

dcpd_status dcpd_config_set(dcpd_config* config, const char* key, const char* value) {
  DCPD_REQUIRE(config != nullptr && key != nullptr && value != nullptr, "null argument");
  return guarded([&] {
    dcpd::SimConfig next = config->value;
    dcpd::set_config_value(next, key, value);
    config->value = std::move(next);
  });
}

dcpd_status dcpd_config_format(const dcpd_config* config, char* buffer, size_t capacity, size_t* needed) {
  DCPD_REQUIRE(config != nullptr, "null config");
  return guarded([&] {
    const std::string text = dcpd::format_config(config->value);
    if (needed != nullptr) *needed = text.size() + 1;
    if (buffer == nullptr) return;
    if (capacity < text.size() + 1) dcpd::fail(dcpd::ErrorCode::capacity, "buffer too small for config text");
    std::memcpy(buffer, text.c_str(), text.size() + 1);
  });
}

void dcpd_config_free(dcpd_config* config) { delete config; }

// --- experiments ----------------------------------------------------------------

dcpd_status dcpd_run_experiment(const dcpd_config* config, dcpd_progress_fn progress, void* user,
                                dcpd_result** out) {
  DCPD_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new dcpd_result{dcpd::run_experiment(config->value, wrap(progress, user))}; });
}

dcpd_status dcpd_result_load_csv(const char* path, dcpd_result** out) {
  DCPD_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new dcpd_result{dcpd::parse_csv(dcpd::read_text_file(path))}; });
}

size_t dcpd_result_size(const dcpd_result* result) { return result == nullptr ? 0 : result->value.points.size(); }

dcpd_status dcpd_result_point(const dcpd_result* result, size_t index, dcpd_per_point* out) {
  DCPD_REQUIRE(result != nullptr && out != nullptr, "null argument");
  DCPD_REQUIRE(index < result->value.points.size(), "point index out of range");
  const auto& p = result->value.points[index];
  *out = dcpd_per_point{p.snr_db, p.per_overall, p.per_missed, p.per_wrong, p.trials, p.ci_halfwidth};
  return DCPD_OK;
}

dcpd_status dcpd_result_write_csv(const dcpd_result* result, const char* path) {
  DCPD_REQUIRE(result != nullptr && path != nullptr, "null argument");
  return guarded([&] { dcpd::emit_csv(result->value, path); });
}

dcpd_status dcpd_result_crossing(const dcpd_result* result, double target, int* found, double* snr_db) {
  DCPD_REQUIRE(result != nullptr && found != nullptr && snr_db != nullptr, "null argument");
  DCPD_REQUIRE(target > 0.0 && target < 1.0, "target PER must lie in (0, 1)");
  const auto c = dcpd::crossing_snr(result->value, target);
  *found = c.has_value() ? 1 : 0;
  *snr_db = c.value_or(0.0);
  return DCPD_OK;
}

void dcpd_result_free(dcpd_result* result) { delete result; }

// --- plans ----------------------------------------------------------------------

dcpd_status dcpd_plan_load(const char* path, dcpd_plan** out) {
  DCPD_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const std::string text = dcpd::read_text_file(path);
    // A simulation config is recognised by any of its own keys.
    bool is_config = false;
    for (const auto& kv : dcpd::parse_key_values(text)) {
      if (kv.key == "sf" || kv.key == "policy" || kv.key == "n_users") is_config = true;
    }
    *out = new dcpd_plan{is_config ? dcpd::build_plan(dcpd::parse_config(text)) : dcpd::parse_plan(text), {}};
  });
}

dcpd_status dcpd_plan_from_config(const dcpd_config* config, dcpd_plan** out) {
  DCPD_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new dcpd_plan{dcpd::build_plan(config->value), {}}; });
}

size_t dcpd_plan_size(const dcpd_plan* plan) { return plan == nullptr ? 0 : plan->value.assignments.size(); }

dcpd_status dcpd_plan_entry(const dcpd_plan* plan, size_t index, int* ed_id, int* kappa1, int* kappa2,
                            int* delta) {
  DCPD_REQUIRE(plan != nullptr, "null plan");
  DCPD_REQUIRE(index < plan->value.assignments.size(), "entry index out of range");
  const auto& a = plan->value.assignments[index];
  if (ed_id != nullptr) *ed_id = a.ed_id;
  if (kappa1 != nullptr) *kappa1 = a.kappa1;
  if (kappa2 != nullptr) *kappa2 = a.kappa2;
  if (delta != nullptr) *delta = a.delta;
  return DCPD_OK;
}

size_t dcpd_plan_validate(dcpd_plan* plan) {
  if (plan == nullptr) return 0;
  plan->violations.clear();
  for (const auto& v : dcpd::validate_assignment(plan->value)) plan->violations.push_back(v.message);
  return plan->violations.size();
}

const char* dcpd_plan_violation(const dcpd_plan* plan, size_t index) {
  if (plan == nullptr || index >= plan->violations.size()) return nullptr;
  return plan->violations[index].c_str();
}

void dcpd_plan_free(dcpd_plan* plan) { delete plan; }

// --- streams --------------------------------------------------------------------

dcpd_status dcpd_stream_synthesize(const dcpd_config* config, double snr_db, uint64_t trial_index,
                                   dcpd_stream** out) {
  DCPD_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    dcpd::validate_config(config->value);
    const auto plan = dcpd::build_plan(config->value);
    *out = new dcpd_stream{dcpd::synthesize_trial(config->value, plan, snr_db, trial_index)};
  });
}

dcpd_status dcpd_stream_read(const char* path, dcpd_stream** out) {
  DCPD_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new dcpd_stream{dcpd::read_stream(path)}; });
}

dcpd_status dcpd_stream_write(const dcpd_stream* stream, const char* path) {
  DCPD_REQUIRE(stream != nullptr && path != nullptr, "null argument");
  return guarded([&] { dcpd::write_stream(stream->value, path); });
}

dcpd_status dcpd_stream_info(const dcpd_stream* stream, uint32_t* l, uint64_t* length, uint32_t* m,
                             double* noise_var) {
  DCPD_REQUIRE(stream != nullptr, "null stream");
  const auto& s = stream->value;
  if (l != nullptr) *l = static_cast<uint32_t>(s.l);
  if (length != nullptr) *length = s.length();
  if (m != nullptr) *m = static_cast<uint32_t>(s.m);
  if (noise_var != nullptr) *noise_var = s.noise_var;
  return DCPD_OK;
}

void dcpd_stream_free(dcpd_stream* stream) { delete stream; }

dcpd_status dcpd_detect(const dcpd_stream* stream, const dcpd_plan* plan, int n_thr, const char* path,
                        size_t* n_events) {
  DCPD_REQUIRE(stream != nullptr && plan != nullptr, "null argument");
  return guarded([&] {
    const auto& s = stream->value;
    if (s.noise_var <= 0.0) dcpd::fail(dcpd::ErrorCode::config, "stream carries no noise variance");
    int sf = 0;
    while ((1 << sf) < s.m) ++sf;
    const auto params = dcpd::make_params(s.m, s.l, plan->value.n_preamble, s.noise_var, n_thr);
    const auto events = dcpd::run_detection(s, plan->value, params, dcpd::ChirpTable::shared(sf));
    if (path != nullptr) dcpd::write_events_csv(events, path);
    if (n_events != nullptr) *n_events = events.size();
  });
}

// --- scenarios ------------------------------------------------------------------

size_t dcpd_scenario_count(void) { return dcpd::scenario_names().size(); }

const char* dcpd_scenario_name(size_t index) {
  const auto& names = dcpd::scenario_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

dcpd_status dcpd_scenario_run(const char* name, const dcpd_scenario_options* options, dcpd_progress_fn progress,
                              void* user, char** report) {
  DCPD_REQUIRE(name != nullptr && report != nullptr, "null argument");
  *report = nullptr;
  dcpd_scenario_options opt{};
  if (options != nullptr) opt = *options;
  bool check_failed = false;
  const dcpd_status st = guarded([&] {
    const std::string n = name;
    const std::uint64_t seed = opt.has_seed ? opt.seed : 1;
    std::ostringstream out;
    if (n == "example1") {
      const auto r = dcpd::run_example1(seed);
      out << "example1: pairs (0,30) (8,24) (2,32), L=64, only ED 1 transmits\n"
          << "  peak runs: ED1 " << r.ed1_run << ", ED2 " << r.ed2_run << ", ED3 " << r.ed3_run << "\n"
          << "  ED1 peak " << fmt("%.4f", r.ed1_peak) << " (expected " << fmt("%.4f", r.expected_peak) << ")\n"
          << "  " << (r.passed() ? "PASS" : "FAIL") << "\n";
      check_failed = !r.passed();
    } else if (n == "example2") {
      const auto r = dcpd::run_example2(seed);
      out << "example2: pairs (0,30) (2,24), idle (2,39), ToAs 0 and 31\n";
      for (const auto& e : r.events) out << "  event ED " << e.ed_id << " at sample " << e.sample_index << "\n";
      out << "  ED3 resembled run " << r.ed3_run << ", peak " << fmt("%.4f", r.ed3_peak) << "\n"
          << "  " << (r.passed() ? "PASS" : "FAIL") << "\n";
      check_failed = !r.passed();
    } else {
      out << run_per_scenario(dcpd::scenario_spec(n), opt, progress, user);
    }
    if (opt.out != nullptr && (n == "example1" || n == "example2")) {
      std::filesystem::create_directories(opt.out);
      const auto path = (std::filesystem::path(opt.out) / (n + ".txt")).string();
      std::FILE* f = std::fopen(path.c_str(), "w");
      if (f == nullptr) dcpd::fail(dcpd::ErrorCode::io, "cannot write " + path);
      const std::string text = out.str();
      const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
      if (std::fclose(f) != 0 || !ok) dcpd::fail(dcpd::ErrorCode::io, "cannot write " + path);
    }
    *report = copy_string(out.str());
  });
  if (st != DCPD_OK) return st;
  if (check_failed) return set_error(DCPD_ERR_INTERNAL, std::string(name) + " check failed");
  return DCPD_OK;
}

void dcpd_string_free(char* text) { std::free(text); }

}  // extern "C"
