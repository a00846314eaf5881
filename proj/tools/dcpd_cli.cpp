// Command-line front end. Talks to the library only through dcpd.h.

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "dcpd/dcpd.h"

namespace {

int exit_code(dcpd_status st) {
  switch (st) {
    case DCPD_OK:
      return 0;
    case DCPD_ERR_IO:
      return 2;
    case DCPD_ERR_INTERNAL:
      return 3;
    default:
      return 1;  // config, dimension, capacity, argument
  }
}

int report(dcpd_status st) {
  if (st != DCPD_OK) std::fprintf(stderr, "error: %s\n", dcpd_last_error());
  return exit_code(st);
}

void progress(int64_t done, int64_t total, void*) {
  const int64_t step = total / 50 > 0 ? total / 50 : 1;
  if (done % step == 0 || done == total) {
    std::fprintf(stderr, "\r%lld/%lld trials", static_cast<long long>(done), static_cast<long long>(total));
    if (done == total) std::fputc('\n', stderr);
  }
}

struct Globals {
  std::string config;
  std::string out;
  uint64_t seed = 0;
  int64_t trials = 0;
  int threads = 0;
  CLI::Option* seed_opt = nullptr;
};

// Loads --config (or the defaults) and applies the overrides.
dcpd_status load_config(const Globals& g, dcpd_config** cfg) {
  const dcpd_status st = g.config.empty() ? dcpd_config_default(cfg) : dcpd_config_load(g.config.c_str(), cfg);
  if (st != DCPD_OK) return st;
  dcpd_status s = DCPD_OK;
  if (*g.seed_opt) s = dcpd_config_set(*cfg, "master_seed", std::to_string(g.seed).c_str());
  if (s == DCPD_OK && g.trials > 0) s = dcpd_config_set(*cfg, "trials", std::to_string(g.trials).c_str());
  if (s == DCPD_OK && g.threads > 0) s = dcpd_config_set(*cfg, "threads", std::to_string(g.threads).c_str());
  if (s != DCPD_OK) {
    dcpd_config_free(*cfg);
    *cfg = nullptr;
  }
  return s;
}

int cmd_run(const Globals& g, bool quiet) {
  dcpd_config* cfg = nullptr;
  dcpd_status st = load_config(g, &cfg);
  if (st != DCPD_OK) return report(st);
  dcpd_result* result = nullptr;
  st = dcpd_run_experiment(cfg, quiet ? nullptr : progress, nullptr, &result);
  dcpd_config_free(cfg);
  if (st != DCPD_OK) return report(st);

  if (g.out.empty()) {
    std::printf("snr_db,per_overall,per_missed,per_wrong,trials,ci_halfwidth\n");
    for (size_t i = 0; i < dcpd_result_size(result); ++i) {
      dcpd_per_point p;
      dcpd_result_point(result, i, &p);
      std::printf("%.6f,%.6f,%.6f,%.6f,%lld,%.6f\n", p.snr_db, p.per_overall, p.per_missed, p.per_wrong,
                  static_cast<long long>(p.trials), p.ci_halfwidth);
    }
  } else {
    st = dcpd_result_write_csv(result, g.out.c_str());
  }
  if (st == DCPD_OK) {
    int found = 0;
    double snr = 0.0;
    dcpd_result_crossing(result, 1e-3, &found, &snr);
    if (found) {
      std::fprintf(stderr, "PER 1e-3 reached at %.2f dB\n", snr);
    } else {
      std::fprintf(stderr, "PER 1e-3 not reached on the grid\n");
    }
  }
  dcpd_result_free(result);
  return report(st);
}

int cmd_scenario(const Globals& g, const std::string& name, bool quiet) {
  dcpd_scenario_options opt{};
  opt.has_seed = *g.seed_opt ? 1 : 0;
  opt.seed = g.seed;
  opt.trials = g.trials;
  opt.threads = g.threads;
  opt.out = g.out.empty() ? nullptr : g.out.c_str();
  char* text = nullptr;
  const dcpd_status st = dcpd_scenario_run(name.c_str(), &opt, quiet ? nullptr : progress, nullptr, &text);
  if (text != nullptr) {
    std::fputs(text, stdout);
    dcpd_string_free(text);
  }
  return report(st);
}

int cmd_dump_stream(const Globals& g, double snr_db, uint64_t trial) {
  if (g.out.empty()) {
    std::fprintf(stderr, "error: dump-stream needs --out\n");
    return 1;
  }
  dcpd_config* cfg = nullptr;
  dcpd_status st = load_config(g, &cfg);
  if (st != DCPD_OK) return report(st);
  dcpd_stream* stream = nullptr;
  st = dcpd_stream_synthesize(cfg, snr_db, trial, &stream);
  dcpd_config_free(cfg);
  if (st != DCPD_OK) return report(st);
  st = dcpd_stream_write(stream, g.out.c_str());
  if (st == DCPD_OK) {
    uint32_t l = 0, m = 0;
    uint64_t len = 0;
    double var = 0.0;
    dcpd_stream_info(stream, &l, &len, &m, &var);
    std::fprintf(stderr, "wrote %s: L=%u, %llu samples, M=%u, noise variance %.6g\n", g.out.c_str(), l,
                 static_cast<unsigned long long>(len), m, var);
  }
  dcpd_stream_free(stream);
  return report(st);
}

int cmd_detect(const Globals& g, const std::string& stream_path, int n_thr) {
  if (g.config.empty()) {
    std::fprintf(stderr, "error: detect needs --config with the preamble plan\n");
    return 1;
  }
  dcpd_stream* stream = nullptr;
  dcpd_status st = dcpd_stream_read(stream_path.c_str(), &stream);
  if (st != DCPD_OK) return report(st);
  dcpd_plan* plan = nullptr;
  st = dcpd_plan_load(g.config.c_str(), &plan);
  if (st == DCPD_OK) {
    size_t n = 0;
    st = dcpd_detect(stream, plan, n_thr, g.out.empty() ? nullptr : g.out.c_str(), &n);
    if (st == DCPD_OK) std::fprintf(stderr, "%zu detection events\n", n);
  }
  dcpd_plan_free(plan);
  dcpd_stream_free(stream);
  return report(st);
}

int cmd_validate_plan(const Globals& g, const std::string& positional) {
  const std::string path = positional.empty() ? g.config : positional;
  if (path.empty()) {
    std::fprintf(stderr, "error: validate-plan needs a plan file\n");
    return 1;
  }
  dcpd_plan* plan = nullptr;
  const dcpd_status st = dcpd_plan_load(path.c_str(), &plan);
  if (st != DCPD_OK) return report(st);
  for (size_t i = 0; i < dcpd_plan_size(plan); ++i) {
    int id = 0, k1 = 0, k2 = 0, delta = 0;
    dcpd_plan_entry(plan, i, &id, &k1, &k2, &delta);
    std::printf("ed %d: kappa1=%d kappa2=%d delta=%d\n", id, k1, k2, delta);
  }
  const size_t bad = dcpd_plan_validate(plan);
  for (size_t i = 0; i < bad; ++i) std::printf("violation: %s\n", dcpd_plan_violation(plan, i));
  std::printf("%s\n", bad == 0 ? "plan valid" : "plan invalid");
  dcpd_plan_free(plan);
  return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-chirp preamble detection simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  bool quiet = false;
  app.add_option("--config", g.config, "Simulation config or plan file");
  g.seed_opt = app.add_option("--seed", g.seed, "Master seed override");
  app.add_option("--trials", g.trials, "Trials per SNR point override")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file (run, dump-stream, detect) or directory (scenario)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", quiet, "No progress output");

  auto* run = app.add_subcommand("run", "PER experiment from a config");

  std::string scenario;
  auto* scen = app.add_subcommand("scenario", "Named reproduction");
  std::string names;
  for (size_t i = 0; i < dcpd_scenario_count(); ++i) names += (i ? ", " : "") + std::string(dcpd_scenario_name(i));
  scen->add_option("name", scenario, names)->required();

  double snr_db = 0.0;
  uint64_t trial = 0;
  auto* dump = app.add_subcommand("dump-stream", "Write one synthesized trial as a binary stream");
  dump->add_option("--snr", snr_db, "SNR in dB")->required();
  dump->add_option("--trial", trial, "Trial index");

  std::string stream_path;
  int n_thr = 4;
  auto* detect = app.add_subcommand("detect", "Run the detector over a binary stream");
  detect->add_option("stream", stream_path, "Stream file")->required();
  detect->add_option("--nthr", n_thr, "Minimum preamble peaks")->check(CLI::PositiveNumber);

  std::string plan_path;
  auto* validate = app.add_subcommand("validate-plan", "Check a preamble assignment");
  validate->add_option("plan", plan_path, "Plan or config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run) return cmd_run(g, quiet);
  if (*scen) return cmd_scenario(g, scenario, quiet);
  if (*dump) return cmd_dump_stream(g, snr_db, trial);
  if (*detect) return cmd_detect(g, stream_path, n_thr);
  return cmd_validate_plan(g, plan_path);
}
