/* The C API from plain C. Arguments: data directory, scratch directory. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "dcpd/dcpd.h"

static int failures = 0;

#define EXPECT(cond)                                                    \
  do {                                                                  \
    if (!(cond)) {                                                      \
      fprintf(stderr, "%s:%d: FAILED %s (%s)\n", __FILE__, __LINE__, #cond, \
              dcpd_last_error());                                       \
      ++failures;                                                       \
    }                                                                   \
  } while (0)

static char data_dir[1024];
static char scratch_dir[1024];

static const char* path_in(const char* dir, const char* name) {
  static char buf[2][2048];
  static int which = 0;
  which ^= 1;
  snprintf(buf[which], sizeof buf[which], "%s/%s", dir, name);
  return buf[which];
}

static void progress_count(int64_t done, int64_t total, void* user) {
  (void)total;
  *(int64_t*)user = done;
}

static void test_config(void) {
  dcpd_config* c = NULL;
  size_t needed = 0;
  char* text;
  EXPECT(dcpd_config_default(&c) == DCPD_OK);
  EXPECT(dcpd_config_set(c, "l_antennas", "4") == DCPD_OK);
  EXPECT(dcpd_config_set(c, "sf", "seven") == DCPD_ERR_CONFIG);
  EXPECT(strlen(dcpd_last_error()) > 0);
  EXPECT(dcpd_config_set(c, "bogus", "1") == DCPD_ERR_CONFIG);
  EXPECT(dcpd_config_format(c, NULL, 0, &needed) == DCPD_OK);
  EXPECT(needed > 1);
  text = malloc(needed);
  EXPECT(dcpd_config_format(c, text, 4, &needed) == DCPD_ERR_CAPACITY);
  EXPECT(dcpd_config_format(c, text, needed, &needed) == DCPD_OK);
  EXPECT(strstr(text, "l_antennas = 4") != NULL);
  free(text);
  dcpd_config_free(c);

  c = NULL;
  EXPECT(dcpd_config_parse("n_thr = 12\n", &c) == DCPD_ERR_CONFIG);
  EXPECT(c == NULL);
  /* range checks run with the experiment */
  {
    dcpd_result* r = NULL;
    EXPECT(dcpd_config_default(&c) == DCPD_OK);
    EXPECT(dcpd_config_set(c, "sf", "3") == DCPD_OK);
    EXPECT(dcpd_run_experiment(c, NULL, NULL, &r) == DCPD_ERR_CONFIG);
    EXPECT(r == NULL);
    dcpd_config_free(c);
    c = NULL;
  }
  EXPECT(dcpd_config_load(path_in(data_dir, "no_such.cfg"), &c) == DCPD_ERR_IO);
  EXPECT(dcpd_config_default(NULL) == DCPD_ERR_ARGUMENT);
  dcpd_config_free(NULL);
}

static void test_plan(void) {
  dcpd_plan* p = NULL;
  int id, k1, k2, delta;
  EXPECT(dcpd_plan_load(path_in(data_dir, "valid_plan.txt"), &p) == DCPD_OK);
  EXPECT(dcpd_plan_size(p) == 3);
  EXPECT(dcpd_plan_validate(p) == 0);
  EXPECT(dcpd_plan_entry(p, 1, &id, &k1, &k2, &delta) == DCPD_OK);
  EXPECT(id == 2 && k1 == 8 && k2 == 24 && delta == 16);
  EXPECT(dcpd_plan_entry(p, 3, &id, &k1, &k2, &delta) == DCPD_ERR_ARGUMENT);
  dcpd_plan_free(p);

  EXPECT(dcpd_plan_load(path_in(data_dir, "duplicate_plan.txt"), &p) == DCPD_OK);
  EXPECT(dcpd_plan_validate(p) == 1);
  EXPECT(dcpd_plan_violation(p, 0) != NULL);
  EXPECT(dcpd_plan_violation(p, 1) == NULL);
  dcpd_plan_free(p);

  EXPECT(dcpd_plan_load(path_in(data_dir, "small.cfg"), &p) == DCPD_OK);
  EXPECT(dcpd_plan_size(p) == 3);
  dcpd_plan_free(p);
}

static void test_stream_and_detect(void) {
  dcpd_config* c = NULL;
  dcpd_stream* s = NULL;
  dcpd_stream* back = NULL;
  dcpd_plan* p = NULL;
  uint32_t l = 0, m = 0;
  uint64_t len = 0;
  double nv = 0.0;
  size_t n_events = 99;
  const char* file = path_in(scratch_dir, "capi_stream.cniq");

  EXPECT(dcpd_config_load(path_in(data_dir, "small.cfg"), &c) == DCPD_OK);
  EXPECT(dcpd_stream_synthesize(c, 20.0, 0, &s) == DCPD_OK);
  EXPECT(dcpd_stream_info(s, &l, &len, &m, &nv) == DCPD_OK);
  EXPECT(l == 8 && m == 128 && len > 3 * 8 * 128);
  EXPECT(nv > 0.0099 && nv < 0.0101);
  EXPECT(dcpd_stream_write(s, file) == DCPD_OK);
  EXPECT(dcpd_stream_read(file, &back) == DCPD_OK);
  EXPECT(dcpd_plan_from_config(c, &p) == DCPD_OK);
  EXPECT(dcpd_detect(back, p, 4, path_in(scratch_dir, "capi_events.csv"), &n_events) == DCPD_OK);
  EXPECT(n_events == 3);
  EXPECT(dcpd_detect(back, p, 9, NULL, &n_events) == DCPD_ERR_CONFIG);
  EXPECT(dcpd_stream_write(s, "/nonexistent-dir/x.cniq") == DCPD_ERR_IO);
  {
    dcpd_stream* missing = NULL;
    EXPECT(dcpd_stream_read("/nonexistent-dir/x.cniq", &missing) == DCPD_ERR_IO);
    EXPECT(missing == NULL);
  }
  dcpd_plan_free(p);
  dcpd_stream_free(back);
  dcpd_stream_free(s);
  dcpd_config_free(c);
}

static void test_experiment(void) {
  dcpd_config* c = NULL;
  dcpd_result* r = NULL;
  dcpd_result* back = NULL;
  dcpd_per_point pt;
  int64_t done = 0;
  int found = -1;
  double snr = 0.0;
  const char* file = path_in(scratch_dir, "capi_per.csv");

  EXPECT(dcpd_config_load(path_in(data_dir, "small.cfg"), &c) == DCPD_OK);
  EXPECT(dcpd_config_set(c, "trials", "8") == DCPD_OK);
  EXPECT(dcpd_run_experiment(c, progress_count, &done, &r) == DCPD_OK);
  EXPECT(done == 16);
  EXPECT(dcpd_result_size(r) == 2);
  EXPECT(dcpd_result_point(r, 1, &pt) == DCPD_OK);
  EXPECT(pt.snr_db == 0.0 && pt.trials == 8);
  EXPECT(pt.per_overall >= 0.0 && pt.per_overall <= 1.0);
  EXPECT(dcpd_result_point(r, 2, &pt) == DCPD_ERR_ARGUMENT);
  EXPECT(dcpd_result_crossing(r, 1e-3, &found, &snr) == DCPD_OK);
  EXPECT(found == 0 || found == 1);
  EXPECT(dcpd_result_write_csv(r, file) == DCPD_OK);
  EXPECT(dcpd_result_load_csv(file, &back) == DCPD_OK);
  EXPECT(dcpd_result_size(back) == 2);
  EXPECT(dcpd_result_write_csv(r, "/nonexistent-dir/p.csv") == DCPD_ERR_IO);
  dcpd_result_free(back);
  dcpd_result_free(r);
  dcpd_config_free(c);
}

static void test_scenarios(void) {
  size_t i, n = dcpd_scenario_count();
  char* report = NULL;
  dcpd_scenario_options opt;
  int saw_fig8 = 0;
  for (i = 0; i < n; ++i) saw_fig8 |= strcmp(dcpd_scenario_name(i), "fig8") == 0;
  EXPECT(saw_fig8);
  EXPECT(dcpd_scenario_name(n) == NULL);
  memset(&opt, 0, sizeof opt);
  EXPECT(dcpd_scenario_run("example1", &opt, NULL, NULL, &report) == DCPD_OK);
  EXPECT(report != NULL && strlen(report) > 0);
  dcpd_string_free(report);
  report = NULL;
  EXPECT(dcpd_scenario_run("fig99", &opt, NULL, NULL, &report) == DCPD_ERR_CONFIG);
}

int main(int argc, char** argv) {
  if (argc < 3) {
    fprintf(stderr, "usage: test_capi DATA_DIR SCRATCH_DIR\n");
    return 2;
  }
  snprintf(data_dir, sizeof data_dir, "%s", argv[1]);
  snprintf(scratch_dir, sizeof scratch_dir, "%s", argv[2]);
  EXPECT(strlen(dcpd_version()) > 0);
  test_config();
  test_plan();
  test_stream_and_detect();
  test_experiment();
  test_scenarios();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
