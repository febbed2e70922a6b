#ifndef CRAWLSIM_H
#define CRAWLSIM_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CrawlStatus {
  CRAWL_STATUS_OK = 0,
  CRAWL_STATUS_NULL_ARGUMENT = 1,
  CRAWL_STATUS_INVALID_UTF8 = 2,
  CRAWL_STATUS_INVALID_CONFIG = 3,
  CRAWL_STATUS_NO_OSCILLATION = 4,
  CRAWL_STATUS_TOO_FEW_EVENTS = 5,
  CRAWL_STATUS_UNACHIEVABLE = 6,
  CRAWL_STATUS_INVALID_BOUNDS = 7,
  CRAWL_STATUS_OUT_OF_RANGE = 8,
  CRAWL_STATUS_MALFORMED_FILE = 9,
  CRAWL_STATUS_IO = 10,
  CRAWL_STATUS_ANALYSIS = 11,
  CRAWL_STATUS_PANIC = 99,
} CrawlStatus;

typedef enum CrawlSide {
  CRAWL_SIDE_LEFT = 0,
  CRAWL_SIDE_RIGHT = 1,
} CrawlSide;

typedef enum CrawlSnapKind {
  CRAWL_SNAP_KIND_SNAP_BACK = 0,
  CRAWL_SNAP_KIND_SNAP_THROUGH = 1,
} CrawlSnapKind;

// Opaque scenario handle.
typedef struct CrawlScenario CrawlScenario;

// Opaque trace handle.
typedef struct CrawlTrace CrawlTrace;

typedef struct CrawlRobotParams {
  double body_mass_kg;
  double attached_mass_kg;
  double mu_forward;
  double mu_backward;
  double efficiency;
  double gravity_m_s2;
  double thru_velocity_factor;
} CrawlRobotParams;

// One trace row.
typedef struct CrawlSample {
  double time_s;
  double beam_x_m;
  double robot_x_m;
  double temp_left_k;
  double temp_right_k;
  enum CrawlSide powered;
} CrawlSample;

// One snap event; `step_m` is meaningful only when `has_step` is true.
typedef struct CrawlEvent {
  double time_s;
  enum CrawlSnapKind kind;
  bool has_step;
  double step_m;
} CrawlEvent;

typedef struct CrawlSpeedInput {
  struct CrawlRobotParams robot;
  double eta_e_j;
  double period_s;
} CrawlSpeedInput;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next call into this library on the same thread.
const char *crawl_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *crawl_version(void);

// Parses a scenario JSON document.
enum CrawlStatus crawl_scenario_from_json(const char *json, struct CrawlScenario **out);

// Loads a scenario JSON file.
enum CrawlStatus crawl_scenario_load(const char *path, struct CrawlScenario **out);

// Built-in default scenario (2 g robot, 0.62 A, 60 s).
enum CrawlStatus crawl_scenario_default(struct CrawlScenario **out);

void crawl_scenario_free(struct CrawlScenario *scenario);

// Serializes the scenario as pretty JSON. Free with `crawl_string_free`.
enum CrawlStatus crawl_scenario_to_json(const struct CrawlScenario *scenario, char **out);

void crawl_string_free(char *s);

// Sets the supply current; the scenario is unchanged if the value is invalid.
enum CrawlStatus crawl_scenario_set_supply_current(struct CrawlScenario *scenario,
                                                   double current_a);

enum CrawlStatus crawl_scenario_set_dt(struct CrawlScenario *scenario, double dt_s);

enum CrawlStatus crawl_scenario_set_duration(struct CrawlScenario *scenario, double duration_s);

enum CrawlStatus crawl_scenario_robot(const struct CrawlScenario *scenario,
                                      struct CrawlRobotParams *out);

// Runs the oscillator for the scenario's duration.
enum CrawlStatus crawl_simulate_oscillator(const struct CrawlScenario *scenario,
                                           struct CrawlTrace **out);

// Runs the crawling robot for the scenario's duration.
enum CrawlStatus crawl_simulate_crawl(const struct CrawlScenario *scenario,
                                      struct CrawlTrace **out);

void crawl_trace_free(struct CrawlTrace *trace);

// Number of samples; 0 for a NULL handle.
size_t crawl_trace_sample_count(const struct CrawlTrace *trace);

size_t crawl_trace_event_count(const struct CrawlTrace *trace);

enum CrawlStatus crawl_trace_sample(const struct CrawlTrace *trace,
                                    size_t index,
                                    struct CrawlSample *out);

enum CrawlStatus crawl_trace_event(const struct CrawlTrace *trace,
                                   size_t index,
                                   struct CrawlEvent *out);

enum CrawlStatus crawl_trace_period(const struct CrawlTrace *trace, double *out_s);

enum CrawlStatus crawl_trace_average_speed(const struct CrawlTrace *trace, double *out_m_s);

// Writes `path` and its sibling `.events.csv` file.
enum CrawlStatus crawl_trace_write_csv(const struct CrawlTrace *trace, const char *path);

enum CrawlStatus crawl_trace_read_csv(const char *path, struct CrawlTrace **out);

enum CrawlStatus crawl_robot_params_default(struct CrawlRobotParams *out);

// Joule power `I^2 R`, in watts.
double crawl_electrical_power(double current_a, double resistance_ohm);

enum CrawlStatus crawl_avg_speed_composed(const struct CrawlSpeedInput *input, double *out_m_s);

// The printed closed form; the result is `m` times the composed speed.
enum CrawlStatus crawl_avg_speed_printed(const struct CrawlSpeedInput *input, double *out);

enum CrawlStatus crawl_speed_ratio_printed(const struct CrawlSpeedInput *input,
                                           double m1_kg,
                                           double m2_kg,
                                           double *out);

enum CrawlStatus crawl_optimize_attached_mass(const struct CrawlSpeedInput *input,
                                              double lo_kg,
                                              double hi_kg,
                                              double *out_kg);

enum CrawlStatus crawl_calibrate_eta_e(double measured_speed_m_s,
                                       const struct CrawlRobotParams *robot,
                                       double period_s,
                                       double *out_j);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRAWLSIM_H */
