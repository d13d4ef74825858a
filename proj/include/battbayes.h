/* battbayes — C interface to the battery fade inference library.
 *
 * The library core is C++; this header is the stable ABI boundary. All
 * entry points are exception-free and report failures through bb_status.
 * A bb_run handle carries a human-readable diagnostic for the last error,
 * retrievable with bb_run_last_error().
 */
#ifndef BATTBAYES_H
#define BATTBAYES_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BB_API __declspec(dllexport)
#else
#define BB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes for the CLI. */
typedef enum bb_status {
    BB_OK = 0,
    BB_ERR_DOMAIN = 1, /* data, numeric, or I/O failure during a run */
    BB_ERR_USAGE = 2,  /* bad arguments, unknown mode, malformed config */
    BB_ERR_INTERNAL = 3
} bb_status;

BB_API const char* bb_version(void);

/* ---- workflow runs ------------------------------------------------- */

typedef struct bb_run bb_run;

/* mode is one of "train", "test", "estimate", "scenario".
 * Returns NULL only on allocation failure; an unknown mode is reported
 * when the run executes. */
BB_API bb_run* bb_run_new(const char* mode);
BB_API void bb_run_free(bb_run* run);

/* Setters record overrides applied on top of the JSON config. */
BB_API bb_status bb_run_set_config(bb_run* run, const char* config_path);
BB_API bb_status bb_run_set_out_dir(bb_run* run, const char* out_dir);
BB_API bb_status bb_run_set_trained_dir(bb_run* run, const char* trained_dir);
BB_API bb_status bb_run_set_seed(bb_run* run, uint64_t seed);
BB_API bb_status bb_run_set_iterations(bb_run* run, uint64_t iterations);
BB_API bb_status bb_run_set_burn_in(bb_run* run, double fraction);
BB_API bb_status bb_run_set_thinning(bb_run* run, uint64_t stride);
/* ratio in (0,1) overrides the config's training fraction; pass 0 to keep
 * it. mode is "sequential" or "random"; pass NULL to keep the config's. */
BB_API bb_status bb_run_set_split(bb_run* run, double ratio, const char* mode);

BB_API bb_status bb_run_execute(bb_run* run);

/* Valid until the next call on the same handle. Never NULL. */
BB_API const char* bb_run_last_error(const bb_run* run);

/* ---- stateless kernels ---------------------------------------------- */

/* family is one of "gamma", "beta", "rayleigh", "normal"; distributions
 * are specified by mean and standard deviation. */
BB_API bb_status bb_log_pdf(const char* family, double mean, double sd, double x,
                            double* out);

/* Draws n variates into out using the library's seeded stream (seed,
 * stream) so results are reproducible across processes. */
BB_API bb_status bb_draw(const char* family, double mean, double sd, uint64_t seed,
                         uint64_t stream, size_t n, double* out);

/* Sample autocorrelation of values[0..n) at the given lag. */
BB_API bb_status bb_autocorrelation(const double* values, size_t n, size_t lag,
                                    double* out);

/* Smallest lag whose autocorrelation drops below threshold. */
BB_API bb_status bb_decorrelation_lag(const double* values, size_t n,
                                      double threshold, size_t* out);

/* Coefficient of determination and normalized RMSD (percent of the mean
 * measured value) between paired series. */
BB_API bb_status bb_fit_metrics(const double* estimated, const double* measured,
                                size_t n, double* r_squared, double* rmsd_percent);

#ifdef __cplusplus
}
#endif

#endif /* BATTBAYES_H */
