/* seqtest: sequential tests of a simple null against finitely many
 * alternatives — mixture and weighted-maximum likelihood-ratio procedures,
 * renewal-theoretic design constants, asymptotic operating characteristics,
 * and a Monte Carlo engine.
 *
 * C surface of the shared library: opaque handles plus status codes. Every
 * function returning seqtest_status sets a thread-local message retrievable
 * via seqtest_last_error() on failure. Strings returned through char**
 * parameters are heap-allocated and must be released with
 * seqtest_string_free().
 */
#ifndef SEQTEST_H
#define SEQTEST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SEQTEST_API __declspec(dllexport)
#else
#define SEQTEST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum seqtest_status {
    SEQTEST_OK = 0,
    SEQTEST_ERR_INVALID_ARGUMENT = 1, /* bad pointer/value at the C boundary */
    SEQTEST_ERR_CONFIG = 2,           /* invalid model/design/plan */
    SEQTEST_ERR_NUMERIC = 3,          /* series/quadrature/oracle failure */
    SEQTEST_ERR_REPRODUCTION = 4,     /* strict reproduction mismatch */
    SEQTEST_ERR_USAGE = 5,            /* API misuse (wrong call order etc.) */
    SEQTEST_ERR_INTERNAL = 6
} seqtest_status;

SEQTEST_API const char* seqtest_version(void);

/* Thread-local message describing the most recent failure in this thread;
 * empty string when the last call succeeded. */
SEQTEST_API const char* seqtest_last_error(void);

SEQTEST_API void seqtest_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Models                                                             */
/* ------------------------------------------------------------------ */

typedef struct seqtest_model seqtest_model;

/* JSON: {"kind":"multichannel","channels":[{"family":"exponential"|
 * "gaussian","theta":<positive real>}, ...]} */
SEQTEST_API seqtest_status seqtest_model_create_json(const char* json,
                                                     seqtest_model** out);
SEQTEST_API void seqtest_model_free(seqtest_model* model);

/* Number of alternatives K, or -1 on a null handle. */
SEQTEST_API int seqtest_model_channels(const seqtest_model* model);

/* log(f_i(x)/f_0(x)) for one observation vector of length dim (= K for
 * multichannel models). */
SEQTEST_API seqtest_status seqtest_model_loglr(const seqtest_model* model, int i,
                                               const double* x, size_t dim,
                                               double* out);

typedef struct seqtest_channel_constants {
    double I;      /* KL number under the alternative */
    double I0;     /* KL number under the null */
    double gamma;  /* upper-boundary overshoot Laplace transform */
    double gamma0; /* lower-boundary counterpart */
    double kappa;  /* mean upper overshoot */
    double kappa0; /* mean lower overshoot */
    double L;      /* renewal L-number; satisfies L = gamma*I = gamma0*I0 */
} seqtest_channel_constants;

/* Fills out[0..K-1]. */
SEQTEST_API seqtest_status seqtest_model_constants(const seqtest_model* model,
                                                   seqtest_channel_constants* out);

/* Alternatives sorted ascending by I0 (ties by index) into order[0..K-1]
 * (1-based indices) and the multiplicity r of the minimal I0. */
SEQTEST_API seqtest_status seqtest_model_ordering(const seqtest_model* model,
                                                  int* order, int* r);

/* Empirical overshoot constants for alternative i at boundary c: side 0
 * simulates the walk upward under P_i, side 1 downward under P_0. */
SEQTEST_API seqtest_status seqtest_overshoot_mc(const seqtest_model* model, int i,
                                                double c, long long reps, int side,
                                                uint64_t seed, double* gamma_hat,
                                                double* gamma_se, double* kappa_hat,
                                                double* kappa_se);

/* ------------------------------------------------------------------ */
/* Analytic design and approximations                                 */
/* ------------------------------------------------------------------ */

/* prior: "uniform" | "kl" | "l" | "hat"; rule: "conservative" | "corrected";
 * weight_source: "formula" | "published". Returns the design as JSON
 * {"logA":..,"logB":..,"q0":[..],"q1":[..],"p":[..]}. */
SEQTEST_API seqtest_status seqtest_emit_design_json(const seqtest_model* model,
                                                    const char* prior,
                                                    const char* rule, double alpha,
                                                    double beta,
                                                    const char* weight_source,
                                                    char** out_json);

/* SPRT on channel i with boundaries from (alpha, beta): expected sample
 * sizes under P_i and under P_0 (first-order, overshoot-corrected). */
SEQTEST_API seqtest_status seqtest_sprt_ess(const seqtest_model* model, int i,
                                            double alpha, double beta,
                                            double* under_hi, double* under_h0);

/* Corrected first-order ESS of either weighted test under P_i, given the
 * upper weights q1 (length K) and the type-I level alpha. */
SEQTEST_API seqtest_status seqtest_corrected_ess(const seqtest_model* model,
                                                 const double* q1, size_t k,
                                                 double alpha, int i, double* out);

/* max_i I_i * E_i[T] at its least-favorable value: |log alpha| +
 * log sum_j gamma_j e^{kappa_j}. */
SEQTEST_API seqtest_status seqtest_minimax_value(const seqtest_model* model,
                                                 double alpha, double* out);

/* Additive penalty C_i(p) and relative performance loss J_i(p) for a prior
 * p (length K, positive, summing to 1). Either output may be NULL. */
SEQTEST_API seqtest_status seqtest_performance_loss(const seqtest_model* model,
                                                    const double* p, size_t k,
                                                    double alpha, double* c_out,
                                                    double* j_out);

/* ------------------------------------------------------------------ */
/* Incremental runner                                                 */
/* ------------------------------------------------------------------ */

typedef struct seqtest_runner seqtest_runner;

/* test: "milrt" | "wglrt" | "sprt:<i>". design_json as produced by
 * seqtest_emit_design_json (field "p" optional). */
SEQTEST_API seqtest_status seqtest_runner_create(const seqtest_model* model,
                                                 const char* design_json,
                                                 const char* test,
                                                 seqtest_runner** out);
SEQTEST_API void seqtest_runner_free(seqtest_runner* runner);

/* Feed one observation vector. On return *stopped is 0 or 1; once stopped,
 * *d is the decision (1 = reject the null), *T the stopping time and *eta
 * the terminal overshoot. Stepping a stopped runner is a usage error. */
SEQTEST_API seqtest_status seqtest_runner_step(seqtest_runner* runner,
                                               const double* x, size_t dim,
                                               int* stopped, long long* T, int* d,
                                               double* eta);

/* Current time, per-alternative statistics (z, length K; may be NULL) and
 * the two decision statistics. */
SEQTEST_API seqtest_status seqtest_runner_state(const seqtest_runner* runner,
                                                long long* t, double* z,
                                                double* upper, double* lower);

/* Run one full path with model-generated data: truth 0 for the null or a
 * channel index in 1..K. *truncated is 1 when max_steps elapsed without a
 * decision (then *d is meaningless). */
SEQTEST_API seqtest_status seqtest_run_path(const seqtest_model* model,
                                            const char* design_json,
                                            const char* test, int truth,
                                            uint64_t seed, long long max_steps,
                                            long long* T, int* d, double* eta,
                                            int* truncated);

/* ------------------------------------------------------------------ */
/* String emitters (CSV/JSON) used by the command-line tool            */
/* ------------------------------------------------------------------ */

/* CSV: i,theta,I,I0,gamma,gamma0,kappa,kappa0,L (one row per alternative). */
SEQTEST_API seqtest_status seqtest_emit_constants_csv(const seqtest_model* model,
                                                      char** out_csv);

/* CSV: quantity,hypothesis,value,remainder_class — first-order expected
 * sample sizes and error-probability approximations for the given design. */
SEQTEST_API seqtest_status seqtest_emit_approximate_csv(const seqtest_model* model,
                                                        const char* design_json,
                                                        double alpha, double beta,
                                                        char** out_csv);

/* Monte Carlo run. test as for seqtest_runner_create; truth: "0", "<i>" or
 * "weighted" (weighted draws the channel from the design's "p" each
 * replication); estimator: "direct" | "is". Returns the report as JSON.
 * out_per_rep_csv (optional): CSV rep,T,d with d = -1 for truncated paths.
 * out_trace_csv (optional): CSV t,z_1..z_K,upper,lower for replication 0. */
SEQTEST_API seqtest_status seqtest_emit_simulate_json(
    const seqtest_model* model, const char* design_json, const char* test,
    const char* truth, long long reps, uint64_t seed, long long max_steps,
    const char* estimator, int threads, char** out_json, char** out_per_rep_csv,
    char** out_trace_csv);

/* Reference-study reproduction. what: "constants" | "ess" | "figure1" |
 * "figure2" | "figure3". reps scales the Monte Carlo effort where
 * applicable. With strict != 0 the call returns SEQTEST_ERR_REPRODUCTION
 * (after filling the CSV) if a comparison against the printed reference
 * values fails beyond its documented tolerance and is not a documented
 * mismatch. */
SEQTEST_API seqtest_status seqtest_emit_reproduce_csv(const char* what,
                                                      long long reps, uint64_t seed,
                                                      int threads, int strict,
                                                      char** out_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SEQTEST_H */
