/*
 * degreescope — scale-degree corpus statistics for symbolic music.
 *
 * C API over the analysis core. All functions return ds_status; on failure
 * a thread-local message is available through ds_last_error(). Objects are
 * opaque handles created and released by the matching _free function.
 * Everything here is safe to call from multiple threads as long as a single
 * handle is not mutated concurrently.
 */
#ifndef DEGREESCOPE_H
#define DEGREESCOPE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DS_API __declspec(dllexport)
#else
#define DS_API __attribute__((visibility("default")))
#endif

typedef enum ds_status {
    DS_OK = 0,
    DS_ERR_INPUT = 1,    /* malformed or unreadable input data */
    DS_ERR_CONFIG = 2,   /* invalid parameter or configuration */
    DS_ERR_INTERNAL = 3  /* broken internal invariant */
} ds_status;

/* Message for the most recent failure on this thread; empty string if none. */
DS_API const char* ds_last_error(void);

DS_API const char* ds_version(void);

/* ------------------------------------------------------------------ */
/* Parsing                                                             */
/* ------------------------------------------------------------------ */

typedef struct ds_notes ds_notes;
typedef struct ds_chords ds_chords;

typedef struct ds_note_event {
    double onset_s;
    double offset_s;
    int32_t pitch;    /* 0-127 */
    int32_t velocity; /* 0-127 */
} ds_note_event;

typedef struct ds_chord_event {
    double onset_s;
    char label[8]; /* "C", "F#m", "N", ... NUL-terminated */
} ds_chord_event;

/* Standard MIDI File (formats 0/1, ticks-per-quarter) to note events. */
DS_API ds_status ds_notes_from_smf(const void* bytes, size_t len,
                                   ds_notes** out);
/* Line-delimited JSON notes: {"onset_s","offset_s","pitch","velocity"}. */
DS_API ds_status ds_notes_from_jsonl(const char* text, ds_notes** out);
DS_API size_t ds_notes_count(const ds_notes* notes);
DS_API ds_status ds_notes_get(const ds_notes* notes, size_t index,
                              ds_note_event* out);
DS_API void ds_notes_free(ds_notes* notes);

/* Chord stream, CSV "onset,label" or JSONL {"onset_s","label"} per line. */
DS_API ds_status ds_chords_from_text(const char* text, ds_chords** out);
/* Windowed triad template matching over note events. */
DS_API ds_status ds_chords_detect(const ds_notes* notes, double window_s,
                                  double hop_s, ds_chords** out);
DS_API size_t ds_chords_count(const ds_chords* chords);
DS_API ds_status ds_chords_get(const ds_chords* chords, size_t index,
                               ds_chord_event* out);
DS_API void ds_chords_free(ds_chords* chords);

/* ------------------------------------------------------------------ */
/* Key estimation                                                      */
/* ------------------------------------------------------------------ */

typedef struct ds_key_estimate {
    int32_t tonic_pc; /* 0 = C */
    int32_t is_minor; /* 0 major, 1 minor */
    double score;     /* profile correlation */
} ds_key_estimate;

/* profile: built-in name ("kk") or path to a profile JSON file. */
DS_API ds_status ds_estimate_key(const ds_notes* notes, const char* profile,
                                 ds_key_estimate* out);

/* ------------------------------------------------------------------ */
/* Degree sequences and counts                                         */
/* ------------------------------------------------------------------ */

typedef struct ds_degrees ds_degrees;
typedef struct ds_profile ds_profile;

#define DS_NUM_DEGREES 15
#define DS_NUM_TRANSITIONS (DS_NUM_DEGREES * DS_NUM_DEGREES)

/* ASCII symbol for a canonical degree index 0..14 ("I", "bII", ...), or
 * NULL when out of range. */
DS_API const char* ds_degree_name(int32_t index);

/* Map chords to degrees relative to a tonic: no-chord events dropped first,
 * then consecutive repeats collapsed. */
DS_API ds_status ds_degrees_from_chords(const ds_chords* chords,
                                        int32_t tonic_pc, ds_degrees** out);
DS_API size_t ds_degrees_count(const ds_degrees* degrees);
/* Canonical index at position, or -1 when out of range. */
DS_API int32_t ds_degrees_get(const ds_degrees* degrees, size_t index);
DS_API double ds_degrees_dropped_fraction(const ds_degrees* degrees);
DS_API void ds_degrees_free(ds_degrees* degrees);

/* Marginal and transition counts of one degree sequence. */
DS_API ds_status ds_profile_from_degrees(const ds_degrees* degrees,
                                         ds_profile** out);
/* Field-wise sum of several profiles. */
DS_API ds_status ds_profile_aggregate(const ds_profile* const* profiles,
                                      size_t count, ds_profile** out);
DS_API ds_status ds_profile_marginal(const ds_profile* profile,
                                     uint64_t out[DS_NUM_DEGREES]);
/* Row-major 15x15 transition counts. */
DS_API ds_status ds_profile_transitions(const ds_profile* profile,
                                        uint64_t out[DS_NUM_TRANSITIONS]);
DS_API uint64_t ds_profile_n_pieces(const ds_profile* profile);
DS_API uint64_t ds_profile_total_events(const ds_profile* profile);
DS_API void ds_profile_free(ds_profile* profile);

/* ------------------------------------------------------------------ */
/* Information-theoretic measures                                      */
/* ------------------------------------------------------------------ */

/* A ds_dist is an additively smoothed distribution,
 *   p[k] = (count[k] + alpha) / (total + alpha*K),
 * the only object the measures accept. */
typedef struct ds_dist ds_dist;

DS_API ds_status ds_dist_from_counts(const uint64_t* counts, size_t k,
                                     double alpha, ds_dist** out);
/* basis: 0 = marginal (15 cells), 1 = transitions (225 cells). */
DS_API ds_status ds_dist_from_profile(const ds_profile* profile, int32_t basis,
                                      double alpha, ds_dist** out);
DS_API size_t ds_dist_size(const ds_dist* dist);
DS_API ds_status ds_dist_probs(const ds_dist* dist, double* out);
DS_API void ds_dist_free(ds_dist* dist);

/* Shannon entropy in bits. */
DS_API ds_status ds_entropy(const ds_dist* p, double* bits);
/* Asymmetric KL divergence in bits. */
DS_API ds_status ds_kl(const ds_dist* p, const ds_dist* q, double* bits);
/* Jensen-Shannon divergence in bits (symmetric, <= 1). */
DS_API ds_status ds_js(const ds_dist* p, const ds_dist* q, double* bits);

typedef struct ds_zipf_fit {
    double slope_alpha;     /* fitted exponent (sign-flipped log-log slope) */
    double intercept_log_c; /* natural-log intercept */
    double r_squared;       /* meaningful only when r2_defined != 0 */
    int32_t r2_defined;
    int32_t n_points;
} ds_zipf_fit;

/* Rank-frequency OLS fit in log-log space over the whole support. */
DS_API ds_status ds_zipf(const ds_dist* p, ds_zipf_fit* out);

/* Spearman rank correlation with fractional ranks; *defined is 0 when a
 * side has no rank variance (rho is then meaningless). */
DS_API ds_status ds_spearman(const double* x, const double* y, size_t n,
                             double* rho, int32_t* defined);
/* Cosine similarity; *defined is 0 for a zero vector. */
DS_API ds_status ds_cosine(const double* u, const double* v, size_t n,
                           double* value, int32_t* defined);
/* Two-sided p-value for a Spearman rho over n observations under the
 * t-approximation. */
DS_API ds_status ds_spearman_p_value(double rho, size_t n, double* p);

/* ------------------------------------------------------------------ */
/* Commands                                                            */
/* ------------------------------------------------------------------ */

/* Run configuration, stringly-typed so the surface stays stable. Keys:
 *   alpha, min-pieces, seed, bootstrap-iters, key-profile, chord-window,
 *   chord-hop, zipf-exclude-diagonal (0/1), zipf-raw (0/1),
 *   keep-going (0/1), alphas ("0.1,0.5,1.0"), subsample-size,
 *   subsample-count, threads, key-override ("<piece_id>=<pc>,<mode>",
 *   repeatable). */
typedef struct ds_config ds_config;

DS_API ds_config* ds_config_new(void);
DS_API ds_status ds_config_set(ds_config* config, const char* key,
                               const char* value);
DS_API void ds_config_free(ds_config* config);

/* Degree sequences as JSONL; out_path "-" writes to stdout. */
DS_API ds_status ds_cmd_degrees(const ds_config* config,
                                const char* manifest_path,
                                const char* out_path);
/* Full analysis artifacts under out_dir. */
DS_API ds_status ds_cmd_analyze(const ds_config* config,
                                const char* manifest_path,
                                const char* out_dir);
/* Era-pool tables; pool_spec_path and feature_vectors_path may be NULL. */
DS_API ds_status ds_cmd_pools(const ds_config* config,
                              const char* manifest_path,
                              const char* pool_spec_path,
                              const char* feature_vectors_path,
                              const char* out_dir);
/* Figure-ready series from an analyze output directory. composers is a
 * comma-separated filter; NULL or "" selects every composer. */
DS_API ds_status ds_cmd_plotdata(const ds_config* config,
                                 const char* report_dir, const char* composers,
                                 const char* out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DEGREESCOPE_H */
