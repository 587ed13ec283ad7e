/* origin_ledger.h — C API of the origin-ledger library.
 *
 * All functions return ol_status; OL_OK is 0. On failure, ol_last_error()
 * returns a thread-local description of what went wrong. Handles are opaque
 * and owned by the caller via the matching *_free function. Strings returned
 * through char** out-parameters are heap-allocated; release them with
 * ol_string_free.
 *
 * Option blobs are JSON objects so the ABI stays small. Recognized keys:
 *
 *   score/compare options: {"z": int, "l": int, "min_match": int,
 *     "strategy": "exhaustive"|"greedy"|"beam", "beam_width": int,
 *     "variant_policy": "all"|"first", "tau": number, "seed": int,
 *     "format": "json"|"md", "timestamp": string,
 *     "profile": {"strip_comments": bool, "abstract_identifiers": bool,
 *                 "abstract_literals": bool}}
 *
 *   policy options: the above plus {"steps": int, "lr": number,
 *     "checkpoint": path, "workers": int}
 *
 *   provider config: {"kind": "offline"|"scripted"|"remote",
 *     "dir": path, "seed": int, "endpoint": url, "timeout_ms": int,
 *     "attempts": int, "backoff_ms": int, "bearer_token": string,
 *     "max_in_flight": int}
 */

#ifndef ORIGIN_LEDGER_H
#define ORIGIN_LEDGER_H

#include <stddef.h>

#if defined(_WIN32)
#define OL_API __declspec(dllexport)
#else
#define OL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ol_status {
    OL_OK = 0,
    OL_E_INVALID_ARGUMENT = 1, /* bad flags, ranges, arity, encoding */
    OL_E_IO = 2,               /* file system failures */
    OL_E_SCHEMA = 3,           /* malformed space.json, meta.json, labels, reports */
    OL_E_PROVIDER = 4,         /* provider unavailable or answer missing */
    OL_E_REMOTE = 5,           /* remote timeout or malformed response */
    OL_E_PARTIAL = 6,          /* ingest fetched some but not all records */
    OL_E_EMPTY_INPUT = 7,      /* empty document / eval set / repository */
    OL_E_BUDGET = 8,           /* exhaustive enumeration over cap */
    OL_E_INTERNAL = 127
} ol_status;

typedef struct ol_space ol_space;
typedef struct ol_repository ol_repository;

OL_API const char* ol_version(void);

/* Thread-local message for the most recent failure in this thread. */
OL_API const char* ol_last_error(void);

OL_API void ol_string_free(char* text);

/* slots_json: [["word", ...], ...]; template has one {} per slot. */
OL_API ol_status ol_space_build(const char* slots_json, const char* template_text,
                                ol_space** out);
OL_API ol_status ol_space_load(const char* repo_dir, ol_space** out);
OL_API ol_status ol_space_save(const ol_space* space, const char* repo_dir);
OL_API void ol_space_free(ol_space* space);
OL_API size_t ol_space_size(const ol_space* space);
OL_API ol_status ol_space_render(const ol_space* space, size_t prompt_id, char** rendered);

OL_API ol_status ol_repository_load(const char* dir, ol_repository** out);
OL_API ol_status ol_repository_save(const ol_repository* repo, const char* dir);
OL_API void ol_repository_free(ol_repository* repo);
OL_API size_t ol_repository_count(const ol_repository* repo);

/* Fetches size(space) * variants answers. On OL_E_PARTIAL, *out still holds
 * the fetched records and *missing_json lists the failed [prompt_id, variant]
 * pairs. */
OL_API ol_status ol_ingest(const ol_space* space, const char* provider_json,
                           int variants, ol_repository** out, char** missing_json);

/* repo may be NULL: the document is scored against an empty repository. */
OL_API ol_status ol_score_file(const ol_repository* repo, const char* path,
                               const char* options_json, char** report);
OL_API ol_status ol_score_text(const ol_repository* repo, const char* text,
                               const char* name, const char* options_json, char** report);

OL_API ol_status ol_compare_files(const ol_repository* repo, const char* path1,
                                  const char* path2, const char* options_json,
                                  char** report);

OL_API ol_status ol_policy_train_file(const ol_repository* repo, const char* path,
                                      const char* options_json, char** report);

OL_API ol_status ol_policy_eval(const ol_repository* repo, const char* labels_path,
                                const char* options_json, char** report);

#ifdef __cplusplus
}
#endif

#endif /* ORIGIN_LEDGER_H */
