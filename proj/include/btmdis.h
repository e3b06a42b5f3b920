#ifndef BTMDIS_H
#define BTMDIS_H

/* C interface of the disaggregation toolkit. All functions return a
 * btm_status; details of the last failure are available per thread via
 * btm_last_error(). Handles are opaque and must be freed by the caller. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum btm_status {
  BTM_OK = 0,
  BTM_ERR_CONFIG = 1,   /* bad key, bad value, unknown option */
  BTM_ERR_IO = 2,       /* missing or unreadable file, bad format */
  BTM_ERR_DATA = 3,     /* dimension or invariant violation */
  BTM_ERR_SOLVER = 4,   /* divergence, numerical failure */
  BTM_ERR_INTERNAL = 5
} btm_status;

typedef struct btm_config btm_config;

const char* btm_version(void);

/* Thread-local message describing the most recent failure. */
const char* btm_last_error(void);

btm_config* btm_config_create(void);
btm_status btm_config_load(btm_config* cfg, const char* path);
btm_status btm_config_set(btm_config* cfg, const char* key, const char* value);
btm_status btm_config_get(const btm_config* cfg, const char* key, char* buf, size_t buf_len);
void btm_config_free(btm_config* cfg);

/* Registry introspection, used to build --help and option lists. */
size_t btm_config_key_count(void);
const char* btm_config_key_name(size_t index);
const char* btm_config_key_default(size_t index);
const char* btm_config_key_help(size_t index);

/* Workflows. Directory arguments are created when missing. */
btm_status btm_generate(const btm_config* cfg, const char* out_dir);
btm_status btm_train_det(const btm_config* cfg, const char* data_dir, const char* model_dir);
btm_status btm_train_bayes(const btm_config* cfg, const char* data_dir, const char* model_dir);
btm_status btm_disagg_det(const btm_config* cfg, const char* model_dir, const char* data_dir,
                          const char* out_dir);
btm_status btm_disagg_bayes(const btm_config* cfg, const char* model_dir, const char* data_dir,
                            const char* out_dir);
btm_status btm_eval(const btm_config* cfg, const char* est_dir, const char* data_dir,
                    const char* out_csv);
btm_status btm_report(const btm_config* cfg, const char* data_dir, const char* est_dir,
                      const char* out_dir, int max_windows);
btm_status btm_bench(const btm_config* cfg, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* BTMDIS_H */
