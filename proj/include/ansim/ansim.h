// Copyright 2026 The ansim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* ansim.h                                                        -*-C-*- */
#ifndef ANSIM_ANSIM_H
#define ANSIM_ANSIM_H

/* C interface to the Active Neighbour simulator.
 *
 * All objects are opaque handles released with their `_free` function.
 * Every call returns an `ansim_status`; on failure `ansim_last_error()`
 * describes the problem (per thread, valid until the next call on that
 * thread).  Strings returned through `char**` are owned by the caller and
 * released with `ansim_string_free`. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ANSIM_BUILDING)
#    define ANSIM_API __declspec(dllexport)
#  else
#    define ANSIM_API __declspec(dllimport)
#  endif
#else
#  define ANSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ansim_status {
    ANSIM_OK = 0,
    ANSIM_ERR_CONFIG = 1,
    ANSIM_ERR_CONVERGENCE = 2,
    ANSIM_ERR_IO = 3,
    ANSIM_ERR_INVALID_ARGUMENT = 4,
    ANSIM_ERR_INTERNAL = 5
} ansim_status;

typedef struct ansim_scenario   ansim_scenario;
typedef struct ansim_report     ansim_report;
typedef struct ansim_comparison ansim_comparison;

ANSIM_API const char* ansim_version(void);
ANSIM_API const char* ansim_last_error(void);
ANSIM_API void        ansim_string_free(char* s);

/* --- scenarios ---------------------------------------------------------- */

ANSIM_API size_t      ansim_bundled_count(void);
ANSIM_API const char* ansim_bundled_name(size_t index);

/* Parses a JSON document; on ANSIM_ERR_CONFIG the error text lists every
 * problem, one per line. */
ANSIM_API ansim_status ansim_scenario_parse(const char*      json,
                                            ansim_scenario** out);

/* A file path or a bundled scenario name. */
ANSIM_API ansim_status ansim_scenario_load(const char*      path_or_name,
                                           ansim_scenario** out);

/* "plain", "auth" or "auth-encap". */
ANSIM_API ansim_status ansim_scenario_set_profile(ansim_scenario* s,
                                                  const char*     profile);
ANSIM_API ansim_status ansim_scenario_set_seed(ansim_scenario* s,
                                               uint64_t        seed);
ANSIM_API ansim_status ansim_scenario_normalize_nodes(ansim_scenario* s,
                                                      uint32_t        count);
ANSIM_API uint32_t     ansim_scenario_node_count(const ansim_scenario* s);
ANSIM_API ansim_status ansim_scenario_to_json(const ansim_scenario* s,
                                              char**                out);
ANSIM_API void         ansim_scenario_free(ansim_scenario* s);

/* --- runs ---------------------------------------------------------------- */

/* `trace_path` may be NULL.  A run that hits a convergence failure still
 * returns ANSIM_OK; check `ansim_report_converged`. */
ANSIM_API ansim_status ansim_run(const ansim_scenario* s,
                                 const char*           trace_path,
                                 ansim_report**        out);
ANSIM_API ansim_status ansim_report_json(const ansim_report* r, char** out);
ANSIM_API ansim_status ansim_report_csv(const ansim_report* r, char** out);
ANSIM_API int          ansim_report_converged(const ansim_report* r);
ANSIM_API uint64_t     ansim_report_bytes_wire(const ansim_report* r);
ANSIM_API void         ansim_report_free(ansim_report* r);

typedef enum ansim_ratio {
    ANSIM_RATIO_ENCAP_PLAIN = 0,
    ANSIM_RATIO_ENCAP_AUTH = 1,
    ANSIM_RATIO_AUTH_PLAIN = 2
} ansim_ratio;

ANSIM_API ansim_status ansim_compare(const ansim_scenario* s,
                                     ansim_comparison**    out);
ANSIM_API ansim_status ansim_comparison_json(const ansim_comparison* c,
                                             char**                  out);
ANSIM_API ansim_status ansim_comparison_csv(const ansim_comparison* c,
                                            char**                  out);
ANSIM_API double       ansim_comparison_ratio(const ansim_comparison* c,
                                              ansim_ratio             which);
ANSIM_API int          ansim_comparison_converged(const ansim_comparison* c);
ANSIM_API void         ansim_comparison_free(ansim_comparison* c);

#ifdef __cplusplus
}
#endif

#endif
