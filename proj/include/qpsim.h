/* qpsim.h
 * C API for the qpsim single-photon polarization/OAM simulator.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Functions return QPSIM_OK on success; on failure they return an error
 * code and leave a human-readable message retrievable (per thread) via
 * qpsim_last_error(). Strings returned through char** out-parameters must
 * be released with qpsim_string_free().
 */

#ifndef QPSIM_H
#define QPSIM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qpsim_status {
    QPSIM_OK = 0,
    QPSIM_ERR_IO = 1,         /* file could not be read or written */
    QPSIM_ERR_PARSE = 2,      /* circuit / state / config text rejected */
    QPSIM_ERR_PHYSICS = 3,    /* physics precondition violated */
    QPSIM_ERR_INVALID = 4,    /* invalid argument combination */
    QPSIM_ERR_INTERNAL = 5,   /* unexpected internal failure */
    QPSIM_ERR_TRUNCATION = 6  /* amplitude would leave |m| <= m_max */
} qpsim_status;

typedef struct qpsim_circuit qpsim_circuit;
typedef struct qpsim_state qpsim_state;

const char* qpsim_version(void);

/* Thread-local message for the most recent failure; never NULL. */
const char* qpsim_last_error(void);

void qpsim_string_free(char* s);

/* --- circuits ---------------------------------------------------------- */

qpsim_status qpsim_circuit_parse(const char* text, qpsim_circuit** out);
qpsim_status qpsim_circuit_parse_file(const char* path, qpsim_circuit** out);

/* setup_id: "a", "b", "c", "d", "det-fwd", "det-rev".
 * noise_json: NULL or a JSON object with optional keys
 * "qplate_delta" (radians) and "hologram_efficiency". */
qpsim_status qpsim_circuit_setup(const char* setup_id, const char* noise_json,
                                 qpsim_circuit** out);

/* Canonical text form of a parsed circuit (round-trips through parse). */
qpsim_status qpsim_circuit_canonical(const qpsim_circuit* c, char** out_text);

void qpsim_circuit_free(qpsim_circuit* c);

/* --- input states ------------------------------------------------------ */

/* spec: "pol:H", "pol:0.6,0.8i", "oam2:h", "oam4:0.707,-0.707", ... */
qpsim_status qpsim_state_parse(const char* spec, int m_max, qpsim_state** out);
void qpsim_state_free(qpsim_state* s);

/* --- execution --------------------------------------------------------- */

/* Exact-amplitude run; out_json receives a run_result JSON document. */
qpsim_status qpsim_run_exact(const qpsim_circuit* c, const qpsim_state* input,
                             int with_trace, char** out_json);

/* Simulated tomography of the circuit output in the given logical subspace
 * ("pol", "oam2", "oam4"). shots == 0 selects exact Born-rule counts.
 * out_json receives a tomography JSON document (counts + linear inversion +
 * maximum-likelihood reconstruction). */
qpsim_status qpsim_run_tomo(const qpsim_circuit* c, const qpsim_state* input,
                            const char* subspace, int64_t shots,
                            uint64_t seed, char** out_json);

/* Six-row cardinal-state fidelity table for a named setup. shots == 0 is
 * exact mode. out_json receives a fidelity_table JSON document. */
qpsim_status qpsim_run_table(const char* setup_id, int64_t shots,
                             uint64_t seed, const char* noise_json,
                             char** out_json);

/* Setup-b OAM sign detector efficiency. analyzer_efficiency <= 0 selects the
 * ideal fiber-based detector; a positive value simulates a fork-hologram
 * analyzer with that intensity efficiency. */
qpsim_status qpsim_detector_efficiency(int64_t shots, uint64_t seed,
                                       double analyzer_efficiency,
                                       char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QPSIM_H */
