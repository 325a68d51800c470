// C API implementation: thin handle-and-JSON wrapper over the C++ core.

#include "qpsim.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qpsim/circuitio.hpp"

using namespace qpsim;

struct qpsim_circuit {
    CircuitDoc doc;        // set when parsed from text
    bool has_doc = false;
    Circuit circuit;
};

struct qpsim_state {
    PhotonState state{kDefaultMmax};
};

namespace {

thread_local std::string g_last_error = "no error";

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

qpsim_status fail(qpsim_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

// Maps library exceptions onto status codes.
template <typename Fn>
qpsim_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const TruncationError& e) {
        return fail(QPSIM_ERR_TRUNCATION, e.what());
    } catch (const ParseError& e) {
        return fail(QPSIM_ERR_PARSE, e.what());
    } catch (const EmptySubspaceError& e) {
        return fail(QPSIM_ERR_PHYSICS, e.what());
    } catch (const PreconditionError& e) {
        return fail(QPSIM_ERR_PHYSICS, e.what());
    } catch (const Error& e) {
        return fail(QPSIM_ERR_INTERNAL, e.what());
    } catch (const std::exception& e) {
        return fail(QPSIM_ERR_INTERNAL, e.what());
    }
}

std::optional<NoiseConfig> noise_from_json(const char* noise_json) {
    if (!noise_json || !*noise_json) return std::nullopt;
    return parse_noise_config(noise_json);
}

}  // namespace

extern "C" {

const char* qpsim_version(void) { return "1.0.0"; }

const char* qpsim_last_error(void) { return g_last_error.c_str(); }

void qpsim_string_free(char* s) { delete[] s; }

qpsim_status qpsim_circuit_parse(const char* text, qpsim_circuit** out) {
    if (!text || !out) return fail(QPSIM_ERR_INVALID, "NULL argument");
    return guarded([&] {
        auto handle = std::make_unique<qpsim_circuit>();
        handle->doc = parse_circuit(text);
        handle->has_doc = true;
        handle->circuit = build_circuit(handle->doc);
        *out = handle.release();
        return QPSIM_OK;
    });
}

qpsim_status qpsim_circuit_parse_file(const char* path, qpsim_circuit** out) {
    if (!path || !out) return fail(QPSIM_ERR_INVALID, "NULL argument");
    std::ifstream in(path);
    if (!in)
        return fail(QPSIM_ERR_IO,
                    std::string("cannot open circuit file '") + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return qpsim_circuit_parse(buf.str().c_str(), out);
}

qpsim_status qpsim_circuit_setup(const char* setup_id, const char* noise_json,
                                 qpsim_circuit** out) {
    if (!setup_id || !out) return fail(QPSIM_ERR_INVALID, "NULL argument");
    return guarded([&] {
        auto handle = std::make_unique<qpsim_circuit>();
        handle->circuit =
            build_setup(setup_from_label(setup_id), noise_from_json(noise_json));
        *out = handle.release();
        return QPSIM_OK;
    });
}

qpsim_status qpsim_circuit_canonical(const qpsim_circuit* c, char** out_text) {
    if (!c || !out_text) return fail(QPSIM_ERR_INVALID, "NULL argument");
    if (!c->has_doc)
        return fail(QPSIM_ERR_INVALID,
                    "circuit was not created from text; no canonical form");
    return guarded([&] {
        *out_text = dup_string(unparse_circuit(c->doc));
        return QPSIM_OK;
    });
}

void qpsim_circuit_free(qpsim_circuit* c) { delete c; }

qpsim_status qpsim_state_parse(const char* spec, int m_max,
                               qpsim_state** out) {
    if (!spec || !out) return fail(QPSIM_ERR_INVALID, "NULL argument");
    return guarded([&] {
        auto handle = std::make_unique<qpsim_state>();
        handle->state = parse_state_spec(spec, m_max > 0 ? m_max : kDefaultMmax);
        *out = handle.release();
        return QPSIM_OK;
    });
}

void qpsim_state_free(qpsim_state* s) { delete s; }

qpsim_status qpsim_run_exact(const qpsim_circuit* c, const qpsim_state* input,
                             int with_trace, char** out_json) {
    if (!c || !input || !out_json)
        return fail(QPSIM_ERR_INVALID, "NULL argument");
    return guarded([&] {
        const RunResult result =
            run_exact(c->circuit, input->state, with_trace != 0);
        *out_json = dup_string(emit_results(result));
        return QPSIM_OK;
    });
}

qpsim_status qpsim_run_tomo(const qpsim_circuit* c, const qpsim_state* input,
                            const char* subspace, int64_t shots,
                            uint64_t seed, char** out_json) {
    if (!c || !input || !subspace || !out_json)
        return fail(QPSIM_ERR_INVALID, "NULL argument");
    if (shots < 0) return fail(QPSIM_ERR_INVALID, "shots must be >= 0");
    return guarded([&] {
        const LogicalSubspace sub = LogicalSubspace::from_label(subspace);
        const int m_max = c->circuit.m_max;
        CountRecord record;
        if (shots == 0) {
            const RunResult run = run_exact(c->circuit, input->state);
            if (run.null_state)
                throw EmptySubspaceError(
                    "circuit output is the null state; nothing to measure");
            auto [rho, weight] = reduce_to_qubit(run.final_state, sub);
            record = exact_record(rho, sub);
        } else {
            record = run_shots(c->circuit, input->state,
                               ProjectorSet::standard(sub).analyzers(m_max),
                               shots, seed);
            record.subspace = sub.label();
        }
        const DensityMatrix2 linear = reconstruct_linear(record);
        const DensityMatrix2 mle = reconstruct_mle(record);
        *out_json = dup_string(emit_tomography(record, linear, mle));
        return QPSIM_OK;
    });
}

qpsim_status qpsim_run_table(const char* setup_id, int64_t shots,
                             uint64_t seed, const char* noise_json,
                             char** out_json) {
    if (!setup_id || !out_json) return fail(QPSIM_ERR_INVALID, "NULL argument");
    if (shots < 0) return fail(QPSIM_ERR_INVALID, "shots must be >= 0");
    return guarded([&] {
        const FidelityTable table =
            run_table(setup_from_label(setup_id), shots, seed,
                      noise_from_json(noise_json));
        *out_json = dup_string(emit_results(table));
        return QPSIM_OK;
    });
}

qpsim_status qpsim_detector_efficiency(int64_t shots, uint64_t seed,
                                       double analyzer_efficiency,
                                       char** out_json) {
    if (!out_json) return fail(QPSIM_ERR_INVALID, "NULL argument");
    if (shots < 0) return fail(QPSIM_ERR_INVALID, "shots must be >= 0");
    return guarded([&] {
        std::optional<double> eff;
        if (analyzer_efficiency > 0.0) eff = analyzer_efficiency;
        const double value = oam_sign_detector_efficiency(shots, seed, eff);
        nlohmann::json j;
        j["format_version"] = kFormatVersion;
        j["type"] = "detector_efficiency";
        j["efficiency"] = value;
        j["shots"] = shots;
        j["seed"] = seed;
        if (eff) j["analyzer_efficiency"] = *eff;
        *out_json = dup_string(j.dump(2) + "\n");
        return QPSIM_OK;
    });
}

}  // extern "C"
