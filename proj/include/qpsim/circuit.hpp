// circuit.hpp
// Ordered element sequences, Mach-Zehnder dual-rail blocks, exact-amplitude
// execution with postselection probability tracking, and shot sampling.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qpsim/elements.hpp"

namespace qpsim {

// Dual-rail Mach-Zehnder section: entry PBS (H -> arm A, V -> arm B), one
// element sub-sequence per arm, exit PBS recombination. `reflections_*`
// declare the number of OAM-flipping mirror bounces in each arm (prisms and
// in-arm elements excluded); `phase_*` is the locked piston phase of the arm.
struct InterferometerBlock {
    std::vector<Element> arm_a;
    std::vector<Element> arm_b;
    int reflections_a = 0;
    int reflections_b = 0;
    double phase_a = 0.0;
    double phase_b = 0.0;
};

using Stage = std::variant<Element, InterferometerBlock>;

struct Circuit {
    std::string label;
    std::vector<Stage> stages;
    int m_max = kDefaultMmax;

    Circuit& add(Element e);
    Circuit& add(InterferometerBlock b);
};

struct StageTraceEntry {
    std::string stage;
    double norm2;
};

struct RunResult {
    PhotonState final_state;      // normalized (zero state when null_state)
    double success_probability;   // cumulative surviving norm2
    bool null_state = false;      // true when everything was filtered out
    // Product of sin^2(delta/2) over the q-plates traversed.
    double conversion_efficiency = 1.0;
    std::vector<StageTraceEntry> stage_trace;
};

// Applies all stages in order. `input` must be normalized and live entirely
// in path=single.
RunResult run_exact(const Circuit& circuit, const PhotonState& input,
                    bool with_trace = false);

enum class TransferDirection { PolToOam, OamToPol };

// q-plate + Mach-Zehnder transferrer with unit success probability.
// PolToOam maps (aH + bV)|0> to |H>(a|+2> + b|-2>); OamToPol is the
// stage-reversed, element-adjoint circuit.
Circuit deterministic_transferrer(TransferDirection direction,
                                  int m_max = kDefaultMmax);

// Per-analyzer shot counts. Each analyzer is a separate physical run of
// `shots` photons; the expected count is shots * q_i * circuit_success.
struct CountRecord {
    struct Entry {
        std::int64_t counts = 0;
        std::int64_t shots = 0;
    };
    std::string subspace;  // "pol", "oam2", "oam4" (or empty)
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, Entry>> entries;  // ordered

    const Entry* find(const std::string& label) const;
};

struct Analyzer {
    std::string label;
    Element element;
};

CountRecord run_shots(const Circuit& circuit, const PhotonState& input,
                      const std::vector<Analyzer>& analyzers,
                      std::int64_t shots, std::uint64_t seed);

// Exact per-analyzer detection probabilities q_i * circuit_success.
std::vector<std::pair<std::string, double>> exact_probabilities(
    const Circuit& circuit, const PhotonState& input,
    const std::vector<Analyzer>& analyzers);

}  // namespace qpsim
