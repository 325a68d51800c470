// circuitio.hpp
// The stable external contract: the line-oriented circuit description
// format, the input-state mini-syntax, and versioned JSON result emission.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qpsim/circuit.hpp"
#include "qpsim/experiments.hpp"

namespace qpsim {

inline constexpr const char* kFormatVersion = "1";

// One parsed statement: element name, optional positional mode token
// (hologram gen|ana), and named parameters with angle values already
// normalized to radians.
struct Statement {
    std::string element;
    std::string mode;
    std::map<std::string, double> nums;
    std::map<std::string, std::string> strs;
    int line = 0;

    bool operator==(const Statement& o) const {
        return element == o.element && mode == o.mode && nums == o.nums &&
               strs == o.strs;
    }
};

struct MzBlock {
    std::map<std::string, double> nums;  // reflections_a/b, phase_a/b
    std::vector<Statement> arm_a;
    std::vector<Statement> arm_b;
    int line = 0;

    bool operator==(const MzBlock& o) const {
        return nums == o.nums && arm_a == o.arm_a && arm_b == o.arm_b;
    }
};

using DocNode = std::variant<Statement, MzBlock>;

struct CircuitDoc {
    std::string name;
    int m_max = kDefaultMmax;
    std::optional<std::uint64_t> seed;
    std::vector<DocNode> nodes;

    bool operator==(const CircuitDoc& o) const {
        return name == o.name && m_max == o.m_max && seed == o.seed &&
               nodes == o.nodes;
    }
};

// Grammar: one statement per line, `#` comments, optional leading header
// `circuit name=<id> [m_max=<n>] [seed=<n>]`, interferometer sections
// delimited by `begin_mz` / `arm_a:` / `arm_b:` / `end_mz`. Angle values
// accept `deg` / `rad` suffixes and the literal `pi`. Throws ParseError
// carrying line and column.
CircuitDoc parse_circuit(const std::string& text);

// Canonical form; parse(unparse(doc)) == doc.
std::string unparse_circuit(const CircuitDoc& doc);

Circuit build_circuit(const CircuitDoc& doc);

// Input-state mini-syntax: `pol:H`, `oam2:h`, `pol:0.6,0.8i`,
// `oam4:0.707,-0.707` (two complex amplitudes, comma separated).
PhotonState parse_state_spec(const std::string& spec,
                             int m_max = kDefaultMmax);

// Noise config file: JSON object {"qplate_delta": <rad>,
// "hologram_efficiency": <0..1>}; both keys optional.
NoiseConfig parse_noise_config(const std::string& json_text);

// --- result emission (versioned JSON schema) ------------------------------

std::string emit_results(const RunResult& result);
std::string emit_results(const DensityMatrix2& rho);
std::string emit_results(const FidelityTable& table);
// Full tomography report: counts plus both reconstructions.
std::string emit_tomography(const CountRecord& record,
                            const DensityMatrix2& linear,
                            const DensityMatrix2& mle);

// Round-trip support for emitted density matrices.
DensityMatrix2 parse_density_matrix(const std::string& json_text);

}  // namespace qpsim
