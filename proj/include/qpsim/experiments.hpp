// experiments.hpp
// Canned constructions of the transferrer setups and table drivers.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpsim/circuit.hpp"
#include "qpsim/tomography.hpp"

namespace qpsim {

enum class SetupId {
    A,       // pol -> oam2, probabilistic
    B,       // oam2 -> pol, probabilistic
    C,       // pol -> oam2 -> pol
    D,       // pol -> oam4 (two q-plates alternated with a half-wave plate)
    DetFwd,  // deterministic pol -> oam2
    DetRev,  // deterministic oam2 -> pol
};

SetupId setup_from_label(const std::string& label);  // "a".."d", "det-fwd/rev"
std::string setup_label(SetupId id);

// Minimal imperfection model: q-plate retardation detuning and hologram
// amplitude efficiency.
struct NoiseConfig {
    double qplate_delta = 3.14159265358979323846;
    double hologram_efficiency = 1.0;
};

Circuit build_setup(SetupId id, const std::optional<NoiseConfig>& noise = {},
                    int m_max = kDefaultMmax);

// The logical subspaces a setup reads its input from / writes its output to.
LogicalSubspace setup_input_subspace(SetupId id);
LogicalSubspace setup_output_subspace(SetupId id);

// The setup's six-row cardinal-state mapping (input label -> output label).
std::vector<std::pair<std::string, std::string>> setup_state_map(SetupId id);

// Builds the cardinal source state named by `label` for the setup's input
// subspace.
PhotonState setup_input_state(SetupId id, const std::string& label,
                              int m_max = kDefaultMmax);

struct FidelityRow {
    std::string input;
    std::string expected;
    double fidelity = 0.0;
    double std_dev = 0.0;
};

struct FidelityTable {
    std::string setup;
    std::vector<FidelityRow> rows;
    double success_probability = 0.0;   // of the last run (identical per row)
    double conversion_efficiency = 1.0;
    double average_fidelity() const;
};

// shots == 0 selects exact mode (no sampling, std = 0). Otherwise each row is
// sampled, reconstructed by MLE and error-barred by bootstrap.
FidelityTable run_table(SetupId id, std::int64_t shots, std::uint64_t seed,
                        const std::optional<NoiseConfig>& noise = {},
                        int m_max = kDefaultMmax);

// Setup B used as an OAM sign detector on |l> and |r>. Returns the fraction
// of input photons yielding a detection event (ideal 0.5). shots == 0 is
// exact mode. `analyzer_efficiency`, when set, swaps the fiber detection for
// a fork-hologram analyzer of that (intensity) efficiency.
double oam_sign_detector_efficiency(std::int64_t shots, std::uint64_t seed,
                                    std::optional<double> analyzer_efficiency = {},
                                    int m_max = kDefaultMmax);

}  // namespace qpsim
