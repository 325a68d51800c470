#include "qpsim/experiments.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qpsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Setup A stages: rotate H/V into L/R, q-plate, postselect on H.
void append_setup_a(Circuit& c, double delta, int m_max) {
    c.add(qwp(0.0, m_max));
    c.add(qwp(kPi / 4.0, m_max));
    c.add(qplate(1.0, delta, m_max));
    c.add(polarizer(pol::H(), m_max));
}

// Setup B stages: q-plate, rotate L/R back to H/V, keep only m=0.
void append_setup_b(Circuit& c, double delta, int m_max) {
    c.add(qplate(1.0, delta, m_max));
    c.add(qwp(3.0 * kPi / 4.0, m_max));
    c.add(qwp(kPi / 2.0, m_max));
    c.add(smf(m_max));
}

Qubit logical_state(const LogicalSubspace& sub, const std::string& label) {
    if (label.size() != 1)
        throw PreconditionError("bad cardinal state label '" + label + "'");
    return sub.kind == LogicalSubspace::Kind::Polarization
               ? pol::from_label(label[0])
               : oam::from_label(label[0]);
}

}  // namespace

SetupId setup_from_label(const std::string& label) {
    if (label == "a") return SetupId::A;
    if (label == "b") return SetupId::B;
    if (label == "c") return SetupId::C;
    if (label == "d") return SetupId::D;
    if (label == "det-fwd") return SetupId::DetFwd;
    if (label == "det-rev") return SetupId::DetRev;
    throw PreconditionError("unknown setup '" + label +
                            "' (expected a, b, c, d, det-fwd, det-rev)");
}

std::string setup_label(SetupId id) {
    switch (id) {
        case SetupId::A: return "a";
        case SetupId::B: return "b";
        case SetupId::C: return "c";
        case SetupId::D: return "d";
        case SetupId::DetFwd: return "det-fwd";
        case SetupId::DetRev: return "det-rev";
    }
    return "?";
}

Circuit build_setup(SetupId id, const std::optional<NoiseConfig>& noise,
                    int m_max) {
    const double delta = noise ? noise->qplate_delta : kPi;
    Circuit c;
    c.m_max = m_max;
    c.label = "setup_" + setup_label(id);
    switch (id) {
        case SetupId::A:
            append_setup_a(c, delta, m_max);
            break;
        case SetupId::B:
            append_setup_b(c, delta, m_max);
            break;
        case SetupId::C:
            append_setup_a(c, delta, m_max);
            append_setup_b(c, delta, m_max);
            break;
        case SetupId::D:
            // Cascade to |m|=4: q-plates alternated with a half-wave plate.
            c.add(qwp(0.0, m_max));
            c.add(qwp(kPi / 4.0, m_max));
            c.add(qplate(1.0, delta, m_max));
            c.add(hwp(0.0, m_max));
            c.add(qplate(1.0, delta, m_max));
            c.add(polarizer(pol::H(), m_max));
            break;
        case SetupId::DetFwd:
            return deterministic_transferrer(TransferDirection::PolToOam,
                                             m_max);
        case SetupId::DetRev:
            return deterministic_transferrer(TransferDirection::OamToPol,
                                             m_max);
    }
    return c;
}

LogicalSubspace setup_input_subspace(SetupId id) {
    switch (id) {
        case SetupId::B:
        case SetupId::DetRev:
            return LogicalSubspace::oam(2);
        default:
            return LogicalSubspace::polarization();
    }
}

LogicalSubspace setup_output_subspace(SetupId id) {
    switch (id) {
        case SetupId::A:
        case SetupId::DetFwd:
            return LogicalSubspace::oam(2);
        case SetupId::D:
            return LogicalSubspace::oam(4);
        default:
            return LogicalSubspace::polarization();
    }
}

std::vector<std::pair<std::string, std::string>> setup_state_map(SetupId id) {
    switch (id) {
        case SetupId::A:
        case SetupId::DetFwd:
            return {{"H", "l"}, {"V", "r"}, {"A", "h"},
                    {"D", "v"}, {"L", "a"}, {"R", "d"}};
        case SetupId::B:
        case SetupId::DetRev:
            return {{"l", "H"}, {"r", "V"}, {"a", "L"},
                    {"d", "R"}, {"h", "A"}, {"v", "D"}};
        case SetupId::C:
            return {{"H", "H"}, {"V", "V"}, {"A", "A"},
                    {"D", "D"}, {"R", "R"}, {"L", "L"}};
        case SetupId::D:
            return {{"H", "l"}, {"V", "r"}, {"L", "a"},
                    {"R", "d"}, {"A", "h"}, {"D", "v"}};
    }
    return {};
}

PhotonState setup_input_state(SetupId id, const std::string& label,
                              int m_max) {
    const LogicalSubspace sub = setup_input_subspace(id);
    const Qubit q = logical_state(sub, label);
    return sub.kind == LogicalSubspace::Kind::Polarization
               ? make_source_state(q, m_max)
               : make_oam_source_state(q, sub.order, m_max);
}

double FidelityTable::average_fidelity() const {
    if (rows.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : rows) sum += r.fidelity;
    return sum / static_cast<double>(rows.size());
}

FidelityTable run_table(SetupId id, std::int64_t shots, std::uint64_t seed,
                        const std::optional<NoiseConfig>& noise, int m_max) {
    if (shots < 0) throw PreconditionError("run_table(): shots must be >= 0");
    const Circuit circuit = build_setup(id, noise, m_max);
    const LogicalSubspace out_sub = setup_output_subspace(id);
    const double analyzer_eff = noise ? noise->hologram_efficiency : 1.0;

    FidelityTable table;
    table.setup = setup_label(id);

    std::mt19937_64 seeder(seed);
    for (const auto& [in_label, out_label] : setup_state_map(id)) {
        const std::uint64_t row_seed = seeder();
        const PhotonState input = setup_input_state(id, in_label, m_max);
        const Qubit expected = logical_state(out_sub, out_label);

        FidelityRow row{in_label, out_label, 0.0, 0.0};
        if (shots == 0) {
            const RunResult run = run_exact(circuit, input);
            table.success_probability = run.success_probability;
            table.conversion_efficiency = run.conversion_efficiency;
            if (run.null_state) {
                row.fidelity = 0.0;
            } else {
                auto [rho, weight] = reduce_to_qubit(run.final_state, out_sub);
                row.fidelity = fidelity(rho, expected);
            }
        } else {
            const auto analyzers = ProjectorSet::standard(out_sub).analyzers(
                m_max, analyzer_eff);
            const CountRecord record =
                run_shots(circuit, input, analyzers, shots, row_seed);
            CountRecord tagged = record;
            tagged.subspace = out_sub.label();
            const DensityMatrix2 rho = reconstruct_mle(tagged);
            row.fidelity = fidelity(rho, expected);
            auto [mean, sd] = bootstrap_fidelity(tagged, expected, 100,
                                                 seeder());
            row.std_dev = sd;
            const RunResult run = run_exact(circuit, input);
            table.success_probability = run.success_probability;
            table.conversion_efficiency = run.conversion_efficiency;
        }
        table.rows.push_back(row);
    }
    return table;
}

double oam_sign_detector_efficiency(std::int64_t shots, std::uint64_t seed,
                                    std::optional<double> analyzer_efficiency,
                                    int m_max) {
    if (shots < 0)
        throw PreconditionError("detector efficiency: shots must be >= 0");

    // Detection probability per input sign.
    auto detection_prob = [&](const Qubit& oam_state) {
        const PhotonState input = make_oam_source_state(oam_state, 2, m_max);
        if (!analyzer_efficiency) {
            const Circuit b = build_setup(SetupId::B);
            return run_exact(b, input).success_probability;
        }
        // Fork-hologram route: the stated efficiency is an intensity
        // fraction, so the element gets its square root as amplitude scale.
        Circuit holo;
        holo.m_max = m_max;
        holo.label = "fork_hologram_detector";
        holo.add(hologram_analyze(oam_state, 2,
                                  std::sqrt(*analyzer_efficiency), false,
                                  m_max));
        holo.add(smf(m_max));
        return run_exact(holo, input).success_probability;
    };

    const double pl = detection_prob(oam::l());
    const double pr = detection_prob(oam::r());
    if (shots == 0) return 0.5 * (pl + pr);

    std::mt19937_64 rng(seed);
    std::binomial_distribution<std::int64_t> dl(shots, pl), dr(shots, pr);
    return static_cast<double>(dl(rng) + dr(rng)) /
           static_cast<double>(2 * shots);
}

}  // namespace qpsim
