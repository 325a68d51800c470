#include "qpsim/circuit.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace qpsim {

namespace {

const Complex kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

// Moves single-path amplitude into the two arms: H -> arm A, V -> arm B.
void pbs_split_entry(PhotonState& s) {
    if (s.block(Path::ArmA).squaredNorm() > kEmptyTol ||
        s.block(Path::ArmB).squaredNorm() > kEmptyTol)
        throw PreconditionError(
            "interferometer entry: amplitude already present in the arms");
    for (int m = -s.m_max(); m <= s.m_max(); ++m) {
        s.set_amp(Path::ArmA, Pol::H, m, s.amp(Path::Single, Pol::H, m));
        s.set_amp(Path::ArmB, Pol::V, m, s.amp(Path::Single, Pol::V, m));
        s.set_amp(Path::Single, Pol::H, m, 0.0);
        s.set_amp(Path::Single, Pol::V, m, 0.0);
    }
}

// Recombines the arms on one exit face: the H content of arm A and the V
// content of arm B; orthogonal arm content exits the unused port and is
// discarded (a postselection loss).
void pbs_recombine_exit(PhotonState& s) {
    for (int m = -s.m_max(); m <= s.m_max(); ++m) {
        s.set_amp(Path::Single, Pol::H, m, s.amp(Path::ArmA, Pol::H, m));
        s.set_amp(Path::Single, Pol::V, m, s.amp(Path::ArmB, Pol::V, m));
    }
    s.block(Path::ArmA).setZero();
    s.block(Path::ArmB).setZero();
}

void run_arm(PhotonState& s, Path path, const std::vector<Element>& arm,
             int reflections, double phase, int m_max) {
    for (const Element& e : arm) e.apply(s, path);
    if (reflections % 2 != 0) mirror(m_max).apply(s, path);
    if (phase != 0.0) s.block(path) *= std::exp(kI * phase);
}

void apply_block(PhotonState& s, const InterferometerBlock& b, int m_max) {
    pbs_split_entry(s);
    run_arm(s, Path::ArmA, b.arm_a, b.reflections_a, b.phase_a, m_max);
    run_arm(s, Path::ArmB, b.arm_b, b.reflections_b, b.phase_b, m_max);
    pbs_recombine_exit(s);
}

InterferometerBlock adjoint_block(const InterferometerBlock& b) {
    InterferometerBlock out;
    for (auto it = b.arm_a.rbegin(); it != b.arm_a.rend(); ++it)
        out.arm_a.push_back(it->adjoint());
    for (auto it = b.arm_b.rbegin(); it != b.arm_b.rend(); ++it)
        out.arm_b.push_back(it->adjoint());
    out.reflections_a = b.reflections_a;
    out.reflections_b = b.reflections_b;
    out.phase_a = -b.phase_a;
    out.phase_b = -b.phase_b;
    return out;
}

}  // namespace

Circuit& Circuit::add(Element e) {
    stages.emplace_back(std::move(e));
    return *this;
}

Circuit& Circuit::add(InterferometerBlock b) {
    stages.emplace_back(std::move(b));
    return *this;
}

RunResult run_exact(const Circuit& circuit, const PhotonState& input,
                    bool with_trace) {
    if (input.m_max() != circuit.m_max)
        throw PreconditionError("run_exact(): circuit/state m_max mismatch");
    if (std::abs(input.norm2() - 1.0) > kStructuralTol)
        throw PreconditionError("run_exact(): input state is not normalized");

    PhotonState state = input;
    RunResult result{PhotonState(circuit.m_max), 0.0};
    for (const Stage& stage : circuit.stages) {
        std::string label;
        if (const Element* e = std::get_if<Element>(&stage)) {
            e->apply(state);
            result.conversion_efficiency *= e->conversion_fraction();
            label = e->name();
        } else {
            const auto& block = std::get<InterferometerBlock>(stage);
            apply_block(state, block, circuit.m_max);
            for (const Element& e : block.arm_a)
                result.conversion_efficiency *= e.conversion_fraction();
            for (const Element& e : block.arm_b)
                result.conversion_efficiency *= e.conversion_fraction();
            label = "mach_zehnder";
        }
        if (with_trace) result.stage_trace.push_back({label, state.norm2()});
    }

    result.success_probability = std::min(state.norm2(), 1.0);
    if (result.success_probability < kEmptyTol) {
        result.success_probability = std::max(result.success_probability, 0.0);
        result.null_state = true;
        result.final_state = PhotonState(circuit.m_max);
    } else {
        result.final_state = state.normalized();
    }
    return result;
}

Circuit deterministic_transferrer(TransferDirection direction, int m_max) {
    Circuit c;
    c.m_max = m_max;
    c.label = direction == TransferDirection::PolToOam ? "det_pol_to_oam"
                                                       : "det_oam_to_pol";

    // Forward: rotate into the circular basis, q-plate, rotate R/L to A/D,
    // then the Mach-Zehnder whose V arm carries the Dove-prism sigma_z pair.
    // The arm-B piston phase pi/2 cancels the global -i of the prism pair so
    // the two arms recombine onto a pure |A> polarization.
    std::vector<Stage> fwd;
    fwd.emplace_back(qwp(0.0, m_max));
    fwd.emplace_back(qwp(kPi / 4.0, m_max));
    fwd.emplace_back(qplate(1.0, kPi, m_max));
    fwd.emplace_back(qwp(kPi / 2.0, m_max));
    InterferometerBlock mz;
    mz.arm_b.push_back(dove_prism(kPi / 8.0, m_max));
    mz.arm_b.push_back(dove_prism(0.0, m_max));
    mz.phase_b = kPi / 2.0;
    fwd.emplace_back(std::move(mz));
    fwd.emplace_back(hwp(kPi / 8.0, m_max));

    if (direction == TransferDirection::PolToOam) {
        c.stages = std::move(fwd);
    } else {
        // Reverse propagation: stages reversed, each element adjointed.
        for (auto it = fwd.rbegin(); it != fwd.rend(); ++it) {
            if (const Element* e = std::get_if<Element>(&*it))
                c.stages.emplace_back(e->adjoint());
            else
                c.stages.emplace_back(
                    adjoint_block(std::get<InterferometerBlock>(*it)));
        }
    }
    return c;
}

const CountRecord::Entry* CountRecord::find(const std::string& label) const {
    for (const auto& [l, e] : entries)
        if (l == label) return &e;
    return nullptr;
}

std::vector<std::pair<std::string, double>> exact_probabilities(
    const Circuit& circuit, const PhotonState& input,
    const std::vector<Analyzer>& analyzers) {
    if (analyzers.empty())
        throw PreconditionError("analyzer list must not be empty");
    const RunResult run = run_exact(circuit, input);
    std::vector<std::pair<std::string, double>> probs;
    probs.reserve(analyzers.size());
    for (const Analyzer& a : analyzers) {
        double p = 0.0;
        if (!run.null_state) {
            PhotonState s = run.final_state;
            a.element.apply(s);
            p = std::min(s.norm2() * run.success_probability, 1.0);
        }
        probs.emplace_back(a.label, p);
    }
    return probs;
}

CountRecord run_shots(const Circuit& circuit, const PhotonState& input,
                      const std::vector<Analyzer>& analyzers,
                      std::int64_t shots, std::uint64_t seed) {
    if (shots <= 0)
        throw PreconditionError("run_shots(): shots must be positive");
    const auto probs = exact_probabilities(circuit, input, analyzers);

    CountRecord record;
    record.seed = seed;
    std::mt19937_64 rng(seed);
    for (const auto& [label, p] : probs) {
        std::binomial_distribution<std::int64_t> dist(shots, p);
        record.entries.emplace_back(label,
                                    CountRecord::Entry{dist(rng), shots});
    }
    return record;
}

}  // namespace qpsim
