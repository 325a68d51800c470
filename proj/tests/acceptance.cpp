// Acceptance checks for the simulator. Each criterion prints exactly one
// PASS/FAIL line; the exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qpsim/circuitio.hpp"
#include "qpsim/experiments.hpp"
#include "qpsim/tomography.hpp"
#include "test_util.hpp"

#ifndef QPSIM_CIRCUITS_DIR
#define QPSIM_CIRCUITS_DIR "circuits"
#endif
#ifndef QPSIM_TEST_DATA_DIR
#define QPSIM_TEST_DATA_DIR "tests/data"
#endif

using namespace qpsim;
using qpsim::test::product_state;
using qpsim::test::random_qubit;

namespace {

constexpr double kPi = std::numbers::pi;
int g_failures = 0;

void report(int criterion, const char* what, bool ok, const std::string& note) {
    std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion,
                what, note.empty() ? "" : " -- ", note.c_str());
    if (!ok) ++g_failures;
}

bool exact_table_ok(SetupId id, double expect_p, std::string& note) {
    const FidelityTable t = run_table(id, 0, 0);
    if (t.rows.size() != 6) {
        note = "expected 6 rows";
        return false;
    }
    double worst = 1.0;
    for (const auto& row : t.rows) worst = std::min(worst, row.fidelity);
    std::ostringstream ss;
    ss << "min F=" << worst << ", p=" << t.success_probability;
    note = ss.str();
    return std::abs(worst - 1.0) < 1e-9 &&
           std::abs(t.success_probability - expect_p) < 1e-10;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- criteria -------------------------------------------------------------

void criterion1() {
    std::string note;
    bool ok = false;
    try {
        ok = exact_table_ok(SetupId::A, 0.5, note);
    } catch (const std::exception& e) {
        note = e.what();
    }
    report(1, "probabilistic polarization-to-OAM transfer (setup a)", ok, note);
}

void criterion2() {
    std::string note;
    bool ok = false;
    try {
        ok = exact_table_ok(SetupId::B, 0.5, note);
    } catch (const std::exception& e) {
        note = e.what();
    }
    report(2, "probabilistic OAM-to-polarization transfer (setup b)", ok, note);
}

void criterion3() {
    std::string note;
    bool ok = false;
    try {
        ok = exact_table_ok(SetupId::C, 0.25, note);
        NoiseConfig noise;
        noise.qplate_delta = 2.0 * std::asin(std::sqrt(0.894));
        const FidelityTable t = run_table(SetupId::C, 0, 0, noise);
        std::ostringstream ss;
        ss << note << ", detuned conversion=" << t.conversion_efficiency;
        note = ss.str();
        ok = ok && std::abs(t.conversion_efficiency - 0.80) < 0.01;
    } catch (const std::exception& e) {
        note = e.what();
        ok = false;
    }
    report(3, "polarization round trip through OAM (setup c)", ok, note);
}

void criterion4() {
    std::string note;
    bool ok = false;
    try {
        ok = exact_table_ok(SetupId::D, 0.5, note);
        const std::vector<std::pair<std::string, std::string>> want = {
            {"H", "l"}, {"V", "r"}, {"L", "a"},
            {"R", "d"}, {"A", "h"}, {"D", "v"}};
        ok = ok && setup_state_map(SetupId::D) == want &&
             setup_output_subspace(SetupId::D).order == 4;
    } catch (const std::exception& e) {
        note = e.what();
        ok = false;
    }
    report(4, "fourth-order OAM transfer (setup d)", ok, note);
}

void criterion5() {
    std::string note;
    bool ok = true;
    try {
        const Circuit fwd =
            deterministic_transferrer(TransferDirection::PolToOam);
        const Circuit rev =
            deterministic_transferrer(TransferDirection::OamToPol);
        std::mt19937_64 rng(17);
        double worst_f = 1.0, worst_p = 1.0;
        for (int i = 0; i < 100; ++i) {
            const Qubit q = random_qubit(rng);
            const RunResult a = run_exact(fwd, make_source_state(q));
            worst_p = std::min(worst_p, a.success_probability);
            worst_f = std::min(
                worst_f, overlap2(a.final_state, product_state(pol::H(), q, 2)));
            const RunResult b = run_exact(rev, a.final_state);
            worst_p = std::min(worst_p, b.success_probability);
            worst_f = std::min(
                worst_f, overlap2(b.final_state, make_source_state(q)));
        }
        ok = std::abs(worst_p - 1.0) < 1e-10 && std::abs(worst_f - 1.0) < 1e-9;
        // Rotated Dove prism pair acts as sigma_z on {|+2>, |-2>}.
        PhotonState p2(kDefaultMmax), m2(kDefaultMmax);
        p2.set_amp(Path::Single, Pol::H, 2, 1.0);
        m2.set_amp(Path::Single, Pol::H, -2, 1.0);
        auto pair = [&](PhotonState s) {
            dove_prism(kPi / 8.0).apply(s);
            dove_prism(0.0).apply(s);
            return s;
        };
        const Complex up = pair(p2).amp(Path::Single, Pol::H, 2);
        const Complex dn = pair(m2).amp(Path::Single, Pol::H, -2);
        ok = ok && std::abs(up + dn) < 1e-10 &&
             std::abs(std::abs(up) - 1.0) < 1e-10;
        std::ostringstream ss;
        ss << "min p=" << worst_p << ", min F=" << worst_f;
        note = ss.str();
    } catch (const std::exception& e) {
        note = e.what();
        ok = false;
    }
    report(5, "deterministic interferometric transferrer, both directions", ok,
           note);
}

void criterion6() {
    std::string note;
    bool ok = true;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        // Linear inversion must invert exact records.
        std::mt19937_64 rng(23);
        double worst = 0.0;
        const LogicalSubspace subs[] = {LogicalSubspace::polarization(),
                                        LogicalSubspace::oam(2),
                                        LogicalSubspace::oam(4)};
        for (const auto& sub : subs)
            for (const auto& [lab, psi] : ProjectorSet::standard(sub).states) {
                const DensityMatrix2 in = DensityMatrix2::pure(psi);
                const DensityMatrix2 out =
                    reconstruct_linear(exact_record(in, sub));
                worst = std::max(worst,
                                 (out.mat - in.mat).cwiseAbs().maxCoeff());
            }
        for (int i = 0; i < 100; ++i) {
            std::normal_distribution<double> n;
            Eigen::Matrix2cd g;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) g(r, c) = Complex(n(rng), n(rng));
            DensityMatrix2 in;
            in.mat = g * g.adjoint();
            in.mat /= in.mat.trace();
            const auto& sub = subs[i % 3];
            const DensityMatrix2 lin =
                reconstruct_linear(exact_record(in, sub));
            worst =
                std::max(worst, (lin.mat - in.mat).cwiseAbs().maxCoeff());
            const DensityMatrix2 mle = reconstruct_mle(exact_record(in, sub));
            ok = ok && (mle.mat - lin.mat).cwiseAbs().maxCoeff() < 1e-6;
        }
        ok = ok && worst < 1e-9;

        // Median fidelity over 50 independently seeded sampled runs.
        std::vector<double> fids;
        const Qubit target = oam::a();
        const auto analyzers =
            ProjectorSet::standard(LogicalSubspace::oam(2)).analyzers();
        Circuit empty;
        const PhotonState in_state = make_oam_source_state(target, 2);
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const CountRecord rec =
                run_shots(empty, in_state, analyzers, 10000, seed);
            fids.push_back(fidelity(reconstruct_mle(rec), target));
        }
        std::sort(fids.begin(), fids.end());
        const double median = fids[fids.size() / 2];
        ok = ok && median >= 0.995;
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        ok = ok && secs < 30.0;
        std::ostringstream ss;
        ss << "max linear err=" << worst << ", median sampled F=" << median
           << ", " << secs << "s";
        note = ss.str();
    } catch (const std::exception& e) {
        note = e.what();
        ok = false;
    }
    report(6, "tomography pipeline: linear inversion, MLE, sampled fidelity",
           ok, note);
}

void criterion7() {
    std::string note;
    bool ok = true;
    try {
        std::mt19937_64 rng(29);
        // Unitary stages preserve norm; filters never increase it (100 each).
        const Element unitaries[] = {qplate(1.0, 1.1), hwp(0.3), qwp(0.9),
                                     dove_prism(0.4), mirror()};
        const Element filters[] = {polarizer(pol::L()), smf(),
                                   hologram_analyze(oam::v(), 2),
                                   pbs_filter(PbsPort::TransmitH)};
        for (int i = 0; i < 100 && ok; ++i) {
            PhotonState s(kDefaultMmax);
            std::normal_distribution<double> n;
            for (int p = 0; p < 2; ++p)
                for (int m = -4; m <= 4; ++m)
                    s.set_amp(Path::Single, static_cast<Pol>(p), m,
                              Complex(n(rng), n(rng)));
            s.vec() /= std::sqrt(s.norm2());
            for (const Element& u : unitaries) {
                PhotonState t = s;
                u.apply(t);
                ok = ok && std::abs(t.norm2() - 1.0) < 1e-10;
            }
            for (const Element& f : filters) {
                PhotonState t = s;
                f.apply(t);
                ok = ok && t.norm2() <= 1.0 + 1e-10;
            }
        }
        if (!ok) note = "norm invariant violated";

        // Seed determinism of sampling (100 paired draws).
        const auto analyzers =
            ProjectorSet::standard(LogicalSubspace::polarization()).analyzers();
        Circuit empty;
        for (int i = 0; i < 100 && ok; ++i) {
            const Qubit q = random_qubit(rng);
            const std::uint64_t seed = rng();
            const CountRecord a =
                run_shots(empty, make_source_state(q), analyzers, 1000, seed);
            const CountRecord b =
                run_shots(empty, make_source_state(q), analyzers, 1000, seed);
            for (size_t k = 0; k < a.entries.size(); ++k)
                ok = ok && a.entries[k].second.counts ==
                               b.entries[k].second.counts;
        }
        if (!ok && note.empty()) note = "seed determinism violated";
    } catch (const std::exception& e) {
        note = e.what();
        ok = false;
    }
    report(7, "property invariants over randomized inputs", ok, note);
}

void criterion8() {
    std::string note;
    bool ok = true;
    try {
        namespace fs = std::filesystem;
        // Shipped circuits round trip through the canonical form.
        for (const auto& e :
             fs::directory_iterator(fs::path(QPSIM_CIRCUITS_DIR))) {
            if (e.path().extension() != ".qc") continue;
            const CircuitDoc doc = parse_circuit(slurp(e.path()));
            ok = ok && parse_circuit(unparse_circuit(doc)) == doc;
            build_circuit(doc);
        }
        // Every malformed sample raises a located ParseError (no crash).
        int malformed = 0;
        for (const auto& e : fs::directory_iterator(
                 fs::path(QPSIM_TEST_DATA_DIR) / "malformed")) {
            if (e.path().extension() != ".qc") continue;
            ++malformed;
            bool threw = false;
            try {
                parse_circuit(slurp(e.path()));
            } catch (const ParseError& err) {
                threw = err.line >= 1 && err.column >= 1;
            }
            if (!threw) {
                ok = false;
                note = "no located error for " + e.path().filename().string();
            }
        }
        ok = ok && malformed >= 10;
        if (note.empty()) {
            std::ostringstream ss;
            ss << malformed << " malformed samples rejected with locations";
            note = ss.str();
        }
    } catch (const std::exception& e) {
        note = e.what();
        ok = false;
    }
    report(8, "circuit format: canonical round trip and malformed rejection",
           ok, note);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    return g_failures;
}
