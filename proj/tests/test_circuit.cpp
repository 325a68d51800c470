#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "qpsim/circuit.hpp"
#include "qpsim/tomography.hpp"
#include "test_util.hpp"

using namespace qpsim;
using qpsim::test::product_state;
using qpsim::test::random_qubit;

namespace {
constexpr double kTol = 1e-10;
constexpr double kPi = std::numbers::pi;

Circuit forward_probabilistic() {
    Circuit c;
    c.label = "fwd";
    c.add(qwp(0.0)).add(qwp(kPi / 4.0)).add(qplate(1.0, kPi)).add(
        polarizer(pol::H()));
    return c;
}
}  // namespace

TEST_CASE("probabilistic pol->oam transfer: state and p=1/2") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        const Qubit q = random_qubit(rng);
        const RunResult r = run_exact(forward_probabilistic(),
                                      make_source_state(q));
        CHECK(r.success_probability == doctest::Approx(0.5).epsilon(kTol));
        CHECK_FALSE(r.null_state);
        CHECK(overlap2(r.final_state, product_state(pol::H(), q, 2)) ==
              doctest::Approx(1.0).epsilon(kTol));
    }
}

TEST_CASE("probabilistic oam->pol transfer: p=1/2 and inverse mapping") {
    Circuit c;
    c.label = "rev";
    c.add(qplate(1.0, kPi))
        .add(qwp(3.0 * kPi / 4.0))
        .add(qwp(kPi / 2.0))
        .add(smf());
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        const Qubit q = random_qubit(rng);
        const RunResult r =
            run_exact(c, make_oam_source_state(q, 2).normalized());
        CHECK(r.success_probability == doctest::Approx(0.5).epsilon(kTol));
        const auto [rho, w] = reduce_to_qubit(r.final_state,
                                              LogicalSubspace::polarization());
        CHECK(w == doctest::Approx(1.0).epsilon(kTol));
        CHECK(fidelity(rho, q) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("empty circuit is the identity with p=1") {
    std::mt19937_64 rng(11);
    const PhotonState s = make_source_state(random_qubit(rng));
    const RunResult r = run_exact(Circuit{}, s);
    CHECK(r.success_probability == doctest::Approx(1.0).epsilon(kTol));
    CHECK(overlap2(r.final_state, s) == doctest::Approx(1.0).epsilon(kTol));
}

TEST_CASE("orthogonal polarizer yields the null state") {
    Circuit c;
    c.add(polarizer(pol::V()));
    const RunResult r = run_exact(c, make_source_state(pol::H()));
    CHECK(r.null_state);
    CHECK(r.success_probability < 1e-12);
}

TEST_CASE("run_exact rejects unnormalized input") {
    PhotonState s(kDefaultMmax);
    s.set_amp(Path::Single, Pol::H, 0, 0.5);
    CHECK_THROWS_AS(run_exact(Circuit{}, s), PreconditionError);
}

TEST_CASE("deterministic transferrer") {
    const Circuit fwd = deterministic_transferrer(TransferDirection::PolToOam);
    const Circuit rev = deterministic_transferrer(TransferDirection::OamToPol);
    std::mt19937_64 rng(23);

    SUBCASE("forward: p=1 and |H>(a|+2>+b|-2>) on 50 random qubits") {
        for (int i = 0; i < 50; ++i) {
            const Qubit q = random_qubit(rng);
            const RunResult r = run_exact(fwd, make_source_state(q));
            CHECK(r.success_probability == doctest::Approx(1.0).epsilon(kTol));
            CHECK(overlap2(r.final_state, product_state(pol::H(), q, 2)) ==
                  doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("reverse: p=1 and polarization recovery on 50 random qubits") {
        for (int i = 0; i < 50; ++i) {
            const Qubit q = random_qubit(rng);
            const PhotonState in = product_state(pol::H(), q, 2).normalized();
            const RunResult r = run_exact(rev, in);
            CHECK(r.success_probability == doctest::Approx(1.0).epsilon(kTol));
            const auto [rho, w] = reduce_to_qubit(
                r.final_state, LogicalSubspace::polarization());
            CHECK(w == doctest::Approx(1.0).epsilon(kTol));
            CHECK(fidelity(rho, q) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("roundtrip forward-then-reverse is the identity") {
        for (int i = 0; i < 50; ++i) {
            const Qubit q = random_qubit(rng);
            const RunResult mid = run_exact(fwd, make_source_state(q));
            const RunResult back = run_exact(rev, mid.final_state);
            CHECK(back.success_probability ==
                  doctest::Approx(1.0).epsilon(kTol));
            CHECK(overlap2(back.final_state, make_source_state(q)) ==
                  doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("interferometer block routes H and V through separate arms") {
    // A half-wave plate in arm B only acts on the V component.
    InterferometerBlock mz;
    mz.arm_b.push_back(hwp(0.0));  // V -> -V
    Circuit c;
    c.add(mz);
    const Qubit in = pol::A();
    const RunResult r = run_exact(c, make_source_state(in));
    CHECK(r.success_probability == doctest::Approx(1.0).epsilon(kTol));
    CHECK(overlap2(r.final_state, make_source_state(pol::D())) ==
          doctest::Approx(1.0).epsilon(kTol));
}

TEST_CASE("arm phases act as relative phases between H and V") {
    InterferometerBlock mz;
    mz.phase_b = kPi / 2.0;
    Circuit c;
    c.add(mz);
    const RunResult r = run_exact(c, make_source_state(pol::A()));
    CHECK(overlap2(r.final_state, make_source_state(pol::L())) ==
          doctest::Approx(1.0).epsilon(kTol));
}

TEST_CASE("odd mirror count in one arm flips that arm's OAM sign") {
    InterferometerBlock mz;
    mz.reflections_a = 1;
    Circuit c;
    c.add(mz);
    PhotonState in = product_state(pol::A(), oam::l(), 2).normalized();
    const RunResult r = run_exact(c, in);
    // H component flipped +2 -> -2, V untouched.
    CHECK(std::abs(r.final_state.amp(Path::Single, Pol::H, -2)) ==
          doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(kTol));
    CHECK(std::abs(r.final_state.amp(Path::Single, Pol::V, 2)) ==
          doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(kTol));
}

TEST_CASE("success probability never increases along a run") {
    std::mt19937_64 rng(37);
    Circuit c;
    c.add(qwp(0.3)).add(polarizer(pol::A())).add(qplate(1.0, kPi)).add(smf());
    for (int i = 0; i < 100; ++i) {
        const RunResult r =
            run_exact(c, make_source_state(random_qubit(rng)), true);
        double prev = 1.0 + kTol;
        for (const auto& t : r.stage_trace) {
            CHECK(t.norm2 <= prev + kTol);
            prev = t.norm2;
        }
        CHECK(r.success_probability <= 1.0 + kTol);
    }
}

TEST_CASE("run_exact is linear up to the shared normalization") {
    // Global phase on the input produces the same density matrix.
    std::mt19937_64 rng(39);
    const Qubit q = random_qubit(rng);
    const Circuit c = forward_probabilistic();
    const RunResult a = run_exact(c, make_source_state(q));
    const RunResult b = run_exact(
        c, make_source_state(Qubit(q * std::polar(1.0, 0.77))));
    CHECK(a.success_probability ==
          doctest::Approx(b.success_probability).epsilon(kTol));
    CHECK(overlap2(a.final_state, b.final_state) ==
          doctest::Approx(1.0).epsilon(kTol));
}

TEST_CASE("conversion efficiency multiplies over q-plates") {
    const double d1 = 2.0 * std::asin(std::sqrt(0.9));
    Circuit c;
    c.add(qplate(1.0, d1)).add(hwp(0.0)).add(qplate(1.0, d1)).add(smf());
    const RunResult r = run_exact(c, make_source_state(pol::L()));
    CHECK(r.conversion_efficiency == doctest::Approx(0.81).epsilon(1e-9));
}

TEST_CASE("exact analyzer probabilities for |l> in the six-state basis") {
    const auto analyzers =
        ProjectorSet::standard(LogicalSubspace::oam(2)).analyzers(kDefaultMmax);
    Circuit empty;
    const PhotonState in = make_oam_source_state(oam::l(), 2);
    const auto probs = exact_probabilities(empty, in, analyzers);
    REQUIRE(probs.size() == 6);
    const double expect[6] = {1.0, 0.0, 0.5, 0.5, 0.5, 0.5};
    for (int i = 0; i < 6; ++i)
        CHECK(probs[i].second == doctest::Approx(expect[i]).epsilon(kTol));
}

TEST_CASE("run_shots is deterministic in the seed and near expectation") {
    const auto analyzers = ProjectorSet::standard(LogicalSubspace::polarization())
                               .analyzers(kDefaultMmax);
    const PhotonState in = make_source_state(pol::A());
    Circuit empty;
    const std::int64_t shots = 200000;
    const CountRecord r1 = run_shots(empty, in, analyzers, shots, 99);
    const CountRecord r2 = run_shots(empty, in, analyzers, shots, 99);
    const CountRecord r3 = run_shots(empty, in, analyzers, shots, 100);
    REQUIRE(r1.entries.size() == 6);
    bool any_diff = false;
    for (size_t i = 0; i < r1.entries.size(); ++i) {
        CHECK(r1.entries[i].second.counts == r2.entries[i].second.counts);
        CHECK(r1.entries[i].second.shots == shots);
        any_diff |= r1.entries[i].second.counts != r3.entries[i].second.counts;
    }
    CHECK(any_diff);

    // Binomial expectation: |A> gives q = (.5,.5,1,0,.5,.5); 5 sigma bands.
    const double expect[6] = {0.5, 0.5, 1.0, 0.0, 0.5, 0.5};
    for (int i = 0; i < 6; ++i) {
        const double mean = expect[i] * shots;
        const double sigma =
            std::sqrt(shots * std::max(expect[i] * (1 - expect[i]), 1e-12));
        CHECK(std::abs(r1.entries[i].second.counts - mean) <=
              5.0 * sigma + 1.0);
    }
}
