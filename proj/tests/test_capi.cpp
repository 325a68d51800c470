#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include <json.hpp>

#include "qpsim.h"

using nlohmann::json;

namespace {
// RAII helpers so failed CHECKs cannot leak handles.
struct CircuitHandle {
    qpsim_circuit* c = nullptr;
    ~CircuitHandle() { qpsim_circuit_free(c); }
};
struct StateHandle {
    qpsim_state* s = nullptr;
    ~StateHandle() { qpsim_state_free(s); }
};
struct JsonOut {
    char* text = nullptr;
    ~JsonOut() { qpsim_string_free(text); }
    json parsed() const {
        REQUIRE(text != nullptr);
        return json::parse(text);
    }
};
}  // namespace

TEST_CASE("version string is present") {
    REQUIRE(qpsim_version() != nullptr);
    CHECK(std::strlen(qpsim_version()) > 0);
}

TEST_CASE("parse + run a minimal circuit") {
    CircuitHandle c;
    REQUIRE(qpsim_circuit_parse("qplate q=1 delta=pi\npolarizer axis=H\n",
                                &c.c) == QPSIM_OK);
    StateHandle s;
    REQUIRE(qpsim_state_parse("pol:L", 6, &s.s) == QPSIM_OK);
    JsonOut out;
    REQUIRE(qpsim_run_exact(c.c, s.s, 1, &out.text) == QPSIM_OK);
    const json j = out.parsed();
    CHECK(j.at("format_version") == "1");
    CHECK(j.at("success_probability").get<double>() ==
          doctest::Approx(0.5).epsilon(1e-10));
    CHECK(j.contains("stage_trace"));
    CHECK(j.at("final_state").is_array());
}

TEST_CASE("setup circuits run through the C surface") {
    CircuitHandle c;
    REQUIRE(qpsim_circuit_setup("det-fwd", nullptr, &c.c) == QPSIM_OK);
    StateHandle s;
    REQUIRE(qpsim_state_parse("pol:A", 6, &s.s) == QPSIM_OK);
    JsonOut out;
    REQUIRE(qpsim_run_exact(c.c, s.s, 0, &out.text) == QPSIM_OK);
    CHECK(out.parsed().at("success_probability").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("canonical text round trips") {
    CircuitHandle c;
    const char* src = "circuit name=t seed=3\nhwp theta=45deg\nsmf\n";
    REQUIRE(qpsim_circuit_parse(src, &c.c) == QPSIM_OK);
    JsonOut text;
    REQUIRE(qpsim_circuit_canonical(c.c, &text.text) == QPSIM_OK);
    CircuitHandle c2;
    REQUIRE(qpsim_circuit_parse(text.text, &c2.c) == QPSIM_OK);
    JsonOut text2;
    REQUIRE(qpsim_circuit_canonical(c2.c, &text2.text) == QPSIM_OK);
    CHECK(std::string(text.text) == text2.text);
}

TEST_CASE("tomography document") {
    CircuitHandle c;
    REQUIRE(qpsim_circuit_parse("", &c.c) == QPSIM_OK);
    StateHandle s;
    REQUIRE(qpsim_state_parse("oam2:l", 6, &s.s) == QPSIM_OK);
    JsonOut out;
    REQUIRE(qpsim_run_tomo(c.c, s.s, "oam2", 0, 0, &out.text) == QPSIM_OK);
    const json j = out.parsed();
    CHECK(j.at("counts").is_array());
    CHECK(j.at("counts").size() == 6);
    const auto& mle = j.at("mle");
    CHECK(mle.at("physical").get<bool>());
    // |l><l| has rho_00 = 1.
    CHECK(mle.at("real")[0][0].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fidelity table document") {
    JsonOut out;
    REQUIRE(qpsim_run_table("c", 0, 0, nullptr, &out.text) == QPSIM_OK);
    const json j = out.parsed();
    CHECK(j.at("setup") == "c");
    CHECK(j.at("rows").size() == 6);
    for (const auto& row : j.at("rows"))
        CHECK(row.at("fidelity").get<double>() ==
              doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j.at("success_probability").get<double>() ==
          doctest::Approx(0.25).epsilon(1e-10));

    JsonOut noisy;
    REQUIRE(qpsim_run_table("c", 0, 0,
                            "{\"qplate_delta\": 2.234}", &noisy.text) ==
            QPSIM_OK);
    CHECK(noisy.parsed().at("conversion_efficiency").get<double>() < 1.0);
}

TEST_CASE("detector efficiency document") {
    JsonOut out;
    REQUIRE(qpsim_detector_efficiency(0, 0, 0.0, &out.text) == QPSIM_OK);
    CHECK(out.parsed().at("efficiency").get<double>() ==
          doctest::Approx(0.5).epsilon(1e-10));
    JsonOut holo;
    REQUIRE(qpsim_detector_efficiency(0, 0, 0.12, &holo.text) == QPSIM_OK);
    CHECK(holo.parsed().at("efficiency").get<double>() ==
          doctest::Approx(0.12).epsilon(1e-9));
}

TEST_CASE("error codes and messages") {
    SUBCASE("parse errors") {
        qpsim_circuit* c = nullptr;
        CHECK(qpsim_circuit_parse("frobnicator x=1\n", &c) == QPSIM_ERR_PARSE);
        CHECK(c == nullptr);
        CHECK(std::strlen(qpsim_last_error()) > 0);
        CHECK(std::string(qpsim_last_error()).find("line") !=
              std::string::npos);
    }
    SUBCASE("missing file") {
        qpsim_circuit* c = nullptr;
        CHECK(qpsim_circuit_parse_file("/nonexistent/q.qc", &c) ==
              QPSIM_ERR_IO);
    }
    SUBCASE("bad state spec") {
        qpsim_state* s = nullptr;
        CHECK(qpsim_state_parse("pol:bogus", 6, &s) == QPSIM_ERR_PARSE);
    }
    SUBCASE("null arguments") {
        CHECK(qpsim_circuit_parse(nullptr, nullptr) == QPSIM_ERR_INVALID);
        CHECK(qpsim_run_table("a", 0, 0, nullptr, nullptr) ==
              QPSIM_ERR_INVALID);
    }
    SUBCASE("unknown setup") {
        qpsim_circuit* c = nullptr;
        CHECK(qpsim_circuit_setup("zz", nullptr, &c) != QPSIM_OK);
    }
    SUBCASE("truncation maps to its own code") {
        CircuitHandle c;
        // A charge-4 plate pushes |L,0> to m=+8, past the m_max=6 bound.
        REQUIRE(qpsim_circuit_parse("qplate q=4 delta=pi\n", &c.c) == QPSIM_OK);
        StateHandle s;
        REQUIRE(qpsim_state_parse("pol:L", 6, &s.s) == QPSIM_OK);
        char* out = nullptr;
        CHECK(qpsim_run_exact(c.c, s.s, 0, &out) == QPSIM_ERR_TRUNCATION);
        CHECK(out == nullptr);
        CHECK(std::strlen(qpsim_last_error()) > 0);
    }
    SUBCASE("empty postselection maps to physics") {
        CircuitHandle c;
        REQUIRE(qpsim_circuit_parse("polarizer axis=H\npolarizer axis=V\n",
                                    &c.c) == QPSIM_OK);
        StateHandle s;
        REQUIRE(qpsim_state_parse("pol:H", 6, &s.s) == QPSIM_OK);
        char* out = nullptr;
        JsonOut res;
        // A fully filtered state is still a valid result (null_state), so
        // run_exact succeeds; tomography on it must fail as physics.
        REQUIRE(qpsim_run_exact(c.c, s.s, 0, &res.text) == QPSIM_OK);
        CHECK(res.parsed().at("null_state").get<bool>());
        CHECK(qpsim_run_tomo(c.c, s.s, "pol", 0, 0, &out) ==
              QPSIM_ERR_PHYSICS);
    }
}
