// qpsim command-line frontend. Talks to the library exclusively through the
// C API in qpsim.h.
//
// Exit codes mirror qpsim_status: 0 ok, 1 io, 2 parse, 3 physics,
// 4 invalid usage, 5 internal, 6 truncation.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qpsim.h"

namespace {

int report(qpsim_status st) {
    if (st != QPSIM_OK) std::cerr << "qpsim: " << qpsim_last_error() << "\n";
    return static_cast<int>(st);
}

struct StringOut {
    char* s = nullptr;
    ~StringOut() { qpsim_string_free(s); }
};

struct CircuitHandle {
    qpsim_circuit* c = nullptr;
    ~CircuitHandle() { qpsim_circuit_free(c); }
};

struct StateHandle {
    qpsim_state* s = nullptr;
    ~StateHandle() { qpsim_state_free(s); }
};

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

int write_output(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(output_path);
    if (!out) {
        std::cerr << "qpsim: cannot write to '" << output_path << "'\n";
        return static_cast<int>(QPSIM_ERR_IO);
    }
    out << text;
    return 0;
}

// Common flag bundle shared by the subcommands.
struct CommonOpts {
    std::string circuit_file;
    std::string input_spec;
    std::string noise_file;
    std::string output_file;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    bool exact = false;
};

int load_noise(const CommonOpts& opts, std::string& noise_json) {
    if (opts.noise_file.empty()) return 0;
    if (!read_file(opts.noise_file, noise_json)) {
        std::cerr << "qpsim: cannot open noise file '" << opts.noise_file
                  << "'\n";
        return static_cast<int>(QPSIM_ERR_IO);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-photon polarization/OAM transferrer simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", qpsim_version());

    CommonOpts opts;
    bool with_trace = false;
    std::string subspace = "oam2";
    std::string setup;
    double analyzer_eff = 0.0;

    auto add_shots_flags = [&](CLI::App* cmd) {
        auto* shots_opt =
            cmd->add_option("--shots", opts.shots, "number of photons per analyzer");
        auto* exact_flag =
            cmd->add_flag("--exact", opts.exact, "exact amplitudes, no sampling");
        shots_opt->excludes(exact_flag);
        exact_flag->excludes(shots_opt);
        cmd->add_option("--seed", opts.seed, "RNG seed");
    };
    auto add_output_flag = [&](CLI::App* cmd) {
        cmd->add_option("--output", opts.output_file,
                        "write the result here instead of stdout");
    };

    auto* run = app.add_subcommand("run", "run a circuit on an input state");
    run->add_option("--circuit", opts.circuit_file, "circuit file")->required();
    run->add_option("--input", opts.input_spec,
                    "input state, e.g. pol:H or oam2:h")
        ->required();
    run->add_flag("--trace", with_trace, "include the per-stage norm trace");
    add_shots_flags(run);
    add_output_flag(run);

    auto* tomo = app.add_subcommand(
        "tomo", "tomography of a circuit output in a logical subspace");
    tomo->add_option("--circuit", opts.circuit_file, "circuit file")->required();
    tomo->add_option("--input", opts.input_spec, "input state")->required();
    tomo->add_option("--subspace", subspace, "pol, oam2 or oam4");
    add_shots_flags(tomo);
    add_output_flag(tomo);

    auto* table = app.add_subcommand(
        "table", "six-row cardinal-state fidelity table for a setup");
    table->add_option("--setup", setup, "a, b, c, d, det-fwd or det-rev")
        ->required();
    table->add_option("--noise", opts.noise_file, "noise config JSON file");
    add_shots_flags(table);
    add_output_flag(table);

    auto* validate = app.add_subcommand(
        "validate", "parse a circuit file and print its canonical form");
    validate->add_option("--circuit", opts.circuit_file, "circuit file")
        ->required();
    add_output_flag(validate);

    auto* det = app.add_subcommand("detector-eff",
                                   "OAM sign detector efficiency (setup b)");
    det->add_option("--analyzer-efficiency", analyzer_eff,
                    "compare against a fork hologram of this intensity "
                    "efficiency");
    add_shots_flags(det);
    add_output_flag(det);

    CLI11_PARSE(app, argc, argv);

    // --exact is the shots==0 mode everywhere.
    const std::int64_t shots = opts.exact ? 0 : opts.shots;
    if (!opts.exact && opts.shots == 0 &&
        (run->parsed() || tomo->parsed() || table->parsed() || det->parsed())) {
        std::cerr << "qpsim: pass either --exact or --shots N\n";
        return static_cast<int>(QPSIM_ERR_INVALID);
    }

    if (validate->parsed()) {
        CircuitHandle c;
        if (auto st = qpsim_circuit_parse_file(opts.circuit_file.c_str(), &c.c);
            st != QPSIM_OK)
            return report(st);
        StringOut canonical;
        if (auto st = qpsim_circuit_canonical(c.c, &canonical.s);
            st != QPSIM_OK)
            return report(st);
        return write_output(canonical.s, opts.output_file);
    }

    if (run->parsed() || tomo->parsed()) {
        CircuitHandle c;
        if (auto st = qpsim_circuit_parse_file(opts.circuit_file.c_str(), &c.c);
            st != QPSIM_OK)
            return report(st);
        StateHandle input;
        if (auto st = qpsim_state_parse(opts.input_spec.c_str(), 0, &input.s);
            st != QPSIM_OK)
            return report(st);

        StringOut json;
        qpsim_status st;
        if (run->parsed()) {
            if (shots != 0) {
                std::cerr << "qpsim: run supports --exact only; use tomo for "
                             "sampled statistics\n";
                return static_cast<int>(QPSIM_ERR_INVALID);
            }
            st = qpsim_run_exact(c.c, input.s, with_trace ? 1 : 0, &json.s);
        } else {
            st = qpsim_run_tomo(c.c, input.s, subspace.c_str(), shots,
                                opts.seed, &json.s);
        }
        if (st != QPSIM_OK) return report(st);
        return write_output(json.s, opts.output_file);
    }

    if (table->parsed()) {
        std::string noise_json;
        if (int rc = load_noise(opts, noise_json); rc != 0) return rc;
        StringOut json;
        if (auto st = qpsim_run_table(setup.c_str(), shots, opts.seed,
                                      noise_json.empty() ? nullptr
                                                         : noise_json.c_str(),
                                      &json.s);
            st != QPSIM_OK)
            return report(st);
        return write_output(json.s, opts.output_file);
    }

    if (det->parsed()) {
        StringOut json;
        if (auto st = qpsim_detector_efficiency(shots, opts.seed, analyzer_eff,
                                                &json.s);
            st != QPSIM_OK)
            return report(st);
        return write_output(json.s, opts.output_file);
    }

    return static_cast<int>(QPSIM_ERR_INVALID);
}
