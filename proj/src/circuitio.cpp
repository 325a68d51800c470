#include "qpsim/circuitio.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qpsim {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

struct Token {
    std::string text;
    int column;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        std::size_t start = i;
        while (i < line.size() &&
               !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        out.push_back({line.substr(start, i - start),
                       static_cast<int>(start) + 1});
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

// Angle literal: `pi`, `<x>pi`, `<x>deg`, `<x>rad`, `<x>` (radians).
double parse_angle(const std::string& value, int line, int col) {
    double x = 0.0;
    if (value == "pi") return kPi;
    if (value == "-pi") return -kPi;
    if (value.size() > 2 && value.ends_with("pi")) {
        if (parse_double(value.substr(0, value.size() - 2), x)) return x * kPi;
    } else if (value.size() > 3 && value.ends_with("deg")) {
        if (parse_double(value.substr(0, value.size() - 3), x))
            return x * kPi / 180.0;
    } else if (value.size() > 3 && value.ends_with("rad")) {
        if (parse_double(value.substr(0, value.size() - 3), x)) return x;
    } else if (parse_double(value, x)) {
        return x;
    }
    throw ParseError(line, col, "bad angle value '" + value + "'");
}

bool is_angle_key(const std::string& key) {
    return key == "delta" || key == "theta" || key == "alpha" ||
           key == "phase_a" || key == "phase_b";
}

// Per-element parameter schema.
struct Schema {
    std::vector<std::string> required_nums;
    std::vector<std::string> optional_nums;
    std::vector<std::string> required_strs;
    std::vector<std::string> optional_strs;
    bool has_mode = false;
};

const std::map<std::string, Schema>& schemas() {
    static const std::map<std::string, Schema> s = {
        {"qplate", {{"q", "delta"}, {}, {}, {}}},
        {"hwp", {{"theta"}, {}, {}, {}}},
        {"qwp", {{"theta"}, {}, {}, {}}},
        {"polarizer", {{}, {}, {"axis"}, {}}},
        {"pbs", {{}, {}, {"port"}, {}}},
        {"smf", {{}, {}, {}, {}}},
        {"mirror", {{}, {}, {}, {}}},
        {"dove", {{"alpha"}, {}, {}, {}}},
        {"hologram", {{"order"}, {"efficiency", "flip"}, {"state"}, {}, true}},
    };
    return s;
}

Statement parse_statement(const std::vector<Token>& toks, int line) {
    const std::string& name = toks[0].text;
    auto it = schemas().find(name);
    if (it == schemas().end())
        throw ParseError(line, toks[0].column,
                         "unknown element '" + name + "'");
    const Schema& schema = it->second;

    Statement st;
    st.element = name;
    st.line = line;

    std::size_t i = 1;
    if (schema.has_mode) {
        if (toks.size() < 2 || toks[1].text.find('=') != std::string::npos)
            throw ParseError(line, toks[0].column,
                             "'" + name + "' requires a mode (gen or ana)");
        st.mode = toks[1].text;
        if (st.mode != "gen" && st.mode != "ana")
            throw ParseError(line, toks[1].column,
                             "bad hologram mode '" + st.mode +
                                 "' (expected gen or ana)");
        i = 2;
    }

    for (; i < toks.size(); ++i) {
        const std::string& t = toks[i].text;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= t.size())
            throw ParseError(line, toks[i].column,
                             "expected key=value, got '" + t + "'");
        const std::string key = t.substr(0, eq);
        const std::string value = t.substr(eq + 1);
        if (st.nums.count(key) || st.strs.count(key))
            throw ParseError(line, toks[i].column,
                             "duplicate parameter '" + key + "'");

        auto in = [&](const std::vector<std::string>& v) {
            return std::find(v.begin(), v.end(), key) != v.end();
        };
        if (in(schema.required_nums) || in(schema.optional_nums)) {
            if (is_angle_key(key)) {
                st.nums[key] = parse_angle(value, line, toks[i].column);
            } else {
                double x;
                if (!parse_double(value, x))
                    throw ParseError(line, toks[i].column,
                                     "bad numeric value '" + value +
                                         "' for parameter '" + key + "'");
                st.nums[key] = x;
            }
        } else if (in(schema.required_strs) || in(schema.optional_strs)) {
            st.strs[key] = value;
        } else {
            throw ParseError(line, toks[i].column,
                             "unknown parameter '" + key + "' for element '" +
                                 name + "'");
        }
    }

    for (const auto& key : schema.required_nums)
        if (!st.nums.count(key))
            throw ParseError(line, toks[0].column,
                             "element '" + name +
                                 "' is missing required parameter '" + key +
                                 "'");
    for (const auto& key : schema.required_strs)
        if (!st.strs.count(key))
            throw ParseError(line, toks[0].column,
                             "element '" + name +
                                 "' is missing required parameter '" + key +
                                 "'");
    return st;
}

std::string fmt_num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

void unparse_statement(std::ostream& os, const Statement& st,
                       const std::string& indent) {
    os << indent << st.element;
    if (!st.mode.empty()) os << " " << st.mode;
    const Schema& schema = schemas().at(st.element);
    auto emit_key = [&](const std::string& key) {
        if (auto it = st.nums.find(key); it != st.nums.end())
            os << " " << key << "=" << fmt_num(it->second);
        else if (auto is = st.strs.find(key); is != st.strs.end())
            os << " " << key << "=" << is->second;
    };
    for (const auto& k : schema.required_strs) emit_key(k);
    for (const auto& k : schema.required_nums) emit_key(k);
    for (const auto& k : schema.optional_nums) emit_key(k);
    for (const auto& k : schema.optional_strs) emit_key(k);
    os << "\n";
}

Element build_element(const Statement& st, int m_max) {
    auto num = [&](const std::string& key, double fallback) {
        auto it = st.nums.find(key);
        return it == st.nums.end() ? fallback : it->second;
    };
    if (st.element == "qplate")
        return qplate(st.nums.at("q"), st.nums.at("delta"), m_max);
    if (st.element == "hwp") return hwp(st.nums.at("theta"), m_max);
    if (st.element == "qwp") return qwp(st.nums.at("theta"), m_max);
    if (st.element == "polarizer") {
        const std::string& axis = st.strs.at("axis");
        if (axis.size() != 1)
            throw ParseError(st.line, 1, "bad polarizer axis '" + axis + "'");
        return polarizer(axis[0], m_max);
    }
    if (st.element == "pbs") {
        const std::string& port = st.strs.at("port");
        if (port == "transmit_H") return pbs_filter(PbsPort::TransmitH, m_max);
        if (port == "reflect_V") return pbs_filter(PbsPort::ReflectV, m_max);
        throw ParseError(st.line, 1, "bad pbs port '" + port + "'");
    }
    if (st.element == "smf") return smf(m_max);
    if (st.element == "mirror") return mirror(m_max);
    if (st.element == "dove") return dove_prism(st.nums.at("alpha"), m_max);
    if (st.element == "hologram") {
        const std::string& state = st.strs.at("state");
        if (state.size() != 1)
            throw ParseError(st.line, 1, "bad hologram state '" + state + "'");
        const Qubit target = oam::from_label(state[0]);
        const int order = static_cast<int>(st.nums.at("order"));
        const double eff = num("efficiency", 1.0);
        if (st.mode == "gen")
            return hologram_generate(target, order, eff, m_max);
        return hologram_analyze(target, order, eff, num("flip", 0.0) != 0.0,
                                m_max);
    }
    throw ParseError(st.line, 1, "unknown element '" + st.element + "'");
}

}  // namespace

CircuitDoc parse_circuit(const std::string& text) {
    CircuitDoc doc;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool seen_statement = false;
    std::optional<MzBlock> block;
    std::vector<Statement>* arm = nullptr;

    while (std::getline(is, line)) {
        ++lineno;
        const std::vector<Token> toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& head = toks[0].text;

        if (head == "circuit") {
            if (seen_statement || block)
                throw ParseError(lineno, toks[0].column,
                                 "circuit header must be the first statement");
            seen_statement = true;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                const std::string& t = toks[i].text;
                const std::size_t eq = t.find('=');
                if (eq == std::string::npos)
                    throw ParseError(lineno, toks[i].column,
                                     "expected key=value in circuit header");
                const std::string key = t.substr(0, eq);
                const std::string value = t.substr(eq + 1);
                if (key == "name") {
                    doc.name = value;
                } else if (key == "m_max") {
                    double x;
                    if (!parse_double(value, x) || x < 4 ||
                        x != std::floor(x))
                        throw ParseError(lineno, toks[i].column,
                                         "bad m_max value '" + value + "'");
                    doc.m_max = static_cast<int>(x);
                } else if (key == "seed") {
                    double x;
                    if (!parse_double(value, x) || x < 0)
                        throw ParseError(lineno, toks[i].column,
                                         "bad seed value '" + value + "'");
                    doc.seed = static_cast<std::uint64_t>(x);
                } else {
                    throw ParseError(lineno, toks[i].column,
                                     "unknown circuit header key '" + key +
                                         "'");
                }
            }
            continue;
        }

        seen_statement = true;

        if (head == "begin_mz") {
            if (block)
                throw ParseError(lineno, toks[0].column,
                                 "nested begin_mz is not allowed");
            block = MzBlock{};
            block->line = lineno;
            arm = nullptr;
            static const std::set<std::string> mz_keys = {
                "reflections_a", "reflections_b", "phase_a", "phase_b"};
            for (std::size_t i = 1; i < toks.size(); ++i) {
                const std::string& t = toks[i].text;
                const std::size_t eq = t.find('=');
                if (eq == std::string::npos)
                    throw ParseError(lineno, toks[i].column,
                                     "expected key=value after begin_mz");
                const std::string key = t.substr(0, eq);
                const std::string value = t.substr(eq + 1);
                if (!mz_keys.count(key))
                    throw ParseError(lineno, toks[i].column,
                                     "unknown begin_mz parameter '" + key +
                                         "'");
                if (block->nums.count(key))
                    throw ParseError(lineno, toks[i].column,
                                     "duplicate parameter '" + key + "'");
                block->nums[key] = is_angle_key(key)
                                       ? parse_angle(value, lineno,
                                                     toks[i].column)
                                       : [&] {
                                             double x;
                                             if (!parse_double(value, x))
                                                 throw ParseError(
                                                     lineno, toks[i].column,
                                                     "bad numeric value '" +
                                                         value + "'");
                                             return x;
                                         }();
            }
            continue;
        }
        if (head == "arm_a:" || head == "arm_b:") {
            if (!block)
                throw ParseError(lineno, toks[0].column,
                                 "'" + head + "' outside begin_mz block");
            if (toks.size() > 1)
                throw ParseError(lineno, toks[1].column,
                                 "unexpected token after '" + head + "'");
            arm = head == "arm_a:" ? &block->arm_a : &block->arm_b;
            continue;
        }
        if (head == "end_mz") {
            if (!block)
                throw ParseError(lineno, toks[0].column,
                                 "end_mz without begin_mz");
            doc.nodes.emplace_back(std::move(*block));
            block.reset();
            arm = nullptr;
            continue;
        }

        Statement st = parse_statement(toks, lineno);
        if (block) {
            if (!arm)
                throw ParseError(lineno, toks[0].column,
                                 "statement inside begin_mz before arm_a: "
                                 "or arm_b:");
            arm->push_back(std::move(st));
        } else {
            doc.nodes.push_back(std::move(st));
        }
    }

    if (block)
        throw ParseError(block->line, 1,
                         "unclosed begin_mz block (missing end_mz)");
    return doc;
}

std::string unparse_circuit(const CircuitDoc& doc) {
    std::ostringstream os;
    if (!doc.name.empty() || doc.m_max != kDefaultMmax || doc.seed) {
        os << "circuit";
        if (!doc.name.empty()) os << " name=" << doc.name;
        if (doc.m_max != kDefaultMmax) os << " m_max=" << doc.m_max;
        if (doc.seed) os << " seed=" << *doc.seed;
        os << "\n";
    }
    for (const DocNode& node : doc.nodes) {
        if (const Statement* st = std::get_if<Statement>(&node)) {
            unparse_statement(os, *st, "");
        } else {
            const MzBlock& b = std::get<MzBlock>(node);
            os << "begin_mz";
            for (const char* key :
                 {"reflections_a", "reflections_b", "phase_a", "phase_b"})
                if (auto it = b.nums.find(key); it != b.nums.end())
                    os << " " << key << "=" << fmt_num(it->second);
            os << "\n";
            os << "arm_a:\n";
            for (const Statement& st : b.arm_a)
                unparse_statement(os, st, "  ");
            os << "arm_b:\n";
            for (const Statement& st : b.arm_b)
                unparse_statement(os, st, "  ");
            os << "end_mz\n";
        }
    }
    return os.str();
}

Circuit build_circuit(const CircuitDoc& doc) {
    Circuit c;
    c.label = doc.name;
    c.m_max = doc.m_max;
    for (const DocNode& node : doc.nodes) {
        if (const Statement* st = std::get_if<Statement>(&node)) {
            c.add(build_element(*st, doc.m_max));
        } else {
            const MzBlock& b = std::get<MzBlock>(node);
            InterferometerBlock blk;
            auto num = [&](const char* key, double fallback) {
                auto it = b.nums.find(key);
                return it == b.nums.end() ? fallback : it->second;
            };
            blk.reflections_a = static_cast<int>(num("reflections_a", 0.0));
            blk.reflections_b = static_cast<int>(num("reflections_b", 0.0));
            blk.phase_a = num("phase_a", 0.0);
            blk.phase_b = num("phase_b", 0.0);
            for (const Statement& st : b.arm_a)
                blk.arm_a.push_back(build_element(st, doc.m_max));
            for (const Statement& st : b.arm_b)
                blk.arm_b.push_back(build_element(st, doc.m_max));
            c.add(std::move(blk));
        }
    }
    return c;
}

namespace {

// A complex literal: `1`, `-0.5`, `0.3i`, `1+2i`, `i`, `-i`, `0.5-0.5i`.
bool parse_complex(const std::string& s, Complex& out) {
    if (s.empty()) return false;
    // Find a +/- that splits real and imaginary parts (not the leading sign,
    // not part of an exponent).
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E')
            split = i;
    }
    auto parse_part = [](std::string part, bool expect_i, double& v) {
        if (expect_i) {
            if (part.empty() || part.back() != 'i') return false;
            part.pop_back();
            if (part.empty() || part == "+") part += "1";
            if (part == "-") part = "-1";
        }
        return parse_double(part, v);
    };
    double re = 0.0, im = 0.0;
    if (s.back() == 'i') {
        if (split == std::string::npos) {
            if (!parse_part(s, true, im)) return false;
        } else {
            if (!parse_double(s.substr(0, split), re)) return false;
            if (!parse_part(s.substr(split), true, im)) return false;
        }
    } else {
        if (split != std::string::npos) return false;  // e.g. "1+2"
        if (!parse_double(s, re)) return false;
    }
    out = Complex(re, im);
    return true;
}

}  // namespace

PhotonState parse_state_spec(const std::string& spec, int m_max) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string::npos)
        throw ParseError(1, 1, "bad state spec '" + spec +
                                   "' (expected <subspace>:<state>)");
    const std::string sub_label = spec.substr(0, colon);
    const std::string body = spec.substr(colon + 1);
    try {
        const LogicalSubspace sub = LogicalSubspace::from_label(sub_label);

        Qubit q;
        const bool is_pol = sub.kind == LogicalSubspace::Kind::Polarization;
        if (body.size() == 1 &&
            std::isalpha(static_cast<unsigned char>(body[0]))) {
            q = is_pol ? pol::from_label(body[0]) : oam::from_label(body[0]);
        } else {
            const std::size_t comma = body.find(',');
            Complex c0, c1;
            if (comma != std::string::npos) {
                if (!parse_complex(body.substr(0, comma), c0) ||
                    !parse_complex(body.substr(comma + 1), c1))
                    throw PreconditionError("bad amplitude pair");
            } else {
                // Shorthand `a+bi`: the two real coefficients of the pair.
                Complex z;
                if (!parse_complex(body, z))
                    throw PreconditionError("bad amplitude literal");
                c0 = z.real();
                c1 = z.imag();
            }
            q = Qubit(c0, c1);
        }

        return is_pol ? make_source_state(q, m_max)
                      : make_oam_source_state(q, sub.order, m_max);
    } catch (const Error& e) {
        throw ParseError(1, static_cast<int>(colon) + 2,
                         "bad state spec '" + spec + "': " + e.what());
    }
}

NoiseConfig parse_noise_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(1, 1, std::string("bad noise config JSON: ") +
                                   e.what());
    }
    NoiseConfig cfg;
    if (j.contains("qplate_delta")) cfg.qplate_delta = j["qplate_delta"];
    if (j.contains("hologram_efficiency"))
        cfg.hologram_efficiency = j["hologram_efficiency"];
    for (const auto& [key, _] : j.items())
        if (key != "qplate_delta" && key != "hologram_efficiency")
            throw ParseError(1, 1, "unknown noise config key '" + key + "'");
    return cfg;
}

namespace {

json density_json(const DensityMatrix2& rho) {
    json j;
    j["format_version"] = kFormatVersion;
    j["type"] = "density_matrix";
    j["real"] = {{rho.mat(0, 0).real(), rho.mat(0, 1).real()},
                 {rho.mat(1, 0).real(), rho.mat(1, 1).real()}};
    j["imag"] = {{rho.mat(0, 0).imag(), rho.mat(0, 1).imag()},
                 {rho.mat(1, 0).imag(), rho.mat(1, 1).imag()}};
    j["physical"] = rho.physical;
    return j;
}

const char* path_name(Path p) {
    switch (p) {
        case Path::Single: return "single";
        case Path::ArmA: return "armA";
        case Path::ArmB: return "armB";
    }
    return "?";
}

}  // namespace

std::string emit_results(const RunResult& result) {
    json j;
    j["format_version"] = kFormatVersion;
    j["type"] = "run_result";
    j["success_probability"] = result.success_probability;
    j["null_state"] = result.null_state;
    j["conversion_efficiency"] = result.conversion_efficiency;
    json amps = json::array();
    const PhotonState& s = result.final_state;
    for (Path p : {Path::Single, Path::ArmA, Path::ArmB})
        for (Pol pol : {Pol::H, Pol::V})
            for (int m = -s.m_max(); m <= s.m_max(); ++m) {
                const Complex a = s.amp(p, pol, m);
                if (std::norm(a) <= kEmptyTol * kEmptyTol) continue;
                amps.push_back({{"path", path_name(p)},
                                {"pol", pol == Pol::H ? "H" : "V"},
                                {"m", m},
                                {"re", a.real()},
                                {"im", a.imag()}});
            }
    j["final_state"] = amps;
    if (!result.stage_trace.empty()) {
        json trace = json::array();
        for (const auto& t : result.stage_trace)
            trace.push_back({{"stage", t.stage}, {"norm2", t.norm2}});
        j["stage_trace"] = trace;
    }
    return j.dump(2) + "\n";
}

std::string emit_results(const DensityMatrix2& rho) {
    return density_json(rho).dump(2) + "\n";
}

std::string emit_results(const FidelityTable& table) {
    json j;
    j["format_version"] = kFormatVersion;
    j["type"] = "fidelity_table";
    j["setup"] = table.setup;
    j["success_probability"] = table.success_probability;
    j["conversion_efficiency"] = table.conversion_efficiency;
    j["average_fidelity"] = table.average_fidelity();
    json rows = json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"input", r.input},
                        {"expected", r.expected},
                        {"fidelity", r.fidelity},
                        {"std", r.std_dev}});
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

std::string emit_tomography(const CountRecord& record,
                            const DensityMatrix2& linear,
                            const DensityMatrix2& mle) {
    json j;
    j["format_version"] = kFormatVersion;
    j["type"] = "tomography";
    j["subspace"] = record.subspace;
    j["seed"] = record.seed;
    json counts = json::array();
    for (const auto& [label, e] : record.entries)
        counts.push_back(
            {{"analyzer", label}, {"counts", e.counts}, {"shots", e.shots}});
    j["counts"] = counts;
    j["linear"] = density_json(linear);
    j["mle"] = density_json(mle);
    return j.dump(2) + "\n";
}

DensityMatrix2 parse_density_matrix(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(1, 1, std::string("bad density matrix JSON: ") +
                                   e.what());
    }
    if (j.value("type", "") != "density_matrix")
        throw ParseError(1, 1, "JSON document is not a density_matrix");
    DensityMatrix2 rho;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            rho.mat(r, c) = Complex(j["real"][r][c], j["imag"][r][c]);
    rho.physical = j.value("physical", true);
    return rho;
}

}  // namespace qpsim
