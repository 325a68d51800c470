#include "qpsim/tomography.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

namespace qpsim {

namespace {

constexpr double kLikelihoodTol = 1e-10;
constexpr const char* kSupportedCountsVersion = "1";
constexpr int kMaxIterations = 10'000;
constexpr double kProbFloor = 1e-15;

std::array<const char*, 6> labels_for(const LogicalSubspace& sub) {
    if (sub.kind == LogicalSubspace::Kind::Polarization)
        return {"H", "V", "A", "D", "L", "R"};
    return {"l", "r", "h", "v", "a", "d"};
}

LogicalSubspace subspace_of(const CountRecord& record) {
    if (!record.subspace.empty())
        return LogicalSubspace::from_label(record.subspace);
    // Fall back on the analyzer labels themselves.
    if (record.find("H")) return LogicalSubspace::polarization();
    if (record.find("l")) return LogicalSubspace::oam(2);
    throw PreconditionError("count record does not identify its subspace");
}

// The six projector states and observed counts, in (z+,z-,x+,x-,y+,y-) order.
struct PairedCounts {
    std::array<Qubit, 6> states;
    std::array<double, 6> counts;
};

PairedCounts gather(const CountRecord& record) {
    const LogicalSubspace sub = subspace_of(record);
    const ProjectorSet set = ProjectorSet::standard(sub);
    PairedCounts out;
    for (int i = 0; i < 6; ++i) {
        const auto& [label, state] = set.states[i];
        const CountRecord::Entry* e = record.find(label);
        if (!e)
            throw PreconditionError("count record is missing analyzer '" +
                                    label + "'");
        if (e->counts < 0 || e->counts > e->shots)
            throw PreconditionError("invalid counts for analyzer '" + label +
                                    "'");
        out.states[i] = state;
        out.counts[i] = static_cast<double>(e->counts);
    }
    for (int pair = 0; pair < 3; ++pair)
        if (out.counts[2 * pair] + out.counts[2 * pair + 1] <= 0.0)
            throw PreconditionError(
                "count record has zero total counts in basis pair " +
                std::to_string(pair));
    return out;
}

DensityMatrix2 rho_from_T(const std::array<double, 4>& x) {
    Eigen::Matrix2cd t;
    t << x[0], 0.0, Complex(x[2], x[3]), x[1];
    Eigen::Matrix2cd rho = t * t.adjoint();
    const double tr = rho.trace().real();
    DensityMatrix2 out;
    out.mat = rho / tr;
    return out;
}

double log_likelihood_paired(const PairedCounts& pc, const DensityMatrix2& rho) {
    double ll = 0.0;
    for (int i = 0; i < 6; ++i) {
        if (pc.counts[i] <= 0.0) continue;
        const double q = std::max(
            (pc.states[i].adjoint() * rho.mat * pc.states[i])(0, 0).real(),
            kProbFloor);
        ll += pc.counts[i] * std::log(q);
    }
    return ll;
}

}  // namespace

ProjectorSet ProjectorSet::standard(const LogicalSubspace& sub) {
    ProjectorSet set;
    set.subspace = sub;
    if (sub.kind == LogicalSubspace::Kind::Polarization) {
        set.states = {{"H", pol::H()}, {"V", pol::V()}, {"A", pol::A()},
                      {"D", pol::D()}, {"L", pol::L()}, {"R", pol::R()}};
    } else {
        set.states = {{"l", oam::l()}, {"r", oam::r()}, {"h", oam::h()},
                      {"v", oam::v()}, {"a", oam::a()}, {"d", oam::d()}};
    }
    return set;
}

std::vector<Analyzer> ProjectorSet::analyzers(int m_max,
                                              double efficiency) const {
    std::vector<Analyzer> out;
    out.reserve(states.size());
    for (const auto& [label, state] : states) {
        if (subspace.kind == LogicalSubspace::Kind::Polarization) {
            out.push_back({label, polarizer(state, m_max)});
        } else {
            out.push_back({label, hologram_analyze(state, subspace.order,
                                                   efficiency, false, m_max)});
        }
    }
    return out;
}

CountRecord exact_record(const DensityMatrix2& rho, const LogicalSubspace& sub,
                         std::int64_t shots) {
    const ProjectorSet set = ProjectorSet::standard(sub);
    CountRecord record;
    record.subspace = sub.label();
    for (const auto& [label, state] : set.states) {
        const double q = (state.adjoint() * rho.mat * state)(0, 0).real();
        record.entries.emplace_back(
            label, CountRecord::Entry{
                       std::llround(std::clamp(q, 0.0, 1.0) *
                                    static_cast<double>(shots)),
                       shots});
    }
    return record;
}

DensityMatrix2 reconstruct_linear(const CountRecord& record) {
    const PairedCounts pc = gather(record);
    // Pair-normalized probabilities give the Stokes vector directly.
    double s[3];
    for (int pair = 0; pair < 3; ++pair) {
        const double plus = pc.counts[2 * pair];
        const double minus = pc.counts[2 * pair + 1];
        s[pair] = (plus - minus) / (plus + minus);
    }
    const double sz = s[0], sx = s[1], sy = s[2];
    DensityMatrix2 rho;
    rho.mat << 0.5 * (1.0 + sz), 0.5 * Complex(sx, -sy),
               0.5 * Complex(sx, sy), 0.5 * (1.0 - sz);
    rho.physical = rho.min_eigenvalue() >= -kStructuralTol;
    return rho;
}

double log_likelihood(const CountRecord& record, const DensityMatrix2& rho) {
    return log_likelihood_paired(gather(record), rho);
}

DensityMatrix2 reconstruct_mle(const CountRecord& record) {
    const PairedCounts pc = gather(record);

    // Start from the linear inversion projected onto the physical set.
    DensityMatrix2 lin = reconstruct_linear(record);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(lin.mat);
    Eigen::Vector2d ev = es.eigenvalues().cwiseMax(1e-6);
    ev /= ev.sum();
    Eigen::Matrix2cd rho0 = es.eigenvectors() * ev.asDiagonal() *
                            es.eigenvectors().adjoint();
    const Eigen::Matrix2cd t0 = Eigen::LLT<Eigen::Matrix2cd>(rho0).matrixL();
    std::array<double, 4> x = {t0(0, 0).real(), t0(1, 1).real(),
                               t0(1, 0).real(), t0(1, 0).imag()};

    // Optimize the per-count mean log-likelihood so the convergence
    // tolerance is independent of the total number of shots.
    double total = 0.0;
    for (double c : pc.counts) total += c;
    auto eval = [&pc, total](const std::array<double, 4>& p) {
        return log_likelihood_paired(pc, rho_from_T(p)) / total;
    };

    double ll = eval(x);
    double step = 1e-2;
    bool converged = false;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // Central-difference gradient in the 4 T-parameters.
        std::array<double, 4> grad{};
        const double h = 1e-7;
        for (int k = 0; k < 4; ++k) {
            std::array<double, 4> xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            grad[k] = (eval(xp) - eval(xm)) / (2.0 * h);
        }
        const double gnorm = std::sqrt(grad[0] * grad[0] + grad[1] * grad[1] +
                                       grad[2] * grad[2] + grad[3] * grad[3]);
        if (gnorm == 0.0) {
            converged = true;
            break;
        }

        // Backtracking line search along the gradient.
        double t = step;
        double best_ll = ll;
        std::array<double, 4> best_x = x;
        for (int back = 0; back < 60; ++back) {
            std::array<double, 4> cand = x;
            for (int k = 0; k < 4; ++k) cand[k] += t * grad[k] / gnorm;
            const double cand_ll = eval(cand);
            if (cand_ll > best_ll) {
                best_ll = cand_ll;
                best_x = cand;
                break;
            }
            t *= 0.5;
        }

        const double improvement = best_ll - ll;
        x = best_x;
        ll = best_ll;
        step = std::max(t * 2.0, 1e-12);
        if (improvement < kLikelihoodTol) {
            converged = true;
            break;
        }
    }
    DensityMatrix2 rho = rho_from_T(x);
    rho.physical = true;
    if (!converged)
        throw ConvergenceError(
            "MLE reconstruction did not converge within 10^4 iterations");
    rho.validate();
    return rho;
}

std::pair<double, double> bootstrap_fidelity(const CountRecord& record,
                                             const Qubit& target,
                                             int resamples,
                                             std::uint64_t seed) {
    if (resamples < 100)
        throw PreconditionError("bootstrap requires at least 100 resamples");
    gather(record);  // validates completeness up front

    std::mt19937_64 seeder(seed);
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < resamples; ++r) {
        std::mt19937_64 rng(seeder());
        CountRecord resampled = record;
        // Resample each basis pair as a multinomial over its observed total.
        for (std::size_t pair = 0; 2 * pair + 1 < resampled.entries.size();
             ++pair) {
            auto& plus = resampled.entries[2 * pair].second;
            auto& minus = resampled.entries[2 * pair + 1].second;
            const std::int64_t total = plus.counts + minus.counts;
            if (total <= 0) continue;
            std::binomial_distribution<std::int64_t> dist(
                total, static_cast<double>(plus.counts) /
                           static_cast<double>(total));
            const std::int64_t new_plus = dist(rng);
            plus.counts = new_plus;
            minus.counts = total - new_plus;
        }
        const double f = fidelity(reconstruct_mle(resampled), target);
        sum += f;
        sum2 += f * f;
    }
    const double mean = sum / resamples;
    const double var = std::max(sum2 / resamples - mean * mean, 0.0);
    return {mean, std::sqrt(var)};
}

std::string serialize_counts(const CountRecord& record) {
    std::ostringstream os;
    os << "# qpsim-counts format_version=1 subspace=" << record.subspace
       << " seed=" << record.seed << "\n";
    for (const auto& [label, e] : record.entries)
        os << label << " " << e.counts << " " << e.shots << "\n";
    return os.str();
}

CountRecord parse_counts(const std::string& text) {
    CountRecord record;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tok;
            while (hs >> tok) {
                if (tok.rfind("format_version=", 0) == 0 &&
                    tok.substr(15) != kSupportedCountsVersion)
                    throw ParseError(lineno, 1,
                                     "unsupported counts format version '" +
                                         tok.substr(15) + "'");
                if (tok.rfind("subspace=", 0) == 0)
                    record.subspace = tok.substr(9);
                else if (tok.rfind("seed=", 0) == 0)
                    record.seed = std::stoull(tok.substr(5));
            }
            continue;
        }
        std::istringstream ls(line);
        std::string label;
        std::int64_t counts, shots;
        if (!(ls >> label >> counts >> shots))
            throw ParseError(lineno, 1, "malformed count line");
        record.entries.emplace_back(label, CountRecord::Entry{counts, shots});
    }
    return record;
}

}  // namespace qpsim
