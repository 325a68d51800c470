// tomography.hpp
// Qubit state tomography from per-projector counts: Stokes linear inversion,
// maximum-likelihood reconstruction, and bootstrap error bars.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qpsim/circuit.hpp"
#include "qpsim/hilbert.hpp"

namespace qpsim {

// Six analysis states forming three mutually unbiased bases, ordered as the
// three Pauli eigenpairs (z+, z-, x+, x-, y+, y-).
struct ProjectorSet {
    LogicalSubspace subspace;
    std::vector<std::pair<std::string, Qubit>> states;

    static ProjectorSet standard(const LogicalSubspace& sub);
    // Measurement elements acting on a circuit output state: polarizers for
    // the polarization subspace, hologram+fiber analyzers for OAM.
    std::vector<Analyzer> analyzers(int m_max = kDefaultMmax,
                                    double efficiency = 1.0) const;
};

// Exact Born-rule record (counts = round(prob * shots)) for oracle tests.
CountRecord exact_record(const DensityMatrix2& rho, const LogicalSubspace& sub,
                         std::int64_t shots = 1'000'000'000'000LL);

// Stokes-parameter inversion. May return an unphysical matrix for noisy
// counts; `physical` is set accordingly.
DensityMatrix2 reconstruct_linear(const CountRecord& record);

// Multinomial maximum likelihood over {rho >= 0, tr rho = 1} via the
// T T^dag / tr parameterization. Converges when the log-likelihood
// improvement drops below 1e-10 (at most 10^4 iterations).
DensityMatrix2 reconstruct_mle(const CountRecord& record);

// Log-likelihood of a record under rho (per-pair multinomial).
double log_likelihood(const CountRecord& record, const DensityMatrix2& rho);

// Multinomial bootstrap: resample each basis pair, reconstruct by MLE,
// evaluate fidelity against `target`. Returns (mean, standard deviation).
std::pair<double, double> bootstrap_fidelity(const CountRecord& record,
                                             const Qubit& target,
                                             int resamples, std::uint64_t seed);

// Line-oriented text format:
//   # qpsim-counts format_version=1 subspace=<label> seed=<n>
//   <analyzer-label> <counts> <shots>
std::string serialize_counts(const CountRecord& record);
CountRecord parse_counts(const std::string& text);

}  // namespace qpsim
