// hilbert.hpp
// Single-photon states on the composite (path x polarization x OAM) space,
// logical qubit subspaces, 2x2 density matrices and fidelity.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>

#include "qpsim/errors.hpp"

namespace qpsim {

using Complex = std::complex<double>;
using Qubit = Eigen::Vector2cd;  // amplitudes on an ordered logical pair

inline constexpr int kDefaultMmax = 6;

enum class Path : int { Single = 0, ArmA = 1, ArmB = 2 };
inline constexpr int kNumPaths = 3;

enum class Pol : int { H = 0, V = 1 };

// Fixed polarization kets in the {H,V} basis.
namespace pol {
Qubit H();
Qubit V();
Qubit A();  // (H+V)/sqrt2
Qubit D();  // (H-V)/sqrt2
Qubit L();  // (H+iV)/sqrt2
Qubit R();  // (H-iV)/sqrt2
// Lookup by single-letter label, throws PreconditionError on unknown label.
Qubit from_label(char label);
}  // namespace pol

// OAM logical kets for a |m|-order subspace, ordered (|+|m|>, |-|m|>).
// l=(1,0), r=(0,1), h=(l+r)/sqrt2, v=(l-r)/(i sqrt2),
// a=e^{-i pi/4}(l+ir)/sqrt2, d=e^{i pi/4}(l-ir)/sqrt2.
namespace oam {
Qubit l();
Qubit r();
Qubit h();
Qubit v();
Qubit a();
Qubit d();
Qubit from_label(char label);
}  // namespace oam

// Which 2-dim logical subspace a qubit lives in.
struct LogicalSubspace {
    enum class Kind { Polarization, Oam };
    Kind kind = Kind::Polarization;
    int order = 0;  // |m| for Oam kind (2 or 4)

    static LogicalSubspace polarization() { return {Kind::Polarization, 0}; }
    static LogicalSubspace oam(int order);
    std::string label() const;            // "pol", "oam2", "oam4"
    static LogicalSubspace from_label(const std::string& s);
};

// Dense amplitude vector indexed by (path, polarization, m), |m| <= m_max.
// Norm is allowed to drop below 1 to encode surviving postselection mass.
class PhotonState {
public:
    explicit PhotonState(int m_max = kDefaultMmax);

    int m_max() const { return m_max_; }
    // (pol, m) block dimension and full dimension.
    int block_dim() const { return 2 * (2 * m_max_ + 1); }
    int dim() const { return kNumPaths * block_dim(); }

    Complex amp(Path p, Pol pol, int m) const;
    void set_amp(Path p, Pol pol, int m, Complex v);

    Eigen::VectorXcd& vec() { return amps_; }
    const Eigen::VectorXcd& vec() const { return amps_; }

    // Mutable view of one path's (pol, m) block.
    Eigen::VectorBlock<Eigen::VectorXcd> block(Path p);
    Eigen::VectorBlock<const Eigen::VectorXcd> block(Path p) const;

    double norm2() const { return amps_.squaredNorm(); }
    // Rescales to unit norm; throws EmptySubspaceError near the zero state.
    PhotonState normalized() const;

    int index(Path p, Pol pol, int m) const;

private:
    int m_max_;
    Eigen::VectorXcd amps_;
};

// 2x2 density matrix over a logical qubit pair. `physical` records whether
// the producer guarantees the PSD/trace invariants (linear inversion of
// noisy counts may not).
struct DensityMatrix2 {
    Eigen::Matrix2cd mat = Eigen::Matrix2cd::Zero();
    bool physical = true;

    double min_eigenvalue() const;
    // Throws PreconditionError unless Hermitian, PSD and unit trace
    // within kStructuralTol.
    void validate() const;

    static DensityMatrix2 pure(const Qubit& psi);
    static DensityMatrix2 maximally_mixed();
};

// (alpha, beta) polarization qubit at m=0, path=single, unit norm.
PhotonState make_source_state(const Qubit& pol_qubit, int m_max = kDefaultMmax);

// |H> x (s_+| +order > + s_-| -order >) at path=single.
PhotonState make_oam_source_state(const Qubit& oam_qubit, int order,
                                  int m_max = kDefaultMmax);

// Conjugate-linear in the first argument.
Complex inner(const PhotonState& a, const PhotonState& b);

// |<a|b>|^2 / (|a|^2 |b|^2): global-phase-insensitive state comparison.
double overlap2(const PhotonState& a, const PhotonState& b);

// Projects onto the logical subspace (path=single; the other degree of
// freedom is traced out) and normalizes. Returns (rho, weight) where weight
// is the probability mass found inside the subspace.
std::pair<DensityMatrix2, double> reduce_to_qubit(const PhotonState& state,
                                                  const LogicalSubspace& sub);

// F = <psi| rho |psi>.
double fidelity(const DensityMatrix2& rho, const Qubit& psi);

}  // namespace qpsim
