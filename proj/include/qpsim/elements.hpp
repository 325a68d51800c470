// elements.hpp
// Constructors for the optical elements: q-plates, waveplates, polarizers,
// single-mode fiber, holograms, Dove prisms, mirrors, PBS ports.
// Each element is a dense linear map on one (polarization x OAM) block.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qpsim/hilbert.hpp"

namespace qpsim {

class Element {
public:
    enum class Kind { Unitary, Filter };

    // Why a column can be refused at application time.
    enum class ColFlag : std::uint8_t {
        Ok = 0,
        TruncationLossy = 1,   // action would leave |m| <= m_max
        ForbiddenInput = 2,    // element precondition (e.g. hologram needs m=0)
    };

    Element(std::string name, Kind kind, Eigen::MatrixXcd mat,
            std::vector<ColFlag> col_flags, int oam_shift_reach);

    const std::string& name() const { return name_; }
    Kind kind() const { return kind_; }
    const Eigen::MatrixXcd& matrix() const { return mat_; }
    int oam_shift_reach() const { return reach_; }
    // Fraction of norm2 a q-plate moves out of the input OAM level,
    // sin^2(delta/2); 1.0 for every other element.
    double conversion_fraction() const { return conversion_fraction_; }

    // Applies the element to the given path block of the state, in place.
    // Throws TruncationError / PreconditionError when the state has support
    // on a flagged column.
    void apply(PhotonState& state, Path path = Path::Single) const;

    Element adjoint() const;

    // For tests: U^dag U = I on unflagged columns, all singular values <= 1.
    void check_structure() const;

private:
    std::string name_;
    Kind kind_;
    Eigen::MatrixXcd mat_;
    std::vector<ColFlag> col_flags_;
    int reach_;
    double conversion_fraction_ = 1.0;

    friend Element qplate(double q, double delta, int m_max);
};

// --- element constructors -------------------------------------------------
// All take the truncation bound so the matrix dimension is fixed up front.

// q-plate of charge q and retardation delta:
// cos(delta/2) * identity + i sin(delta/2) * (|L,m> -> |R,m+2q>, |R,m> -> |L,m-2q>).
Element qplate(double q, double delta, int m_max = kDefaultMmax);

// Half-wave plate, optic axis at theta: H -> cos2t H + sin2t V, V -> sin2t H - cos2t V.
Element hwp(double theta, int m_max = kDefaultMmax);

// Quarter-wave plate at axis angle theta, Jones form R(t) diag(1,-i) R(-t).
// With this convention qwp(0) followed by qwp(pi/4) sends H -> L, V -> R
// up to a common phase.
Element qwp(double theta, int m_max = kDefaultMmax);

// Projective polarizer along a polarization pure state; identity on OAM.
Element polarizer(const Qubit& axis, int m_max = kDefaultMmax);
Element polarizer(char axis_label, int m_max = kDefaultMmax);

// Single-mode fiber: projector onto m=0, identity on polarization.
Element smf(int m_max = kDefaultMmax);

// Hologram used as generator: |pol, 0> -> efficiency * |pol> x target, with
// target = t_+ |+order> + t_- |-order>. Input support outside m=0 is a
// precondition violation. `efficiency` scales amplitudes.
Element hologram_generate(const Qubit& target, int order, double efficiency = 1.0,
                          int m_max = kDefaultMmax);

// Hologram followed by fiber coupling, used as analyzer: the projection of
// the order-|m| content onto `analysis` lands in m=0 (per polarization); all
// other OAM amplitude is discarded. `flip_m` analyzes the m-sign-inverted
// state instead.
Element hologram_analyze(const Qubit& analysis, int order,
                         double efficiency = 1.0, bool flip_m = false,
                         int m_max = kDefaultMmax);

// Dove prism rotated by alpha: |m> -> e^{-2 i m alpha} |-m>, identity on
// polarization (compensated).
Element dove_prism(double alpha, int m_max = kDefaultMmax);

// Mirror reflection: |m> -> |-m>.
Element mirror(int m_max = kDefaultMmax);

// One output port of a polarizing beam-splitter used as a filter.
enum class PbsPort { TransmitH, ReflectV };
Element pbs_filter(PbsPort port, int m_max = kDefaultMmax);

}  // namespace qpsim
