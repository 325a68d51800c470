#include "qpsim/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace qpsim {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
const Complex kI{0.0, 1.0};
}  // namespace

namespace pol {
Qubit H() { return Qubit(1.0, 0.0); }
Qubit V() { return Qubit(0.0, 1.0); }
Qubit A() { return Qubit(kInvSqrt2, kInvSqrt2); }
Qubit D() { return Qubit(kInvSqrt2, -kInvSqrt2); }
Qubit L() { return Qubit(kInvSqrt2, kI * kInvSqrt2); }
Qubit R() { return Qubit(kInvSqrt2, -kI * kInvSqrt2); }

Qubit from_label(char label) {
    switch (label) {
        case 'H': return H();
        case 'V': return V();
        case 'A': return A();
        case 'D': return D();
        case 'L': return L();
        case 'R': return R();
        default:
            throw PreconditionError(std::string("unknown polarization state '") +
                                    label + "'");
    }
}
}  // namespace pol

namespace oam {
Qubit l() { return Qubit(1.0, 0.0); }
Qubit r() { return Qubit(0.0, 1.0); }
Qubit h() { return Qubit(kInvSqrt2, kInvSqrt2); }
Qubit v() { return Qubit(-kI * kInvSqrt2, kI * kInvSqrt2); }
Qubit a() {
    const Complex ph = std::exp(-kI * (std::numbers::pi / 4.0));
    return Qubit(ph * kInvSqrt2, ph * kI * kInvSqrt2);
}
Qubit d() {
    const Complex ph = std::exp(kI * (std::numbers::pi / 4.0));
    return Qubit(ph * kInvSqrt2, -ph * kI * kInvSqrt2);
}

Qubit from_label(char label) {
    switch (label) {
        case 'l': return l();
        case 'r': return r();
        case 'h': return h();
        case 'v': return v();
        case 'a': return a();
        case 'd': return d();
        default:
            throw PreconditionError(std::string("unknown OAM state '") + label +
                                    "'");
    }
}
}  // namespace oam

LogicalSubspace LogicalSubspace::oam(int order) {
    if (order != 2 && order != 4)
        throw PreconditionError("OAM logical subspace order must be 2 or 4");
    return {Kind::Oam, order};
}

std::string LogicalSubspace::label() const {
    if (kind == Kind::Polarization) return "pol";
    return "oam" + std::to_string(order);
}

LogicalSubspace LogicalSubspace::from_label(const std::string& s) {
    if (s == "pol") return polarization();
    if (s == "oam2") return oam(2);
    if (s == "oam4") return oam(4);
    throw PreconditionError("unknown subspace label '" + s + "'");
}

PhotonState::PhotonState(int m_max) : m_max_(m_max) {
    if (m_max < 4)
        throw PreconditionError("m_max must be >= 4, got " +
                                std::to_string(m_max));
    amps_ = Eigen::VectorXcd::Zero(dim());
}

int PhotonState::index(Path p, Pol pol, int m) const {
    if (m < -m_max_ || m > m_max_)
        throw PreconditionError("OAM index m=" + std::to_string(m) +
                                " outside |m| <= " + std::to_string(m_max_));
    const int span = 2 * m_max_ + 1;
    return (static_cast<int>(p) * 2 + static_cast<int>(pol)) * span +
           (m + m_max_);
}

Complex PhotonState::amp(Path p, Pol pol, int m) const {
    return amps_[index(p, pol, m)];
}

void PhotonState::set_amp(Path p, Pol pol, int m, Complex v) {
    amps_[index(p, pol, m)] = v;
}

Eigen::VectorBlock<Eigen::VectorXcd> PhotonState::block(Path p) {
    return amps_.segment(static_cast<int>(p) * block_dim(), block_dim());
}

Eigen::VectorBlock<const Eigen::VectorXcd> PhotonState::block(Path p) const {
    return amps_.segment(static_cast<int>(p) * block_dim(), block_dim());
}

PhotonState PhotonState::normalized() const {
    const double n2 = norm2();
    if (n2 < kEmptyTol)
        throw EmptySubspaceError("cannot normalize a (numerically) zero state");
    PhotonState out = *this;
    out.amps_ /= std::sqrt(n2);
    return out;
}

double DensityMatrix2::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(mat);
    return es.eigenvalues().minCoeff();
}

void DensityMatrix2::validate() const {
    if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > kStructuralTol)
        throw PreconditionError("density matrix is not Hermitian");
    if (std::abs(mat.trace().real() - 1.0) > kStructuralTol ||
        std::abs(mat.trace().imag()) > kStructuralTol)
        throw PreconditionError("density matrix trace differs from 1");
    if (min_eigenvalue() < -kStructuralTol)
        throw PreconditionError("density matrix has a negative eigenvalue");
}

DensityMatrix2 DensityMatrix2::pure(const Qubit& psi) {
    DensityMatrix2 rho;
    rho.mat = psi * psi.adjoint();
    return rho;
}

DensityMatrix2 DensityMatrix2::maximally_mixed() {
    DensityMatrix2 rho;
    rho.mat = 0.5 * Eigen::Matrix2cd::Identity();
    return rho;
}

PhotonState make_source_state(const Qubit& pol_qubit, int m_max) {
    if (std::abs(pol_qubit.squaredNorm() - 1.0) > kStructuralTol)
        throw PreconditionError("source polarization qubit is not normalized");
    PhotonState s(m_max);
    s.set_amp(Path::Single, Pol::H, 0, pol_qubit[0]);
    s.set_amp(Path::Single, Pol::V, 0, pol_qubit[1]);
    return s;
}

PhotonState make_oam_source_state(const Qubit& oam_qubit, int order,
                                  int m_max) {
    if (std::abs(oam_qubit.squaredNorm() - 1.0) > kStructuralTol)
        throw PreconditionError("source OAM qubit is not normalized");
    if (order <= 0 || order > m_max)
        throw PreconditionError("OAM source order outside the truncated ladder");
    PhotonState s(m_max);
    s.set_amp(Path::Single, Pol::H, order, oam_qubit[0]);
    s.set_amp(Path::Single, Pol::H, -order, oam_qubit[1]);
    return s;
}

Complex inner(const PhotonState& a, const PhotonState& b) {
    if (a.m_max() != b.m_max())
        throw PreconditionError("inner(): states use different m_max");
    return a.vec().dot(b.vec());  // Eigen dot conjugates the first factor
}

double overlap2(const PhotonState& a, const PhotonState& b) {
    const double n = a.norm2() * b.norm2();
    if (n < kEmptyTol * kEmptyTol)
        throw EmptySubspaceError("overlap2() of a zero state");
    return std::norm(inner(a, b)) / n;
}

std::pair<DensityMatrix2, double> reduce_to_qubit(const PhotonState& state,
                                                  const LogicalSubspace& sub) {
    if (state.norm2() <= 0.0)
        throw PreconditionError("reduce_to_qubit(): zero input state");

    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    if (sub.kind == LogicalSubspace::Kind::Polarization) {
        // Trace out OAM within path=single.
        for (int m = -state.m_max(); m <= state.m_max(); ++m) {
            Qubit col(state.amp(Path::Single, Pol::H, m),
                      state.amp(Path::Single, Pol::V, m));
            rho += col * col.adjoint();
        }
    } else {
        // Restrict to m = +-order, trace out polarization.
        for (Pol p : {Pol::H, Pol::V}) {
            Qubit col(state.amp(Path::Single, p, sub.order),
                      state.amp(Path::Single, p, -sub.order));
            rho += col * col.adjoint();
        }
    }

    const double weight = rho.trace().real();
    if (weight < kEmptyTol)
        throw EmptySubspaceError("no probability mass in subspace " +
                                 sub.label());
    DensityMatrix2 out;
    out.mat = rho / weight;
    return {out, weight};
}

double fidelity(const DensityMatrix2& rho, const Qubit& psi) {
    if (std::abs(psi.squaredNorm() - 1.0) > kStructuralTol)
        throw PreconditionError("fidelity(): target state is not normalized");
    return (psi.adjoint() * rho.mat * psi)(0, 0).real();
}

}  // namespace qpsim
