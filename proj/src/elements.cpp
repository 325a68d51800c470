#include "qpsim/elements.hpp"

#include <cmath>
#include <numbers>

namespace qpsim {

namespace {

const Complex kI{0.0, 1.0};

int block_dim(int m_max) { return 2 * (2 * m_max + 1); }

// Index of (pol, m) inside one path block.
int bidx(Pol pol, int m, int m_max) {
    return static_cast<int>(pol) * (2 * m_max + 1) + (m + m_max);
}

// pol_op (x) identity_on_oam
Element pol_only(std::string name, Element::Kind kind,
                 const Eigen::Matrix2cd& jones, int m_max) {
    const int d = block_dim(m_max);
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(d, d);
    for (int m = -m_max; m <= m_max; ++m)
        for (int pc = 0; pc < 2; ++pc)
            for (int pr = 0; pr < 2; ++pr)
                mat(bidx(static_cast<Pol>(pr), m, m_max),
                    bidx(static_cast<Pol>(pc), m, m_max)) = jones(pr, pc);
    return Element(std::move(name), kind, std::move(mat),
                   std::vector<Element::ColFlag>(d, Element::ColFlag::Ok), 0);
}

Eigen::Matrix2cd rotation2(double t) {
    Eigen::Matrix2cd r;
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return r;
}

// Squared support threshold below which a column counts as unoccupied.
constexpr double kSupportTol2 = 1e-24;

}  // namespace

Element::Element(std::string name, Kind kind, Eigen::MatrixXcd mat,
                 std::vector<ColFlag> col_flags, int oam_shift_reach)
    : name_(std::move(name)),
      kind_(kind),
      mat_(std::move(mat)),
      col_flags_(std::move(col_flags)),
      reach_(oam_shift_reach) {
    if (mat_.rows() != mat_.cols() ||
        static_cast<int>(col_flags_.size()) != mat_.cols())
        throw PreconditionError("element '" + name_ + "': inconsistent shape");
}

void Element::apply(PhotonState& state, Path path) const {
    auto blk = state.block(path);
    if (blk.size() != mat_.cols())
        throw PreconditionError("element '" + name_ +
                                "': dimension mismatch with state");
    for (int j = 0; j < blk.size(); ++j) {
        if (std::norm(blk[j]) <= kSupportTol2) continue;
        switch (col_flags_[j]) {
            case ColFlag::Ok:
                break;
            case ColFlag::TruncationLossy:
                throw TruncationError(
                    "element '" + name_ +
                    "' would shift amplitude beyond |m| <= " +
                    std::to_string(state.m_max()));
            case ColFlag::ForbiddenInput:
                throw PreconditionError(
                    "element '" + name_ +
                    "': input state has support outside the allowed subspace");
        }
    }
    blk = (mat_ * Eigen::VectorXcd(blk)).eval();
}

Element Element::adjoint() const {
    Eigen::MatrixXcd adj = mat_.adjoint();
    std::vector<ColFlag> flags(adj.cols(), ColFlag::Ok);
    if (kind_ == Kind::Unitary) {
        // A unitary loses amplitude exactly on the columns whose truncated
        // image has norm below one.
        for (int j = 0; j < adj.cols(); ++j)
            if (adj.col(j).squaredNorm() < 1.0 - kStructuralTol)
                flags[j] = ColFlag::TruncationLossy;
    }
    Element out(name_ + "^dag", kind_, std::move(adj), std::move(flags), reach_);
    out.conversion_fraction_ = conversion_fraction_;
    return out;
}

void Element::check_structure() const {
    if (kind_ == Kind::Unitary) {
        const Eigen::MatrixXcd g = mat_.adjoint() * mat_;
        for (int j = 0; j < mat_.cols(); ++j) {
            if (col_flags_[j] != ColFlag::Ok) continue;
            Eigen::VectorXcd e = Eigen::VectorXcd::Zero(mat_.cols());
            e[j] = 1.0;
            if ((g.col(j) - e).cwiseAbs().maxCoeff() > kStructuralTol)
                throw PreconditionError("element '" + name_ +
                                        "' is not unitary on column " +
                                        std::to_string(j));
        }
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat_);
        if (svd.singularValues().maxCoeff() > 1.0 + kStructuralTol)
            throw PreconditionError("filter element '" + name_ +
                                    "' has singular value above 1");
    }
}

Element qplate(double q, double delta, int m_max) {
    const double shift_d = 2.0 * q;
    const int shift = static_cast<int>(std::lround(shift_d));
    if (std::abs(shift_d - shift) > 1e-9)
        throw PreconditionError("q-plate charge must be integer or half-integer");

    const int d = block_dim(m_max);
    const double c = std::cos(delta / 2.0);
    const Complex is = kI * std::sin(delta / 2.0);
    const bool acts = std::abs(std::sin(delta / 2.0)) > 0.0;

    // Circular <-> linear basis change on polarization:
    // columns of B are L and R written in (H, V).
    Eigen::Matrix2cd B;
    B << 1.0, 1.0, kI, -kI;
    B /= std::numbers::sqrt2;

    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(d, d);
    std::vector<Element::ColFlag> flags(d, Element::ColFlag::Ok);

    for (int m = -m_max; m <= m_max; ++m) {
        for (int pc = 0; pc < 2; ++pc) {
            const int col = bidx(static_cast<Pol>(pc), m, m_max);
            // Circular components of the input basis ket: B^dag maps (H,V)
            // coefficients to (L,R) coefficients.
            const Eigen::Vector2cd circ =
                B.adjoint() * Eigen::Vector2cd::Unit(pc);
            // cL |L,m> + cR |R,m>  ->  cos part + i sin part with shifts.
            struct Piece { Complex amp; int pol_circ; int m_out; };
            const Piece pieces[4] = {
                {circ[0] * c, 0, m},              // cos: stays |L,m>
                {circ[1] * c, 1, m},              // cos: stays |R,m>
                {circ[0] * is, 1, m + shift},     // sin: |L,m> -> |R,m+2q>
                {circ[1] * is, 0, m - shift},     // sin: |R,m> -> |L,m-2q>
            };
            for (const auto& piece : pieces) {
                if (std::abs(piece.amp) == 0.0) continue;
                if (piece.m_out < -m_max || piece.m_out > m_max) {
                    if (acts) flags[col] = Element::ColFlag::TruncationLossy;
                    continue;
                }
                // Convert the circular output ket back to (H,V).
                const Eigen::Vector2cd hv = B.col(piece.pol_circ);
                for (int pr = 0; pr < 2; ++pr)
                    mat(bidx(static_cast<Pol>(pr), piece.m_out, m_max), col) +=
                        piece.amp * hv[pr];
            }
        }
    }

    Element out("qplate(q=" + std::to_string(q) + ")", Element::Kind::Unitary,
                std::move(mat), std::move(flags), std::abs(shift));
    const double s = std::sin(delta / 2.0);
    out.conversion_fraction_ = s * s;
    return out;
}

Element hwp(double theta, int m_max) {
    const double c2 = std::cos(2.0 * theta), s2 = std::sin(2.0 * theta);
    Eigen::Matrix2cd j;
    j << c2, s2, s2, -c2;
    return pol_only("hwp", Element::Kind::Unitary, j, m_max);
}

Element qwp(double theta, int m_max) {
    Eigen::Matrix2cd retarder;
    retarder << 1.0, 0.0, 0.0, -kI;
    const Eigen::Matrix2cd j =
        rotation2(theta) * retarder * rotation2(-theta);
    return pol_only("qwp", Element::Kind::Unitary, j, m_max);
}

Element polarizer(const Qubit& axis, int m_max) {
    if (std::abs(axis.squaredNorm() - 1.0) > kStructuralTol)
        throw PreconditionError("polarizer axis is not normalized");
    return pol_only("polarizer", Element::Kind::Filter, axis * axis.adjoint(),
                    m_max);
}

Element polarizer(char axis_label, int m_max) {
    return polarizer(pol::from_label(axis_label), m_max);
}

Element smf(int m_max) {
    const int d = block_dim(m_max);
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(d, d);
    for (int p = 0; p < 2; ++p) {
        const int i = bidx(static_cast<Pol>(p), 0, m_max);
        mat(i, i) = 1.0;
    }
    return Element("smf", Element::Kind::Filter, std::move(mat),
                   std::vector<Element::ColFlag>(d, Element::ColFlag::Ok), 0);
}

Element hologram_generate(const Qubit& target, int order, double efficiency,
                          int m_max) {
    if (std::abs(target.squaredNorm() - 1.0) > kStructuralTol)
        throw PreconditionError("hologram target state is not normalized");
    if (order <= 0 || order > m_max)
        throw TruncationError("hologram order exceeds the OAM truncation bound");
    if (efficiency < 0.0 || efficiency > 1.0 + kStructuralTol)
        throw PreconditionError("hologram efficiency must lie in [0, 1]");

    const int d = block_dim(m_max);
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(d, d);
    std::vector<Element::ColFlag> flags(d, Element::ColFlag::ForbiddenInput);
    for (int p = 0; p < 2; ++p) {
        const Pol pol = static_cast<Pol>(p);
        const int col = bidx(pol, 0, m_max);
        flags[col] = Element::ColFlag::Ok;
        mat(bidx(pol, order, m_max), col) = efficiency * target[0];
        mat(bidx(pol, -order, m_max), col) = efficiency * target[1];
    }
    return Element("hologram_gen", Element::Kind::Filter, std::move(mat),
                   std::move(flags), order);
}

Element hologram_analyze(const Qubit& analysis, int order, double efficiency,
                         bool flip_m, int m_max) {
    if (std::abs(analysis.squaredNorm() - 1.0) > kStructuralTol)
        throw PreconditionError("hologram analysis state is not normalized");
    if (order <= 0 || order > m_max)
        throw TruncationError("hologram order exceeds the OAM truncation bound");
    if (efficiency < 0.0 || efficiency > 1.0 + kStructuralTol)
        throw PreconditionError("hologram efficiency must lie in [0, 1]");

    const int d = block_dim(m_max);
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(d, d);
    const int m_plus = flip_m ? -order : order;
    for (int p = 0; p < 2; ++p) {
        const Pol pol = static_cast<Pol>(p);
        mat(bidx(pol, 0, m_max), bidx(pol, m_plus, m_max)) =
            efficiency * std::conj(analysis[0]);
        mat(bidx(pol, 0, m_max), bidx(pol, -m_plus, m_max)) =
            efficiency * std::conj(analysis[1]);
    }
    return Element("hologram_ana", Element::Kind::Filter, std::move(mat),
                   std::vector<Element::ColFlag>(d, Element::ColFlag::Ok),
                   order);
}

Element dove_prism(double alpha, int m_max) {
    const int d = block_dim(m_max);
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(d, d);
    for (int m = -m_max; m <= m_max; ++m) {
        const Complex ph = std::exp(-2.0 * kI * static_cast<double>(m) * alpha);
        for (int p = 0; p < 2; ++p)
            mat(bidx(static_cast<Pol>(p), -m, m_max),
                bidx(static_cast<Pol>(p), m, m_max)) = ph;
    }
    return Element("dove", Element::Kind::Unitary, std::move(mat),
                   std::vector<Element::ColFlag>(d, Element::ColFlag::Ok), 0);
}

Element mirror(int m_max) {
    const int d = block_dim(m_max);
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(d, d);
    for (int m = -m_max; m <= m_max; ++m)
        for (int p = 0; p < 2; ++p)
            mat(bidx(static_cast<Pol>(p), -m, m_max),
                bidx(static_cast<Pol>(p), m, m_max)) = 1.0;
    return Element("mirror", Element::Kind::Unitary, std::move(mat),
                   std::vector<Element::ColFlag>(d, Element::ColFlag::Ok), 0);
}

Element pbs_filter(PbsPort port, int m_max) {
    Element out = polarizer(port == PbsPort::TransmitH ? pol::H() : pol::V(),
                            m_max);
    return Element(port == PbsPort::TransmitH ? "pbs(transmit_H)"
                                              : "pbs(reflect_V)",
                   Element::Kind::Filter, out.matrix(),
                   std::vector<Element::ColFlag>(out.matrix().cols(),
                                                 Element::ColFlag::Ok),
                   0);
}

}  // namespace qpsim
