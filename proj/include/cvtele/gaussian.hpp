#pragma once

// Gaussian-state linear algebra.
//
// Quadrature convention, used by every matrix in the library:
//   * mode-major ordering (x1, p1, x2, p2, ...)
//   * x = a + a^dagger, p = -i (a - a^dagger), so the vacuum covariance is
//     the identity and the Heisenberg bound reads sigma + i Omega >= 0
//   * Omega = direct sum of [[0, 1], [-1, 0]] over modes

#include "cvtele/common.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cvtele {

inline constexpr double symmetry_tolerance = 1e-12;
inline constexpr double physicality_tolerance = 1e-9;

Matrix symplectic_form(std::size_t n_modes);

/// Real symmetric 2n x 2n matrix of quadrature second moments.
class CovarianceMatrix {
public:
    /// Throws ErrorKind::domain unless `data` is square, even-sized and
    /// symmetric to `symmetry_tolerance` (relative to its largest entry).
    explicit CovarianceMatrix(Matrix data);

    static CovarianceMatrix vacuum(std::size_t n_modes);

    std::size_t n_modes() const noexcept { return static_cast<std::size_t>(data_.rows() / 2); }
    const Matrix& data() const noexcept { return data_; }

    /// Amount by which the smallest eigenvalue of sigma + i Omega is negative;
    /// zero for physical states.
    double heisenberg_violation() const;
    bool is_physical(double tolerance = physicality_tolerance) const {
        return heisenberg_violation() <= tolerance;
    }

    /// 2x2 block (i, j) of the matrix, in mode indices.
    Eigen::Matrix2d block(std::size_t i, std::size_t j) const {
        return data_.block<2, 2>(2 * i, 2 * j);
    }

private:
    Matrix data_;
};

/// Real matrix meant to satisfy S Omega S^T = Omega. Truncated Bogoliubov
/// constructions only satisfy it approximately, so the constructor does not
/// check; use residual().
class SymplecticMatrix {
public:
    explicit SymplecticMatrix(Matrix data);

    static SymplecticMatrix identity(std::size_t n_modes);

    std::size_t n_modes() const noexcept { return static_cast<std::size_t>(data_.rows() / 2); }
    const Matrix& data() const noexcept { return data_; }

    /// max |S Omega S^T - Omega|
    double residual() const;

private:
    Matrix data_;
};

SymplecticMatrix operator*(const SymplecticMatrix& lhs, const SymplecticMatrix& rhs);
SymplecticMatrix direct_sum(const SymplecticMatrix& first, const SymplecticMatrix& second);

/// sigma -> S sigma S^T
CovarianceMatrix apply(const SymplecticMatrix& s, const CovarianceMatrix& sigma);

/// Two-mode squeezed vacuum with blocks A = B = cosh(2r) I and
/// C = -sinh(2r) diag(1, -1). Mode 0 is Alice's, mode 1 is Rob's.
CovarianceMatrix make_two_mode_squeezed(double r);

/// Places a two-mode state into a register of 1 + n_rob_modes modes:
/// register mode 0 holds Alice's mode, register mode j (1 <= j <= n_rob_modes)
/// holds Rob's cavity mode j. Mode `rob_mode` receives the second mode of
/// `pair`; every other cavity mode is vacuum.
CovarianceMatrix embed_with_vacuum(const CovarianceMatrix& pair, std::size_t rob_mode,
                                   std::size_t n_rob_modes);

/// Principal submatrix on the listed modes, in the listed order.
CovarianceMatrix reduce(const CovarianceMatrix& sigma, std::span<const std::size_t> modes);

/// Free-evolution phase e^{-i theta} on one mode: [[cos, sin], [-sin, cos]].
SymplecticMatrix rotation(double theta);
SymplecticMatrix local_rotation(double theta_a, double theta_b);
/// Single-mode squeezer diag(e^{-s}, e^{s}).
SymplecticMatrix squeezer(double s);

/// P sigma P with P flipping the sign of `which`'s momentum quadrature.
Matrix partial_transpose(const CovarianceMatrix& sigma, std::size_t which);

/// Symplectic spectrum of a symmetric positive-definite matrix, ascending.
/// Obtained as |eig(i Omega M)| paired up; throws ErrorKind::numeric when a
/// pair disagrees by more than 1e-7.
std::vector<double> symplectic_eigenvalues(const Matrix& m);

/// Smallest symplectic eigenvalue of the partial transpose of a two-mode state.
double entanglement_nu(const CovarianceMatrix& sigma);

/// Coherent-state teleportation fidelity 2 / sqrt(det(2I + N)),
/// N = Z A Z + Z C + C^T Z + B, Z = diag(1, -1).
double teleport_fidelity(const CovarianceMatrix& sigma);

/// 1 / (1 + nu) with nu from entanglement_nu().
double optimal_fidelity_bound(const CovarianceMatrix& sigma);

}  // namespace cvtele
