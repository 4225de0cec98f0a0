#include "cvtele/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cvtele {

namespace {

void require_two_mode(const CovarianceMatrix& sigma, const char* what) {
    if (sigma.n_modes() != 2) {
        std::ostringstream msg;
        msg << what << ": expected a two-mode state, got " << sigma.n_modes() << " modes";
        fail(ErrorKind::domain, msg.str());
    }
}

void require_physical(const CovarianceMatrix& sigma, const char* what) {
    const double violation = sigma.heisenberg_violation();
    if (violation > physicality_tolerance) {
        std::ostringstream msg;
        msg << what << ": state violates the Heisenberg bound by " << violation;
        fail(ErrorKind::domain, msg.str());
    }
}

}  // namespace

Matrix symplectic_form(std::size_t n_modes) {
    Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (std::size_t i = 0; i < n_modes; ++i) {
        omega(2 * i, 2 * i + 1) = 1.0;
        omega(2 * i + 1, 2 * i) = -1.0;
    }
    return omega;
}

CovarianceMatrix::CovarianceMatrix(Matrix data) : data_(std::move(data)) {
    require(data_.rows() == data_.cols(), "covariance matrix must be square");
    require(data_.rows() > 0 && data_.rows() % 2 == 0, "covariance matrix needs even, nonzero size");
    const double scale = std::max(1.0, data_.cwiseAbs().maxCoeff());
    const double asym = (data_ - data_.transpose()).cwiseAbs().maxCoeff();
    require(asym <= symmetry_tolerance * scale, "covariance matrix is not symmetric");
    data_ = 0.5 * (data_ + data_.transpose());
}

CovarianceMatrix CovarianceMatrix::vacuum(std::size_t n_modes) {
    return CovarianceMatrix(Matrix::Identity(2 * n_modes, 2 * n_modes));
}

double CovarianceMatrix::heisenberg_violation() const {
    const CMatrix h = data_.cast<Complex>() + Complex(0, 1) * symplectic_form(n_modes()).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    return std::max(0.0, -solver.eigenvalues().minCoeff());
}

SymplecticMatrix::SymplecticMatrix(Matrix data) : data_(std::move(data)) {
    require(data_.rows() == data_.cols() && data_.rows() % 2 == 0,
            "symplectic matrix must be square with even size");
}

SymplecticMatrix SymplecticMatrix::identity(std::size_t n_modes) {
    return SymplecticMatrix(Matrix::Identity(2 * n_modes, 2 * n_modes));
}

double SymplecticMatrix::residual() const {
    const Matrix omega = symplectic_form(n_modes());
    return (data_ * omega * data_.transpose() - omega).cwiseAbs().maxCoeff();
}

SymplecticMatrix operator*(const SymplecticMatrix& lhs, const SymplecticMatrix& rhs) {
    require(lhs.n_modes() == rhs.n_modes(), "symplectic product: size mismatch");
    return SymplecticMatrix(lhs.data() * rhs.data());
}

SymplecticMatrix direct_sum(const SymplecticMatrix& first, const SymplecticMatrix& second) {
    const auto n1 = first.data().rows();
    const auto n2 = second.data().rows();
    Matrix out = Matrix::Zero(n1 + n2, n1 + n2);
    out.topLeftCorner(n1, n1) = first.data();
    out.bottomRightCorner(n2, n2) = second.data();
    return SymplecticMatrix(std::move(out));
}

CovarianceMatrix apply(const SymplecticMatrix& s, const CovarianceMatrix& sigma) {
    require(s.n_modes() == sigma.n_modes(), "congruence: size mismatch");
    Matrix out = s.data() * sigma.data() * s.data().transpose();
    out = 0.5 * (out + out.transpose());
    return CovarianceMatrix(std::move(out));
}

CovarianceMatrix make_two_mode_squeezed(double r) {
    require(r >= 0.0 && std::isfinite(r), "squeezing parameter must be finite and non-negative");
    const double ch = std::cosh(2.0 * r);
    const double sh = std::sinh(2.0 * r);
    Matrix sigma(4, 4);
    sigma << ch, 0, -sh, 0,
             0, ch, 0, sh,
             -sh, 0, ch, 0,
             0, sh, 0, ch;
    return CovarianceMatrix(std::move(sigma));
}

CovarianceMatrix embed_with_vacuum(const CovarianceMatrix& pair, std::size_t rob_mode,
                                   std::size_t n_rob_modes) {
    require_two_mode(pair, "embed_with_vacuum");
    if (rob_mode < 1 || rob_mode > n_rob_modes) {
        std::ostringstream msg;
        msg << "embed_with_vacuum: Rob mode " << rob_mode << " outside 1.." << n_rob_modes;
        fail(ErrorKind::domain, msg.str());
    }
    const std::size_t n = 1 + n_rob_modes;
    Matrix out = Matrix::Identity(2 * n, 2 * n);
    const std::size_t slots[2] = {0, rob_mode};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            out.block<2, 2>(2 * slots[i], 2 * slots[j]) = pair.block(i, j);
    return CovarianceMatrix(std::move(out));
}

CovarianceMatrix reduce(const CovarianceMatrix& sigma, std::span<const std::size_t> modes) {
    require(!modes.empty(), "reduce: no modes selected");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i] >= sigma.n_modes()) {
            std::ostringstream msg;
            msg << "reduce: mode " << modes[i] << " out of range (" << sigma.n_modes() << " modes)";
            fail(ErrorKind::domain, msg.str());
        }
        for (std::size_t j = 0; j < i; ++j)
            require(modes[i] != modes[j], "reduce: duplicate mode id");
    }
    const auto k = modes.size();
    Matrix out(2 * k, 2 * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            out.block<2, 2>(2 * i, 2 * j) = sigma.block(modes[i], modes[j]);
    return CovarianceMatrix(std::move(out));
}

SymplecticMatrix rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Matrix r(2, 2);
    r << c, s, -s, c;
    return SymplecticMatrix(std::move(r));
}

SymplecticMatrix local_rotation(double theta_a, double theta_b) {
    return direct_sum(rotation(theta_a), rotation(theta_b));
}

SymplecticMatrix squeezer(double s) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = std::exp(-s);
    m(1, 1) = std::exp(s);
    return SymplecticMatrix(std::move(m));
}

Matrix partial_transpose(const CovarianceMatrix& sigma, std::size_t which) {
    require_two_mode(sigma, "partial_transpose");
    require(which < 2, "partial_transpose: mode id must be 0 or 1");
    Matrix flipped = sigma.data();
    const auto p = static_cast<Eigen::Index>(2 * which + 1);
    flipped.row(p) *= -1.0;
    flipped.col(p) *= -1.0;
    return flipped;
}

std::vector<double> symplectic_eigenvalues(const Matrix& m) {
    require(m.rows() == m.cols() && m.rows() > 0 && m.rows() % 2 == 0,
            "symplectic_eigenvalues: need a square matrix of even size");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    require((m - m.transpose()).cwiseAbs().maxCoeff() <= symmetry_tolerance * scale,
            "symplectic_eigenvalues: matrix is not symmetric");
    Eigen::LLT<Matrix> llt(m);
    require(llt.info() == Eigen::Success, "symplectic_eigenvalues: matrix is not positive definite");

    const auto n = static_cast<std::size_t>(m.rows() / 2);
    Eigen::EigenSolver<Matrix> solver(symplectic_form(n) * m, false);
    if (solver.info() != Eigen::Success)
        fail(ErrorKind::numeric, "symplectic_eigenvalues: eigen-decomposition failed");

    std::vector<double> moduli;
    moduli.reserve(2 * n);
    for (const auto& ev : solver.eigenvalues()) moduli.push_back(std::abs(ev));
    std::sort(moduli.begin(), moduli.end());

    std::vector<double> spectrum;
    spectrum.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = moduli[2 * i];
        const double b = moduli[2 * i + 1];
        if (std::abs(a - b) > 1e-7 * std::max(1.0, b)) {
            std::ostringstream msg;
            msg << "symplectic_eigenvalues: unpaired moduli " << a << " and " << b;
            fail(ErrorKind::numeric, msg.str());
        }
        spectrum.push_back(0.5 * (a + b));
    }
    return spectrum;
}

double entanglement_nu(const CovarianceMatrix& sigma) {
    require_two_mode(sigma, "entanglement_nu");
    return symplectic_eigenvalues(partial_transpose(sigma, 1)).front();
}

double teleport_fidelity(const CovarianceMatrix& sigma) {
    require_two_mode(sigma, "teleport_fidelity");
    require_physical(sigma, "teleport_fidelity");
    const Eigen::Matrix2d z = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    const Eigen::Matrix2d a = sigma.block(0, 0);
    const Eigen::Matrix2d b = sigma.block(1, 1);
    const Eigen::Matrix2d c = sigma.block(0, 1);
    const Eigen::Matrix2d n = z * a * z + z * c + c.transpose() * z + b;
    const double det = (2.0 * Eigen::Matrix2d::Identity() + n).determinant();
    if (!(det > 0.0)) fail(ErrorKind::numeric, "teleport_fidelity: det(2I + N) is not positive");
    return 2.0 / std::sqrt(det);
}

double optimal_fidelity_bound(const CovarianceMatrix& sigma) {
    require_two_mode(sigma, "optimal_fidelity_bound");
    require_physical(sigma, "optimal_fidelity_bound");
    return 1.0 / (1.0 + entanglement_nu(sigma));
}

}  // namespace cvtele
