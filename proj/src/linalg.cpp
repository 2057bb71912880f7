#include "qecho/linalg.hpp"

namespace qecho {

namespace {

// Largest-magnitude component made real and positive. Ties resolved by the
// first index attaining the maximum.
template <class Scalar>
void fix_column_phase(Eigen::Ref<Vector<Scalar>> v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best == 0.0) return;
  if constexpr (std::is_same_v<Scalar, double>) {
    if (v(imax) < 0.0) v = -v;
  } else {
    v *= std::conj(v(imax)) / std::abs(v(imax));
  }
}

void fix_column_phase2(Eigen::Vector2cd& v) {
  const Eigen::Index imax = std::abs(v(0)) >= std::abs(v(1)) ? 0 : 1;
  const double a = std::abs(v(imax));
  if (a == 0.0) return;
  v *= std::conj(v(imax)) / a;
}

bool is_tridiagonal(const Matrix<double>& H) {
  const Eigen::Index n = H.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 2; i < n; ++i)
      if (H(i, j) != 0.0 || H(j, i) != 0.0) return false;
  return true;
}

}  // namespace

template <class Scalar>
void check_hermitian(const Matrix<Scalar>& H, double tol) {
  if (H.rows() == 0 || H.cols() == 0)
    throw std::invalid_argument("check_hermitian: empty matrix");
  if (H.rows() != H.cols())
    throw std::invalid_argument("check_hermitian: matrix not square");
  double worst = 0.0;
  Eigen::Index wi = 0, wj = 0;
  for (Eigen::Index j = 0; j < H.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      double dev;
      if constexpr (std::is_same_v<Scalar, double>) {
        dev = std::abs(H(i, j) - H(j, i));
      } else {
        dev = std::abs(H(i, j) - std::conj(H(j, i)));
      }
      if (dev > worst) {
        worst = dev;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > tol) {
    std::ostringstream msg;
    msg << "check_hermitian: H(" << wi << "," << wj << ") deviates from conj(H("
        << wj << "," << wi << ")) by " << worst << " (tol " << tol << ")";
    throw std::invalid_argument(msg.str());
  }
}

template <class Scalar>
Spectrum<Scalar> eig_hermitian(const Matrix<Scalar>& H) {
  check_hermitian(H);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver;
  if constexpr (std::is_same_v<Scalar, double>) {
    // Tight-binding chains are tridiagonal; skip the Householder stage.
    if (H.rows() > 2 && is_tridiagonal(H)) {
      Eigen::VectorXd sub(H.rows() - 1);
      for (Eigen::Index i = 0; i + 1 < H.rows(); ++i) sub(i) = H(i + 1, i);
      solver.computeFromTridiagonal(H.diagonal(), sub);
    } else {
      solver.compute(H);
    }
  } else {
    solver.compute(H);
  }
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver did not converge");
  Spectrum<Scalar> out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c)
    fix_column_phase<Scalar>(out.eigenvectors.col(c));
  return out;
}

template void check_hermitian<double>(const Matrix<double>&, double);
template void check_hermitian<Complex>(const Matrix<Complex>&, double);
template Spectrum<double> eig_hermitian<double>(const Matrix<double>&);
template Spectrum<Complex> eig_hermitian<Complex>(const Matrix<Complex>&);

Eigen::Matrix2cd two_level_matrix(const BlochVector& h) {
  Eigen::Matrix2cd m;
  m(0, 0) = Complex(h.h0 + h.z, 0.0);
  m(0, 1) = Complex(h.x, -h.y);
  m(1, 0) = Complex(h.x, h.y);
  m(1, 1) = Complex(h.h0 - h.z, 0.0);
  return m;
}

TwoLevelEigen eig_two_level(const BlochVector& h, double gap_tol) {
  TwoLevelEigen out;
  const double m = h.magnitude();
  out.e_minus = h.h0 - m;
  out.e_plus = h.h0 + m;
  if (2.0 * m <= gap_tol || m == 0.0) {
    out.degenerate = true;
    out.v_minus = Eigen::Vector2cd(1.0, 0.0);
    out.v_plus = Eigen::Vector2cd(0.0, 1.0);
    return out;
  }
  const Complex perp(h.x, h.y);  // x + iy
  if (h.z >= 0.0) {
    // norms 2m(m+z): well conditioned for z >= 0
    out.v_minus = Eigen::Vector2cd(-std::conj(perp), Complex(h.z + m, 0.0));
    out.v_plus = Eigen::Vector2cd(Complex(m + h.z, 0.0), perp);
  } else {
    out.v_minus = Eigen::Vector2cd(Complex(m - h.z, 0.0), -perp);
    out.v_plus = Eigen::Vector2cd(std::conj(perp), Complex(m - h.z, 0.0));
  }
  out.v_minus.normalize();
  out.v_plus.normalize();
  fix_column_phase2(out.v_minus);
  fix_column_phase2(out.v_plus);
  return out;
}

}  // namespace qecho
