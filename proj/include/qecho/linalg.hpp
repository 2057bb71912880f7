#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace qecho {

using Complex = std::complex<double>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascending,
/// eigenvectors orthonormal, column i paired with eigenvalue i. The phase of
/// each column is fixed so its largest-magnitude component is real positive.
template <class Scalar>
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Matrix<Scalar> eigenvectors;

  Eigen::Index dim() const { return eigenvalues.size(); }
};

/// Throws std::invalid_argument naming the worst (i,j) pair if
/// H(i,j) != conj(H(j,i)) beyond `tol` (absolute), or if H is empty.
template <class Scalar>
void check_hermitian(const Matrix<Scalar>& H, double tol = 1e-12);

/// Full eigendecomposition of a dense Hermitian matrix. Deterministic:
/// identical input gives bit-identical output.
template <class Scalar>
Spectrum<Scalar> eig_hermitian(const Matrix<Scalar>& H);

/// Coefficients of a 2x2 Hermitian matrix h0*I + x*sx + y*sy + z*sz
/// in the Pauli basis.
struct BlochVector {
  double h0 = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double magnitude() const { return std::hypot(x, y, z); }
};

/// Closed-form eigenpair of a two-level Hamiltonian. `degenerate` is set when
/// the gap 2|h| is at or below `gap_tol`; the eigenvectors are then an
/// arbitrary orthonormal pair and callers must apply their own degeneracy
/// handling.
struct TwoLevelEigen {
  double e_minus = 0.0;
  double e_plus = 0.0;
  Eigen::Vector2cd v_minus;
  Eigen::Vector2cd v_plus;
  bool degenerate = false;

  double gap() const { return e_plus - e_minus; }
};

/// Analytic eigenpair of h0*I + h.sigma: E = h0 -+ |h|. No iteration; agrees
/// with eig_hermitian on the assembled matrix to 1e-12. Eigenvector phases
/// follow the same convention as eig_hermitian.
TwoLevelEigen eig_two_level(const BlochVector& h, double gap_tol = 0.0);

/// Assembles the 2x2 matrix h0*I + h.sigma.
Eigen::Matrix2cd two_level_matrix(const BlochVector& h);

/// Integral of a periodic function over one period [a,b] by the n-point
/// midpoint rule: (b-a)/n * sum f(a + (m+1/2)(b-a)/n). Spectrally accurate
/// for smooth periodic integrands; never samples the interval endpoints.
/// Throws std::runtime_error carrying the abscissa on a non-finite sample.
template <class F>
double integrate_periodic(F&& f, double a, double b, int n) {
  if (n < 2) throw std::invalid_argument("integrate_periodic: need n >= 2");
  if (!(b > a)) throw std::invalid_argument("integrate_periodic: need b > a");
  const double h = (b - a) / n;
  double sum = 0.0;
  for (int m = 0; m < n; ++m) {
    const double k = a + (m + 0.5) * h;
    const double v = f(k);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrate_periodic: non-finite sample at k = " << k;
      throw std::runtime_error(msg.str());
    }
    sum += v;
  }
  return h * sum;
}

}  // namespace qecho
