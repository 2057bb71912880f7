#include "qecho/fidelity.hpp"

#include "qecho/aubry_andre.hpp"

namespace qecho {

namespace {

template <class Derived>
void check_normalized(const Eigen::MatrixBase<Derived>& v, const char* who) {
  const double nrm = v.norm();
  if (std::abs(nrm - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << who << ": state not normalized, norm = " << nrm;
    throw std::invalid_argument(msg.str());
  }
}

template <class Scalar>
double ground_coupling_sum(const Spectrum<Scalar>& spec,
                           const Matrix<Scalar>& h1, const char* who) {
  const Eigen::Index n = spec.dim();
  if (n < 2) throw std::invalid_argument(std::string(who) + ": dim < 2");
  if (h1.rows() != n || h1.cols() != n)
    throw std::invalid_argument(std::string(who) + ": h1 dimension mismatch");
  if (spec.eigenvalues(1) - spec.eigenvalues(0) <= 1e-10)
    throw std::runtime_error(std::string(who) +
                             ": degenerate ground state, perturbation sum "
                             "undefined");
  const Vector<Scalar> coupled =
      spec.eigenvectors.adjoint() * (h1 * spec.eigenvectors.col(0));
  double sum = 0.0;
  for (Eigen::Index m = 1; m < n; ++m) {
    const double gap = spec.eigenvalues(0) - spec.eigenvalues(m);
    sum += std::norm(coupled(m)) / (gap * gap);
  }
  return sum;
}

}  // namespace

double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("fidelity: dimension mismatch");
  check_normalized(a, "fidelity");
  check_normalized(b, "fidelity");
  return std::abs(a.dot(b));
}

double fidelity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("fidelity: dimension mismatch");
  check_normalized(a, "fidelity");
  check_normalized(b, "fidelity");
  return std::abs(a.dot(b));
}

template <class Scalar>
double fidelity_susceptibility_pert(const Spectrum<Scalar>& spec,
                                    const Matrix<Scalar>& h1) {
  return ground_coupling_sum(spec, h1, "fidelity_susceptibility_pert");
}

template <class Scalar>
double chi_delta_pert(const Spectrum<Scalar>& spec, const Matrix<Scalar>& h1) {
  return 4.0 * ground_coupling_sum(spec, h1, "chi_delta_pert");
}

template double fidelity_susceptibility_pert<double>(const Spectrum<double>&,
                                                     const Matrix<double>&);
template double fidelity_susceptibility_pert<Complex>(const Spectrum<Complex>&,
                                                      const Matrix<Complex>&);
template double chi_delta_pert<double>(const Spectrum<double>&,
                                       const Matrix<double>&);
template double chi_delta_pert<Complex>(const Spectrum<Complex>&,
                                        const Matrix<Complex>&);

double chi_delta_numeric(
    const std::function<double(double, double)>& echo_average, double lambda,
    double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("chi_delta_numeric: delta <= 0");
  const double lbar = echo_average(lambda, lambda + delta);
  if (lbar > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "chi_delta_numeric: echo average " << lbar
        << " exceeds 1, inconsistent input";
    throw std::runtime_error(msg.str());
  }
  return 2.0 * (1.0 - lbar) / (delta * delta);
}

Eigen::Matrix2cd haldane_parameter_derivative(const HaldaneParams& p,
                                              HaldaneQuench which,
                                              const Eigen::Vector2d& k) {
  Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
  if (which == HaldaneQuench::mass) {
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    return d;
  }
  const auto& geo = HoneycombGeometry::standard();
  double sp = 0.0, sm = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double kn = k.dot(geo.nnn[j]);
    sp += std::sin(kn + p.phase);
    sm += std::sin(kn - p.phase);
  }
  d(0, 0) = 2.0 * p.t2 * sp;
  d(1, 1) = -2.0 * p.t2 * sm;
  return d;
}

SusceptibilityPair haldane_susceptibility(const HaldaneParams& p,
                                          HaldaneQuench which, double delta) {
  p.validate();
  if (!(delta > 0.0))
    throw std::invalid_argument("haldane_susceptibility: delta <= 0");
  const auto& geo = HoneycombGeometry::standard();
  const int n = p.grid;
  HaldaneParams shifted = p;
  if (which == HaldaneQuench::mass)
    shifted.mass += delta;
  else
    shifted.phase += delta;

  double coupling_sum = 0.0;  // sum_k |<phi_+|dH|phi_->|^2 / gap^2
  double log_echo = 0.0;      // log of the product-state echo average
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const Eigen::Vector2d k = ((double(col) + 0.5) / n) * geo.b1 +
                                ((double(row) + 0.5) / n) * geo.b2;
      const TwoLevelEigen e0 = eig_two_level(haldane_bloch_vector(p, k));
      if (e0.gap() <= 1e-10) {
        std::ostringstream msg;
        msg << "haldane_susceptibility: gapless mode at k = (" << k.x() << ", "
            << k.y() << ")";
        throw std::runtime_error(msg.str());
      }
      const Eigen::Matrix2cd dh = haldane_parameter_derivative(p, which, k);
      const Complex w = e0.v_plus.dot(dh * e0.v_minus);
      coupling_sum += std::norm(w) / (e0.gap() * e0.gap());

      const TwoLevelEigen ef = eig_two_level(haldane_bloch_vector(shifted, k));
      const double pw = std::norm(ef.v_minus.dot(e0.v_minus));
      const double qw = std::norm(ef.v_plus.dot(e0.v_minus));
      log_echo += std::log1p(-2.0 * pw * qw);
    }
  }
  SusceptibilityPair out;
  const double modes = double(n) * double(n);
  // 2 (1 - exp(log_echo))/delta^2, kept accurate for tiny quenches
  out.chi_delta = -2.0 * std::expm1(log_echo) / (delta * delta) / modes;
  out.four_chi_f = 4.0 * coupling_sum / modes;
  return out;
}

SusceptibilityPair aa_susceptibility(const AAParams& p, double delta) {
  p.validate();
  if (!(delta > 0.0))
    throw std::invalid_argument("aa_susceptibility: delta <= 0");
  const PerturbationSplit split = aa_perturbation_split(p);
  const Spectrum<double> spec =
      eig_hermitian<double>(build_aa_hamiltonian(p));
  SusceptibilityPair out;
  out.four_chi_f = 4.0 * fidelity_susceptibility_pert<double>(spec, split.h1);
  const auto echo = [&p](double a, double b) {
    AAParams pi = p;
    pi.potential = a;
    return aa_quench_average(pi, b).echo_average;
  };
  out.chi_delta = chi_delta_numeric(echo, p.potential, delta);
  return out;
}

}  // namespace qecho
