#pragma once

#include <functional>

#include "qecho/haldane.hpp"
#include "qecho/linalg.hpp"

namespace qecho {

/// Ground-state fidelity |<a|b>| of two normalized states.
double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);
double fidelity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Second-order fidelity susceptibility from the perturbation sum
/// sum_{m>0} |<psi_m|h1|psi_0>|^2 / (E_0 - E_m)^2. Throws when the ground
/// state is degenerate (gap <= 1e-10).
template <class Scalar>
double fidelity_susceptibility_pert(const Spectrum<Scalar>& spec,
                                    const Matrix<Scalar>& h1);

/// Curvature of the small-quench echo average from the same perturbation
/// data: 4 sum_{m>0} |<psi_m|h1|psi_0>|^2 / (E_0 - E_m)^2.
template <class Scalar>
double chi_delta_pert(const Spectrum<Scalar>& spec, const Matrix<Scalar>& h1);

/// Curvature extracted from one evaluated quench: 2 (1 - Lbar_delta)/delta^2,
/// using Lbar(lambda -> lambda) = 1 exactly. `echo_average(a, b)` must return
/// the long-time echo average for the quench a -> b. Throws an
/// internal-consistency error when the returned average exceeds 1 + 1e-12.
double chi_delta_numeric(
    const std::function<double(double, double)>& echo_average, double lambda,
    double delta);

enum class HaldaneQuench { mass, phase };

/// Both susceptibility routes for a small Haldane quench, reported as
/// per-mode averages over the N x N grid: `chi_delta` from the finite
/// difference of the product-state echo average, `four_chi_f` from the
/// perturbation sum with the analytic parameter derivative of the Bloch
/// Hamiltonian.
struct SusceptibilityPair {
  double chi_delta = 0.0;
  double four_chi_f = 0.0;
};

SusceptibilityPair haldane_susceptibility(const HaldaneParams& p,
                                          HaldaneQuench which, double delta);

/// Analytic derivative of the Haldane Bloch Hamiltonian with respect to the
/// quench parameter, as a 2x2 diagonal (mass: diag(1,-1); phase: the
/// sublattice-resolved flux derivative).
Eigen::Matrix2cd haldane_parameter_derivative(const HaldaneParams& p,
                                              HaldaneQuench which,
                                              const Eigen::Vector2d& k);

struct AAParams;  // aubry_andre.hpp

/// Same pair for the quasiperiodic chain (single system, no mode average).
SusceptibilityPair aa_susceptibility(const AAParams& p, double delta);

}  // namespace qecho
