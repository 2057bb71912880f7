#pragma once

#include "qecho/linalg.hpp"

namespace qecho {

/// Decomposition of an initial state over a post-quench eigenbasis:
/// weights p_n = |<psi_n|Psi(0)>|^2 paired with the eigenvalues E_n.
/// Completeness gives sum p_n = 1.
struct OverlapDistribution {
  Eigen::VectorXd energies;     // ascending
  Eigen::VectorXd weights;      // p_n >= 0
  Eigen::VectorXcd amplitudes;  // <psi_n|Psi(0)>
};

/// Expands a normalized state over the eigenbasis of `final_states`.
/// Throws std::invalid_argument reporting ||psi0|| when it is not normalized
/// to 1e-10.
template <class Scalar>
OverlapDistribution overlap_distribution(const Spectrum<Scalar>& final_states,
                                         const Vector<Scalar>& initial_state);

/// Return amplitude G(t) = sum_n p_n exp(-i E_n t); G(0) = 1.
Complex loschmidt_amplitude(const OverlapDistribution& dist, double t);

/// Finite-window average (1/tau) int_0^tau |G(t)|^2 dt by midpoint sampling.
/// Converges to spectral_average as tau grows (nondegenerate spectra).
double time_average_echo(const OverlapDistribution& dist, double tau,
                         long n_samples);

/// Infinite-time average of |G(t)|^2. Eigenvalues whose consecutive gaps are
/// at or below `degeneracy_tol` are clustered; the result is
/// sum over clusters of (cluster weight)^2, which reduces to sum p_n^2 for a
/// nondegenerate spectrum. Always in (0, 1].
double spectral_average(const OverlapDistribution& dist,
                        double degeneracy_tol = 1e-9);

/// Rate value with an underflow marker: when the echo average vanishes
/// numerically the value is computed from the smallest positive double and
/// `underflow` is set.
struct Rate {
  double value = 0.0;
  bool underflow = false;
};

/// Intensive rate function -log(echo_average)/sites >= 0.
Rate rate_function(double echo_average, long sites);

}  // namespace qecho
