#pragma once

#include "qecho/echo.hpp"
#include "qecho/linalg.hpp"

namespace qecho {

/// Quasiperiodic chain parameters: L sites, hopping J, incommensurate
/// potential of strength Delta and irrational modulation alpha.
struct AAParams {
  long sites = 2;                          // L
  double hopping = 1.0;                    // J
  double potential = 0.0;                  // Delta
  double modulation = 0.6180339887498949;  // alpha, (sqrt(5)-1)/2

  void validate() const;
};

/// Real-space single-particle Hamiltonian: open boundary hopping -J between
/// neighbors, on-site potential Delta*cos(2*pi*alpha*j) with 1-based site j.
Eigen::MatrixXd build_aa_hamiltonian(const AAParams& p);

/// Normalized eigenvector of the lowest eigenvalue. Throws when the lowest
/// level is degenerate within 1e-9 (initial state ill-defined).
Eigen::VectorXd aa_ground_state(const AAParams& p);

struct QuenchAverage {
  double echo_average = 1.0;  // long-time average of the echo
  double rate = 0.0;          // -log(echo_average)/L
  bool rate_underflow = false;
};

/// Sudden quench of the potential strength: ground state at p_initial,
/// spectrum at potential_final, spectral long-time average and rate.
QuenchAverage aa_quench_average(const AAParams& p_initial,
                                double potential_final,
                                double degeneracy_tol = 1e-9);

/// H(Delta) = h0 + Delta*h1 with h1 the on-site cosine profile.
struct PerturbationSplit {
  Eigen::MatrixXd h0;
  Eigen::MatrixXd h1;
  double lambda = 0.0;
};

PerturbationSplit aa_perturbation_split(const AAParams& p);

}  // namespace qecho
