#pragma once

#include <array>

#include "qecho/linalg.hpp"

namespace qecho {

/// Honeycomb displacement sets (lattice constant 1) and the reciprocal basis
/// of the triangular Bravais lattice spanned by the first two
/// next-nearest-neighbor vectors.
struct HoneycombGeometry {
  std::array<Eigen::Vector2d, 3> nn;   // A -> B displacements
  std::array<Eigen::Vector2d, 3> nnn;  // A -> A displacements
  Eigen::Vector2d b1, b2;              // b_i . a_j = 2 pi delta_ij

  static const HoneycombGeometry& standard();
};

/// Haldane honeycomb parameters: sublattice on-site energy +-mass, NN hopping
/// t1, NNN hopping t2 with phase, and an N x N Brillouin-zone grid
/// (total sites L = 2 N^2).
struct HaldaneParams {
  double mass = 0.0;   // M
  double t1 = 4.0;
  double t2 = 1.0;
  double phase = 0.0;  // phi
  int grid = 64;       // N

  long site_count() const { return 2L * grid * grid; }
  void validate() const;
};

/// Bloch vector at wavevector k:
///   x - i y = -t1 sum_j exp(-i k.e_j)
///   h0      = -2 t2 cos(phase) sum_j cos(k.nu_j)
///   z       = mass + 2 t2 sin(phase) sum_j sin(k.nu_j)
BlochVector haldane_bloch_vector(const HaldaneParams& p,
                                 const Eigen::Vector2d& k);

/// The 2x2 Bloch Hamiltonian assembled from haldane_bloch_vector.
Eigen::Matrix2cd haldane_bloch(const HaldaneParams& p,
                               const Eigen::Vector2d& k);

/// Chern number of the lower band by the lattice field-strength method on the
/// N x N grid over the (b1, b2) parallelogram: plaquette phases of normalized
/// link overlaps in the periodic gauge, integer by construction. Throws if
/// any grid point is gapless (|h| <= 1e-10), naming the wavevector.
int chern_number(const HaldaneParams& p);

/// Rate function of the long-time echo average for the quench
/// p_initial -> p_final: minus the mean over the N x N midpoint grid of
/// log sum_a |<phi_a(k)|psi_-(k)>|^4. Final-state modes whose gap falls at or
/// below degeneracy_tol count as a single cluster (factor one); a degenerate
/// initial mode is an error.
double haldane_rate(const HaldaneParams& p_initial,
                    const HaldaneParams& p_final,
                    double degeneracy_tol = 1e-9);

/// Central second difference -(eta_plus - 2 eta_center + eta_minus)/step^2;
/// exact for quadratics.
double chi_lambda(double eta_minus, double eta_center, double eta_plus,
                  double step);

}  // namespace qecho
