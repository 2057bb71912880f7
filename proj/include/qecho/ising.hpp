#pragma once

#include "qecho/linalg.hpp"

namespace qecho {

/// Transverse-field Ising chain, momentum-space form. Fields in units of the
/// exchange J.
struct IsingParams {
  double exchange = 1.0;  // J
  double field = 0.0;     // h

  void validate() const;
};

/// V(k) = h - J exp(-ik); |V| is half the mode gap and its winding counts the
/// topological phase.
Complex ising_vk(const IsingParams& p, double k);

/// Bogoliubov-de Gennes Bloch vector of the k-mode:
/// h0 = 0, x = 0, y = -J sin k, z = h - J cos k.
BlochVector ising_bloch(const IsingParams& p, double k);

/// Winding of V(k) around the origin, from accumulated phase differences on
/// an n_k midpoint grid. 1 for h < J, 0 for h > J. Throws for gapless input
/// |h - J| < 1e-12.
int winding_number(const IsingParams& p, int n_k);

/// Rate function of the long-time echo average for the quench h_i -> h_f on a
/// finite chain of L sites (even, >= 4): mode-by-mode two-level overlaps on
/// the grid k_m = 2*pi*(m+1/2)/L - pi, summed in ascending k order.
double ising_rate_discrete(double field_initial, double field_final,
                           long sites, double exchange = 1.0,
                           double degeneracy_tol = 1e-9);

/// Thermodynamic-limit rate function: the closed-form momentum integral with
/// cos^2(theta) = D^2/(D^2+N^2), N = (h_f-h_i) sin k,
/// D = 1 + h_i h_f - (h_i+h_f) cos k, evaluated by the n_k-point midpoint
/// rule (n_k >= 64). Units of J.
double ising_rate_closed(double field_initial, double field_final, int n_k);

}  // namespace qecho
