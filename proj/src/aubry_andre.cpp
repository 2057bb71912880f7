#include "qecho/aubry_andre.hpp"

#include <numbers>

namespace qecho {

void AAParams::validate() const {
  if (sites < 2) throw std::invalid_argument("AAParams: need at least 2 sites");
  if (!(hopping > 0.0)) throw std::invalid_argument("AAParams: hopping <= 0");
  if (potential < 0.0) throw std::invalid_argument("AAParams: potential < 0");
  if (!(modulation > 0.0 && modulation < 1.0))
    throw std::invalid_argument("AAParams: modulation outside (0,1)");
}

Eigen::MatrixXd build_aa_hamiltonian(const AAParams& p) {
  p.validate();
  const long n = p.sites;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (long j = 0; j + 1 < n; ++j) {
    h(j, j + 1) = -p.hopping;
    h(j + 1, j) = -p.hopping;
  }
  for (long j = 0; j < n; ++j) {
    // site index is 1-based in the potential phase
    h(j, j) = p.potential *
              std::cos(2.0 * std::numbers::pi * p.modulation * double(j + 1));
  }
  return h;
}

Eigen::VectorXd aa_ground_state(const AAParams& p) {
  const Spectrum<double> spec = eig_hermitian<double>(build_aa_hamiltonian(p));
  if (spec.dim() > 1 &&
      spec.eigenvalues(1) - spec.eigenvalues(0) < 1e-9) {
    std::ostringstream msg;
    msg << "aa_ground_state: lowest level degenerate, gap = "
        << spec.eigenvalues(1) - spec.eigenvalues(0);
    throw std::runtime_error(msg.str());
  }
  return spec.eigenvectors.col(0);
}

QuenchAverage aa_quench_average(const AAParams& p_initial,
                                double potential_final,
                                double degeneracy_tol) {
  const Eigen::VectorXd psi0 = aa_ground_state(p_initial);
  AAParams p_final = p_initial;
  p_final.potential = potential_final;
  const Spectrum<double> spec =
      eig_hermitian<double>(build_aa_hamiltonian(p_final));
  const OverlapDistribution dist = overlap_distribution<double>(spec, psi0);
  QuenchAverage q;
  q.echo_average = spectral_average(dist, degeneracy_tol);
  const Rate r = rate_function(q.echo_average, p_initial.sites);
  q.rate = r.value;
  q.rate_underflow = r.underflow;
  return q;
}

PerturbationSplit aa_perturbation_split(const AAParams& p) {
  p.validate();
  PerturbationSplit split;
  AAParams p0 = p;
  p0.potential = 0.0;
  split.h0 = build_aa_hamiltonian(p0);
  split.h1 = Eigen::MatrixXd::Zero(p.sites, p.sites);
  for (long j = 0; j < p.sites; ++j)
    split.h1(j, j) =
        std::cos(2.0 * std::numbers::pi * p.modulation * double(j + 1));
  split.lambda = p.potential;
  return split;
}

}  // namespace qecho
