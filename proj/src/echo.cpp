#include "qecho/echo.hpp"

#include <limits>

namespace qecho {

template <class Scalar>
OverlapDistribution overlap_distribution(const Spectrum<Scalar>& final_states,
                                         const Vector<Scalar>& initial_state) {
  if (final_states.dim() != initial_state.size())
    throw std::invalid_argument("overlap_distribution: dimension mismatch");
  const double nrm = initial_state.norm();
  if (std::abs(nrm - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "overlap_distribution: initial state not normalized, ||psi0|| = "
        << nrm;
    throw std::invalid_argument(msg.str());
  }
  OverlapDistribution dist;
  dist.energies = final_states.eigenvalues;
  Vector<Scalar> amps = final_states.eigenvectors.adjoint() * initial_state;
  dist.amplitudes = amps.template cast<Complex>();
  dist.weights = dist.amplitudes.cwiseAbs2();
  return dist;
}

template OverlapDistribution overlap_distribution<double>(
    const Spectrum<double>&, const Vector<double>&);
template OverlapDistribution overlap_distribution<Complex>(
    const Spectrum<Complex>&, const Vector<Complex>&);

Complex loschmidt_amplitude(const OverlapDistribution& dist, double t) {
  if (!std::isfinite(t))
    throw std::invalid_argument("loschmidt_amplitude: non-finite time");
  Complex g(0.0, 0.0);
  for (Eigen::Index n = 0; n < dist.weights.size(); ++n)
    g += dist.weights(n) * std::polar(1.0, -dist.energies(n) * t);
  return g;
}

double time_average_echo(const OverlapDistribution& dist, double tau,
                         long n_samples) {
  if (!(tau > 0.0)) throw std::invalid_argument("time_average_echo: tau <= 0");
  if (n_samples < 1)
    throw std::invalid_argument("time_average_echo: n_samples < 1");
  const double dt = tau / static_cast<double>(n_samples);
  double acc = 0.0;
  for (long j = 0; j < n_samples; ++j) {
    const double t = (static_cast<double>(j) + 0.5) * dt;
    acc += std::norm(loschmidt_amplitude(dist, t));
  }
  return acc / static_cast<double>(n_samples);
}

double spectral_average(const OverlapDistribution& dist,
                        double degeneracy_tol) {
  const Eigen::Index n = dist.weights.size();
  if (n == 0) throw std::invalid_argument("spectral_average: empty distribution");
  double total = 0.0;
  double cluster = dist.weights(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    if (dist.energies(i) - dist.energies(i - 1) <= degeneracy_tol) {
      cluster += dist.weights(i);
    } else {
      total += cluster * cluster;
      cluster = dist.weights(i);
    }
  }
  total += cluster * cluster;
  return total;
}

Rate rate_function(double echo_average, long sites) {
  if (sites < 1) throw std::invalid_argument("rate_function: sites < 1");
  if (echo_average > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "rate_function: echo average " << echo_average << " exceeds 1";
    throw std::invalid_argument(msg.str());
  }
  Rate r;
  if (echo_average <= 0.0) {
    r.value = -std::log(std::numeric_limits<double>::min()) /
              static_cast<double>(sites);
    r.underflow = true;
    return r;
  }
  r.value = -std::log(std::min(echo_average, 1.0)) / static_cast<double>(sites);
  if (r.value == 0.0) r.value = 0.0;  // never -0.0 in output files
  return r;
}

}  // namespace qecho
