#include "qecho/ising.hpp"

#include <numbers>

namespace qecho {

namespace {
constexpr double kPi = std::numbers::pi;

double mode_log_factor(const TwoLevelEigen& initial,
                       const TwoLevelEigen& final_states) {
  // log of sum_a |<phi_a|psi_->|^4 = log(1 - 2 p q), p + q = 1
  if (final_states.degenerate) return 0.0;  // one cluster: factor is exactly 1
  const double p = std::norm(final_states.v_minus.dot(initial.v_minus));
  const double q = std::norm(final_states.v_plus.dot(initial.v_minus));
  return std::log1p(-2.0 * p * q);
}
}  // namespace

void IsingParams::validate() const {
  if (!(exchange > 0.0)) throw std::invalid_argument("IsingParams: J <= 0");
  if (field < 0.0) throw std::invalid_argument("IsingParams: field < 0");
}

Complex ising_vk(const IsingParams& p, double k) {
  if (!std::isfinite(k)) throw std::invalid_argument("ising_vk: non-finite k");
  return p.field - p.exchange * std::exp(Complex(0.0, -k));
}

BlochVector ising_bloch(const IsingParams& p, double k) {
  BlochVector b;
  b.y = -p.exchange * std::sin(k);
  b.z = p.field - p.exchange * std::cos(k);
  return b;
}

int winding_number(const IsingParams& p, int n_k) {
  p.validate();
  if (n_k < 4) throw std::invalid_argument("winding_number: n_k < 4");
  if (std::abs(p.field - p.exchange) < 1e-12)
    throw std::invalid_argument("winding_number: gapless point h = J");
  const double step = 2.0 * kPi / n_k;
  Complex prev = ising_vk(p, -kPi + 0.5 * step);
  double accumulated = 0.0;
  for (int m = 1; m <= n_k; ++m) {
    const double k = -kPi + (m % n_k + 0.5) * step;  // wraps to close the loop
    const Complex cur = ising_vk(p, k);
    if (std::abs(cur) == 0.0 || std::abs(prev) == 0.0)
      throw std::runtime_error("winding_number: V(k) vanished on the grid");
    accumulated += std::arg(cur / prev);
    prev = cur;
  }
  const double w = -accumulated / (2.0 * kPi);
  const long r = std::lround(w);
  if (std::abs(w - double(r)) > 1e-6)
    throw std::runtime_error("winding_number: accumulated phase not integer");
  return static_cast<int>(r);
}

double ising_rate_discrete(double field_initial, double field_final,
                           long sites, double exchange, double degeneracy_tol) {
  if (sites < 4 || sites % 2 != 0)
    throw std::invalid_argument("ising_rate_discrete: sites must be even, >= 4");
  const IsingParams pi_{exchange, field_initial};
  const IsingParams pf_{exchange, field_final};
  pi_.validate();
  pf_.validate();
  double sum = 0.0;
  for (long m = 0; m < sites; ++m) {
    const double k = 2.0 * kPi * (double(m) + 0.5) / double(sites) - kPi;
    const TwoLevelEigen ei = eig_two_level(ising_bloch(pi_, k), degeneracy_tol);
    if (ei.degenerate) {
      std::ostringstream msg;
      msg << "ising_rate_discrete: initial Hamiltonian gapless at k = " << k;
      throw std::runtime_error(msg.str());
    }
    sum += mode_log_factor(ei, eig_two_level(ising_bloch(pf_, k), degeneracy_tol));
  }
  return -sum / double(sites);
}

double ising_rate_closed(double field_initial, double field_final, int n_k) {
  if (n_k < 64) throw std::invalid_argument("ising_rate_closed: n_k < 64");
  const double hi = field_initial;
  const double hf = field_final;
  const auto integrand = [&](double k) {
    const double num = (hf - hi) * std::sin(k);
    const double den = 1.0 + hi * hf - (hi + hf) * std::cos(k);
    const double scale = den * den + num * num;
    if (scale == 0.0) {
      std::ostringstream msg;
      msg << "ising_rate_closed: indeterminate integrand at k = " << k;
      throw std::runtime_error(msg.str());
    }
    const double cos2 = den * den / scale;
    return std::log1p(0.5 * (cos2 - 1.0));  // log((1 + cos^2)/2)
  };
  return -integrate_periodic(integrand, -kPi, kPi, n_k) / (2.0 * kPi);
}

}  // namespace qecho
