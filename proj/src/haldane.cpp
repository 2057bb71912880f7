#include "qecho/haldane.hpp"

#include <numbers>
#include <vector>

namespace qecho {

namespace {
constexpr double kPi = std::numbers::pi;
}

const HoneycombGeometry& HoneycombGeometry::standard() {
  static const HoneycombGeometry geo = [] {
    HoneycombGeometry g;
    const double s3 = std::sqrt(3.0);
    g.nn = {Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(-0.5 * s3, -0.5),
            Eigen::Vector2d(0.5 * s3, -0.5)};
    g.nnn = {Eigen::Vector2d(s3, 0.0), Eigen::Vector2d(-0.5 * s3, 1.5),
             Eigen::Vector2d(-0.5 * s3, -1.5)};
    // reciprocal basis of a1 = nnn[0], a2 = nnn[1]
    Eigen::Matrix2d a;
    a.row(0) = g.nnn[0];
    a.row(1) = g.nnn[1];
    const Eigen::Matrix2d b = 2.0 * kPi * a.inverse();
    g.b1 = b.col(0);
    g.b2 = b.col(1);
    return g;
  }();
  return geo;
}

void HaldaneParams::validate() const {
  if (!(t1 > 0.0)) throw std::invalid_argument("HaldaneParams: t1 <= 0");
  if (!(t2 > 0.0)) throw std::invalid_argument("HaldaneParams: t2 <= 0");
  if (grid < 4) throw std::invalid_argument("HaldaneParams: grid < 4");
}

BlochVector haldane_bloch_vector(const HaldaneParams& p,
                                 const Eigen::Vector2d& k) {
  const auto& geo = HoneycombGeometry::standard();
  double ce = 0.0, se = 0.0, cn = 0.0, sn = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double ke = k.dot(geo.nn[j]);
    ce += std::cos(ke);
    se += std::sin(ke);
    const double kn = k.dot(geo.nnn[j]);
    cn += std::cos(kn);
    sn += std::sin(kn);
  }
  BlochVector b;
  b.h0 = -2.0 * p.t2 * std::cos(p.phase) * cn;
  b.x = -p.t1 * ce;
  b.y = -p.t1 * se;
  b.z = p.mass + 2.0 * p.t2 * std::sin(p.phase) * sn;
  return b;
}

Eigen::Matrix2cd haldane_bloch(const HaldaneParams& p,
                               const Eigen::Vector2d& k) {
  return two_level_matrix(haldane_bloch_vector(p, k));
}

int chern_number(const HaldaneParams& p) {
  p.validate();
  const auto& geo = HoneycombGeometry::standard();
  const int n = p.grid;

  // Lower-band eigenvectors in the periodic gauge: the B component carries
  // exp(-i k.e1) so the assignment is exactly periodic across the zone.
  std::vector<Eigen::Vector2cd> lower(static_cast<size_t>(n) * n);
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const Eigen::Vector2d k =
          (double(col) / n) * geo.b1 + (double(row) / n) * geo.b2;
      const BlochVector b = haldane_bloch_vector(p, k);
      if (b.magnitude() <= 1e-10) {
        std::ostringstream msg;
        msg << "chern_number: gapless grid point k = (" << k.x() << ", "
            << k.y() << ")";
        throw std::runtime_error(msg.str());
      }
      Eigen::Vector2cd v = eig_two_level(b).v_minus;
      v(1) *= std::exp(Complex(0.0, -k.dot(geo.nn[0])));
      lower[size_t(row) * n + col] = v;
    }
  }

  const auto link = [&](int row, int col, int drow, int dcol) {
    const Eigen::Vector2cd& a = lower[size_t(row) * n + col];
    const Eigen::Vector2cd& b =
        lower[size_t((row + drow) % n) * n + (col + dcol) % n];
    const Complex u = a.dot(b);
    if (std::abs(u) < 1e-12)
      throw std::runtime_error("chern_number: vanishing link overlap");
    return u / std::abs(u);
  };

  double flux = 0.0;
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const Complex plaquette = link(row, col, 0, 1) *
                                link(row, (col + 1) % n, 1, 0) /
                                (link(row + 1 == n ? 0 : row + 1, col, 0, 1) *
                                 link(row, col, 1, 0));
      flux += std::arg(plaquette);
    }
  }
  const double c = flux / (2.0 * kPi);
  const long r = std::lround(c);
  if (std::abs(c - double(r)) > 1e-6)
    throw std::runtime_error("chern_number: plaquette sum not integer");
  return static_cast<int>(r);
}

double haldane_rate(const HaldaneParams& p_initial,
                    const HaldaneParams& p_final, double degeneracy_tol) {
  p_initial.validate();
  p_final.validate();
  if (p_initial.grid != p_final.grid)
    throw std::invalid_argument("haldane_rate: grids differ");
  const auto& geo = HoneycombGeometry::standard();
  const int n = p_initial.grid;
  double sum = 0.0;
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const Eigen::Vector2d k = ((double(col) + 0.5) / n) * geo.b1 +
                                ((double(row) + 0.5) / n) * geo.b2;
      const TwoLevelEigen ei =
          eig_two_level(haldane_bloch_vector(p_initial, k), degeneracy_tol);
      if (ei.degenerate) {
        std::ostringstream msg;
        msg << "haldane_rate: initial Hamiltonian gapless at k = (" << k.x()
            << ", " << k.y() << ")";
        throw std::runtime_error(msg.str());
      }
      const TwoLevelEigen ef =
          eig_two_level(haldane_bloch_vector(p_final, k), degeneracy_tol);
      if (ef.degenerate) continue;  // one cluster, factor exactly 1
      const double pw = std::norm(ef.v_minus.dot(ei.v_minus));
      const double qw = std::norm(ef.v_plus.dot(ei.v_minus));
      sum += std::log1p(-2.0 * pw * qw);
    }
  }
  return -sum / (double(n) * double(n));
}

double chi_lambda(double eta_minus, double eta_center, double eta_plus,
                  double step) {
  if (!(step > 0.0)) throw std::invalid_argument("chi_lambda: step <= 0");
  return -(eta_plus - 2.0 * eta_center + eta_minus) / (step * step);
}

}  // namespace qecho
