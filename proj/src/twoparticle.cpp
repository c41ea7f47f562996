#include "tunnelstat/twoparticle.hpp"

#include <cmath>
#include <sstream>

#include "tunnelstat/errors.hpp"

namespace tunnelstat {

SymmetrizedPair make_pair(Wavefunction psi_a, Wavefunction psi_b, Exchange exchange) {
  const cplx s = inner_product(psi_a, psi_b);
  const double s2 = std::norm(s);
  const int sign = sign_of(exchange);
  if (exchange == Exchange::fermion && 1.0 - s2 <= kPauliGuard) {
    std::ostringstream msg;
    msg << "antisymmetrized state vanishes: |<A|B>|^2 = " << s2
        << " (identical single-particle states)";
    throw PauliDegeneracy(msg.str());
  }
  const double c = 1.0 / std::sqrt(2.0 * (1.0 + sign * s2));
  return SymmetrizedPair(std::move(psi_a), std::move(psi_b), exchange, s, c);
}

double joint_density(const SymmetrizedPair& pair, std::size_t i1, std::size_t i2) {
  const cplx a1 = pair.psi_a().amplitudes()[i1];
  const cplx a2 = pair.psi_a().amplitudes()[i2];
  const cplx b1 = pair.psi_b().amplitudes()[i1];
  const cplx b2 = pair.psi_b().amplitudes()[i2];
  const double direct = std::norm(a1) * std::norm(b2) + std::norm(b1) * std::norm(a2);
  const double cross = 2.0 * std::real(std::conj(a1) * b1 * std::conj(std::conj(a2) * b2));
  const double c = pair.norm_const();
  return c * c * (direct + pair.sign() * cross);
}

namespace {

void check_sum_rule(const JointStats& st) {
  if (!(std::abs(st.sum_check - 1.0) <= 1e-6)) {
    std::ostringstream msg;
    msg << "quadrant probabilities sum to " << st.sum_check << ", not 1";
    throw ConsistencyError(msg.str());
  }
}

}  // namespace

JointStats joint_probabilities(const SymmetrizedPair& pair, double boundary) {
  const auto& A = pair.psi_a();
  const auto& B = pair.psi_b();
  JointStats st;
  st.t_a = probability_on_side(A, Side::positive, boundary);
  st.r_a = probability_on_side(A, Side::negative, boundary);
  st.t_b = probability_on_side(B, Side::positive, boundary);
  st.r_b = probability_on_side(B, Side::negative, boundary);
  st.i_plus = half_line_overlap(A, B, Side::positive, boundary);
  st.i_minus = half_line_overlap(A, B, Side::negative, boundary);
  st.overlap = pair.overlap();
  if (!(std::abs(st.i_plus + st.i_minus - st.overlap) <= 1e-12)) {
    throw ConsistencyError("half-line overlaps do not partition <A|B>");
  }

  const double c2 = pair.norm_const() * pair.norm_const();
  const double sign = pair.sign();
  st.p02 = c2 * (2.0 * st.t_a * st.t_b + sign * 2.0 * std::norm(st.i_plus));
  st.p20 = c2 * (2.0 * st.r_a * st.r_b + sign * 2.0 * std::norm(st.i_minus));
  st.p11 = c2 * (2.0 * st.t_a * st.r_b + 2.0 * st.r_a * st.t_b +
                 sign * 4.0 * std::real(st.i_plus * std::conj(st.i_minus)));
  st.a = 0.5 * (st.p20 + st.p02);
  st.sum_check = st.p20 + st.p02 + st.p11;
  check_sum_rule(st);
  return st;
}

JointStats joint_probabilities(const SymmetrizedPair& pair, const BarrierPotential& barrier,
                               const MeasurementCriterion& criterion) {
  for (const Wavefunction* psi : {&pair.psi_a(), &pair.psi_b()}) {
    if (!is_cleared(psi->amplitudes(), psi->grid(), barrier, criterion)) {
      std::ostringstream msg;
      msg << "packets have not cleared the barrier at t = " << psi->time();
      throw PrematureMeasurement(msg.str());
    }
  }
  return joint_probabilities(pair, barrier.center);
}

JointStats quadrant_quadrature_oracle(const SymmetrizedPair& pair, double boundary) {
  const Grid1D& grid = pair.psi_a().grid();
  const std::size_t n = grid.size();
  if (n > kOracleMaxPoints) {
    throw BudgetExceeded("2D quadrature oracle limited to " + std::to_string(kOracleMaxPoints) +
                         " points per axis, grid has " + std::to_string(n));
  }
  const std::size_t split = grid.split_index(boundary);
  const double dx = grid.spacing();

  // quadrant[side of x1][side of x2], side 0 = negative
  double quadrant[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    double row[2] = {0.0, 0.0};
    for (std::size_t i2 = 0; i2 < n; ++i2) {
      row[i2 >= split ? 1 : 0] += joint_density(pair, i1, i2);
    }
    const int s1 = i1 >= split ? 1 : 0;
    quadrant[s1][0] += row[0] * dx * dx;
    quadrant[s1][1] += row[1] * dx * dx;
  }

  JointStats st;
  const auto A = pair.psi_a().amplitudes();
  const auto B = pair.psi_b().amplitudes();
  for (std::size_t j = 0; j < n; ++j) {
    const bool pos = j >= split;
    (pos ? st.t_a : st.r_a) += std::norm(A[j]) * dx;
    (pos ? st.t_b : st.r_b) += std::norm(B[j]) * dx;
    (pos ? st.i_plus : st.i_minus) += std::conj(A[j]) * B[j] * dx;
  }
  st.overlap = st.i_plus + st.i_minus;
  st.p20 = quadrant[0][0];
  st.p02 = quadrant[1][1];
  st.p11 = quadrant[0][1] + quadrant[1][0];
  st.a = 0.5 * (st.p20 + st.p02);
  st.sum_check = st.p20 + st.p02 + st.p11;
  return st;
}

}  // namespace tunnelstat
