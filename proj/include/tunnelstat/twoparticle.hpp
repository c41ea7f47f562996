#pragma once

// Two identical particles in the (anti)symmetrized state
//   Psi(x1, x2) = c [psi_A(x1) psi_B(x2) + sign psi_B(x1) psi_A(x2)],
// with c = 1 / sqrt(2 (1 + sign |<A|B>|^2)) so that Psi has unit norm for any
// overlap, and the probabilities of finding both particles reflected, both
// transmitted, or one on each side of the barrier.

#include <cstddef>

#include "tunnelstat/grid.hpp"
#include "tunnelstat/propagator.hpp"

namespace tunnelstat {

enum class Exchange : int { boson = 1, fermion = -1 };

inline int sign_of(Exchange e) { return static_cast<int>(e); }

class SymmetrizedPair {
 public:
  const Wavefunction& psi_a() const { return psi_a_; }
  const Wavefunction& psi_b() const { return psi_b_; }
  Exchange exchange() const { return exchange_; }
  int sign() const { return sign_of(exchange_); }
  /// <psi_A|psi_B>
  cplx overlap() const { return overlap_; }
  double norm_const() const { return norm_const_; }

 private:
  friend SymmetrizedPair make_pair(Wavefunction, Wavefunction, Exchange);
  SymmetrizedPair(Wavefunction a, Wavefunction b, Exchange e, cplx s, double c)
      : psi_a_(std::move(a)), psi_b_(std::move(b)), exchange_(e), overlap_(s), norm_const_(c) {}

  Wavefunction psi_a_;
  Wavefunction psi_b_;
  Exchange exchange_;
  cplx overlap_;
  double norm_const_;
};

/// Fermions with 1 - |s|^2 <= kPauliGuard raise PauliDegeneracy.
inline constexpr double kPauliGuard = 1e-9;

SymmetrizedPair make_pair(Wavefunction psi_a, Wavefunction psi_b, Exchange exchange);

/// |Psi(x_i1, x_i2)|^2 at two grid samples.
double joint_density(const SymmetrizedPair& pair, std::size_t i1, std::size_t i2);

struct JointStats {
  double p20 = 0.0;  // both on the negative (reflected) side
  double p02 = 0.0;  // both on the positive (transmitted) side
  double p11 = 0.0;
  double a = 0.0;    // (p20 + p02) / 2
  cplx overlap{};    // s
  cplx i_plus{};     // overlap restricted to x >= boundary
  cplx i_minus{};    // overlap restricted to x < boundary
  double t_a = 0.0;  // positive-side probabilities
  double t_b = 0.0;
  double r_a = 0.0;  // negative-side probabilities
  double r_b = 0.0;
  double sum_check = 0.0;

  double s_abs() const { return std::abs(overlap); }
};

/// Quadrant probabilities from one-dimensional integrals:
///   p02 = c^2 (2 T_A T_B + sign 2 |I+|^2)
///   p20 = c^2 (2 R_A R_B + sign 2 |I-|^2)
///   p11 = c^2 (2 T_A R_B + 2 R_A T_B + sign 4 Re(I+ conj(I-)))
/// Throws ConsistencyError if the sum rule is off by more than 1e-6.
JointStats joint_probabilities(const SymmetrizedPair& pair, double boundary = 0.0);

/// As above, measured at the barrier centre, after checking that both packets
/// have cleared the barrier (PrematureMeasurement otherwise).
JointStats joint_probabilities(const SymmetrizedPair& pair, const BarrierPotential& barrier,
                               const MeasurementCriterion& criterion);

inline constexpr std::size_t kOracleMaxPoints = 4096;

/// Direct quadrature of joint_density over the four quadrants (O(G^2)).
/// Throws BudgetExceeded for grids above kOracleMaxPoints.
JointStats quadrant_quadrature_oracle(const SymmetrizedPair& pair, double boundary = 0.0);

}  // namespace tunnelstat
