#pragma once

// Exact occupancy probabilities for N particles in M states under
// Maxwell-Boltzmann, Bose-Einstein and Fermi-Dirac counting, plus the
// one-parameter family p{2,0} = p{0,2} = a, p{1,1} = 1 - 2a for N = M = 2.

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tunnelstat {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Occupation numbers n_1..n_M. State order matters; canonical() gives the
/// sorted multiset for reporting.
class OccupancyVector {
 public:
  /// Throws ConfigError when counts is empty (M = 0).
  explicit OccupancyVector(std::vector<unsigned> counts);

  std::span<const unsigned> counts() const { return counts_; }
  std::size_t states() const { return counts_.size(); }
  unsigned particles() const { return particles_; }

  OccupancyVector canonical() const;
  std::string str() const;

  auto operator<=>(const OccupancyVector& other) const { return counts_ <=> other.counts_; }
  bool operator==(const OccupancyVector& other) const { return counts_ == other.counts_; }

 private:
  std::vector<unsigned> counts_;
  unsigned particles_ = 0;
};

/// A probability held as a reduced fraction.
class ExactProb {
 public:
  ExactProb() = default;
  /// Throws std::domain_error outside [0, 1].
  explicit ExactProb(Rational value);

  const Rational& value() const { return value_; }
  BigInt numerator() const { return boost::multiprecision::numerator(value_); }
  BigInt denominator() const { return boost::multiprecision::denominator(value_); }
  double to_double() const { return value_.convert_to<double>(); }
  /// "p/q", or "0" / "1".
  std::string str() const;

  bool operator==(const ExactProb& other) const { return value_ == other.value_; }

 private:
  Rational value_{0};
};

/// N! / (M^N prod n_i!)
ExactProb mb_probability(const OccupancyVector& occ);

/// N! (M-1)! / (N+M-1)!, the same for every occupancy vector. M = 0 is rejected.
ExactProb be_probability(unsigned particles, std::size_t states);

/// 0 if any state is doubly occupied, else 1 / C(M, N).
ExactProb fd_probability(const OccupancyVector& occ);

/// Every occupancy vector of N particles over M states, in descending
/// lexicographic order ({N,0,..} first).
std::vector<OccupancyVector> enumerate_occupancies(unsigned particles, std::size_t states);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

/// Tallies all M^N particle-to-state assignments. Independent of
/// mb_probability; throws BudgetExceeded when M^N > budget.
std::map<OccupancyVector, ExactProb> enumerate_mb_oracle(
    unsigned particles, std::size_t states, std::uint64_t budget = kDefaultEnumerationBudget);

struct PairFamily {
  double a = 0.25;
  double p20 = 0.25;
  double p02 = 0.25;
  double p11 = 0.5;
};

/// Throws ConfigError unless 0 <= a <= 1/2.
PairFamily pair_family(double a);

enum class PairStatistics {
  fermi_dirac,
  intermediate_fermi,
  maxwell_boltzmann,
  intermediate_bose,
  bose_einstein,
  super_bunched,
};

/// Places a against the reference points 0 (FD), 1/4 (MB) and 1/3 (BE).
/// Values above 1/3 + tol are "super-bunched".
PairStatistics classify_pair(double a, double tol);

/// FD, intermediate-fermi, MB, intermediate-bose, BE, super-bunched
std::string_view label(PairStatistics stats);

}  // namespace tunnelstat
