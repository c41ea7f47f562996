#include "tunnelstat/occupancy.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "tunnelstat/errors.hpp"

namespace tunnelstat {
namespace {

BigInt factorial(unsigned n) {
  BigInt f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt c = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
  }
  return c;
}

}  // namespace

OccupancyVector::OccupancyVector(std::vector<unsigned> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) {
    throw ConfigError("an occupancy vector needs at least one state");
  }
  particles_ = std::accumulate(counts_.begin(), counts_.end(), 0u);
}

OccupancyVector OccupancyVector::canonical() const {
  auto sorted = counts_;
  std::ranges::sort(sorted, std::greater<>());
  return OccupancyVector(std::move(sorted));
}

std::string OccupancyVector::str() const {
  std::string s = "{";
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(counts_[i]);
  }
  return s + "}";
}

ExactProb::ExactProb(Rational value) : value_(std::move(value)) {
  if (value_ < 0 || value_ > 1) {
    throw std::domain_error("probability outside [0, 1]: " + value_.str());
  }
}

std::string ExactProb::str() const { return value_.str(); }

ExactProb mb_probability(const OccupancyVector& occ) {
  BigInt denom = boost::multiprecision::pow(BigInt(occ.states()), occ.particles());
  for (unsigned n : occ.counts()) denom *= factorial(n);
  return ExactProb(Rational(factorial(occ.particles()), denom));
}

ExactProb be_probability(unsigned particles, std::size_t states) {
  if (states == 0) {
    throw ConfigError("Bose-Einstein counting needs M >= 1 states");
  }
  const auto m = static_cast<unsigned>(states);
  return ExactProb(
      Rational(factorial(particles) * factorial(m - 1), factorial(particles + m - 1)));
}

ExactProb fd_probability(const OccupancyVector& occ) {
  if (std::ranges::any_of(occ.counts(), [](unsigned n) { return n > 1; })) {
    return ExactProb(Rational(0));
  }
  return ExactProb(Rational(BigInt(1), binomial(occ.states(), occ.particles())));
}

std::vector<OccupancyVector> enumerate_occupancies(unsigned particles, std::size_t states) {
  if (states == 0) {
    throw ConfigError("need M >= 1 states");
  }
  std::vector<OccupancyVector> out;
  std::vector<unsigned> counts(states, 0);
  // Depth-first over the first M-1 states; the last takes the remainder.
  std::function<void(std::size_t, unsigned)> fill = [&](std::size_t i, unsigned left) {
    if (i + 1 == states) {
      counts[i] = left;
      out.emplace_back(counts);
      return;
    }
    for (unsigned n = left + 1; n-- > 0;) {
      counts[i] = n;
      fill(i + 1, left - n);
    }
  };
  fill(0, particles);
  return out;
}

std::map<OccupancyVector, ExactProb> enumerate_mb_oracle(unsigned particles, std::size_t states,
                                                         std::uint64_t budget) {
  if (states == 0) {
    throw ConfigError("need M >= 1 states");
  }
  const BigInt total = boost::multiprecision::pow(BigInt(states), particles);
  if (total > budget) {
    throw BudgetExceeded("enumeration of " + total.str() + " assignments exceeds budget " +
                         std::to_string(budget));
  }

  // Odometer over the state index of each particle.
  std::map<std::vector<unsigned>, std::uint64_t> tally;
  std::vector<std::size_t> assignment(particles, 0);
  std::vector<unsigned> counts(states, 0);
  const auto n_total = total.convert_to<std::uint64_t>();
  for (std::uint64_t visited = 0; visited < n_total; ++visited) {
    std::ranges::fill(counts, 0u);
    for (std::size_t s : assignment) ++counts[s];
    ++tally[counts];
    for (std::size_t p = 0; p < particles; ++p) {
      if (++assignment[p] < states) break;
      assignment[p] = 0;
    }
  }

  std::map<OccupancyVector, ExactProb> out;
  for (const auto& [c, hits] : tally) {
    out.emplace(OccupancyVector(c), ExactProb(Rational(BigInt(hits), total)));
  }
  return out;
}

PairFamily pair_family(double a) {
  if (!(a >= 0.0 && a <= 0.5)) {
    throw ConfigError("pair family parameter a must lie in [0, 1/2]");
  }
  return {a, a, a, 1.0 - 2.0 * a};
}

PairStatistics classify_pair(double a, double tol) {
  constexpr double mb = 0.25;
  constexpr double be = 1.0 / 3.0;
  if (a <= tol) return PairStatistics::fermi_dirac;
  if (std::abs(a - mb) <= tol) return PairStatistics::maxwell_boltzmann;
  if (std::abs(a - be) <= tol) return PairStatistics::bose_einstein;
  if (a < mb) return PairStatistics::intermediate_fermi;
  if (a < be) return PairStatistics::intermediate_bose;
  return PairStatistics::super_bunched;
}

std::string_view label(PairStatistics stats) {
  switch (stats) {
    case PairStatistics::fermi_dirac: return "FD";
    case PairStatistics::intermediate_fermi: return "intermediate-fermi";
    case PairStatistics::maxwell_boltzmann: return "MB";
    case PairStatistics::intermediate_bose: return "intermediate-bose";
    case PairStatistics::bose_einstein: return "BE";
    case PairStatistics::super_bunched: return "super-bunched";
  }
  return "unknown";
}

}  // namespace tunnelstat
