#include <doctest.h>

#include <numeric>

#include "tunnelstat/errors.hpp"
#include "tunnelstat/occupancy.hpp"

using namespace tunnelstat;

namespace {

Rational frac(long p, long q) { return Rational(p) / q; }

// Multinomial by repeated binomials: C(N, n1) C(N - n1, n2) ... / M^N.
Rational multinomial_oracle(const std::vector<unsigned>& counts) {
  unsigned left = std::accumulate(counts.begin(), counts.end(), 0u);
  const unsigned total = left;
  BigInt ways = 1;
  for (unsigned n : counts) {
    BigInt c = 1;
    for (unsigned i = 0; i < n; ++i) c = c * (left - i) / (i + 1);
    ways *= c;
    left -= n;
  }
  BigInt pow = 1;
  for (unsigned i = 0; i < total; ++i) pow *= counts.size();
  return Rational(ways) / Rational(pow);
}

}  // namespace

TEST_CASE("two particles in two states") {
  const OccupancyVector left({2, 0}), right({0, 2}), split({1, 1});
  CHECK(mb_probability(left).value() == frac(1, 4));
  CHECK(mb_probability(right).value() == frac(1, 4));
  CHECK(mb_probability(split).value() == frac(1, 2));
  CHECK(be_probability(2, 2).value() == frac(1, 3));
  CHECK(fd_probability(left).value() == 0);
  CHECK(fd_probability(split).value() == 1);
  CHECK(mb_probability(split).str() == "1/2");
  CHECK(fd_probability(left).str() == "0");
}

TEST_CASE("small cases") {
  CHECK(mb_probability(OccupancyVector({0, 0, 0})).value() == 1);
  CHECK(be_probability(0, 4).value() == 1);
  CHECK(be_probability(1, 7).value() == frac(1, 7));
  CHECK(be_probability(3, 2).value() == frac(1, 4));
  CHECK(fd_probability(OccupancyVector({0, 1, 0})).value() == frac(1, 3));
  CHECK(fd_probability(OccupancyVector({1, 1, 0, 1})).value() == frac(1, 4));
  CHECK_THROWS_AS(be_probability(2, 0), ConfigError);
  CHECK_THROWS_AS(OccupancyVector({}), ConfigError);
  CHECK_THROWS_AS(ExactProb(Rational(3, 2)), std::domain_error);
}

TEST_CASE("fractions are reduced") {
  const ExactProb p = mb_probability(OccupancyVector({2, 2}));
  CHECK(p.numerator() == 3);
  CHECK(p.denominator() == 8);
}

TEST_CASE("enumeration order and count") {
  const auto all = enumerate_occupancies(2, 2);
  REQUIRE(all.size() == 3);
  CHECK(all[0].str() == "{2,0}");
  CHECK(all[1].str() == "{1,1}");
  CHECK(all[2].str() == "{0,2}");
  CHECK(enumerate_occupancies(4, 3).size() == 15);
  CHECK(enumerate_occupancies(0, 3).size() == 1);
}

TEST_CASE("MB agrees with brute force and with the multinomial") {
  for (unsigned n = 0; n <= 5; ++n) {
    for (std::size_t m = 1; m <= 4; ++m) {
      const auto oracle = enumerate_mb_oracle(n, m);
      const auto all = enumerate_occupancies(n, m);
      REQUIRE(oracle.size() == all.size());
      Rational sum_mb = 0, sum_fd = 0;
      for (const auto& occ : all) {
        const std::vector<unsigned> counts(occ.counts().begin(), occ.counts().end());
        CHECK(oracle.at(occ) == mb_probability(occ));
        CHECK(mb_probability(occ).value() == multinomial_oracle(counts));
        sum_mb += mb_probability(occ).value();
        sum_fd += fd_probability(occ).value();
      }
      CHECK(sum_mb == 1);
      CHECK(be_probability(n, m).value() * static_cast<long>(all.size()) == 1);
      CHECK(sum_fd == (n <= m ? 1 : 0));
    }
  }
}

TEST_CASE("oracle N=4 M=3 covers 15 vectors") {
  const auto oracle = enumerate_mb_oracle(4, 3);
  CHECK(oracle.size() == 15);
  CHECK(oracle.at(OccupancyVector({4, 0, 0})).value() == frac(1, 81));
  CHECK(oracle.at(OccupancyVector({2, 1, 1})).value() == frac(12, 81));
}

TEST_CASE("oracle budget") {
  CHECK_THROWS_AS(enumerate_mb_oracle(10, 10), BudgetExceeded);
  CHECK_NOTHROW(enumerate_mb_oracle(3, 3, 27));
  CHECK_THROWS_AS(enumerate_mb_oracle(3, 3, 26), BudgetExceeded);
}

TEST_CASE("MB is permutation invariant") {
  std::vector<unsigned> c{3, 0, 1, 2};
  std::sort(c.begin(), c.end());
  const ExactProb ref = mb_probability(OccupancyVector(c));
  do {
    CHECK(mb_probability(OccupancyVector(c)) == ref);
  } while (std::next_permutation(c.begin(), c.end()));
  CHECK(OccupancyVector({0, 3, 1}).canonical() == OccupancyVector({3, 1, 0}));
}

TEST_CASE("pair family") {
  for (double a : {0.0, 0.1, 0.25, 1.0 / 3.0, 0.5}) {
    const PairFamily f = pair_family(a);
    CHECK(f.p20 == a);
    CHECK(f.p02 == a);
    CHECK(f.p20 + f.p02 + f.p11 == 1.0);
  }
  CHECK_THROWS_AS(pair_family(-0.01), ConfigError);
  CHECK_THROWS_AS(pair_family(0.51), ConfigError);
}

TEST_CASE("classification") {
  CHECK(label(classify_pair(0.25, 1e-6)) == "MB");
  CHECK(label(classify_pair(0.30, 1e-6)) == "intermediate-bose");
  CHECK(label(classify_pair(0.10, 1e-6)) == "intermediate-fermi");
  CHECK(label(classify_pair(0.0, 1e-6)) == "FD");
  CHECK(label(classify_pair(1.0 / 3.0, 1e-6)) == "BE");
  CHECK(label(classify_pair(0.45, 1e-6)) == "super-bunched");
  CHECK(label(classify_pair(0.252, 0.005)) == "MB");
}
