#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <sstream>

#include "ncp/dist.hpp"
#include "support.hpp"

using namespace ncp;
using ncp::testing::code_of;

namespace {

/// Probability of each outcome vector, by enumerating all m^ell index tuples.
std::map<std::uint64_t, double> tuple_pmf(std::size_t m, unsigned ell) {
  std::map<std::uint64_t, double> out;
  std::uint64_t count = 1;
  for (unsigned j = 0; j < ell; ++j) count *= m;
  for (std::uint64_t t = 0; t < count; ++t) {
    std::uint64_t v = 0, rest = t;
    for (unsigned j = 0; j < ell; ++j) {
      v ^= std::uint64_t{1} << (rest % m);
      rest /= m;
    }
    out[v] += 1.0 / static_cast<double>(count);
  }
  return out;
}

/// Weight distribution of D as a chain on {0..m}: an index hits a set bit w.p. k/m.
std::vector<long double> weight_chain(std::size_t m, unsigned ell) {
  std::vector<long double> p(m + 1, 0.0L);
  p[0] = 1.0L;
  for (unsigned s = 0; s < ell; ++s) {
    std::vector<long double> q(m + 1, 0.0L);
    for (std::size_t k = 0; k <= m; ++k) {
      if (p[k] == 0.0L) continue;
      const long double down = static_cast<long double>(k) / m;
      if (k > 0) q[k - 1] += p[k] * down;
      if (k < m) q[k + 1] += p[k] * (1.0L - down);
    }
    p = q;
  }
  return p;
}

long double choose(std::size_t n, std::size_t k) {
  long double r = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// D̂_C(w) from its definition: E_{h ~ D_C} (-1)^{<h, w>}, with D from tuples.
double brute_fourier_DC(const LinearCode& c, unsigned ell, BitRef w) {
  const auto pmf = tuple_pmf(c.m(), ell);
  double num = 0.0, den = 0.0;
  for (const auto& [v, p] : pmf) {
    const BitVec h = BitVec::from_uint(c.m(), v);
    if (c.syndrome(h) != 0) continue;
    den += p;
    num += dot(h, w) ? -p : p;
  }
  return num / den;
}

}  // namespace

TEST(DistParams, RejectsOddEll) {
  EXPECT_THROW(DistParams::make(8, 3), std::invalid_argument);
  EXPECT_THROW(DistParams::make(0, 2), std::invalid_argument);
  EXPECT_NO_THROW(DistParams::make(8, 0));
}

TEST(SampleD, TwoByTwoOutcomes) {
  const DistParams p = DistParams::make(2, 2);
  RngStream rng(41, 0);
  const int draws = 100000;
  int zero = 0;
  for (int i = 0; i < draws; ++i) {
    const BitVec h = sample_D(p, rng);
    ASSERT_EQ(weight(h) % 2, 0U);
    zero += weight(h) == 0;
  }
  EXPECT_LT(ncp::testing::binomial_z(zero, draws, 0.5), 5.0);
}

TEST(SampleD, EvenWeightAndEmptyXor) {
  RngStream rng(42, 0);
  const DistParams p = DistParams::make(37, 6);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t w = weight(sample_D(p, rng));
    EXPECT_EQ(w % 2, 0U);
    EXPECT_LE(w, 6U);
  }
  const DistParams none = DistParams::make(9, 0);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(weight(sample_D(none, rng)), 0U);
}

TEST(FourierD, Examples) {
  EXPECT_EQ(fourier_D(DistParams::make(16, 4), 0), 1.0);
  EXPECT_DOUBLE_EQ(fourier_D(DistParams::make(4, 2), 1), 0.25);
  EXPECT_EQ(fourier_D(DistParams::make(4, 6), 2), 0.0);
}

TEST(FourierD, MatchesEmpiricalMean) {
  RngStream rng(43, 0);
  for (std::size_t m : {8, 16, 32}) {
    for (unsigned ell : {2U, 4U, 8U}) {
      const DistParams p = DistParams::make(m, ell);
      BitVec w(m);
      for (std::size_t i = 0; i < m; ++i) w.set(i, rng.next_bits(1));
      const int draws = 100000;
      double s = 0.0;
      for (int i = 0; i < draws; ++i) s += dot(sample_D(p, rng), w) ? -1.0 : 1.0;
      const double f = fourier_D(p, weight(w));
      const double sd = std::sqrt(std::max(1e-12, 1.0 - f * f) / draws);
      EXPECT_LT(std::abs(s / draws - f), 5.0 * sd) << "m=" << m << " ell=" << ell;
    }
  }
}

TEST(ExactPmfD, SmallExamples) {
  const DistParams p = DistParams::make(2, 2);
  EXPECT_NEAR(exact_pmf_D(p, 0), 0.5, 1e-15);
  EXPECT_NEAR(exact_pmf_D(p, 2), 0.5, 1e-15);
  EXPECT_EQ(exact_pmf_D(p, 1), 0.0);
  EXPECT_EQ(exact_pmf_D(DistParams::make(10, 4), 6), 0.0);
}

TEST(ExactPmfD, MatchesTupleEnumeration) {
  for (std::size_t m = 1; m <= 4; ++m) {
    for (unsigned ell = 0; ell <= 6; ell += 2) {
      const DistParams p = DistParams::make(m, ell);
      const auto pmf = tuple_pmf(m, ell);
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << m); ++v) {
        const auto it = pmf.find(v);
        const double want = it == pmf.end() ? 0.0 : it->second;
        EXPECT_NEAR(exact_pmf_D(p, static_cast<std::size_t>(std::popcount(v))), want, 1e-10)
            << "m=" << m << " ell=" << ell << " v=" << v;
      }
    }
  }
}

TEST(ExactPmfD, MatchesWeightChainAndNormalizes) {
  for (std::size_t m : {1, 2, 5, 8, 16, 24, 32, 48, 64}) {
    for (unsigned ell : {2U, 4U, 6U, 10U}) {
      const DistParams p = DistParams::make(m, ell);
      const auto chain = weight_chain(m, ell);
      long double total = 0.0L;
      for (std::size_t t = 0; t <= m; ++t) {
        const long double per_vector = chain[t] / choose(m, t);
        EXPECT_NEAR(exact_pmf_D(p, t), static_cast<double>(per_vector), 1e-12) << "m=" << m << " t=" << t;
        total += choose(m, t) * exact_pmf_D(p, t);
      }
      EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-10) << "m=" << m << " ell=" << ell;
    }
  }
  EXPECT_THROW(exact_pmf_D(DistParams::make(65, 2), 0), CapExceeded);
}

TEST(FourierDC, Examples) {
  const LinearCode rep = code_of({"11"});
  const DistParams p = DistParams::make(2, 2);
  EXPECT_DOUBLE_EQ(fourier_DC_exact(rep, p, BitVec(2)), 1.0);
  EXPECT_DOUBLE_EQ(fourier_DC_exact(rep, p, BitVec::parse("10")), 0.0);
  EXPECT_DOUBLE_EQ(fourier_DC_exact(rep, p, BitVec::parse("11")), 1.0);
}

TEST(FourierDC, MatchesDefinitionOnTinyCodes) {
  RngStream rng(44, 0);
  for (int t = 0; t < 6; ++t) {
    const LinearCode c = random_code(7, 2, rng);
    for (unsigned ell : {2U, 4U}) {
      for (std::uint64_t x = 0; x < 128; x += 9) {
        const BitVec w = BitVec::from_uint(7, x);
        EXPECT_NEAR(fourier_DC_exact(c, DistParams::make(7, ell), w), brute_fourier_DC(c, ell, w), 1e-12);
      }
    }
  }
}

TEST(FourierDC, PeriodicModuloCode) {
  RngStream rng(45, 0);
  const LinearCode c = random_code(20, 4, rng);
  const DistParams p = DistParams::make(20, 4);
  for (int t = 0; t < 20; ++t) {
    BitVec w(20);
    for (std::size_t i = 0; i < 20; ++i) w.set(i, rng.next_bits(1));
    const double f = fourier_DC_exact(c, p, w);
    for (std::uint64_t x = 1; x < 16; ++x) {
      BitVec shifted = w;
      shifted ^= c.encode_bits(x);
      EXPECT_NEAR(fourier_DC_exact(c, p, shifted), f, 1e-15);
    }
  }
}

TEST(DualMass, MatchesTupleEnumeration) {
  RngStream rng(46, 0);
  const LinearCode c = random_code(6, 2, rng);
  const auto pmf = tuple_pmf(6, 4);
  double z = 0.0;
  for (const auto& [v, p] : pmf)
    if (c.syndrome(BitVec::from_uint(6, v)) == 0) z += p;
  EXPECT_NEAR(dual_mass(c, DistParams::make(6, 4)), z, 1e-14);
}

TEST(SampleDCRejection, AcceptedRowsAreDual) {
  RngStream rng(47, 0);
  const LinearCode c = random_code(40, 6, rng);
  const DistParams p = DistParams::make(40, 4);
  for (int i = 0; i < 300; ++i) {
    const BitVec h = sample_DC_rejection(c, p, rng);
    EXPECT_EQ(c.syndrome(h), 0U);
    EXPECT_EQ(weight(h) % 2, 0U);
  }
}

TEST(SampleDCRejection, RepetitionCodeIsFair) {
  const LinearCode rep = code_of({"11"});
  const DistParams p = DistParams::make(2, 2);
  RngStream rng(48, 0);
  const int draws = 20000;
  int zero = 0;
  for (int i = 0; i < draws; ++i) {
    const BitVec h = sample_DC_rejection(rep, p, rng);
    ASSERT_TRUE(h == BitVec::parse("00") || h == BitVec::parse("11"));
    zero += weight(h) == 0;
  }
  EXPECT_LT(ncp::testing::binomial_z(zero, draws, 0.5), 5.0);
}

TEST(SampleDCRejection, AcceptanceRateMatchesDualMass) {
  RngStream crng(49, 0);
  const LinearCode c = random_code(64, 8, crng);
  const DistParams p = DistParams::make(64, 4);
  SamplerStats st;
  RngStream rng(49, 1);
  while (st.trials < 1000000) sample_DC_rejection(c, p, rng, 0, &st);
  const double z = dual_mass(c, p);
  EXPECT_GE(z, std::ldexp(1.0, -8));
  EXPECT_LT(ncp::testing::binomial_z(static_cast<double>(st.accepted), static_cast<double>(st.trials), z), 5.0);
}

TEST(SampleDCRejection, ExhaustionReportsRate) {
  RngStream crng(50, 0);
  const LinearCode c = random_code(64, 12, crng);
  AdviceOptions opts;
  opts.max_trials = 1;
  try {
    make_advice(c, DistParams::make(64, 4), 200, 1, opts);
    FAIL() << "expected SamplerExhausted";
  } catch (const SamplerExhausted& e) {
    EXPECT_GE(e.trials(), 1U);
    EXPECT_LT(e.acceptance_rate(), 1.0);
    EXPECT_NE(std::string(e.what()).find("acceptance rate"), std::string::npos);
  }
}

TEST(ExactDCTable, RepetitionCode) {
  const ExactDCTable t(code_of({"11"}), DistParams::make(2, 2));
  ASSERT_EQ(t.size(), 2U);
  EXPECT_NEAR(t.total_mass(), 1.0, 1e-12);
  EXPECT_NEAR(t.probability_of(BitVec::parse("00")), 0.5, 1e-15);
  EXPECT_NEAR(t.probability_of(BitVec::parse("11")), 0.5, 1e-15);
  EXPECT_EQ(t.probability_of(BitVec::parse("10")), 0.0);
}

TEST(ExactDCTable, NormalizedAndCapped) {
  RngStream rng(51, 0);
  const ExactDCTable t(random_code(16, 3, rng), DistParams::make(16, 4));
  EXPECT_NEAR(t.total_mass(), 1.0, 1e-12);
  EXPECT_THROW(ExactDCTable(random_code(30, 3, rng), DistParams::make(30, 4)), CapExceeded);
}

TEST(ExactDCTable, AgreesWithRejectionByChiSquare) {
  RngStream crng(52, 0);
  const LinearCode c = random_code(8, 2, crng);
  const DistParams p = DistParams::make(8, 4);
  const ExactDCTable table(c, p);
  std::map<std::string, double> counts;
  RngStream rng(52, 1);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) counts[sample_DC_rejection(c, p, rng).to_string()] += 1.0;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double expected = draws * table.probability(i);
    const double got = counts[table.word(i).to_string()];
    chi2 += (got - expected) * (got - expected) / expected;
    counts.erase(table.word(i).to_string());
  }
  EXPECT_TRUE(counts.empty()) << "rejection produced a word outside the table";
  const boost::math::chi_squared dist(static_cast<double>(table.size() - 1));
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001);
}

TEST(MakeAdvice, RowsAreDualAndStatisticOnCodewordIsN) {
  RngStream rng(53, 0);
  const LinearCode c = random_code(32, 5, rng);
  const Advice a = make_advice(c, DistParams::make(32, 4), 500, 7);
  EXPECT_EQ(a.size(), 500U);
  EXPECT_EQ(a.code_hash, c.hash());
  EXPECT_EQ(a.stats.accepted, 500U);
  const BitVec v = c.encode_bits(13);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(c.syndrome(a.rows.row(i)), 0U);
    EXPECT_FALSE(dot(a.rows.row(i), v));
    EXPECT_FALSE(a.shifts[i]);
  }
}

TEST(MakeAdvice, EmpiricalMeanTracksExactFourier) {
  RngStream rng(54, 0);
  const LinearCode c = random_code(8, 2, rng);
  const DistParams p = DistParams::make(8, 4);
  const std::size_t N = 10000;
  for (AdviceSampler s : {AdviceSampler::Rejection, AdviceSampler::Exact}) {
    const Advice a = make_advice(c, p, N, 99, AdviceOptions{s, Exec::Parallel, 0});
    for (std::uint64_t x = 0; x < 256; x += 17) {
      const BitVec w = BitVec::from_uint(8, x);
      double sum = 0.0;
      for (std::size_t i = 0; i < N; ++i) sum += dot(a.rows.row(i), w) ? -1.0 : 1.0;
      EXPECT_LT(std::abs(sum / N - fourier_DC_exact(c, p, w)), 5.0 / std::sqrt(static_cast<double>(N)));
    }
  }
}

TEST(MakeAdvice, IndependentOfExecutionPolicy) {
  RngStream rng(55, 0);
  const LinearCode c = random_code(48, 6, rng);
  for (AdviceSampler s : {AdviceSampler::Rejection, AdviceSampler::Exact}) {
    if (s == AdviceSampler::Exact) continue;  // dual dimension 42 is above the table cap
    const Advice a = make_advice(c, DistParams::make(48, 4), 3000, 5, AdviceOptions{s, Exec::Serial, 0});
    const Advice b = make_advice(c, DistParams::make(48, 4), 3000, 5, AdviceOptions{s, Exec::Parallel, 0});
    EXPECT_EQ(a.rows, b.rows);
    EXPECT_EQ(a.stats.trials, b.stats.trials);
  }
  const LinearCode small = random_code(12, 3, rng);
  const AdviceOptions es{AdviceSampler::Exact, Exec::Serial, 0}, ep{AdviceSampler::Exact, Exec::Parallel, 0};
  EXPECT_EQ(make_advice(small, DistParams::make(12, 4), 2000, 5, es).rows,
            make_advice(small, DistParams::make(12, 4), 2000, 5, ep).rows);
}

TEST(AdviceFile, RoundTrip) {
  RngStream rng(56, 0);
  const LinearCode c = random_code(20, 3, rng);
  Advice a = make_advice(c, DistParams::make(20, 4), 50, 3);
  a.shifts.set(7);
  a.beta = 0.125;
  a.eta = 0.0625;
  std::stringstream ss;
  write_advice(ss, a);
  const std::string header = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_EQ(header, "ncp-advice v1 N=50 m=20 l=4 seed=3 code=" + c.hash() + " beta=0.125 eta=0.0625");
  const Advice b = read_advice(ss);
  EXPECT_EQ(b.rows, a.rows);
  EXPECT_EQ(b.shifts, a.shifts);
  EXPECT_EQ(b.ell, 4U);
  EXPECT_EQ(b.seed, 3U);
  EXPECT_EQ(b.code_hash, c.hash());
  EXPECT_EQ(b.beta, 0.125);
  EXPECT_EQ(b.eta, 0.0625);
}

TEST(AdviceFile, RejectsTruncation) {
  std::stringstream ss("ncp-advice v1 N=2 m=4 l=2 seed=0 code=abc\n1100 0\n");
  EXPECT_THROW(read_advice(ss), std::invalid_argument);
  std::stringstream bad("ncp-advice v1 N=1 m=4 l=2 seed=0 code=abc\n1100 2\n");
  EXPECT_THROW(read_advice(bad), std::invalid_argument);
}
