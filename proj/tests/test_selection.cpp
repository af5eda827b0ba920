#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "ude/population.hpp"
#include "ude/rng.hpp"
#include "ude/selection.hpp"

#if defined(UDE_HAVE_GMP)
#include <gmp.h>
#endif

using namespace ude;

namespace {

PopulationStore make_store(const std::vector<double>& fitnesses,
                           PopulationStore::Mode mode = PopulationStore::Mode::kAppend) {
  PopulationStore store(mode);
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    Individual ind;
    ind.fitness = fitnesses[i];
    ind.insertion_index = i;
    store.append(std::move(ind));
  }
  return store;
}

// Exact binomial table C(r, c) via Pascal's rule; r <= 62 keeps every entry
// well inside uint64.
std::vector<std::vector<unsigned long long>> pascal_table(std::size_t rows) {
  std::vector<std::vector<unsigned long long>> c(rows + 1);
  for (std::size_t r = 0; r <= rows; ++r) {
    c[r].assign(r + 1, 1);
    for (std::size_t k = 1; k < r; ++k) c[r][k] = c[r - 1][k - 1] + c[r - 1][k];
  }
  return c;
}

}  // namespace

TEST_CASE("tournament win probabilities: hand-computed table for N=4, n=2") {
  CHECK(tournament_probability(1, 2, 4) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(tournament_probability(2, 2, 4) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(tournament_probability(3, 2, 4) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(tournament_probability(4, 2, 4) == 0.0);
}

TEST_CASE("tournament win probabilities: degenerate sizes") {
  for (std::size_t i = 1; i <= 7; ++i) {
    CHECK(tournament_probability(i, 1, 7) == 1.0 / 7.0);  // n=1: uniform, exact
  }
  CHECK(tournament_probability(1, 9, 9) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 2; i <= 9; ++i) {
    CHECK(tournament_probability(i, 9, 9) == 0.0);
  }
  CHECK_THROWS_AS(tournament_probability(0, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(tournament_probability(6, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(tournament_probability(1, 0, 5), std::invalid_argument);
  CHECK_THROWS_AS(tournament_probability(1, 6, 5), std::invalid_argument);
}

TEST_CASE("tournament win probabilities sum to one") {
  for (std::size_t N : {3, 10, 25, 100}) {
    for (std::size_t n : {std::size_t{1}, std::size_t{2}, N / 2, N}) {
      if (n == 0) continue;
      double total = 0.0;
      for (std::size_t i = 1; i <= N; ++i) total += tournament_probability(i, n, N);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("tournament win probabilities match brute-force subset enumeration") {
  // Enumerate every n-subset of {1..N} (bit b set = rank b+1 in the
  // tournament); the winner is the minimum rank present.
  for (std::size_t N = 2; N <= 14; ++N) {
    for (std::size_t n = 1; n <= N; ++n) {
      std::vector<unsigned long long> wins(N + 1, 0);
      unsigned long long subsets = 0;
      for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
        ++subsets;
        const int low = __builtin_ctz(mask);
        ++wins[static_cast<std::size_t>(low) + 1];
      }
      for (std::size_t i = 1; i <= N; ++i) {
        const double expect =
            static_cast<double>(wins[i]) / static_cast<double>(subsets);
        CHECK(tournament_probability(i, n, N) ==
              doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("tournament win probabilities match exact binomial ratios up to N=30") {
  const auto c = pascal_table(30);
  for (std::size_t N = 2; N <= 30; ++N) {
    for (std::size_t n = 1; n <= N; ++n) {
      for (std::size_t i = 1; i <= N; ++i) {
        double expect = 0.0;
        if (i + n <= N + 1) {
          expect = static_cast<double>(static_cast<long double>(c[N - i][n - 1]) /
                                       static_cast<long double>(c[N][n]));
        }
        const double got = tournament_probability(i, n, N);
        if (expect == 0.0) {
          CHECK(got == 0.0);
        } else {
          CHECK(got == doctest::Approx(expect).epsilon(1e-12));
        }
      }
    }
  }
}

#if defined(UDE_HAVE_GMP)
TEST_CASE("tournament win probabilities match exact rationals up to N=200") {
  mpz_t num, den, sum;
  mpz_init(num);
  mpz_init(den);
  mpz_init(sum);
  mpq_t ratio;
  mpq_init(ratio);
  for (std::size_t N : {50, 120, 200}) {
    for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{17}, N / 2, N}) {
      mpz_bin_uiui(den, static_cast<unsigned long>(N), static_cast<unsigned long>(n));
      mpz_set_ui(sum, 0);
      for (std::size_t i = 1; i <= N; ++i) {
        mpz_bin_uiui(num, static_cast<unsigned long>(N - i),
                     static_cast<unsigned long>(n - 1));
        mpz_add(sum, sum, num);
        mpq_set_num(ratio, num);
        mpq_set_den(ratio, den);
        mpq_canonicalize(ratio);
        const double exact = mpq_get_d(ratio);
        const double got = tournament_probability(i, n, N);
        if (exact == 0.0) {
          CHECK(got == 0.0);
        } else {
          CHECK(got == doctest::Approx(exact).epsilon(1e-10));
        }
      }
      // Hockey-stick identity: the numerators total the denominator exactly,
      // so the distribution is normalized as a rational identity.
      CHECK(mpz_cmp(sum, den) == 0);
    }
  }
  mpq_clear(ratio);
  mpz_clear(num);
  mpz_clear(den);
  mpz_clear(sum);
}
#endif

TEST_CASE("tournament size rounds half away from zero and floors at one") {
  CHECK(tournament_size(100, 8.0) == 13);    // 12.5 -> 13
  CHECK(tournament_size(5, 2.0) == 3);       // 2.5 -> 3
  CHECK(tournament_size(18, 4.0) == 5);      // 4.5 -> 5
  CHECK(tournament_size(100, 1000.0) == 1);  // 0.1 -> floor at 1
  CHECK(tournament_size(100, 100.0) == 1);
  CHECK(tournament_size(100, 1.0) == 100);
  CHECK(tournament_size(0, 3.0) == 1);
  CHECK_THROWS_AS(tournament_size(10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(tournament_size(10, -2.0), std::invalid_argument);
}

TEST_CASE("pbest selection is uniform over the top slice") {
  std::vector<double> fit(100);
  for (std::size_t i = 0; i < 100; ++i) fit[i] = static_cast<double>(i);
  const auto store = make_store(fit);  // index == rank-1

  SUBCASE("p = 0.1 picks only the top 10, each about equally often") {
    RngStream rng(41, 3);
    std::vector<int> counts(100, 0);
    const int draws = 100000;
    for (int rep = 0; rep < draws; ++rep) ++counts[select_pbest(store, 0.1, rng)];
    for (std::size_t i = 10; i < 100; ++i) REQUIRE(counts[i] == 0);
    // sd of a bin count = sqrt(1e5 * 0.1 * 0.9) ~ 94.9; 4 sigma ~ 380.
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(std::abs(counts[i] - 10000) < 400);
    }
  }
  SUBCASE("tiny p floors the slice at two members") {
    RngStream rng(42, 3);
    std::vector<int> counts(100, 0);
    for (int rep = 0; rep < 2000; ++rep) ++counts[select_pbest(store, 1e-9, rng)];
    CHECK(counts[0] > 0);
    CHECK(counts[1] > 0);
    for (std::size_t i = 2; i < 100; ++i) REQUIRE(counts[i] == 0);
  }
  SUBCASE("p = 1 reaches the whole store") {
    RngStream rng(43, 3);
    std::vector<int> counts(100, 0);
    for (int rep = 0; rep < 100000; ++rep) ++counts[select_pbest(store, 1.0, rng)];
    for (std::size_t i = 0; i < 100; ++i) CHECK(counts[i] > 0);
  }
  SUBCASE("invalid arguments throw") {
    RngStream rng(44, 3);
    CHECK_THROWS_AS(select_pbest(store, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(select_pbest(store, 1.5, rng), std::invalid_argument);
    const auto tiny = make_store({1.0});
    CHECK_THROWS_AS(select_pbest(tiny, 0.5, rng), std::invalid_argument);
  }
}

TEST_CASE("uniform selection honours exclusions") {
  const auto store = make_store({5, 4, 3, 2, 1, 0, 9, 8, 7, 6});
  RngStream rng(51, 3);

  const std::vector<std::size_t> banned{3};
  for (int rep = 0; rep < 2000; ++rep) {
    REQUIRE(select_uniform(store, rng, banned) != 3);
  }

  std::vector<std::size_t> all_but_one;
  for (std::size_t i = 0; i < 10; ++i) {
    if (i != 7) all_but_one.push_back(i);
  }
  for (int rep = 0; rep < 20; ++rep) {
    REQUIRE(select_uniform(store, rng, all_but_one) == 7);
  }

  std::vector<std::size_t> everything(10);
  for (std::size_t i = 0; i < 10; ++i) everything[i] = i;
  CHECK_THROWS_AS(select_uniform(store, rng, everything), std::invalid_argument);

  const PopulationStore empty(PopulationStore::Mode::kAppend);
  CHECK_THROWS_AS(select_uniform(empty, rng), std::invalid_argument);

  // Out-of-range exclusions are inert.
  const std::vector<std::size_t> bogus{99, 1000};
  CHECK_NOTHROW(select_uniform(store, rng, bogus));
}

TEST_CASE("tournament selection: T=1 always returns the best, without consuming draws") {
  const auto store = make_store({3.0, 0.5, 2.0, 0.25, 4.0});
  RngStream rng(61, 3);
  RngStream twin(61, 3);
  for (int rep = 0; rep < 10; ++rep) {
    CHECK(select_t(store, 1.0, rng) == 3);
  }
  CHECK(rng.uniform01() == twin.uniform01());
}

TEST_CASE("tournament selection: T=|P| degenerates to uniform") {
  std::vector<double> fit(10);
  for (std::size_t i = 0; i < 10; ++i) fit[i] = static_cast<double>(i);
  const auto store = make_store(fit);
  RngStream rng(62, 3);
  std::vector<int> counts(10, 0);
  const int draws = 100000;
  for (int rep = 0; rep < draws; ++rep) ++counts[select_t(store, 10.0, rng)];
  // sd = sqrt(1e5 * 0.1 * 0.9) ~ 94.9; 4 sigma ~ 380.
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(counts[i] - 10000) < 400);
}

TEST_CASE("tournament selection matches the closed-form rank distribution") {
  // N=20, T makes n = 3. 2e5 draws; the largest sd of an empirical rank
  // frequency is sqrt(0.15 * 0.85 / 2e5) ~ 0.0008, so 0.006 is > 7 sigma.
  std::vector<double> fit(20);
  for (std::size_t i = 0; i < 20; ++i) fit[i] = 100.0 + static_cast<double>(i);
  const auto store = make_store(fit);
  const double T = 20.0 / 3.0;
  RngStream rng(63, 3);
  const int draws = 200000;
  std::vector<int> rank_wins(21, 0);
  TournamentSelector selector;
  for (int rep = 0; rep < draws; ++rep) {
    const std::size_t winner = selector.select_t(store, T, rng);
    ++rank_wins[store.rank_of(winner)];
  }
  for (std::size_t i = 1; i <= 20; ++i) {
    const double freq = static_cast<double>(rank_wins[i]) / draws;
    CHECK(std::abs(freq - tournament_probability(i, 3, 20)) < 0.006);
  }
}

TEST_CASE("tournament selection honours exclusions") {
  const auto store = make_store({1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  RngStream rng(64, 3);
  const std::vector<std::size_t> banned{0};

  SUBCASE("take-all path skips the excluded best") {
    CHECK(select_t(store, 1.0, rng, banned) == 1);
  }
  SUBCASE("sampled path never returns an excluded index") {
    for (int rep = 0; rep < 5000; ++rep) {
      REQUIRE(select_t(store, 6.0, rng, banned) != 0);
    }
  }
  SUBCASE("tournament size clamps to the support") {
    // n = round(6/1.2) = 5 > support 2: covers the support, returns its best.
    const std::vector<std::size_t> most{0, 1, 2, 5};
    CHECK(select_t(store, 1.2, rng, most) == 3);
  }
  SUBCASE("empty support throws") {
    const std::vector<std::size_t> everything{0, 1, 2, 3, 4, 5};
    CHECK_THROWS_AS(select_t(store, 2.0, rng, everything), std::invalid_argument);
  }
}

TEST_CASE("larger T is stochastically less elitist") {
  std::vector<double> fit(50);
  for (std::size_t i = 0; i < 50; ++i) fit[i] = static_cast<double>(i);
  const auto store = make_store(fit);
  // E[winner rank] for tournament n of N is (N+1)/(n+1):
  // T=2 -> n=25 -> 1.96; T=10 -> n=5 -> 8.5; T=50 -> n=1 -> 25.5.
  const int draws = 30000;
  std::vector<double> means;
  TournamentSelector selector;
  for (const double T : {2.0, 10.0, 50.0}) {
    RngStream rng(65, 3);
    double sum = 0.0;
    for (int rep = 0; rep < draws; ++rep) {
      sum += static_cast<double>(store.rank_of(selector.select_t(store, T, rng)));
    }
    means.push_back(sum / draws);
  }
  CHECK(means[0] == doctest::Approx(51.0 / 26.0).epsilon(0.05));
  CHECK(means[1] == doctest::Approx(8.5).epsilon(0.05));
  CHECK(means[2] == doctest::Approx(25.5).epsilon(0.05));
  CHECK(means[0] + 1.0 < means[1]);
  CHECK(means[1] + 1.0 < means[2]);
}

TEST_CASE("diversity buckets partition insertion indices by residue") {
  DptBuckets buckets(5);
  for (std::uint64_t i = 0; i < 10; ++i) {
    buckets.add(i, static_cast<std::size_t>(i));
  }
  REQUIRE(buckets.gensize() == 5);
  CHECK(buckets.bucket(2) == std::vector<std::uint32_t>{2, 7});
  CHECK(buckets.bucket(0) == std::vector<std::uint32_t>{0, 5});
  CHECK(buckets.bucket(4) == std::vector<std::uint32_t>{4, 9});
  CHECK_THROWS_AS(DptBuckets(0), std::invalid_argument);
}

TEST_CASE("subset draws pin the parent subset and keep all three distinct") {
  RngStream rng(71, 3);
  for (int rep = 0; rep < 10000; ++rep) {
    const std::size_t slot = static_cast<std::size_t>(rng.below(100));
    const DptSubsets s = draw_dpt_subsets(100, slot, rng);
    REQUIRE(s.j_p == slot);
    REQUIRE(s.j_r1 < 100);
    REQUIRE(s.j_r2 < 100);
    REQUIRE(s.j_r1 != s.j_p);
    REQUIRE(s.j_r2 != s.j_p);
    REQUIRE(s.j_r2 != s.j_r1);
  }
  CHECK_THROWS_AS(draw_dpt_subsets(2, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(draw_dpt_subsets(5, 5, rng), std::invalid_argument);
}

TEST_CASE("bucket tournaments clamp to the subset and can cover it entirely") {
  // 10 members, fitness decreasing with index, gensize 5: bucket j = {j, j+5}
  // and member j+5 is the fitter one. T=1 covers each bucket, so the bucket
  // best must win with no randomness consumed.
  std::vector<double> fit(10);
  for (std::size_t i = 0; i < 10; ++i) fit[i] = 100.0 - static_cast<double>(i);
  const auto store = make_store(fit);
  DptBuckets buckets(5);
  for (std::uint64_t i = 0; i < 10; ++i) buckets.add(i, static_cast<std::size_t>(i));

  RngStream rng(72, 3);
  RngStream twin(72, 3);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(select_dpt(store, buckets, j, 1.0, rng) == j + 5);
  }
  CHECK(rng.uniform01() == twin.uniform01());

  CHECK_THROWS_AS(select_dpt(store, buckets, 7, 1.0, rng), std::invalid_argument);
  DptBuckets sparse(16);
  sparse.add(0, 0);
  CHECK_THROWS_AS(select_dpt(store, sparse, 3, 1.0, rng), std::invalid_argument);
}

TEST_CASE("a single bucket makes the bucket tournament identical to the plain one") {
  // gensize 1 puts every member in bucket 0, so select_dpt must follow the
  // same draw sequence as select_t, bit for bit, across all sampling paths.
  RngStream fill(73, 3);
  std::vector<double> fit(12);
  for (auto& f : fit) f = fill.uniform01();
  const auto store = make_store(fit);
  DptBuckets buckets(1);
  for (std::uint64_t i = 0; i < 12; ++i) buckets.add(i, static_cast<std::size_t>(i));

  for (const double T : {1.0, 3.0, 12.0}) {
    RngStream a(74, 3);
    RngStream b(74, 3);
    TournamentSelector sa, sb;
    for (int rep = 0; rep < 200; ++rep) {
      REQUIRE(sa.select_t(store, T, a) == sb.select_dpt(store, buckets, 0, T, b));
    }
    CHECK(a.uniform01() == b.uniform01());
  }
}
