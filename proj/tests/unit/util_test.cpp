#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <numeric>

#include "vrp/error.hpp"
#include "vrp/parallel.hpp"
#include "vrp/random.hpp"
#include "vrp/summation.hpp"

namespace vrp {
namespace {

TEST(PairwiseSum, ExactOnSmallIntegers) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_EQ(pairwise_sum(v), 500500.0);
  EXPECT_EQ(ordered_mean(v), 500.5);
  EXPECT_EQ(ordered_mean(std::vector<double>{}), 0.0);
}

TEST(PairwiseSum, BetterThanNaiveOnManySmallTerms) {
  std::vector<double> v(1 << 20, 0.1);
  double naive = 0.0;
  for (double x : v) naive += x;
  const double exact = 0.1L * static_cast<long double>(v.size());
  EXPECT_LE(std::abs(pairwise_sum(v) - exact), std::abs(naive - exact));
}

TEST(ParallelFor, CoversRangeOnce) {
  for (unsigned t : {1u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(103);
    parallel_for(hits.size(), t, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) ++hits[i];
    });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  parallel_for(0, 4, [](std::size_t, std::size_t) { FAIL(); });
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 4,
                            [](std::size_t lo, std::size_t) {
                              if (lo == 0) throw ValidationError("boom");
                            }),
               ValidationError);
}

TEST(Threads, Resolve) {
  EXPECT_GE(resolve_threads(0), 1u);
  EXPECT_EQ(resolve_threads(3), 3u);
  setenv("VRP_THREADS", "4", 1);
  EXPECT_EQ(threads_from_env(), 4u);
  setenv("VRP_THREADS", "junk", 1);
  EXPECT_EQ(threads_from_env(), 0u);
  unsetenv("VRP_THREADS");
  EXPECT_EQ(threads_from_env(), 0u);
}

TEST(Random, OpenUnitInterval) {
  EXPECT_GT(open_unit(0), 0.0);
  EXPECT_LT(open_unit(~0ULL), 1.0);
  EXPECT_NE(hash_combine(1, 2, 3), hash_combine(1, 3, 2));
}

TEST(Errors, ExitCodes) {
  EXPECT_EQ(exit_code(ErrorKind::configuration), 2);
  EXPECT_EQ(exit_code(ErrorKind::row_sum), 3);
  EXPECT_EQ(exit_code(ErrorKind::missing_file), 4);
  EXPECT_STREQ(to_string(ErrorKind::empty_vicinity), "empty vicinity");
}

}  // namespace
}  // namespace vrp
