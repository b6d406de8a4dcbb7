#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "reference.hpp"
#include "streamsum/dyadic_sketch.hpp"
#include "streamsum/stream.hpp"

using namespace streamsum;

namespace {

// Levels big enough to never evict: the sketch is exact and every rank is an
// identity check against the brute-force oracle.
DyadicSketch exact_dyadic(int bits) {
  return DyadicSketch(bits, [bits](int) {
    SketchConfig cfg;
    cfg.policy = SketchPolicy::ActiveDelete;
    cfg.capacity = std::size_t{1} << bits;
    return std::make_unique<SpaceSavingEstimator>(cfg);
  });
}

}  // namespace

TEST_CASE("one insert lights one node per level") {
  DyadicSketch d = exact_dyadic(3);
  CHECK(d.level_count() == 3);
  d.update(5, 1);
  CHECK(d.level(0).query(5) == 1);
  CHECK(d.level(1).query(2) == 1);  // [4, 6)
  CHECK(d.level(2).query(1) == 1);  // [4, 8)
  CHECK(d.level(0).query(4) == 0);
  CHECK(d.level(1).query(1) == 0);
  CHECK(d.level(2).query(0) == 0);

  d.update(5, -1);
  for (ItemId x = 0; x < 8; ++x) CHECK(d.level(0).query(x) == 0);
  CHECK(d.rank_less(8) == 0);
  CHECK(d.net_count() == 0);
}

TEST_CASE("rank goldens on {1, 5, 5}") {
  DyadicSketch d = exact_dyadic(3);
  d.update(1, 1);
  d.update(5, 1);
  d.update(5, 1);
  CHECK(d.rank_less(0) == 0);
  CHECK(d.rank_less(1) == 0);
  CHECK(d.rank_less(2) == 1);
  CHECK(d.rank_less(5) == 1);
  CHECK(d.rank_less(6) == 3);
  CHECK(d.rank_less(8) == 3);  // full-universe rank = net count
  CHECK(d.rank_leq(5) == 3);
  CHECK(d.quantile(0.0) == 1);
  CHECK(d.quantile(0.5) == 5);
  CHECK(d.quantile(1.0) == 5);
}

TEST_CASE("argument validation") {
  DyadicSketch d = exact_dyadic(3);
  CHECK_THROWS_AS(d.update(8, 1), std::out_of_range);
  CHECK_THROWS_AS(d.update(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(d.rank_less(9), std::out_of_range);
  CHECK_THROWS_AS(d.quantile(0.5), std::out_of_range);  // empty
  CHECK_THROWS_AS(d.quantile(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(d.quantile(1.1), std::invalid_argument);
  CHECK_THROWS_AS(DyadicSketch(0, [](int) {
                    return std::make_unique<LinearEstimator>(LinearKind::CountMin,
                                                             0.1, 0.1, 0);
                  }),
                  std::invalid_argument);
}

TEST_CASE("exact-capacity levels reproduce the brute-force oracle") {
  auto inserts = gen_zipf(10, 1.0, 3000, 9);
  Stream stream = apply_deletions(inserts, 10, 0.4, DeletePattern::ShuffledUniform,
                                  DeleteOrdering::Interleaved, 9, "zipf");
  refimpl::DyadicOracle oracle(stream.ops, 10);
  DyadicSketch d = exact_dyadic(10);
  for (const StreamOp& op : stream.ops)
    d.update(op.item, op.kind == OpKind::Insert ? 1 : -1);
  for (ItemId x = 0; x <= 1024; ++x) REQUIRE(d.rank_less(x) == oracle.rank_less(x));
  for (double q : {0.0, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0})
    REQUIRE(d.quantile(q) == oracle.quantile(q));
}

TEST_CASE("factory wiring") {
  SUBCASE("deterministic rank sketch") {
    DyadicSketch d = make_dss(16, 0.1, 2.0);
    CHECK(d.level_count() == 16);
    for (std::size_t h = 0; h < 16; ++h) {
      const auto* level = dynamic_cast<const SpaceSavingEstimator*>(&d.level(h));
      REQUIRE(level != nullptr);
      // capacity_for(0.1 / 16, alpha = 2, ActiveDelete) = ceil(2 * 2 * 160)
      CHECK(level->sketch().capacity() == 640);
      CHECK(level->sketch().config().policy == SketchPolicy::ActiveDelete);
    }
    CHECK(d.counters() == 16 * 640);
  }
  SUBCASE("randomized rank sketch splits delta across levels") {
    DyadicSketch d = make_dcs(16, 0.1, std::pow(2.0, -16), 3);
    CHECK(d.level_count() == 16);
    for (std::size_t h = 0; h < 16; ++h) {
      const auto* level = dynamic_cast<const LinearEstimator*>(&d.level(h));
      REQUIRE(level != nullptr);
      CHECK(level->sketch().kind() == LinearKind::CountMedian);
      CHECK(level->sketch().depth() == 21);  // odd >= log2(2^20)
      CHECK(level->sketch().width() == 480); // 3 / (0.1 / 16)
    }
    // distinct per-level seeds: identical tables would defeat the median
    const auto& a = dynamic_cast<const LinearEstimator&>(d.level(0)).sketch();
    const auto& b = dynamic_cast<const LinearEstimator&>(d.level(1)).sketch();
    CHECK(a.seed() != b.seed());
  }
}

TEST_CASE("deterministic rank guarantee on bounded-deletion streams") {
  const double eps = 0.1;
  const int bits = 12;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto inserts = gen_zipf(bits, 1.0, 20000, seed + 40);
    Stream stream = apply_deletions(inserts, bits, 0.5,
                                    DeletePattern::ShuffledUniform,
                                    DeleteOrdering::Interleaved, seed + 40, "zipf");
    DyadicSketch d = make_dss(bits, eps, 2.0);
    refimpl::DyadicOracle oracle(stream.ops, bits);
    for (const StreamOp& op : stream.ops)
      d.update(op.item, op.kind == OpKind::Insert ? 1 : -1);
    CHECK(d.violations() == 0);
    const double bound = eps * static_cast<double>(oracle.total());
    std::int64_t worst = 0;
    for (ItemId x = 0; x <= (ItemId{1} << bits); ++x)
      worst = std::max<std::int64_t>(worst,
                                     std::llabs(d.rank_less(x) - oracle.rank_less(x)));
    CHECK(static_cast<double>(worst) <= bound);

    // per-level conservation: ActiveDelete counts always sum to I - D
    for (std::size_t h = 0; h < d.level_count(); ++h) {
      const auto& sk = dynamic_cast<const SpaceSavingEstimator&>(d.level(h)).sketch();
      std::int64_t sum = 0;
      for (const CounterEntry& e : sk.index().entries()) sum += e.count;
      CHECK(sum == oracle.total());
    }

    // quantile answers must be correct up to the same rank slack
    const std::int64_t net = oracle.total();
    for (double q : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
      ItemId est = d.quantile(q);
      double target = std::max(1.0, std::ceil(q * static_cast<double>(net)));
      CHECK(static_cast<double>(oracle.rank_less(est + 1)) >= target - bound);
      CHECK(static_cast<double>(oracle.rank_less(est)) < target + bound);
    }
  }
}
