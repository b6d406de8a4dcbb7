#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "streamsum/errors.hpp"
#include "streamsum/space_saving.hpp"
#include "streamsum/stream.hpp"

using namespace streamsum;

namespace {

std::map<ItemId, std::int64_t> tally(const std::vector<StreamOp>& ops) {
  std::map<ItemId, std::int64_t> freq;
  for (const StreamOp& op : ops)
    freq[op.item] += op.kind == OpKind::Insert ? 1 : -1;
  return freq;
}

}  // namespace

TEST_CASE("zipf generator") {
  SUBCASE("s = 0 degenerates to uniform") {
    auto ops = gen_zipf(8, 0.0, 51200, 1);
    auto freq = tally(ops);
    // expected 200 per id; 5 sigma ~= 70
    for (const auto& [item, f] : freq) {
      CHECK(item < 256);
      CHECK(std::abs(f - 200) < 70);
    }
  }
  SUBCASE("s = 1 puts the harmonic share on rank 1") {
    auto ops = gen_zipf(16, 1.0, 100000, 2);
    auto freq = tally(ops);
    double h = 0;
    for (int r = 1; r <= 65536; ++r) h += 1.0 / r;
    double expect = 100000.0 / h;  // ~8570
    CHECK(std::abs(static_cast<double>(freq[0]) - expect) < 3 * std::sqrt(expect));
    CHECK(freq[0] > freq[1]);
    CHECK(freq[1] > freq[3]);
  }
  SUBCASE("seed pins the sequence") {
    CHECK(gen_zipf(8, 1.0, 1000, 7) == gen_zipf(8, 1.0, 1000, 7));
    CHECK(gen_zipf(8, 1.0, 1000, 7) != gen_zipf(8, 1.0, 1000, 8));
  }
  CHECK_THROWS_AS(gen_zipf(0, 1.0, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(gen_zipf(21, 1.0, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(gen_zipf(8, -0.5, 10, 0), std::invalid_argument);
}

TEST_CASE("binomial generator") {
  auto ops = gen_binomial(8, 100, 0.3, 20000, 3);
  double mean = 0;
  for (const StreamOp& op : ops) {
    CHECK(op.item <= 100);
    mean += static_cast<double>(op.item);
  }
  mean /= 20000.0;
  // 3 sigma of the sample mean around np = 30
  CHECK(std::abs(mean - 30.0) < 3 * std::sqrt(100 * 0.3 * 0.7 / 20000.0));

  auto tiny = gen_binomial(10, 1000, 0.001, 5000, 4);
  double tiny_mean = 0;
  for (const StreamOp& op : tiny) tiny_mean += static_cast<double>(op.item);
  CHECK(std::abs(tiny_mean / 5000.0 - 1.0) < 0.2);

  CHECK_THROWS_AS(gen_binomial(8, 256, 0.5, 10, 0), std::invalid_argument);  // n too big
  CHECK_THROWS_AS(gen_binomial(8, 100, 0.0, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(gen_binomial(8, 100, 1.0, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(gen_binomial(8, -1, 0.5, 10, 0), std::invalid_argument);
}

TEST_CASE("apply_deletions meets the bounded-deletion contract") {
  auto inserts = gen_zipf(12, 1.0, 20000, 5);

  SUBCASE("delete count and declared alpha") {
    auto big = gen_zipf(10, 0.5, 2000000, 6);
    Stream s = apply_deletions(big, 10, 0.5, DeletePattern::ShuffledUniform,
                               DeleteOrdering::DeletesAfterInserts, 6, "zipf");
    CHECK(s.inserts == 2000000);
    CHECK(s.deletes == 1000000);
    CHECK(s.alpha_declared == doctest::Approx(2.0));
    CHECK(s.net_count() == 1000000);
    CHECK(s.generator == "zipf");
  }

  SUBCASE("every pattern x ordering yields a strict-model stream") {
    for (double ratio : {0.25, 0.9}) {
      for (DeletePattern pat :
           {DeletePattern::ShuffledUniform, DeletePattern::TargetedLeastFrequent}) {
        for (DeleteOrdering ord :
             {DeleteOrdering::DeletesAfterInserts, DeleteOrdering::Interleaved}) {
          Stream s = apply_deletions(inserts, 12, ratio, pat, ord, 5, "zipf");
          CHECK(s.deletes == static_cast<std::uint64_t>(20000 * ratio));
          CHECK(s.ops.size() == s.inserts + s.deletes);
          ExactCounter oracle = strict_replay(s);  // throws on any violation
          CHECK(oracle.f1() == s.net_count());
          // net frequencies must match the insert tally minus deletions
          auto freq = tally(s.ops);
          for (const auto& [item, f] : freq) CHECK(oracle.freq(item) == f);
        }
      }
    }
  }

  SUBCASE("interleaving preserves the insert subsequence") {
    Stream s = apply_deletions(inserts, 12, 0.5, DeletePattern::ShuffledUniform,
                               DeleteOrdering::Interleaved, 5, "zipf");
    std::vector<StreamOp> only_inserts;
    for (const StreamOp& op : s.ops)
      if (op.kind == OpKind::Insert) only_inserts.push_back(op);
    CHECK(only_inserts == inserts);
    bool saw_delete_before_last_insert = false;
    bool seen_delete = false;
    for (const StreamOp& op : s.ops) {
      if (op.kind == OpKind::Delete) seen_delete = true;
      else if (seen_delete) saw_delete_before_last_insert = true;
    }
    CHECK(saw_delete_before_last_insert);
  }

  SUBCASE("targeted pattern deletes least-frequent first, ties by id") {
    std::vector<StreamOp> ins = {{OpKind::Insert, 5}, {OpKind::Insert, 5},
                                 {OpKind::Insert, 7}, {OpKind::Insert, 7},
                                 {OpKind::Insert, 3}};
    Stream s = apply_deletions(ins, 4, 0.4, DeletePattern::TargetedLeastFrequent,
                               DeleteOrdering::DeletesAfterInserts, 0, "manual");
    REQUIRE(s.ops.size() == 7);
    CHECK(s.ops[5] == StreamOp{OpKind::Delete, 3});
    CHECK(s.ops[6] == StreamOp{OpKind::Delete, 5});
  }

  CHECK_THROWS_AS(apply_deletions(inserts, 12, 1.0, DeletePattern::ShuffledUniform,
                                  DeleteOrdering::DeletesAfterInserts, 0, "zipf"),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_deletions(inserts, 12, -0.1, DeletePattern::ShuffledUniform,
                                  DeleteOrdering::DeletesAfterInserts, 0, "zipf"),
                  std::invalid_argument);
}

TEST_CASE("exact counter") {
  ExactCounter c;
  c.insert(1);
  c.insert(1);
  c.insert(1);
  c.insert(9);
  c.erase(1);
  CHECK(c.freq(1) == 2);
  CHECK(c.freq(9) == 1);
  CHECK(c.freq(1234) == 0);
  CHECK(c.f1() == 3);
  CHECK(c.inserted_total() == 4);
  CHECK(c.deleted_total() == 1);
  CHECK(c.distinct_items() == std::vector<ItemId>{1, 9});
  c.erase(9);
  CHECK_THROWS_AS(c.erase(9), ModelViolationError);
  CHECK_THROWS_AS(c.erase(555), ModelViolationError);
  // 9 was inserted at some point: it stays in the distinct set at freq 0
  CHECK(c.distinct_items() == std::vector<ItemId>{1, 9});
}

TEST_CASE("adversarial stream defeats every under-provisioned capacity") {
  Stream s = adversarial_stream(0.25, 2.0);
  CHECK(s.inserts == 8);
  CHECK(s.deletes == 4);
  CHECK(s.alpha_declared == doctest::Approx(2.0));
  CHECK(s.generator == "adversarial");
  ExactCounter oracle = strict_replay(s);
  CHECK(oracle.f1() == 4);

  // all inserts precede all deletes
  bool in_deletes = false;
  for (const StreamOp& op : s.ops) {
    if (op.kind == OpKind::Delete) in_deletes = true;
    else CHECK_FALSE(in_deletes);
  }

  // every surviving item carries exactly the frequent-item threshold mass,
  // so one miss drops recall below 1
  std::vector<ItemId> truth;
  for (ItemId item : oracle.distinct_items())
    if (oracle.freq(item) > 0) {
      CHECK(oracle.freq(item) == 1);  // epsilon * (I - D) = 1
      truth.push_back(item);
    }
  REQUIRE(truth.size() == 4);

  for (std::size_t k = 1; k < 8; ++k) {
    SketchConfig cfg;
    cfg.epsilon = 0.25;
    cfg.alpha = 2.0;
    cfg.policy = SketchPolicy::ActiveDelete;
    cfg.capacity = k;
    SpaceSavingSketch sk(cfg);
    for (const StreamOp& op : s.ops)
      sk.update(op.item, op.kind == OpKind::Insert ? 1 : -1);
    std::size_t hits = 0;
    for (ItemId item : truth)
      if (sk.query(item) >= 1) ++hits;
    CHECK(hits < truth.size());
  }

  // at alpha/epsilon counters nothing is ever evicted and recall is perfect
  SketchConfig cfg;
  cfg.epsilon = 0.25;
  cfg.alpha = 2.0;
  cfg.policy = SketchPolicy::ActiveDelete;
  cfg.capacity = 8;
  SpaceSavingSketch sk(cfg);
  for (const StreamOp& op : s.ops)
    sk.update(op.item, op.kind == OpKind::Insert ? 1 : -1);
  for (ItemId item : truth) CHECK(sk.query(item) == 1);

  CHECK_THROWS_AS(adversarial_stream(0.3, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(adversarial_stream(0.25, 0.5), std::invalid_argument);
}

TEST_CASE("stream files") {
  SUBCASE("write -> read -> write is byte identical") {
    auto inserts = gen_zipf(9, 1.0, 300, 21);
    Stream s = apply_deletions(inserts, 9, 0.3, DeletePattern::TargetedLeastFrequent,
                               DeleteOrdering::Interleaved, 21, "zipf");
    std::ostringstream first;
    stream_write(s, first);
    std::istringstream in(first.str());
    Stream back = stream_read(in);
    CHECK(back.ops == s.ops);
    CHECK(back.universe_bits == s.universe_bits);
    CHECK(back.alpha_declared == s.alpha_declared);
    CHECK(back.seed == s.seed);
    CHECK(back.generator == s.generator);
    CHECK(back.inserts == s.inserts);
    CHECK(back.deletes == s.deletes);
    std::ostringstream second;
    stream_write(back, second);
    CHECK(first.str() == second.str());
  }

  SUBCASE("header grammar") {
    std::istringstream ok("# universe_bits=16 alpha=2.0 seed=42\nI 7\nD 7\n");
    Stream s = stream_read(ok);
    CHECK(s.universe_bits == 16);
    CHECK(s.alpha_declared == 2.0);
    CHECK(s.seed == 42);
    CHECK(s.generator.empty());
    CHECK(s.inserts == 1);
    CHECK(s.deletes == 1);

    std::istringstream missing("I 7\n");
    CHECK_THROWS_AS(stream_read(missing), ParseError);
    std::istringstream unknown("# universe_bits=16 alpha=1 seed=0 color=red\nI 7\n");
    CHECK_THROWS_AS(stream_read(unknown), ParseError);
    std::istringstream incomplete("# universe_bits=16 seed=0\nI 7\n");
    CHECK_THROWS_AS(stream_read(incomplete), ParseError);
  }

  SUBCASE("op grammar names the offending line") {
    std::istringstream bad("# universe_bits=16 alpha=1 seed=0\nI 7\nX 9\n");
    try {
      stream_read(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("(line 3)") != std::string::npos);
    }
  }

  SUBCASE("strict replay pins the violating line") {
    std::istringstream bad("# universe_bits=16 alpha=1 seed=0\nD 7\nI 7\n");
    Stream s = stream_read(bad);  // parsing is fine, semantics are not
    try {
      strict_replay(s);
      FAIL("expected ModelViolationError");
    } catch (const ModelViolationError& e) {
      CHECK(std::string(e.what()).find("(line 2)") != std::string::npos);
    }
  }

  SUBCASE("save and load round trip") {
    auto inserts = gen_zipf(8, 1.0, 100, 31);
    Stream s = apply_deletions(inserts, 8, 0.5, DeletePattern::ShuffledUniform,
                               DeleteOrdering::DeletesAfterInserts, 31, "zipf");
    std::string path = "stream_io_test.txt";
    stream_save(s, path);
    Stream back = stream_load(path);
    CHECK(back.ops == s.ops);
    std::remove(path.c_str());
    CHECK_THROWS_AS(stream_load("does_not_exist.txt"), std::runtime_error);
  }
}
