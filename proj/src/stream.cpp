#include "streamsum/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "streamsum/counter_rng.hpp"
#include "streamsum/errors.hpp"
#include "streamsum/numeric_util.hpp"
#include "streamsum/space_saving.hpp"

namespace streamsum {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::uint64_t parse_u64(const std::string& text, std::size_t line) {
  std::uint64_t value = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || p != text.data() + text.size())
    throw ParseError("expected unsigned integer, got '" + text + "'", line);
  return value;
}

}  // namespace

void ExactCounter::insert(ItemId item) {
  ++counts_[item];
  ++inserted_;
}

void ExactCounter::erase(ItemId item) {
  auto it = counts_.find(item);
  if (it == counts_.end() || it->second == 0)
    throw ModelViolationError("delete of item " + std::to_string(item) +
                              " with zero remaining frequency");
  --it->second;
  ++deleted_;
}

void ExactCounter::apply(const StreamOp& op) {
  if (op.kind == OpKind::Insert)
    insert(op.item);
  else
    erase(op.item);
}

std::int64_t ExactCounter::freq(ItemId item) const {
  auto it = counts_.find(item);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<ItemId> ExactCounter::distinct_items() const {
  std::vector<ItemId> items;
  items.reserve(counts_.size());
  for (const auto& [item, count] : counts_) items.push_back(item);
  std::sort(items.begin(), items.end());
  return items;
}

ExactCounter strict_replay(const Stream& stream) {
  ExactCounter oracle;
  for (std::size_t i = 0; i < stream.ops.size(); ++i) {
    try {
      oracle.apply(stream.ops[i]);
    } catch (const ModelViolationError& e) {
      // Op i sits on file line i + 2 (the header is line 1).
      throw ModelViolationError(std::string(e.what()) + " (line " +
                                std::to_string(i + 2) + ")");
    }
  }
  return oracle;
}

ZipfSampler::ZipfSampler(int universe_bits, double s) {
  if (universe_bits < 1 || universe_bits > 20)
    throw std::invalid_argument("ZipfSampler: universe_bits must be in [1, 20]");
  if (!(s >= 0.0))
    throw std::invalid_argument("ZipfSampler: s must be >= 0");
  std::size_t universe = std::size_t{1} << universe_bits;
  cdf_.resize(universe);
  double acc = 0.0;
  for (std::size_t r = 1; r <= universe; ++r) {
    acc += std::pow(static_cast<double>(r), -s);
    cdf_[r - 1] = acc;
  }
  for (double& v : cdf_) v /= acc;
  cdf_.back() = 1.0;
}

ItemId ZipfSampler::sample(double unit) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), unit);
  if (it == cdf_.end()) --it;
  return static_cast<ItemId>(it - cdf_.begin());
}

std::vector<StreamOp> gen_zipf(int universe_bits, double s,
                               std::uint64_t inserts, std::uint64_t seed) {
  ZipfSampler sampler(universe_bits, s);
  CounterRng rng(mix_seed(seed, 0));
  std::vector<StreamOp> ops;
  ops.reserve(inserts);
  for (std::uint64_t i = 0; i < inserts; ++i)
    ops.push_back(StreamOp{OpKind::Insert, sampler.sample(rng.next_unit())});
  return ops;
}

std::vector<StreamOp> gen_binomial(int universe_bits, int n, double p,
                                   std::uint64_t inserts, std::uint64_t seed) {
  if (universe_bits < 1 || universe_bits > 63)
    throw std::invalid_argument("gen_binomial: universe_bits must be in [1, 63]");
  if (n < 0 || n > (1 << 20))
    throw std::invalid_argument("gen_binomial: n out of range");
  if (universe_bits < 63 && static_cast<std::uint64_t>(n) >= (std::uint64_t{1} << universe_bits))
    throw std::invalid_argument("gen_binomial: n must be below 2^universe_bits");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("gen_binomial: p must be in (0, 1)");
  // Log-space pmf (stable for large n), shifted by the max before
  // exponentiating, then folded into a normalized CDF for inversion.
  std::vector<double> log_pmf(n + 1);
  double log_p = std::log(p);
  double log_q = std::log1p(-p);
  double max_log = -HUGE_VAL;
  for (int k = 0; k <= n; ++k) {
    log_pmf[k] = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                 std::lgamma(n - k + 1.0) + k * log_p + (n - k) * log_q;
    max_log = std::max(max_log, log_pmf[k]);
  }
  std::vector<double> cdf(n + 1);
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    acc += std::exp(log_pmf[k] - max_log);
    cdf[k] = acc;
  }
  for (double& v : cdf) v /= acc;
  cdf.back() = 1.0;

  CounterRng rng(mix_seed(seed, 0));
  std::vector<StreamOp> ops;
  ops.reserve(inserts);
  for (std::uint64_t i = 0; i < inserts; ++i) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), rng.next_unit());
    if (it == cdf.end()) --it;
    ops.push_back(StreamOp{OpKind::Insert, static_cast<ItemId>(it - cdf.begin())});
  }
  return ops;
}

Stream apply_deletions(const std::vector<StreamOp>& inserts, int universe_bits,
                       double ratio, DeletePattern pattern,
                       DeleteOrdering ordering, std::uint64_t seed,
                       const std::string& generator_name) {
  if (!(ratio >= 0.0) || ratio >= 1.0)
    throw std::invalid_argument("apply_deletions: ratio must be in [0, 1)");
  for (const StreamOp& op : inserts)
    if (op.kind != OpKind::Insert)
      throw std::invalid_argument("apply_deletions: prefix must be insert-only");

  const std::uint64_t total_inserts = inserts.size();
  const std::uint64_t total_deletes =
      static_cast<std::uint64_t>(floor_snap(ratio * static_cast<double>(total_inserts)));

  // Pick which insertion occurrences die; del_pos holds 0-based positions
  // into the insert prefix, in deletion order.
  std::vector<std::uint64_t> del_pos;
  del_pos.reserve(total_deletes);
  CounterRng pick_rng(mix_seed(seed, 1));
  if (pattern == DeletePattern::ShuffledUniform) {
    std::vector<std::uint64_t> idx(total_inserts);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::uint64_t j = 0; j < total_deletes; ++j) {
      std::uint64_t k = j + pick_rng.next_below(total_inserts - j);
      std::swap(idx[j], idx[k]);
      del_pos.push_back(idx[j]);
    }
  } else {
    // Least-frequent-first: repeatedly kill one occurrence of the item with
    // the smallest remaining positive frequency (ties to the smaller id).
    std::unordered_map<ItemId, std::int64_t> freq;
    std::unordered_map<ItemId, std::vector<std::uint64_t>> positions;
    for (std::uint64_t i = 0; i < total_inserts; ++i) {
      ++freq[inserts[i].item];
      positions[inserts[i].item].push_back(i);
    }
    std::unordered_map<ItemId, std::size_t> used;
    using Node = std::pair<std::int64_t, ItemId>;
    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> heap;
    for (const auto& [item, f] : freq) heap.emplace(f, item);
    for (std::uint64_t d = 0; d < total_deletes; ++d) {
      while (heap.top().first != freq[heap.top().second]) heap.pop();
      auto [f, item] = heap.top();
      heap.pop();
      del_pos.push_back(positions[item][used[item]++]);
      freq[item] = f - 1;
      if (f - 1 > 0) heap.emplace(f - 1, item);
    }
  }

  Stream stream;
  stream.universe_bits = universe_bits;
  stream.seed = seed;
  stream.generator = generator_name;
  stream.inserts = total_inserts;
  stream.deletes = total_deletes;
  stream.alpha_declared =
      total_deletes == 0 ? 1.0
                         : static_cast<double>(total_inserts) /
                               static_cast<double>(total_inserts - total_deletes);

  if (ordering == DeleteOrdering::DeletesAfterInserts) {
    stream.ops = inserts;
    stream.ops.reserve(total_inserts + total_deletes);
    for (std::uint64_t p : del_pos)
      stream.ops.push_back(StreamOp{OpKind::Delete, inserts[p].item});
    return stream;
  }

  // Interleaved: insert i keeps key i+1; a delete bound to occurrence p gets
  // a random key in (p+1, I+1], so it always lands after the insert that
  // covers it and every prefix stays nonnegative. Equal keys sort the insert
  // first.
  struct Node {
    double key;
    std::uint8_t is_delete;
    std::uint64_t idx;
  };
  CounterRng key_rng(mix_seed(seed, 2));
  std::vector<Node> nodes;
  nodes.reserve(total_inserts + total_deletes);
  for (std::uint64_t i = 0; i < total_inserts; ++i)
    nodes.push_back(Node{static_cast<double>(i + 1), 0, i});
  for (std::uint64_t j = 0; j < total_deletes; ++j) {
    double p = static_cast<double>(del_pos[j] + 1);
    double key = p + key_rng.next_unit() * (static_cast<double>(total_inserts) + 1.0 - p);
    nodes.push_back(Node{key, 1, j});
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
    if (a.key != b.key) return a.key < b.key;
    if (a.is_delete != b.is_delete) return a.is_delete < b.is_delete;
    return a.idx < b.idx;
  });
  stream.ops.reserve(nodes.size());
  for (const Node& n : nodes) {
    if (n.is_delete)
      stream.ops.push_back(StreamOp{OpKind::Delete, inserts[del_pos[n.idx]].item});
    else
      stream.ops.push_back(inserts[n.idx]);
  }
  return stream;
}

Stream adversarial_stream(double epsilon, double alpha) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("adversarial_stream: epsilon must be in (0, 1]");
  if (!(alpha >= 1.0))
    throw std::invalid_argument("adversarial_stream: alpha must be >= 1");
  double unique_f = alpha / epsilon;
  if (!near_integer(unique_f))
    throw std::invalid_argument("adversarial_stream: alpha/epsilon must be integral");
  const std::uint64_t unique = static_cast<std::uint64_t>(std::llround(unique_f));
  if (unique < 2)
    throw std::invalid_argument("adversarial_stream: need at least two distinct items");

  // Smallest multiplicity c that keeps the delete count integral
  // (I = unique * c, I - D = c / epsilon).
  std::uint64_t multiplicity = 0;
  for (std::uint64_t cand = 1; cand <= 1u << 20; ++cand) {
    if (near_integer(static_cast<double>(cand) / epsilon)) {
      multiplicity = cand;
      break;
    }
  }
  if (multiplicity == 0)
    throw std::invalid_argument("adversarial_stream: epsilon admits no integral layout");
  const std::uint64_t total_inserts = unique * multiplicity;
  const std::uint64_t net = static_cast<std::uint64_t>(
      std::llround(static_cast<double>(multiplicity) / epsilon));
  const std::uint64_t total_deletes = total_inserts - net;

  std::vector<StreamOp> inserts;
  inserts.reserve(total_inserts);
  for (std::uint64_t x = 0; x < unique; ++x)
    for (std::uint64_t i = 0; i < multiplicity; ++i)
      inserts.push_back(StreamOp{OpKind::Insert, x});

  // Probe the shared insert path at every sub-guarantee capacity. All
  // policies process insertions identically, so the monitored set after the
  // insert prefix is a pure function of the capacity.
  std::vector<std::vector<char>> monitored(unique);
  std::vector<std::uint32_t> membership(unique, 0);
  for (std::uint64_t k = 1; k < unique; ++k) {
    SketchConfig cfg;
    cfg.epsilon = 1.0;
    cfg.alpha = 1.0;
    cfg.policy = SketchPolicy::InsertOnly;
    cfg.capacity = k;
    SpaceSavingSketch probe(cfg);
    for (const StreamOp& op : inserts) probe.insert(op.item);
    std::vector<char> mon(unique, 0);
    for (const CounterEntry& e : probe.index().entries())
      if (e.item < unique) mon[e.item] = 1;
    for (std::uint64_t x = 0; x < unique; ++x) membership[x] += mon[x];
    monitored[k] = std::move(mon);
  }

  // Deletions wipe whole items (c each, last one partial). Choose victims
  // that the probes monitor most often, then verify that every capacity
  // k < unique still has an untouched unmonitored item; swap victims until
  // that holds.
  const std::uint64_t victim_count =
      total_deletes == 0 ? 0 : (total_deletes + multiplicity - 1) / multiplicity;
  std::vector<ItemId> by_membership(unique);
  std::iota(by_membership.begin(), by_membership.end(), 0);
  std::stable_sort(by_membership.begin(), by_membership.end(),
                   [&](ItemId a, ItemId b) { return membership[a] > membership[b]; });
  std::vector<char> victim(unique, 0);
  for (std::uint64_t i = 0; i < victim_count; ++i) victim[by_membership[i]] = 1;

  auto failing_capacity = [&]() -> std::uint64_t {
    for (std::uint64_t k = 1; k < unique; ++k) {
      bool ok = false;
      for (std::uint64_t x = 0; x < unique && !ok; ++x)
        if (!victim[x] && !monitored[k][x]) ok = true;
      if (!ok) return k;
    }
    return 0;
  };
  for (std::uint64_t round = 0; round <= unique; ++round) {
    std::uint64_t k = failing_capacity();
    if (k == 0) break;
    if (round == unique)
      throw std::logic_error("adversarial_stream: could not aim deletions");
    // Free the weakest victim outside M(k); re-point at the strongest
    // non-victim so the delete budget still lands on monitored items.
    ItemId out = unique, in = unique;
    for (auto it = by_membership.rbegin(); it != by_membership.rend(); ++it)
      if (victim[*it] && !monitored[k][*it]) {
        out = *it;
        break;
      }
    for (ItemId x : by_membership)
      if (!victim[x] && x != out) {
        in = x;
        break;
      }
    if (out == unique || in == unique)
      throw std::logic_error("adversarial_stream: could not aim deletions");
    victim[out] = 0;
    victim[in] = 1;
  }

  Stream stream;
  stream.universe_bits = 1;
  while ((std::uint64_t{1} << stream.universe_bits) < unique) ++stream.universe_bits;
  stream.alpha_declared = alpha;
  stream.seed = 0;
  stream.generator = "adversarial";
  stream.inserts = total_inserts;
  stream.deletes = total_deletes;
  stream.ops = std::move(inserts);
  stream.ops.reserve(total_inserts + total_deletes);
  std::uint64_t remaining = total_deletes;
  for (ItemId x : by_membership) {
    if (!victim[x] || remaining == 0) continue;
    std::uint64_t take = std::min(multiplicity, remaining);
    for (std::uint64_t i = 0; i < take; ++i)
      stream.ops.push_back(StreamOp{OpKind::Delete, x});
    remaining -= take;
  }
  return stream;
}

void stream_write(const Stream& stream, std::ostream& out) {
  out << "# universe_bits=" << stream.universe_bits
      << " alpha=" << fmt_double(stream.alpha_declared)
      << " seed=" << stream.seed
      << " gen=" << (stream.generator.empty() ? "unknown" : stream.generator)
      << '\n';
  for (const StreamOp& op : stream.ops)
    out << (op.kind == OpKind::Insert ? 'I' : 'D') << ' ' << op.item << '\n';
}

Stream stream_read(std::istream& in) {
  Stream stream;
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  if (line.empty() || line[0] != '#') throw ParseError("header must start with '#'", 1);
  std::istringstream header(line.substr(1));
  std::string token;
  bool have_bits = false, have_alpha = false, have_seed = false;
  while (header >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos)
      throw ParseError("bad header token '" + token + "'", 1);
    std::string key = token.substr(0, eq);
    std::string value = token.substr(eq + 1);
    if (key == "universe_bits") {
      stream.universe_bits = static_cast<int>(parse_u64(value, 1));
      have_bits = true;
    } else if (key == "alpha") {
      char* end = nullptr;
      stream.alpha_declared = std::strtod(value.c_str(), &end);
      if (end != value.c_str() + value.size())
        throw ParseError("bad alpha '" + value + "'", 1);
      have_alpha = true;
    } else if (key == "seed") {
      stream.seed = parse_u64(value, 1);
      have_seed = true;
    } else if (key == "gen") {
      stream.generator = value;
    } else {
      throw ParseError("unknown header key '" + key + "'", 1);
    }
  }
  if (!have_bits || !have_alpha || !have_seed)
    throw ParseError("header needs universe_bits, alpha and seed", 1);

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) throw ParseError("empty line", lineno);
    if ((line[0] != 'I' && line[0] != 'D') || line.size() < 3 || line[1] != ' ')
      throw ParseError("expected 'I <id>' or 'D <id>'", lineno);
    StreamOp op;
    op.kind = line[0] == 'I' ? OpKind::Insert : OpKind::Delete;
    op.item = parse_u64(line.substr(2), lineno);
    stream.ops.push_back(op);
    if (op.kind == OpKind::Insert)
      ++stream.inserts;
    else
      ++stream.deletes;
  }
  return stream;
}

void stream_save(const Stream& stream, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  stream_write(stream, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Stream stream_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return stream_read(in);
}

}  // namespace streamsum
