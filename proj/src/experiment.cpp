#include "streamsum/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "streamsum/counter_rng.hpp"
#include "streamsum/errors.hpp"
#include "streamsum/linear_sketch.hpp"
#include "streamsum/metrics.hpp"
#include "streamsum/numeric_util.hpp"
#include "streamsum/space_saving.hpp"

namespace streamsum {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

// Either family behind one update/query surface.
struct AnySketch {
  std::unique_ptr<SpaceSavingSketch> counter;
  std::unique_ptr<LinearSketch> linear;

  void update(ItemId item, int weight) {
    if (counter)
      counter->update(item, weight);
    else
      linear->update(item, weight);
  }
  std::int64_t query(ItemId item) const {
    return counter ? counter->query(item) : linear->query(item);
  }
};

struct Resolved {
  double alpha = 1.0;
  double delta = 0.0;
  double phi = 0.0;
  SketchPolicy policy = SketchPolicy::InsertOnly;
  bool is_linear = false;
};

Resolved resolve(const SketchSpec& spec, const Stream& stream,
                 const ExactCounter& oracle) {
  Resolved r;
  if (spec.alpha > 0.0) {
    r.alpha = spec.alpha;
  } else if (oracle.deleted_total() > 0) {
    r.alpha = static_cast<double>(oracle.inserted_total()) /
              static_cast<double>(oracle.f1());
  }
  r.delta = spec.delta > 0.0 ? spec.delta : std::pow(2.0, -stream.universe_bits);
  r.phi = spec.phi > 0.0 ? spec.phi : spec.epsilon;
  switch (spec.kind) {
    case SketchKind::SpaceSaving: r.policy = SketchPolicy::InsertOnly; break;
    case SketchKind::Lazy: r.policy = SketchPolicy::LazyDelete; break;
    case SketchKind::SpaceSavingPM: r.policy = SketchPolicy::ActiveDelete; break;
    default: r.is_linear = true; break;
  }
  return r;
}

AnySketch build_sketch(const SketchSpec& spec, const Resolved& r,
                       std::uint64_t sketch_seed) {
  AnySketch s;
  if (!r.is_linear) {
    SketchConfig cfg;
    cfg.epsilon = spec.epsilon;
    cfg.alpha = r.alpha;
    cfg.policy = r.policy;
    cfg.capacity = spec.counters;
    s.counter = std::make_unique<SpaceSavingSketch>(cfg);
    return s;
  }
  LinearKind kind = spec.kind == SketchKind::CountMin ? LinearKind::CountMin
                                                      : LinearKind::CountMedian;
  LinearDims dims = linear_dims(kind, spec.epsilon, r.delta);
  if (spec.counters != 0) {
    // Space-matched construction: keep the formula depth, spend the budget
    // on width.
    dims.width = std::max<std::size_t>(1, spec.counters / dims.depth);
  }
  s.linear = std::make_unique<LinearSketch>(kind, dims, sketch_seed);
  return s;
}

}  // namespace

const char* to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::SpaceSaving: return "ss";
    case SketchKind::Lazy: return "lazy";
    case SketchKind::SpaceSavingPM: return "ssp";
    case SketchKind::CountMin: return "cm";
    case SketchKind::CountMedian: return "cmedian";
  }
  return "unknown";
}

SketchKind sketch_kind_from(const std::string& name) {
  if (name == "ss") return SketchKind::SpaceSaving;
  if (name == "lazy") return SketchKind::Lazy;
  if (name == "ssp") return SketchKind::SpaceSavingPM;
  if (name == "cm") return SketchKind::CountMin;
  if (name == "cmedian") return SketchKind::CountMedian;
  throw std::invalid_argument("unknown sketch kind '" + name + "'");
}

const char* to_string(DeletePattern pattern) {
  return pattern == DeletePattern::ShuffledUniform ? "shuffled" : "targeted";
}

DeletePattern pattern_from(const std::string& name) {
  if (name == "shuffled") return DeletePattern::ShuffledUniform;
  if (name == "targeted") return DeletePattern::TargetedLeastFrequent;
  throw std::invalid_argument("unknown delete pattern '" + name + "'");
}

const char* to_string(DeleteOrdering ordering) {
  return ordering == DeleteOrdering::DeletesAfterInserts ? "after" : "interleaved";
}

DeleteOrdering ordering_from(const std::string& name) {
  if (name == "after") return DeleteOrdering::DeletesAfterInserts;
  if (name == "interleaved") return DeleteOrdering::Interleaved;
  throw std::invalid_argument("unknown delete ordering '" + name + "'");
}

Stream generate(const GeneratorSpec& spec) {
  std::vector<StreamOp> inserts;
  if (spec.dist == "zipf") {
    inserts = gen_zipf(spec.universe_bits, spec.s, spec.inserts, spec.seed);
  } else if (spec.dist == "binomial") {
    inserts = gen_binomial(spec.universe_bits, spec.n, spec.p, spec.inserts, spec.seed);
  } else {
    throw std::invalid_argument("unknown distribution '" + spec.dist + "'");
  }
  return apply_deletions(inserts, spec.universe_bits, spec.ratio, spec.pattern,
                         spec.ordering, spec.seed, spec.dist);
}

ExperimentSpec experiment_from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  ExperimentSpec spec;
  spec.name = doc.value("name", std::string{});
  spec.reps = doc.value("reps", 5);
  if (doc.contains("generator")) {
    const auto& g = doc["generator"];
    spec.gen.dist = g.value("dist", spec.gen.dist);
    spec.gen.s = g.value("s", spec.gen.s);
    spec.gen.n = g.value("n", spec.gen.n);
    spec.gen.p = g.value("p", spec.gen.p);
    spec.gen.universe_bits = g.value("universe_bits", spec.gen.universe_bits);
    spec.gen.inserts = g.value("inserts", spec.gen.inserts);
    spec.gen.ratio = g.value("ratio", spec.gen.ratio);
    if (g.contains("pattern")) spec.gen.pattern = pattern_from(g["pattern"]);
    if (g.contains("order")) spec.gen.ordering = ordering_from(g["order"]);
    spec.gen.seed = g.value("seed", spec.gen.seed);
  }
  if (doc.contains("sketch")) {
    const auto& s = doc["sketch"];
    if (s.contains("kind")) spec.sketch.kind = sketch_kind_from(s["kind"]);
    spec.sketch.epsilon = s.value("epsilon", spec.sketch.epsilon);
    spec.sketch.alpha = s.value("alpha", spec.sketch.alpha);
    spec.sketch.delta = s.value("delta", spec.sketch.delta);
    spec.sketch.counters = s.value("counters", spec.sketch.counters);
    spec.sketch.phi = s.value("phi", spec.sketch.phi);
  }
  return spec;
}

std::string experiment_to_json(const ExperimentSpec& spec) {
  nlohmann::ordered_json doc;
  doc["name"] = spec.name;
  doc["reps"] = spec.reps;
  doc["generator"] = {
      {"dist", spec.gen.dist},         {"s", spec.gen.s},
      {"n", spec.gen.n},               {"p", spec.gen.p},
      {"universe_bits", spec.gen.universe_bits},
      {"inserts", spec.gen.inserts},   {"ratio", spec.gen.ratio},
      {"pattern", to_string(spec.gen.pattern)},
      {"order", to_string(spec.gen.ordering)},
      {"seed", spec.gen.seed},
  };
  doc["sketch"] = {
      {"kind", to_string(spec.sketch.kind)}, {"epsilon", spec.sketch.epsilon},
      {"alpha", spec.sketch.alpha},          {"delta", spec.sketch.delta},
      {"counters", spec.sketch.counters},    {"phi", spec.sketch.phi},
  };
  return doc.dump();
}

std::string EvalReport::json() const {
  nlohmann::ordered_json doc;
  doc["sketch_name"] = sketch_name;
  doc["policy"] = policy;
  doc["counters"] = counters;
  doc["space_bits"] = space_bits;
  doc["epsilon"] = epsilon;
  doc["alpha"] = alpha;
  doc["delete_ratio"] = delete_ratio;
  doc["threshold"] = threshold;
  doc["mse"] = mse;
  doc["max_abs_error"] = max_abs_error;
  if (recall) doc["recall"] = *recall;
  if (precision) doc["precision"] = *precision;
  if (recall_positive) doc["recall_positive"] = *recall_positive;
  if (ks) doc["ks"] = *ks;
  if (ns_per_update) doc["ns_per_update"] = *ns_per_update;
  doc["seed"] = seed;
  doc["violations"] = violations;
  doc["guarantees_ok"] = guarantees_ok;
  return doc.dump();
}

std::string EvalReport::csv_header() {
  return "sketch_name,policy,counters,space_bits,epsilon,alpha,delete_ratio,"
         "threshold,mse,max_abs_error,recall,precision,recall_positive,ks,"
         "ns_per_update,seed,violations";
}

std::string EvalReport::csv_row() const {
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; };
  std::string row;
  row += sketch_name + ',' + policy + ',';
  row += std::to_string(counters) + ',' + std::to_string(space_bits) + ',';
  row += fmt(epsilon) + ',' + fmt(alpha) + ',' + fmt(delete_ratio) + ',';
  row += fmt(threshold) + ',' + fmt(mse) + ',' + std::to_string(max_abs_error) + ',';
  row += opt(recall) + ',' + opt(precision) + ',' + opt(recall_positive) + ',';
  row += opt(ks) + ',' + opt(ns_per_update) + ',';
  row += std::to_string(seed) + ',' + std::to_string(violations);
  return row;
}

EvalReport evaluate_on_stream(const Stream& stream, const ExactCounter& oracle,
                              const SketchSpec& spec, std::uint64_t sketch_seed) {
  Resolved r = resolve(spec, stream, oracle);
  if (spec.kind == SketchKind::SpaceSaving && stream.deletes > 0)
    throw std::invalid_argument("evaluate_on_stream: 'ss' cannot take deletions");
  AnySketch sketch = build_sketch(spec, r, sketch_seed);
  for (const StreamOp& op : stream.ops)
    sketch.update(op.item, op.kind == OpKind::Insert ? 1 : -1);

  EvalReport report;
  report.sketch_name = to_string(spec.kind);
  report.policy = r.is_linear ? "turnstile" : to_string(r.policy);
  report.epsilon = spec.epsilon;
  report.alpha = r.alpha;
  report.delete_ratio =
      stream.inserts == 0 ? 0.0
                          : static_cast<double>(stream.deletes) /
                                static_cast<double>(stream.inserts);
  report.threshold = r.phi;
  report.seed = stream.seed;
  if (sketch.counter) {
    report.counters = sketch.counter->capacity();
    report.space_bits = static_cast<std::uint64_t>(sketch.counter->capacity()) * 128;
    report.violations = sketch.counter->violations();
  } else {
    report.counters = sketch.linear->counters();
    report.space_bits = sketch.linear->space_bits();
  }

  std::vector<ItemId> eval_set = oracle.distinct_items();
  auto query = [&](ItemId item) { return sketch.query(item); };
  report.mse = mse(query, oracle, eval_set);
  report.max_abs_error = max_abs_error(query, oracle, eval_set);

  std::vector<ItemId> truth = frequent_items(oracle, r.phi);
  std::vector<ItemId> reported;
  if (sketch.counter) {
    for (const auto& [item, estimate] : sketch.counter->report_threshold(r.phi))
      reported.push_back(item);
  } else {
    // Linear sketches have no item directory; sweep the universe when it is
    // small enough, otherwise fall back to the evaluation set.
    double bar = r.phi * static_cast<double>(oracle.f1());
    auto consider = [&](ItemId item) {
      std::int64_t est = sketch.query(item);
      if (est > 0 && static_cast<double>(est) >= bar - 1e-9) reported.push_back(item);
    };
    if (stream.universe_bits <= 16) {
      ItemId universe = ItemId{1} << stream.universe_bits;
      for (ItemId x = 0; x < universe; ++x) consider(x);
    } else {
      for (ItemId x : eval_set) consider(x);
    }
  }
  SetMetrics sm = set_metrics(reported, truth);
  report.recall = sm.recall;
  report.precision = sm.precision;

  std::size_t positive_fn = 0;
  if (sketch.counter && r.policy == SketchPolicy::ActiveDelete) {
    std::vector<ItemId> positive;
    for (const auto& [item, estimate] : sketch.counter->report_positive())
      positive.push_back(item);
    SetMetrics pm = set_metrics(positive, truth);
    report.recall_positive = pm.recall;
    positive_fn = pm.fn;
  }

  // Theorem gates for guarantee-grade deterministic configurations.
  if (sketch.counter && sketch.counter->guarantee_grade()) {
    double bound = spec.epsilon * static_cast<double>(oracle.f1());
    bool bound_ok = r.policy == SketchPolicy::ActiveDelete
                        ? int_leq(report.max_abs_error, bound)
                        : int_less(report.max_abs_error, bound);
    if (!bound_ok) {
      report.guarantees_ok = false;
      report.guarantee_notes.push_back(
          "max_abs_error " + std::to_string(report.max_abs_error) +
          " breaks bound " + fmt(bound));
    }
    std::size_t missed = r.policy == SketchPolicy::ActiveDelete ? positive_fn : sm.fn;
    if (missed != 0) {
      report.guarantees_ok = false;
      report.guarantee_notes.push_back("missed " + std::to_string(missed) +
                                       " frequent item(s)");
    }
    if (report.violations != 0) {
      report.guarantees_ok = false;
      report.guarantee_notes.push_back(std::to_string(report.violations) +
                                       " model violation(s)");
    }
  }
  return report;
}

EvalReport aggregate_reports(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate_reports: no reports");
  EvalReport out = reports.front();
  auto mean_of = [&](auto pick) -> std::optional<double> {
    double acc = 0.0;
    std::size_t n = 0;
    for (const EvalReport& r : reports) {
      auto v = pick(r);
      if (v) {
        acc += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return acc / static_cast<double>(n);
  };
  double mse_acc = 0.0;
  for (const EvalReport& r : reports) mse_acc += r.mse;
  out.mse = mse_acc / static_cast<double>(reports.size());
  out.recall = mean_of([](const EvalReport& r) { return r.recall; });
  out.precision = mean_of([](const EvalReport& r) { return r.precision; });
  out.recall_positive = mean_of([](const EvalReport& r) { return r.recall_positive; });
  out.ks = mean_of([](const EvalReport& r) { return r.ks; });
  out.ns_per_update = mean_of([](const EvalReport& r) { return r.ns_per_update; });
  out.max_abs_error = 0;
  out.violations = 0;
  out.guarantees_ok = true;
  out.guarantee_notes.clear();
  for (const EvalReport& r : reports) {
    out.max_abs_error = std::max(out.max_abs_error, r.max_abs_error);
    out.violations += r.violations;
    out.guarantees_ok = out.guarantees_ok && r.guarantees_ok;
    out.guarantee_notes.insert(out.guarantee_notes.end(), r.guarantee_notes.begin(),
                               r.guarantee_notes.end());
  }
  return out;
}

EvalReport run_experiment(const ExperimentSpec& spec) {
  if (spec.reps < 1) throw std::invalid_argument("run_experiment: reps must be >= 1");
  std::vector<EvalReport> reports(spec.reps);
  std::vector<std::exception_ptr> errors(spec.reps);
  auto worker = [&](int rep) {
    try {
      GeneratorSpec gen = spec.gen;
      gen.seed = spec.gen.seed + static_cast<std::uint64_t>(rep);
      Stream stream = generate(gen);
      ExactCounter oracle = strict_replay(stream);
      reports[rep] =
          evaluate_on_stream(stream, oracle, spec.sketch, mix_seed(gen.seed, 77));
    } catch (...) {
      errors[rep] = std::current_exception();
    }
  };
  if (spec.reps == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(spec.reps);
    for (int rep = 0; rep < spec.reps; ++rep) threads.emplace_back(worker, rep);
    for (std::thread& t : threads) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  EvalReport out = aggregate_reports(reports);
  out.seed = spec.gen.seed;
  return out;
}

double bench_ns_per_update(const SketchSpec& spec, const Stream& stream) {
  if (stream.ops.empty()) throw std::invalid_argument("bench_ns_per_update: empty stream");
  ExactCounter oracle;  // only needed to resolve alpha for sizing
  for (const StreamOp& op : stream.ops)
    if (op.kind == OpKind::Insert)
      oracle.insert(op.item);
    else
      oracle.erase(op.item);
  Resolved r = resolve(spec, stream, oracle);
  auto replay = [&](AnySketch& sketch) {
    for (const StreamOp& op : stream.ops)
      sketch.update(op.item, op.kind == OpKind::Insert ? 1 : -1);
  };
  {
    AnySketch warm = build_sketch(spec, r, mix_seed(stream.seed, 7));
    replay(warm);
  }
  std::vector<double> rates;
  for (int batch = 0; batch < 5; ++batch) {
    AnySketch sketch = build_sketch(spec, r, mix_seed(stream.seed, 7));
    auto t0 = std::chrono::steady_clock::now();
    replay(sketch);
    auto t1 = std::chrono::steady_clock::now();
    double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();
    rates.push_back(ns / static_cast<double>(stream.ops.size()));
  }
  std::nth_element(rates.begin(), rates.begin() + 2, rates.end());
  return rates[2];
}

}  // namespace streamsum
