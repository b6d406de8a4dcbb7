#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "streamsum/stream.hpp"
#include "streamsum/types.hpp"

namespace streamsum {

// CLI spellings: ss | lazy | ssp | cm | cmedian.
enum class SketchKind { SpaceSaving, Lazy, SpaceSavingPM, CountMin, CountMedian };

const char* to_string(SketchKind kind);
SketchKind sketch_kind_from(const std::string& name);

const char* to_string(DeletePattern pattern);
DeletePattern pattern_from(const std::string& name);
const char* to_string(DeleteOrdering ordering);
DeleteOrdering ordering_from(const std::string& name);

struct SketchSpec {
  SketchKind kind = SketchKind::SpaceSavingPM;
  double epsilon = 0.05;
  // 0 means "derive from the stream" (alpha from the oracle's I/(I-D),
  // delta from 2^-universe_bits, phi from epsilon, counters from formula).
  double alpha = 0.0;
  double delta = 0.0;
  std::size_t counters = 0;
  double phi = 0.0;
};

struct GeneratorSpec {
  std::string dist = "zipf";  // zipf | binomial
  double s = 1.0;             // zipf skew
  int n = 100;                // binomial trials
  double p = 0.5;             // binomial success probability
  int universe_bits = 16;
  std::uint64_t inserts = 100000;
  double ratio = 0.0;         // deletes = floor(ratio * inserts)
  DeletePattern pattern = DeletePattern::ShuffledUniform;
  DeleteOrdering ordering = DeleteOrdering::DeletesAfterInserts;
  std::uint64_t seed = 0;
};

Stream generate(const GeneratorSpec& spec);

struct ExperimentSpec {
  std::string name;
  GeneratorSpec gen;
  SketchSpec sketch;
  int reps = 5;
};

// JSON round trip for experiment descriptors (schema in the README).
ExperimentSpec experiment_from_json(const std::string& text);
std::string experiment_to_json(const ExperimentSpec& spec);

// One evaluated run (or an average over repetitions). Optional metrics are
// omitted from JSON/CSV when they do not apply: recall/precision need
// nonempty sets, recall_positive is the positive-estimate reporting mode of
// the ActiveDelete policy, ks only exists for rank sketches, ns_per_update
// only when timing was requested.
struct EvalReport {
  std::string sketch_name;
  std::string policy;
  std::uint64_t counters = 0;
  std::uint64_t space_bits = 0;
  double epsilon = 0.0;
  double alpha = 1.0;
  double delete_ratio = 0.0;
  double threshold = 0.0;  // phi actually used for reporting
  double mse = 0.0;
  std::int64_t max_abs_error = 0;
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> recall_positive;
  std::optional<double> ks;
  std::optional<double> ns_per_update;
  std::uint64_t seed = 0;
  std::uint64_t violations = 0;

  // Guarantee-grade runs assert the theorem bounds; breaches land here
  // instead of throwing so callers can decide on exit codes.
  bool guarantees_ok = true;
  std::vector<std::string> guarantee_notes;

  std::string json() const;  // flat object, one line, no timing jitter
  static std::string csv_header();
  std::string csv_row() const;
};

// Replays the stream through the described sketch and measures everything
// against the oracle. The sketch seed only matters for randomized kinds.
EvalReport evaluate_on_stream(const Stream& stream, const ExactCounter& oracle,
                              const SketchSpec& spec, std::uint64_t sketch_seed);

// Averages mse/recall/precision/ks/ns, keeps the worst max_abs_error, sums
// violations, ANDs the guarantee verdicts.
EvalReport aggregate_reports(const std::vector<EvalReport>& reports);

// Generates spec.reps streams (seed, seed+1, ...), evaluates each
// repetition in parallel, and aggregates. Deterministic in the spec.
EvalReport run_experiment(const ExperimentSpec& spec);

// Median-of-5 replay rate in nanoseconds per op, after one warm-up pass.
double bench_ns_per_update(const SketchSpec& spec, const Stream& stream);

}  // namespace streamsum
