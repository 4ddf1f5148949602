// include/lexloop/pipeline/pipeline.h

// Copyright 2026  The lexloop authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef LEXLOOP_PIPELINE_PIPELINE_H_
#define LEXLOOP_PIPELINE_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lexloop/core/error.h"
#include "lexloop/eval/metrics.h"
#include "lexloop/pipeline/config.h"

namespace lexloop::pipeline {

/// A stage failed; the partial manifest has already been written.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error("stage " + stage + " failed: " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StageRecord {
  std::string name;
  std::string key;
  std::vector<std::string> artifacts;  // relative to the run directory
};

/// One row of the k sweep.
struct KResult {
  int k = 0;
  std::size_t learned_words = 0;
  std::size_t dropped_entries = 0;  // learned entries no graphone chunking can cover
  std::optional<eval::EvalReport> learned_vs_gold;
  /// Learned lexicon against the baseline G2P on the same words.
  std::optional<eval::CompareReport> learned_vs_baseline;
  eval::EvalReport test;              // retrained G2P on the test lexicon
  eval::CompareReport test_compare;   // retrained vs baseline G2P on the test lexicon
  double rel_reduction = 0.0;         // (baseline - retrained) / baseline test PER
};

struct LearningStats {
  std::size_t sentences = 0;
  std::size_t em_skipped = 0;
  std::size_t align_failed = 0;
  std::size_t empty_spans = 0;
  std::size_t harvested_words = 0;
  std::size_t em_iterations = 0;
  lexlearn::Topology topology;
};

struct IterationResult {
  int iteration = 0;  // 0 is the baseline
  eval::EvalReport test;
  double validation_per = 0.0;
  double candidate_validation_per = 0.0;  // model trained in this iteration
  bool accepted = false;                  // candidate became the checkpoint
  double rel_reduction = 0.0;             // against the previous iteration
};

struct SweepRow {
  int seed_size = 0;
  double baseline_per = 0.0;
  double learned_per = 0.0;
  double improvement = 0.0;  // baseline_per - learned_per
  double rel_reduction = 0.0;
};

struct RunManifest {
  std::string kind;  // pipeline | iterate | sweep
  std::string config_hash;
  std::vector<StageRecord> stages;
  std::optional<eval::EvalReport> baseline;
  std::optional<LearningStats> learning;
  std::vector<KResult> k_results;
  std::vector<IterationResult> iterations;
  std::vector<SweepRow> sweep;
  std::string failed_stage;
  std::string error;

  /// Stages that actually ran (not restored from the run directory). Kept
  /// out of the JSON so reruns produce identical manifests.
  std::vector<std::string> recomputed;

  /// Stable JSON with sorted keys.
  std::string to_json() const;
};

/// Baseline G2P, transcripts, phone LM, decoding, lexicon learning, one
/// learned lexicon and retrained G2P per k, then evaluation. Artifacts and
/// manifest.json land in cfg.run_dir; stages whose inputs are unchanged are
/// restored from disk instead of recomputed.
RunManifest run_pipeline(const PipelineConfig& cfg);

/// Self-training: a validation split carved from the seed selects the G2P
/// checkpoint that annotates the next iteration. iterations == 1 runs
/// run_pipeline.
RunManifest run_iterations(const PipelineConfig& cfg);

/// run_pipeline at k = 1 for nested seed lexicons of cfg.seed_sizes drawn
/// from cfg.gold_lexicon by corpus frequency, each in its own subdirectory.
RunManifest run_seed_sweep(const PipelineConfig& cfg);

/// Human-readable tables of a manifest (k sweep, iterations, seed sweep).
std::string format_tables(const RunManifest& m);

}  // namespace lexloop::pipeline

#endif  // LEXLOOP_PIPELINE_PIPELINE_H_
