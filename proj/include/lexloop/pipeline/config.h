// include/lexloop/pipeline/config.h

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

#ifndef LEXLOOP_PIPELINE_CONFIG_H_
#define LEXLOOP_PIPELINE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lexloop/lexlearn/hmm.h"

namespace lexloop::pipeline {

struct PretrainSource {
  std::string tag;
  std::filesystem::path lexicon;
  bool operator==(const PretrainSource&) const = default;
};

struct PipelineConfig {
  // [paths]
  std::filesystem::path seed_lexicon;
  std::filesystem::path corpus;         // train set: G2P transcripts for the phone LM
  std::filesystem::path decode_corpus;  // decode set; empty means `corpus`
  std::filesystem::path gold_lexicon;   // optional: scores learned lexicons
  std::filesystem::path test_lexicon;   // held-out words for G2P evaluation
  std::filesystem::path run_dir;

  // [g2p]
  int g2p_order = 3;
  int g2p_em_iters = 10;
  double lambda = 5.0;
  int beam = 8;
  std::uint64_t g2p_seed = 1;
  std::vector<PretrainSource> pretrain;
  bool exclude_target_vocab = true;

  // [lm]
  int lm_order = 5;

  // [noise]
  double p_sub = 0.08;
  double p_ins = 0.02;
  double p_del = 0.02;
  std::uint64_t noise_seed = 1;
  int n_candidates = 4;

  // [topology]
  lexlearn::Topology topology;

  // [lexlearn]
  int em_max_iters = 30;
  double em_tol = 1e-4;

  // [experiment]
  std::vector<int> k_values = {1, 2, 4, 6, 8};
  int iterations = 1;
  std::vector<int> seed_sizes = {50, 500, 2000};
  double validation_fraction = 0.1;
  int min_validation_words = 10;

  /// Throws lexloop::Error naming the offending key.
  void validate() const;

  const std::filesystem::path& decode_set() const { return decode_corpus.empty() ? corpus : decode_corpus; }
};

/// INI-style `key = value` lines grouped under `[section]` headers; `#` and
/// `;` start comments. Unknown sections or keys are errors. Relative paths
/// are resolved against `base_dir`.
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Writes a file that parse_config reads back to an equal configuration.
void write_config(const PipelineConfig& cfg, std::ostream& out);

/// Fingerprint of every field except run_dir.
std::string config_hash(const PipelineConfig& cfg);

}  // namespace lexloop::pipeline

#endif  // LEXLOOP_PIPELINE_CONFIG_H_
