// The corpus and the transformation pipelines each program is run through.
#pragma once

#include "polyhls/driver/passes.hpp"

#include <string>
#include <vector>

namespace testing {

struct PipelineConfig {
  // One of none, tile, tile+wavefront, subbb-tile.
  std::string name;
  std::vector<std::string> flags;
};

struct CorpusEntry {
  std::string file;
  std::vector<PipelineConfig> pipelines;
};

std::vector<CorpusEntry> corpus_matrix();

polyhls::scop::Scop run_pipeline(polyhls::scop::Scop scop, const PipelineConfig &config);

// Symbol values used for equivalence checks.
inline const std::vector<polyhls::Int> kSizes = {2, 5, 8, 13, 33};

} // namespace testing
