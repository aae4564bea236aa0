#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpi/featurize.hpp"
#include "dpi/protein.hpp"
#include "dpi/smiles.hpp"
#include "dpi/tensor.hpp"

namespace dpi {

struct InteractionRecord {
  std::string smiles;
  std::string protein;  // id resolved via the embedding map, or raw sequence
  int label = 0;
  chem::MolGraph graph;
  Tensor protein_vec;  // pooled, {1, d}
};

struct IngestReport {
  std::vector<InteractionRecord> records;
  std::vector<std::string> bad_rows;  // "line N: reason"
};

// Dataset file: UTF-8 TSV with header "smiles<TAB>protein<TAB>label".
// Protein ids found in `embeddings` are pooled; anything else is treated as
// a raw sequence for the stub embedder. Bad rows are collected with their
// line numbers; more than 1% bad rows aborts the ingest.
IngestReport ingest(const std::string& path,
                    const std::map<std::string, ProteinEmbedding>& embeddings,
                    const StubEmbedder& stub);

struct DatasetSplit {
  std::vector<InteractionRecord> train;
  std::vector<InteractionRecord> valid;
  std::vector<InteractionRecord> test;
};

// Seeded shuffle, then floor(0.8 n) / floor(0.1 n) / remainder.
DatasetSplit split_random(std::vector<InteractionRecord> records,
                          std::uint64_t seed);

}  // namespace dpi
