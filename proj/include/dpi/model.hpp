#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dpi/autodiff.hpp"
#include "dpi/classifier.hpp"
#include "dpi/featurize.hpp"
#include "dpi/graphnet.hpp"
#include "dpi/protein.hpp"
#include "dpi/rng.hpp"

namespace dpi {

struct ModelConfig {
  int graph_hidden = 256;
  int graph_layers = 3;
  int protein_dim = 64;
  int protein_channels = 4;
  int head_hidden = 512;
  double dropout_rate = 0.1;
  std::uint64_t init_seed = 2024;
};

// Full pipeline: GraphNet drug encoder and conv protein encoder feeding a
// softmax classifier head over the concatenated pair feature.
class DpiModel {
 public:
  explicit DpiModel(const ModelConfig& cfg);

  DpiModel(const DpiModel&) = delete;
  DpiModel& operator=(const DpiModel&) = delete;

  // One softmax row per pair. proteins is m x protein_dim, one pooled
  // embedding per row, aligned with graphs.
  ad::Var forward(ad::Tape& t, const std::vector<const chem::MolGraph*>& graphs,
                  const Tensor& proteins, ad::DropoutMask::Mode mode,
                  Rng* rng) const;

  // Single-pair convenience wrapper; protein is a {1, d} row or {d} vector.
  Tensor predict_one(const chem::MolGraph& g, const Tensor& protein,
                     ad::DropoutMask::Mode mode, Rng* rng) const;

  // Applies one rate to every dropout site (GraphNet layers, protein conv
  // layers, classifier hidden layers).
  void set_dropout_rate(double rate);

  ad::ParamStore& params() { return store_; }
  const ad::ParamStore& params() const { return store_; }
  const ModelConfig& config() const { return cfg_; }
  const GraphNet& drug_encoder() const { return *drug_; }
  const ProteinEncoder& protein_encoder() const { return *protein_; }
  const ClassifierHead& head() const { return *head_; }

 private:
  ModelConfig cfg_;
  ad::ParamStore store_;
  std::unique_ptr<GraphNet> drug_;
  std::unique_ptr<ProteinEncoder> protein_;
  std::unique_ptr<ClassifierHead> head_;
};

// Checkpoint container: magic + format version, the model config, then every
// parameter as (name, weight flag, shape, little-endian float64 payload).
void save_checkpoint(const DpiModel& model, const std::string& path);
std::unique_ptr<DpiModel> load_checkpoint(const std::string& path);

}  // namespace dpi
