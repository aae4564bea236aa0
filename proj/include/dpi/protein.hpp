#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dpi/autodiff.hpp"
#include "dpi/rng.hpp"
#include "dpi/tensor.hpp"

namespace dpi {

// Residue-level (rank-2, L x d) or pre-pooled (rank-1, {d}) protein features.
struct ProteinEmbedding {
  std::string id;
  Tensor X;

  bool is_pooled() const { return X.shape.size() == 1; }
  std::size_t dim() const { return is_pooled() ? X.shape[0] : X.shape[1]; }
};

// Column mean over residues; pooled inputs pass through.
Tensor pool(const ProteinEmbedding& e);

struct ProteinEncoderConfig {
  int dim = 64;       // embedding width d
  int channels = 4;   // conv channels 1 -> c -> c -> 1
  int kernel = 3;
  double dropout_rate = 0.1;
};

// Smooths a pooled protein vector with three same-padded 1D convolutions
// along the feature axis, each followed by ReLU and dropout. Output width
// equals input width.
class ProteinEncoder {
 public:
  ProteinEncoder(ad::ParamStore& store, const ProteinEncoderConfig& cfg,
                 Rng& init_rng, const std::string& prefix = "protein");

  // x is a {1, d} row; returns a {1, d} row.
  ad::Var encode(ad::Tape& t, ad::Var x, ad::DropoutMask::Mode mode,
                 Rng* rng) const;

  const ProteinEncoderConfig& config() const { return cfg_; }
  void set_dropout_rate(double rate);

  struct Layer {
    ad::Parameter* kernel;
    ad::Parameter* bias;
  };
  const std::vector<Layer>& layer_params() const { return layers_; }

 private:
  ProteinEncoderConfig cfg_;
  std::vector<Layer> layers_;
};

// Embedding file: optional content of the form
//   #dim=d
//   id<TAB>f1<TAB>...<TAB>fd
// A zero-byte file yields an empty map. Width mismatches, bad numbers and
// duplicate ids are reported with their line number.
std::map<std::string, ProteinEmbedding> load_embeddings(const std::string& path);

// Deterministic stand-in for a pretrained protein model: hashed k-mer
// counts (k = 3, shorter for sequences under 3 residues), integer
// arithmetic, then L2 normalization.
struct StubEmbedder {
  int dim = 64;
  std::uint64_t seed = 2024;
};

ProteinEmbedding stub_embed(const std::string& sequence, const StubEmbedder& cfg);

}  // namespace dpi
