#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dpi/rng.hpp"
#include "dpi/tensor.hpp"

namespace dpi::ad {

// Trainable tensor with an accumulated gradient. Weight matrices enter the
// L2 penalty; biases do not.
class ParamStore;

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool is_weight = true;
  ParamStore* owner = nullptr;

  Parameter(std::string n, Tensor v, bool w)
      : name(std::move(n)), value(v), grad(Tensor::zeros(v.shape)), is_weight(w) {}
};

// Owns every parameter of one model instance. Addresses are stable.
class ParamStore {
 public:
  Parameter& add(std::string name, Tensor init, bool is_weight);
  Parameter& at(std::size_t i) { return *params_[i]; }
  const Parameter& at(std::size_t i) const { return *params_[i]; }
  Parameter* find(const std::string& name);
  std::size_t count() const { return params_.size(); }

  void zero_grads();
  bool grads_ready() const { return grads_ready_; }
  void set_grads_ready(bool b) { grads_ready_ = b; }

  std::size_t value_count() const;  // total scalar count

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  bool grads_ready_ = false;
};

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Inverted dropout: kept entries are scaled by 1/(1-rate) so the masked
// output is unbiased and inference needs no rescaling.
struct DropoutMask {
  enum class Mode { off, train, mc_sample };

  double rate = 0.0;
  Mode mode = Mode::off;
  Tensor mask;

  static DropoutMask make(const std::vector<std::size_t>& shape, double rate,
                          Mode mode, Rng& rng);
};

// Reverse-mode tape. Nodes are created in topological order by
// construction; backward() walks them once in reverse. Parameter leaves
// flush their gradients into the owning ParamStore.
class Tape {
 public:
  Var input(Tensor value);
  Var param(Parameter& p);  // cached: one leaf per parameter per tape

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);                 // same shape
  Var add_row_bias(Var x, Var b);        // x: m x n, b: {n}, broadcast over rows
  Var add_channel_bias(Var x, Var b);    // x: c x L, b: {c}, broadcast over columns
  Var relu(Var x);
  Var softmax(Var x);                    // row-wise for matrices, whole vector for rank 1
  Var dropout(Var x, const DropoutMask& m);
  Var concat_cols(const std::vector<Var>& xs);
  Var stack_rows(const std::vector<Var>& xs);  // rows of equal width -> matrix
  Var gather_rows(Var x, std::vector<std::size_t> idx);
  Var scatter_sum_rows(Var x, std::vector<std::size_t> idx, std::size_t out_rows);
  Var scale_rows(Var x, std::vector<double> s);  // row i multiplied by s[i]
  Var mean_rows(Var x);                          // m x n -> 1 x n
  Var conv1d(Var x, Var kernel);  // x: c_in x L, kernel: c_out x c_in x k (k odd), same padding
  Var scale(Var x, double s);
  Var sum_all(Var x);      // -> scalar {1}
  Var sum_squares(Var x);  // -> scalar {1}
  Var add_scalars(const std::vector<Var>& xs);

  // Binary cross-entropy over softmax rows (m x 2), labels in {0,1}.
  // Log arguments are clamped below at 1e-12.
  Var cross_entropy(Var probs, const std::vector<int>& labels);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }

  void backward(Var loss);

  // Parameter leaves touched by this tape, in first-use order.
  const std::vector<std::pair<Parameter*, Var>>& touched() const { return touched_; }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&, int)> backprop;  // may be empty for leaves
  };

  std::vector<Node> nodes_;
  std::vector<std::pair<Parameter*, Var>> touched_;
  std::map<Parameter*, Var> leaf_cache_;

  Node& node(int id) { return nodes_[id]; }
  int push(Tensor value, std::function<void(Tape&, int)> bp);
};

// Loss of one batch: cross-entropy over the prediction rows plus
// (lambda/2) * sum of squared weight-matrix entries, taken over every
// weight parameter used on this tape.
Var cross_entropy_l2(Tape& t, Var probs, const std::vector<int>& labels,
                     double lambda);

}  // namespace dpi::ad
