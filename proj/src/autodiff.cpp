#include "dpi/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "dpi/errors.hpp"

namespace dpi::ad {

namespace {
constexpr double kLogClamp = 1e-12;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ShapeError(msg);
}
}  // namespace

Parameter& ParamStore::add(std::string name, Tensor init, bool is_weight) {
  if (find(name) != nullptr) {
    throw ConfigError("duplicate parameter name: " + name);
  }
  params_.push_back(std::make_unique<Parameter>(std::move(name), std::move(init), is_weight));
  params_.back()->owner = this;
  return *params_.back();
}

Parameter* ParamStore::find(const std::string& name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

void ParamStore::zero_grads() {
  for (auto& p : params_) {
    std::fill(p->grad.data.begin(), p->grad.data.end(), 0.0);
  }
  grads_ready_ = false;
}

std::size_t ParamStore::value_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

DropoutMask DropoutMask::make(const std::vector<std::size_t>& shape, double rate,
                              Mode mode, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ConfigError("dropout rate must lie in [0,1), got " + std::to_string(rate));
  }
  DropoutMask m;
  m.rate = rate;
  m.mode = mode;
  m.mask = Tensor::full(shape, 1.0);
  if (mode != Mode::off && rate > 0.0) {
    const double keep_scale = 1.0 / (1.0 - rate);
    for (double& v : m.mask.data) {
      v = rng.bernoulli(rate) ? 0.0 : keep_scale;
    }
  }
  return m;
}

int Tape::push(Tensor value, std::function<void(Tape&, int)> bp) {
  Node n;
  n.grad = Tensor::zeros(value.shape);
  n.value = std::move(value);
  n.backprop = std::move(bp);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::input(Tensor value) { return Var{push(std::move(value), nullptr)}; }

Var Tape::param(Parameter& p) {
  auto it = leaf_cache_.find(&p);
  if (it != leaf_cache_.end()) return it->second;
  Var v{push(p.value, nullptr)};
  leaf_cache_.emplace(&p, v);
  touched_.emplace_back(&p, v);
  return v;
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.rank() == 2 && B.rank() == 2 && A.shape[1] == B.shape[0],
          "matmul shape mismatch: " + A.shape_str() + " x " + B.shape_str());
  const std::size_t m = A.shape[0], k = A.shape[1], n = B.shape[1];
  Tensor C({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = &A.data[i * k];
    double* crow = &C.data[i * n];
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = &B.data[p * n];
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return Var{push(std::move(C), [a, b, m, k, n](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    const Tensor& A2 = t.value(a);
    const Tensor& B2 = t.value(b);
    Tensor& ga = t.node(a.id).grad;
    Tensor& gb = t.node(b.id).grad;
    // dA += g * B^T
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        double acc = 0.0;
        const double* grow = &g.data[i * n];
        const double* brow = &B2.data[p * n];
        for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
        ga.data[i * k + p] += acc;
      }
    }
    // dB += A^T * g
    for (std::size_t p = 0; p < k; ++p) {
      double* gbrow = &gb.data[p * n];
      for (std::size_t i = 0; i < m; ++i) {
        const double av = A2.data[i * k + p];
        if (av == 0.0) continue;
        const double* grow = &g.data[i * n];
        for (std::size_t j = 0; j < n; ++j) gbrow[j] += av * grow[j];
      }
    }
  })};
}

Var Tape::add(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.same_shape(B), "add shape mismatch: " + A.shape_str() + " vs " + B.shape_str());
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C.data[i] += B.data[i];
  return Var{push(std::move(C), [a, b](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    Tensor& ga = t.node(a.id).grad;
    Tensor& gb = t.node(b.id).grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga.data[i] += g.data[i];
      gb.data[i] += g.data[i];
    }
  })};
}

Var Tape::add_row_bias(Var x, Var b) {
  const Tensor& X = value(x);
  const Tensor& B = value(b);
  require(X.rank() == 2 && B.rank() == 1 && X.shape[1] == B.shape[0],
          "row bias shape mismatch: " + X.shape_str() + " vs " + B.shape_str());
  const std::size_t m = X.shape[0], n = X.shape[1];
  Tensor Y = X;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) Y.data[i * n + j] += B.data[j];
  return Var{push(std::move(Y), [x, b, m, n](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    Tensor& gx = t.node(x.id).grad;
    Tensor& gb = t.node(b.id).grad;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        gx.data[i * n + j] += g.data[i * n + j];
        gb.data[j] += g.data[i * n + j];
      }
    }
  })};
}

Var Tape::add_channel_bias(Var x, Var b) {
  const Tensor& X = value(x);
  const Tensor& B = value(b);
  require(X.rank() == 2 && B.rank() == 1 && X.shape[0] == B.shape[0],
          "channel bias shape mismatch: " + X.shape_str() + " vs " + B.shape_str());
  const std::size_t c = X.shape[0], L = X.shape[1];
  Tensor Y = X;
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < L; ++j) Y.data[i * L + j] += B.data[i];
  return Var{push(std::move(Y), [x, b, c, L](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    Tensor& gx = t.node(x.id).grad;
    Tensor& gb = t.node(b.id).grad;
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t j = 0; j < L; ++j) {
        gx.data[i * L + j] += g.data[i * L + j];
        gb.data[i] += g.data[i * L + j];
      }
    }
  })};
}

Var Tape::relu(Var x) {
  Tensor Y = value(x);
  for (double& v : Y.data) v = v > 0.0 ? v : 0.0;
  return Var{push(std::move(Y), [x](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    const Tensor& X = t.value(x);
    Tensor& gx = t.node(x.id).grad;
    // subgradient at 0 is 0
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (X.data[i] > 0.0) gx.data[i] += g.data[i];
    }
  })};
}

Var Tape::softmax(Var x) {
  const Tensor& X = value(x);
  require(X.rank() <= 2, "softmax expects rank 1 or 2, got " + X.shape_str());
  const std::size_t m = X.rank() == 2 ? X.shape[0] : 1;
  const std::size_t n = X.rank() == 2 ? X.shape[1] : X.shape[0];
  require(n >= 2, "softmax needs at least 2 components, got " + X.shape_str());
  Tensor Y = X;
  for (std::size_t i = 0; i < m; ++i) {
    double* row = &Y.data[i * n];
    double mx = row[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
  }
  return Var{push(std::move(Y), [x, m, n](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    const Tensor& Y2 = t.node(id).value;
    Tensor& gx = t.node(x.id).grad;
    for (std::size_t i = 0; i < m; ++i) {
      const double* y = &Y2.data[i * n];
      const double* gy = &g.data[i * n];
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += gy[j] * y[j];
      for (std::size_t j = 0; j < n; ++j) gx.data[i * n + j] += y[j] * (gy[j] - dot);
    }
  })};
}

Var Tape::dropout(Var x, const DropoutMask& m) {
  if (m.mode == DropoutMask::Mode::off) return x;
  const Tensor& X = value(x);
  require(X.same_shape(m.mask),
          "dropout mask shape mismatch: " + X.shape_str() + " vs " + m.mask.shape_str());
  Tensor Y = X;
  for (std::size_t i = 0; i < Y.size(); ++i) Y.data[i] *= m.mask.data[i];
  Tensor mask = m.mask;
  return Var{push(std::move(Y), [x, mask](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    Tensor& gx = t.node(x.id).grad;
    for (std::size_t i = 0; i < g.size(); ++i) gx.data[i] += g.data[i] * mask.data[i];
  })};
}

Var Tape::concat_cols(const std::vector<Var>& xs) {
  require(!xs.empty(), "concat_cols of zero tensors");
  const std::size_t m = value(xs[0]).rows();
  std::size_t total = 0;
  for (Var v : xs) {
    require(value(v).rank() == 2 && value(v).shape[0] == m,
            "concat_cols row mismatch at " + value(v).shape_str());
    total += value(v).shape[1];
  }
  Tensor Y({m, total});
  std::size_t off = 0;
  for (Var v : xs) {
    const Tensor& X = value(v);
    const std::size_t n = X.shape[1];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) Y.data[i * total + off + j] = X.data[i * n + j];
    off += n;
  }
  auto parts = xs;
  return Var{push(std::move(Y), [parts, m, total](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    std::size_t off2 = 0;
    for (Var v : parts) {
      Tensor& gx = t.node(v.id).grad;
      const std::size_t n = gx.shape[1];
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) gx.data[i * n + j] += g.data[i * total + off2 + j];
      off2 += n;
    }
  })};
}

Var Tape::stack_rows(const std::vector<Var>& xs) {
  require(!xs.empty(), "stack_rows of zero tensors");
  const std::size_t n = value(xs[0]).cols();
  for (Var v : xs) {
    require(value(v).rows() == 1 && value(v).cols() == n,
            "stack_rows expects 1-row pieces of equal width, got " + value(v).shape_str());
  }
  const std::size_t m = xs.size();
  Tensor Y({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    const Tensor& X = value(xs[i]);
    std::copy(X.data.begin(), X.data.end(), Y.data.begin() + i * n);
  }
  auto parts = xs;
  return Var{push(std::move(Y), [parts, n](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      Tensor& gx = t.node(parts[i].id).grad;
      for (std::size_t j = 0; j < n; ++j) gx.data[j] += g.data[i * n + j];
    }
  })};
}

Var Tape::gather_rows(Var x, std::vector<std::size_t> idx) {
  const Tensor& X = value(x);
  require(X.rank() == 2, "gather_rows expects a matrix, got " + X.shape_str());
  const std::size_t n = X.shape[1];
  for (std::size_t r : idx) require(r < X.shape[0], "gather_rows index out of range");
  Tensor Y({idx.size(), n});
  for (std::size_t i = 0; i < idx.size(); ++i)
    std::copy(&X.data[idx[i] * n], &X.data[idx[i] * n] + n, &Y.data[i * n]);
  return Var{push(std::move(Y), [x, idx = std::move(idx), n](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    Tensor& gx = t.node(x.id).grad;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) gx.data[idx[i] * n + j] += g.data[i * n + j];
  })};
}

Var Tape::scatter_sum_rows(Var x, std::vector<std::size_t> idx, std::size_t out_rows) {
  const Tensor& X = value(x);
  require(X.rank() == 2 && X.shape[0] == idx.size(),
          "scatter_sum_rows needs one index per row of " + X.shape_str());
  const std::size_t n = X.shape[1];
  for (std::size_t r : idx) require(r < out_rows, "scatter_sum_rows index out of range");
  Tensor Y({out_rows, n});
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) Y.data[idx[i] * n + j] += X.data[i * n + j];
  return Var{push(std::move(Y), [x, idx = std::move(idx), n](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    Tensor& gx = t.node(x.id).grad;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) gx.data[i * n + j] += g.data[idx[i] * n + j];
  })};
}

Var Tape::scale_rows(Var x, std::vector<double> s) {
  const Tensor& X = value(x);
  require(X.rank() == 2 && X.shape[0] == s.size(),
          "scale_rows needs one factor per row of " + X.shape_str());
  const std::size_t n = X.shape[1];
  Tensor Y = X;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) Y.data[i * n + j] *= s[i];
  return Var{push(std::move(Y), [x, s = std::move(s), n](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    Tensor& gx = t.node(x.id).grad;
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) gx.data[i * n + j] += g.data[i * n + j] * s[i];
  })};
}

Var Tape::mean_rows(Var x) {
  const Tensor& X = value(x);
  require(X.rank() == 2 && X.shape[0] > 0, "mean_rows expects a nonempty matrix");
  const std::size_t m = X.shape[0], n = X.shape[1];
  Tensor Y({1, n});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) Y.data[j] += X.data[i * n + j];
  for (std::size_t j = 0; j < n; ++j) Y.data[j] /= static_cast<double>(m);
  return Var{push(std::move(Y), [x, m, n](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    Tensor& gx = t.node(x.id).grad;
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) gx.data[i * n + j] += g.data[j] * inv;
  })};
}

Var Tape::conv1d(Var x, Var kernel) {
  const Tensor& X = value(x);
  const Tensor& K = value(kernel);
  require(X.rank() == 2 && K.rank() == 3, "conv1d expects signal [c x L] and kernel [out x in x k]");
  if (K.shape[2] % 2 == 0) {
    throw ConfigError("conv1d kernel width must be odd, got " + std::to_string(K.shape[2]));
  }
  require(K.shape[1] == X.shape[0],
          "conv1d channel mismatch: " + X.shape_str() + " vs " + K.shape_str());
  const std::size_t cin = X.shape[0], L = X.shape[1];
  const std::size_t cout = K.shape[0], k = K.shape[2];
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(k / 2);
  Tensor Y({cout, L});
  for (std::size_t o = 0; o < cout; ++o) {
    for (std::size_t t0 = 0; t0 < L; ++t0) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cin; ++c) {
        for (std::size_t dk = 0; dk < k; ++dk) {
          const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(t0) +
                                   static_cast<std::ptrdiff_t>(dk) - half;
          if (s < 0 || s >= static_cast<std::ptrdiff_t>(L)) continue;  // zero padding
          acc += X.data[c * L + static_cast<std::size_t>(s)] * K.data[(o * cin + c) * k + dk];
        }
      }
      Y.data[o * L + t0] = acc;
    }
  }
  return Var{push(std::move(Y), [x, kernel, cin, cout, L, k, half](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    const Tensor& X2 = t.value(x);
    const Tensor& K2 = t.value(kernel);
    Tensor& gx = t.node(x.id).grad;
    Tensor& gk = t.node(kernel.id).grad;
    for (std::size_t o = 0; o < cout; ++o) {
      for (std::size_t t0 = 0; t0 < L; ++t0) {
        const double gy = g.data[o * L + t0];
        if (gy == 0.0) continue;
        for (std::size_t c = 0; c < cin; ++c) {
          for (std::size_t dk = 0; dk < k; ++dk) {
            const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(t0) +
                                     static_cast<std::ptrdiff_t>(dk) - half;
            if (s < 0 || s >= static_cast<std::ptrdiff_t>(L)) continue;
            gx.data[c * L + static_cast<std::size_t>(s)] += gy * K2.data[(o * cin + c) * k + dk];
            gk.data[(o * cin + c) * k + dk] += gy * X2.data[c * L + static_cast<std::size_t>(s)];
          }
        }
      }
    }
  })};
}

Var Tape::scale(Var x, double s) {
  Tensor Y = value(x);
  for (double& v : Y.data) v *= s;
  return Var{push(std::move(Y), [x, s](Tape& t, int id) {
    const Tensor& g = t.node(id).grad;
    Tensor& gx = t.node(x.id).grad;
    for (std::size_t i = 0; i < g.size(); ++i) gx.data[i] += g.data[i] * s;
  })};
}

Var Tape::sum_all(Var x) {
  const Tensor& X = value(x);
  double acc = 0.0;
  for (double v : X.data) acc += v;
  return Var{push(Tensor({1}, {acc}), [x](Tape& t, int id) {
    const double g = t.node(id).grad.data[0];
    Tensor& gx = t.node(x.id).grad;
    for (double& v : gx.data) v += g;
  })};
}

Var Tape::sum_squares(Var x) {
  const Tensor& X = value(x);
  double acc = 0.0;
  for (double v : X.data) acc += v * v;
  return Var{push(Tensor({1}, {acc}), [x](Tape& t, int id) {
    const double g = t.node(id).grad.data[0];
    const Tensor& X2 = t.value(x);
    Tensor& gx = t.node(x.id).grad;
    for (std::size_t i = 0; i < gx.size(); ++i) gx.data[i] += 2.0 * X2.data[i] * g;
  })};
}

Var Tape::add_scalars(const std::vector<Var>& xs) {
  require(!xs.empty(), "add_scalars of zero terms");
  double acc = 0.0;
  for (Var v : xs) {
    require(value(v).size() == 1, "add_scalars expects scalars, got " + value(v).shape_str());
    acc += value(v).data[0];
  }
  auto parts = xs;
  return Var{push(Tensor({1}, {acc}), [parts](Tape& t, int id) {
    const double g = t.node(id).grad.data[0];
    for (Var v : parts) t.node(v.id).grad.data[0] += g;
  })};
}

Var Tape::cross_entropy(Var probs, const std::vector<int>& labels) {
  const Tensor& P = value(probs);
  require(P.rank() == 2 && P.shape[1] == 2,
          "cross_entropy expects m x 2 softmax rows, got " + P.shape_str());
  require(P.shape[0] == labels.size(), "cross_entropy label count mismatch");
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("label outside {0,1}: " + std::to_string(y));
  }
  const std::size_t m = P.shape[0];
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double p = labels[i] == 1 ? P.data[i * 2 + 1] : P.data[i * 2 + 0];
    acc -= std::log(std::max(p, kLogClamp));
  }
  auto ys = labels;
  return Var{push(Tensor({1}, {acc}), [probs, ys = std::move(ys), m](Tape& t, int id) {
    const double g = t.node(id).grad.data[0];
    const Tensor& P2 = t.value(probs);
    Tensor& gp = t.node(probs.id).grad;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t col = ys[i] == 1 ? 1 : 0;
      const double p = P2.data[i * 2 + col];
      if (p > kLogClamp) gp.data[i * 2 + col] += g * (-1.0 / p);
      // clamped region: flat, zero gradient
    }
  })};
}

void Tape::backward(Var loss) {
  require(loss.valid() && value(loss).size() == 1,
          "backward expects a scalar loss");
  for (auto& n : nodes_) std::fill(n.grad.data.begin(), n.grad.data.end(), 0.0);
  nodes_[loss.id].grad.data[0] = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    if (nodes_[i].backprop && !nodes_[i].grad.data.empty()) {
      nodes_[i].backprop(*this, i);
    }
  }
  std::set<ParamStore*> owners;
  for (auto& [p, leaf] : touched_) {
    const Tensor& g = nodes_[leaf.id].grad;
    for (std::size_t i = 0; i < g.size(); ++i) p->grad.data[i] += g.data[i];
    if (p->owner != nullptr) owners.insert(p->owner);
  }
  for (ParamStore* s : owners) s->set_grads_ready(true);
}

Var cross_entropy_l2(Tape& t, Var probs, const std::vector<int>& labels,
                     double lambda) {
  if (lambda < 0.0) throw ConfigError("L2 lambda must be non-negative");
  Var data_term = t.cross_entropy(probs, labels);
  if (lambda == 0.0) return data_term;
  std::vector<Var> terms{data_term};
  for (const auto& [p, leaf] : t.touched()) {
    if (p->is_weight) terms.push_back(t.scale(t.sum_squares(leaf), lambda / 2.0));
  }
  return t.add_scalars(terms);
}

}  // namespace dpi::ad
