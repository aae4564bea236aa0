#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dpi/classifier.hpp"
#include "dpi/errors.hpp"
#include "dpi/featurize.hpp"
#include "dpi/graphnet.hpp"
#include "dpi/smiles.hpp"
#include "support/gradcheck.hpp"

using dpi::ClassifierConfig;
using dpi::ClassifierHead;
using dpi::concat_features;
using dpi::GraphNet;
using dpi::GraphNetConfig;
using dpi::Rng;
using dpi::Tensor;
using dpi::ad::DropoutMask;
using dpi::ad::ParamStore;
using dpi::ad::Tape;
using dpi::ad::Var;

TEST_CASE("feature concatenation") {
  Tensor a = Tensor::vec({1.0, 2.0});
  Tensor b = Tensor::vec({3.0});
  CHECK(concat_features(a, b).data == std::vector<double>{1.0, 2.0, 3.0});

  Tensor z = concat_features(Tensor::zeros({4}), Tensor::zeros({1, 6}));
  CHECK(z.shape == std::vector<std::size_t>{1, 10});
  for (double v : z.data) CHECK(v == 0.0);

  Rng rng(3);
  Tensor xp = Tensor::zeros({1, 7}), xd = Tensor::zeros({1, 5});
  for (double& v : xp.data) v = rng.normal();
  for (double& v : xd.data) v = rng.normal();
  Tensor joint = concat_features(xp, xd);
  for (std::size_t i = 0; i < 7; ++i) CHECK(joint.data[i] == xp.data[i]);
  for (std::size_t i = 0; i < 5; ++i) CHECK(joint.data[7 + i] == xd.data[i]);

  Tensor bad = Tensor::vec({1.0, std::nan("")});
  CHECK_THROWS_AS(concat_features(bad, b), dpi::DataError);
  CHECK_THROWS_AS(concat_features(Tensor::zeros({2, 3}), b), dpi::ShapeError);
}

TEST_CASE("zero weights and biases give the uniform prediction") {
  ParamStore store;
  Rng rng(10);
  ClassifierHead head(store, {.in_dim = 6, .hidden = 4}, rng);
  for (auto& layer : head.layer_params())
    std::fill(layer.W->value.data.begin(), layer.W->value.data.end(), 0.0);
  Tape t;
  Tensor x = Tensor::zeros({1, 6});
  for (std::size_t i = 0; i < 6; ++i) x.data[i] = double(i) - 2.5;
  Tensor p = t.value(head.predict(t, t.input(x), DropoutMask::Mode::off, nullptr));
  CHECK(p.data[0] == 0.5);
  CHECK(p.data[1] == 0.5);
}

TEST_CASE("forced logits saturate the softmax") {
  ParamStore store;
  Rng rng(11);
  ClassifierHead head(store, {.in_dim = 3, .hidden = 4}, rng);
  for (auto& layer : head.layer_params())
    std::fill(layer.W->value.data.begin(), layer.W->value.data.end(), 0.0);
  head.layer_params()[2].b->value = Tensor::vec({10.0, -10.0});
  Tape t;
  Tensor p = t.value(head.predict(t, t.input(Tensor::zeros({1, 3})),
                                  DropoutMask::Mode::off, nullptr));
  CHECK(p.data[0] > 1.0 - 1e-8);
  CHECK(p.data[1] < 1e-8);
}

TEST_CASE("softmax rows are probability pairs") {
  ParamStore store;
  Rng rng(12);
  ClassifierHead head(store, {.in_dim = 9, .hidden = 7}, rng);
  Tensor x = Tensor::zeros({5, 9});
  for (double& v : x.data) v = rng.uniform(-3.0, 3.0);
  Tape t;
  Tensor p = t.value(head.predict(t, t.input(x), DropoutMask::Mode::off, nullptr));
  REQUIRE(p.shape == std::vector<std::size_t>{5, 2});
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(std::abs(p.at(r, 0) + p.at(r, 1) - 1.0) < 1e-12);
    CHECK(p.at(r, 0) > 0.0);
    CHECK(p.at(r, 0) < 1.0);
  }
}

TEST_CASE("dropout off is deterministic, train mode is stochastic") {
  ParamStore store;
  Rng rng(13);
  ClassifierHead head(store, {.in_dim = 5, .hidden = 16, .dropout_rate = 0.5},
                      rng);
  Tensor x = Tensor::zeros({1, 5});
  for (double& v : x.data) v = rng.normal();

  Tape ta, tb;
  Tensor a = ta.value(head.predict(ta, ta.input(x), DropoutMask::Mode::off, nullptr));
  Tensor b = tb.value(head.predict(tb, tb.input(x), DropoutMask::Mode::off, nullptr));
  CHECK(a.data == b.data);

  Rng drop(14);
  Tape tc, td;
  Tensor c = tc.value(head.predict(tc, tc.input(x), DropoutMask::Mode::train, &drop));
  Tensor d = td.value(head.predict(td, td.input(x), DropoutMask::Mode::train, &drop));
  CHECK(c.data != d.data);

  Tape te;
  CHECK_THROWS_AS(head.predict(te, te.input(x), DropoutMask::Mode::train, nullptr),
                  dpi::ConfigError);
  Tape tf;
  CHECK_THROWS_AS(head.predict(tf, tf.input(Tensor::zeros({1, 4})),
                               DropoutMask::Mode::off, nullptr),
                  dpi::ShapeError);
}

TEST_CASE("head gradients match finite differences") {
  ParamStore store;
  Rng rng(15);
  ClassifierHead head(store, {.in_dim = 5, .hidden = 4}, rng);
  Tensor x = Tensor::zeros({3, 5});
  for (double& v : x.data) v = rng.uniform(-1.0, 1.0);
  const std::vector<int> labels = {1, 0, 1};

  auto loss = [&]() {
    Tape t;
    Var p = head.predict(t, t.input(x), DropoutMask::Mode::off, nullptr);
    return t.value(t.cross_entropy(p, labels)).data[0];
  };
  Tape t;
  Var p = head.predict(t, t.input(x), DropoutMask::Mode::off, nullptr);
  t.backward(t.cross_entropy(p, labels));

  for (std::size_t i = 0; i < store.count(); ++i) {
    CAPTURE(store.at(i).name);
    Tensor analytic = store.at(i).grad;
    CHECK(testsupport::check_grad(loss, store.at(i).value, analytic) <
          testsupport::kGradRelTol);
  }
}

TEST_CASE("pipeline gradients from molecule to prediction match finite differences") {
  dpi::chem::Molecule mol = dpi::chem::parse_smiles("C=O");
  dpi::chem::MolGraph g = dpi::chem::featurize(mol);

  ParamStore store;
  Rng rng(16);
  GraphNetConfig gcfg;
  gcfg.hidden = 3;
  gcfg.layers = 2;
  GraphNet net(store, gcfg, rng);
  Tensor x_p = Tensor::zeros({1, 4});
  for (double& v : x_p.data) v = rng.normal();
  ClassifierHead head(store, {.in_dim = 4 + std::size_t(net.output_dim()), .hidden = 4},
                      rng);
  const std::vector<int> labels = {1};

  auto loss = [&]() {
    Tape t;
    Var x_d = net.encode(t, g, DropoutMask::Mode::off, nullptr);
    Var joint = concat_features(t, t.input(x_p), x_d);
    Var p = head.predict(t, joint, DropoutMask::Mode::off, nullptr);
    return t.value(t.cross_entropy(p, labels)).data[0];
  };
  Tape t;
  Var x_d = net.encode(t, g, DropoutMask::Mode::off, nullptr);
  Var joint = concat_features(t, t.input(x_p), x_d);
  Var p = head.predict(t, joint, DropoutMask::Mode::off, nullptr);
  t.backward(t.cross_entropy(p, labels));

  for (std::size_t i = 0; i < store.count(); ++i) {
    CAPTURE(store.at(i).name);
    Tensor analytic = store.at(i).grad;
    CHECK(testsupport::check_grad(loss, store.at(i).value, analytic) <
          testsupport::kGradRelTol);
  }
}
