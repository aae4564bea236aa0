#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dpi/errors.hpp"
#include "dpi/model.hpp"
#include "dpi/smiles.hpp"

using dpi::chem::featurize;
using dpi::chem::MolGraph;
using dpi::chem::parse_smiles;
using dpi::DpiModel;
using dpi::ModelConfig;
using dpi::Rng;
using dpi::Tensor;
using dpi::ad::DropoutMask;
using dpi::ad::Tape;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.graph_hidden = 4;
  cfg.graph_layers = 2;
  cfg.protein_dim = 6;
  cfg.protein_channels = 2;
  cfg.head_hidden = 5;
  cfg.init_seed = 99;
  return cfg;
}

Tensor random_proteins(std::size_t rows, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Tensor x = Tensor::zeros({rows, d});
  for (double& v : x.data) v = rng.uniform(-1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("forward yields one probability row per pair") {
  DpiModel model(tiny_config());
  MolGraph g1 = featurize(parse_smiles("CCO"));
  MolGraph g2 = featurize(parse_smiles("c1ccccc1"));
  Tensor prot = random_proteins(2, 6, 5);

  Tape t;
  Tensor p = t.value(model.forward(t, {&g1, &g2}, prot,
                                   DropoutMask::Mode::off, nullptr));
  REQUIRE(p.shape == std::vector<std::size_t>{2, 2});
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(std::abs(p.at(r, 0) + p.at(r, 1) - 1.0) < 1e-12);
    CHECK(p.at(r, 0) > 0.0);
  }
  // batch rows match independent single-pair passes
  for (std::size_t r = 0; r < 2; ++r) {
    Tensor row = Tensor::zeros({1, 6});
    for (std::size_t c = 0; c < 6; ++c) row.data[c] = prot.at(r, c);
    Tensor one = model.predict_one(r == 0 ? g1 : g2, row,
                                   DropoutMask::Mode::off, nullptr);
    CHECK(one.data[0] == doctest::Approx(p.at(r, 0)).epsilon(1e-12));
  }
}

TEST_CASE("forward validates the protein block shape") {
  DpiModel model(tiny_config());
  MolGraph g = featurize(parse_smiles("CC"));
  Tape t;
  CHECK_THROWS_AS(model.forward(t, {&g}, random_proteins(2, 6, 1),
                                DropoutMask::Mode::off, nullptr),
                  dpi::ShapeError);
  Tape t2;
  CHECK_THROWS_AS(model.forward(t2, {&g}, random_proteins(1, 5, 1),
                                DropoutMask::Mode::off, nullptr),
                  dpi::ShapeError);
  Tape t3;
  CHECK_THROWS_AS(model.forward(t3, {}, random_proteins(1, 6, 1),
                                DropoutMask::Mode::off, nullptr),
                  dpi::DataError);
}

TEST_CASE("dropout rate zero makes sampling deterministic") {
  DpiModel model(tiny_config());
  model.set_dropout_rate(0.0);
  MolGraph g = featurize(parse_smiles("C=CC=C"));
  Tensor prot = random_proteins(1, 6, 7);

  Rng rng(1);
  Tensor a = model.predict_one(g, prot, DropoutMask::Mode::mc_sample, &rng);
  Tensor b = model.predict_one(g, prot, DropoutMask::Mode::off, nullptr);
  CHECK(a.data == b.data);

  model.set_dropout_rate(0.3);
  Rng rng2(1);
  Tensor c = model.predict_one(g, prot, DropoutMask::Mode::mc_sample, &rng2);
  Tensor d = model.predict_one(g, prot, DropoutMask::Mode::mc_sample, &rng2);
  CHECK(c.data != d.data);

  CHECK_THROWS_AS(model.set_dropout_rate(1.0), dpi::ConfigError);
}

TEST_CASE("checkpoint round trip preserves config and predictions") {
  ModelConfig cfg = tiny_config();
  cfg.dropout_rate = 0.17;
  DpiModel model(cfg);
  // push the weights away from their init so the reload must carry data
  for (std::size_t i = 0; i < model.params().count(); ++i)
    for (double& v : model.params().at(i).value.data) v += 0.01 * double(i + 1);

  MolGraph g = featurize(parse_smiles("CC(=O)O"));
  Tensor prot = random_proteins(1, 6, 9);
  Tensor before = model.predict_one(g, prot, DropoutMask::Mode::off, nullptr);

  const std::string path = "gen_model_roundtrip.ckpt";
  dpi::save_checkpoint(model, path);
  auto loaded = dpi::load_checkpoint(path);
  std::remove(path.c_str());

  CHECK(loaded->config().graph_hidden == cfg.graph_hidden);
  CHECK(loaded->config().graph_layers == cfg.graph_layers);
  CHECK(loaded->config().protein_dim == cfg.protein_dim);
  CHECK(loaded->config().protein_channels == cfg.protein_channels);
  CHECK(loaded->config().head_hidden == cfg.head_hidden);
  CHECK(loaded->config().dropout_rate == cfg.dropout_rate);
  CHECK(loaded->config().init_seed == cfg.init_seed);
  REQUIRE(loaded->params().count() == model.params().count());
  for (std::size_t i = 0; i < model.params().count(); ++i) {
    CHECK(loaded->params().at(i).name == model.params().at(i).name);
    CHECK(loaded->params().at(i).value.data == model.params().at(i).value.data);
  }
  Tensor after = loaded->predict_one(g, prot, DropoutMask::Mode::off, nullptr);
  CHECK(after.data == before.data);
}

TEST_CASE("checkpoint loader rejects corrupt files") {
  CHECK_THROWS_AS(dpi::load_checkpoint("no_such_file.ckpt"), dpi::DataError);

  const std::string bad_magic = "gen_model_badmagic.ckpt";
  {
    std::ofstream out(bad_magic, std::ios::binary);
    out << "NOTACKPTxxxxxxxxxxxxxxxx";
  }
  CHECK_THROWS_WITH_AS(dpi::load_checkpoint(bad_magic),
                       doctest::Contains("not a checkpoint"), dpi::DataError);
  std::remove(bad_magic.c_str());

  DpiModel model(tiny_config());
  const std::string full = "gen_model_trunc.ckpt";
  dpi::save_checkpoint(model, full);
  std::ifstream in(full, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  in.close();

  const std::string trunc = "gen_model_trunc2.ckpt";
  {
    std::ofstream out(trunc, std::ios::binary);
    out.write(bytes.data(), std::streamsize(bytes.size() / 2));
  }
  CHECK_THROWS_AS(dpi::load_checkpoint(trunc), dpi::DataError);

  const std::string padded = "gen_model_padded.ckpt";
  {
    std::ofstream out(padded, std::ios::binary);
    out.write(bytes.data(), std::streamsize(bytes.size()));
    out << "extra";
  }
  CHECK_THROWS_WITH_AS(dpi::load_checkpoint(padded),
                       doctest::Contains("trailing"), dpi::DataError);

  std::remove(full.c_str());
  std::remove(trunc.c_str());
  std::remove(padded.c_str());
}
