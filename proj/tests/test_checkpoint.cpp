#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "faaslab/common/error.hpp"
#include "faaslab/common/rng.hpp"
#include "faaslab/nn/checkpoint.hpp"
#include "faaslab/nn/dense.hpp"
#include "faaslab/nn/params.hpp"

using namespace faaslab;
using namespace faaslab::nn;

namespace fs = std::filesystem;

static fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / name;
}

TEST_CASE("save/load round-trips every tensor bit-exactly") {
  Rng rng(21);
  Mlp mlp = make_mlp(3, {4}, 2, Activation::Tanh, 1.0, 1.0, rng);
  ParamSet params;
  append_params(params, "net", mlp);

  const fs::path path = temp_file("faaslab_ckpt_roundtrip.bin");
  save_checkpoint(path, "mlp-test", params);

  Mlp loaded = make_mlp(3, {4}, 2, Activation::Tanh, 1.0, 1.0, rng);  // different init
  ParamSet loaded_params;
  append_params(loaded_params, "net", loaded);
  load_checkpoint(path, "mlp-test", loaded_params);

  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    CHECK(mlp.layers[i].w.data == loaded.layers[i].w.data);
    CHECK(mlp.layers[i].b == loaded.layers[i].b);
  }
  fs::remove(path);
}

TEST_CASE("manifest lists names, shapes, kind and version") {
  Rng rng(22);
  Mlp mlp = make_mlp(5, {7}, 3, Activation::Relu, 1.0, 1.0, rng);
  ParamSet params;
  append_params(params, "net", mlp);
  const fs::path path = temp_file("faaslab_ckpt_manifest.bin");
  save_checkpoint(path, "mlp-test", params);

  CheckpointManifest mf = read_checkpoint_manifest(path);
  CHECK(mf.version == 1);
  CHECK(mf.kind == "mlp-test");
  REQUIRE(mf.tensors.size() == 4);
  CHECK(mf.tensors[0].name == "net/dense0/w");
  CHECK(mf.tensors[0].rows == 7);
  CHECK(mf.tensors[0].cols == 5);
  CHECK(mf.tensors[1].name == "net/dense0/b");
  CHECK(mf.tensors[3].name == "net/dense1/b");
  fs::remove(path);
}

TEST_CASE("a flipped payload byte fails the checksum") {
  Rng rng(23);
  Mlp mlp = make_mlp(2, {3}, 1, Activation::Tanh, 1.0, 1.0, rng);
  ParamSet params;
  append_params(params, "net", mlp);
  const fs::path path = temp_file("faaslab_ckpt_corrupt.bin");
  save_checkpoint(path, "mlp-test", params);

  // flip one byte in the middle of the value blocks
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(0, std::ios::end);
  const auto size = static_cast<long>(f.tellg());
  f.seekp(size / 2);
  char b;
  f.seekg(size / 2);
  f.read(&b, 1);
  b = static_cast<char>(b ^ 0xff);
  f.seekp(size / 2);
  f.write(&b, 1);
  f.close();

  CHECK_THROWS_WITH_AS(load_checkpoint(path, "mlp-test", params),
                       doctest::Contains("checksum"), TrainingError);
  fs::remove(path);
}

TEST_CASE("architecture mismatch is reported with the differing tensor name") {
  Rng rng(24);
  Mlp saved = make_mlp(3, {4}, 2, Activation::Tanh, 1.0, 1.0, rng);
  ParamSet saved_params;
  append_params(saved_params, "net", saved);
  const fs::path path = temp_file("faaslab_ckpt_mismatch.bin");
  save_checkpoint(path, "mlp-test", saved_params);

  Mlp other = make_mlp(3, {6}, 2, Activation::Tanh, 1.0, 1.0, rng);  // wider hidden layer
  ParamSet other_params;
  append_params(other_params, "net", other);
  CHECK_THROWS_WITH_AS(load_checkpoint(path, "mlp-test", other_params),
                       doctest::Contains("net/dense0/w"), TrainingError);

  // kind mismatch is its own error
  CHECK_THROWS_WITH_AS(load_checkpoint(path, "other-kind", saved_params),
                       doctest::Contains("kind"), TrainingError);
  fs::remove(path);
}

TEST_CASE("truncated file is rejected") {
  Rng rng(25);
  Mlp mlp = make_mlp(2, {2}, 1, Activation::Tanh, 1.0, 1.0, rng);
  ParamSet params;
  append_params(params, "net", mlp);
  const fs::path path = temp_file("faaslab_ckpt_trunc.bin");
  save_checkpoint(path, "mlp-test", params);
  fs::resize_file(path, fs::file_size(path) / 2);
  CHECK_THROWS_AS(load_checkpoint(path, "mlp-test", params), TrainingError);
  fs::remove(path);
}

TEST_CASE("fnv1a64 matches the reference vector") {
  // Known value for "a" under FNV-1a 64.
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
}
