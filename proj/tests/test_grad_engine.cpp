#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "chansep/adam.hpp"
#include "chansep/checkpoint.hpp"
#include "chansep/loss.hpp"
#include "chansep/network.hpp"
#include "chansep/rng.hpp"
#include "chansep/train.hpp"

using namespace chansep;
using grad::Activation;
using grad::Network;
using grad::Tensor;

namespace {

Tensor random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Tensor t = Tensor::matrix(rows, cols);
  Rng rng(seed);
  for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
  return t;
}

// Random architecture with 1-3 layers, widths <= 16, mixed activations.
Network random_network(Rng& rng, std::size_t in_dim, std::size_t out_dim) {
  const std::size_t depth = 1 + rng.uniform_int(3);
  std::vector<std::size_t> widths{in_dim};
  for (std::size_t l = 1; l < depth; ++l) widths.push_back(1 + rng.uniform_int(16));
  widths.push_back(out_dim);
  std::vector<Activation> acts;
  for (std::size_t l = 0; l < depth; ++l) {
    const auto pick = rng.uniform_int(3);
    acts.push_back(pick == 0 ? Activation::Linear
                             : (pick == 1 ? Activation::Tanh : Activation::Relu));
  }
  // relu's kink breaks central differences; nudge pre-activations away from 0
  Network net = grad::make_network(widths, acts, rng.uniform_int(1u << 30));
  for (auto& layer : net.layers) {
    for (double& b : layer.b.data) b += 0.05;
  }
  return net;
}

double relative_gap(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

// Central-difference check of every parameter and input gradient against
// backward(), for loss = mse(net(x), target).
double max_gradient_gap(Network& net, const Tensor& x, const Tensor& target) {
  grad::ForwardCache cache;
  const Tensor out = grad::forward(net, x, &cache);
  const grad::Gradients g = grad::backward(net, cache, grad::mse_grad(out, target));

  const double h = 1e-5;
  double worst = 0.0;

  const std::vector<Tensor*> params = grad::parameters(net);
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p]->data.size(); ++i) {
      double& slot = params[p]->data[i];
      const double saved = slot;
      slot = saved + h;
      const double up = grad::mse(grad::forward(net, x), target);
      slot = saved - h;
      const double dn = grad::mse(grad::forward(net, x), target);
      slot = saved;
      worst = std::max(worst, relative_gap(g.params[p].data[i], (up - dn) / (2 * h)));
    }
  }
  Tensor xv = x;
  for (std::size_t i = 0; i < xv.data.size(); ++i) {
    const double saved = xv.data[i];
    xv.data[i] = saved + h;
    const double up = grad::mse(grad::forward(net, xv), target);
    xv.data[i] = saved - h;
    const double dn = grad::mse(grad::forward(net, xv), target);
    xv.data[i] = saved;
    worst = std::max(worst, relative_gap(g.input.data[i], (up - dn) / (2 * h)));
  }
  return worst;
}

}  // namespace

TEST_CASE("make_network shapes, bounds and determinism") {
  const Network net = grad::make_network({8, 12, 4}, {Activation::Tanh, Activation::Linear}, 3);
  REQUIRE(net.layers.size() == 2);
  CHECK(net.in_dim() == 8);
  CHECK(net.out_dim() == 4);
  CHECK(net.param_count() == 8 * 12 + 12 + 12 * 4 + 4);

  // uniform Glorot bound per layer
  for (const auto& layer : net.layers) {
    const double bound =
        std::sqrt(6.0 / static_cast<double>(layer.in_dim() + layer.out_dim()));
    for (double v : layer.W.data) {
      CHECK(std::abs(v) <= bound);
    }
    for (double v : layer.b.data) CHECK(v == 0.0);
  }

  const Network again = grad::make_network({8, 12, 4}, {Activation::Tanh, Activation::Linear}, 3);
  CHECK(grad::parameter_snapshot(net) == grad::parameter_snapshot(again));
  const Network other = grad::make_network({8, 12, 4}, {Activation::Tanh, Activation::Linear}, 4);
  CHECK(grad::parameter_snapshot(net) != grad::parameter_snapshot(other));
}

TEST_CASE("make_network validates widths/activations") {
  CHECK_THROWS_AS(grad::make_network({4}, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(grad::make_network({4, 3}, {Activation::Tanh, Activation::Tanh}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(grad::make_network({4, 0}, {Activation::Tanh}, 1), std::invalid_argument);
}

TEST_CASE("forward applies the activation row-wise") {
  Network net;
  grad::Layer layer;
  layer.W = Tensor::matrix(1, 2);
  layer.W.data = {2.0, -1.0};
  layer.b = Tensor::vector(1, 0.5);
  layer.act = Activation::Tanh;
  net.layers.push_back(layer);

  Tensor x = Tensor::matrix(2, 2);
  x.data = {1.0, 0.0, 0.0, 1.0};
  const Tensor y = grad::forward(net, x);
  CHECK(y.at(0, 0) == doctest::Approx(std::tanh(2.5)));
  CHECK(y.at(1, 0) == doctest::Approx(std::tanh(-0.5)));

  net.layers[0].act = Activation::Relu;
  const Tensor r = grad::forward(net, x);
  CHECK(r.at(0, 0) == doctest::Approx(2.5));
  CHECK(r.at(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("reverse-mode gradients match central differences") {
  Rng rng(2024);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t in_dim = 1 + rng.uniform_int(16);
    const std::size_t out_dim = 1 + rng.uniform_int(16);
    Network net = random_network(rng, in_dim, out_dim);
    const Tensor x = random_matrix(3, in_dim, rng.uniform_int(1u << 20));
    const Tensor target = random_matrix(3, out_dim, rng.uniform_int(1u << 20));
    const double gap = max_gradient_gap(net, x, target);
    CAPTURE(trial);
    CHECK(gap < 1e-4);
  }
}

TEST_CASE("backward rejects a cache from another input") {
  Network net = grad::make_network({4, 4}, {Activation::Tanh}, 1);
  grad::ForwardCache cache;
  grad::forward(net, random_matrix(2, 4, 1), &cache);
  const Tensor wrong = random_matrix(3, 4, 2);
  CHECK_THROWS_AS(grad::backward(net, cache, wrong), std::invalid_argument);
  grad::ForwardCache empty;
  CHECK_THROWS_AS(grad::backward(net, empty, random_matrix(2, 4, 3)), std::invalid_argument);
}

TEST_CASE("adam takes a lr-sized first step and matches the update rule") {
  Tensor theta = Tensor::vector(1, 1.0);
  std::vector<Tensor*> params{&theta};
  grad::AdamState st = grad::make_adam(params, 0.001);

  Tensor g = Tensor::vector(1, 3.7);
  grad::adam_step(params, std::vector<Tensor>{g}, st);
  // bias-corrected first step is lr * g/(|g| + eps') ~= lr
  CHECK(theta.data[0] == doctest::Approx(1.0 - 0.001).epsilon(1e-6));

  // second step against a by-hand evaluation of the update rule
  double m = 0.1 * 3.7;            // after step 1
  double v = 0.001 * 3.7 * 3.7;
  const double theta1 = 1.0 - 0.001 * (m / 0.1) / (std::sqrt(v / 0.001) + 1e-8);
  m = 0.9 * m + 0.1 * 3.7;         // step 2
  v = 0.999 * v + 0.001 * 3.7 * 3.7;
  const double mhat = m / (1.0 - std::pow(0.9, 2));
  const double vhat = v / (1.0 - std::pow(0.999, 2));
  const double expected = theta1 - 0.001 * mhat / (std::sqrt(vhat) + 1e-8);
  grad::adam_step(params, std::vector<Tensor>{g}, st);
  CHECK(theta.data[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(st.t == 2);
}

TEST_CASE("train fits a linear map and logs the loss curve") {
  // y = 2x - 1 on a single linear unit
  std::vector<grad::Sample> data;
  for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    Tensor in = Tensor::matrix(1, 1);
    in.data = {x};
    Tensor out = Tensor::matrix(1, 1);
    out.data = {2.0 * x - 1.0};
    data.emplace_back(in, out);
  }
  Network net = grad::make_network({1, 1}, {Activation::Linear}, 7);
  grad::TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.lr = 0.01;
  const grad::TrainResult res = grad::train(net, data, cfg);

  REQUIRE(res.loss_curve.size() == 2001);
  CHECK(res.loss_curve.back() < 1e-8);
  CHECK(res.loss_curve.back() < res.loss_curve.front());
  CHECK(net.layers[0].W.data[0] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(net.layers[0].b.data[0] == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("training is deterministic, also with mini-batches") {
  std::vector<grad::Sample> data;
  for (int i = 0; i < 6; ++i) {
    data.emplace_back(random_matrix(4, 3, 100 + i), random_matrix(4, 2, 200 + i));
  }
  grad::TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 2;
  cfg.seed = 9;

  Network a = grad::make_network({3, 5, 2}, {Activation::Tanh, Activation::Linear}, 11);
  Network b = grad::make_network({3, 5, 2}, {Activation::Tanh, Activation::Linear}, 11);
  grad::train(a, data, cfg);
  grad::train(b, data, cfg);
  CHECK(grad::parameter_snapshot(a) == grad::parameter_snapshot(b));

  // a different shuffle seed must lead elsewhere
  Network c = grad::make_network({3, 5, 2}, {Activation::Tanh, Activation::Linear}, 11);
  cfg.seed = 10;
  grad::train(c, data, cfg);
  CHECK(grad::parameter_snapshot(a) != grad::parameter_snapshot(c));
}

TEST_CASE("train rejects inconsistent data") {
  Network net = grad::make_network({3, 2}, {Activation::Linear}, 1);
  CHECK_THROWS_AS(grad::train(net, {}, {}), std::invalid_argument);
  std::vector<grad::Sample> bad{{random_matrix(2, 4, 1), random_matrix(2, 2, 2)}};
  CHECK_THROWS_AS(grad::train(net, bad, {}), std::invalid_argument);
}

TEST_CASE("hex-float doubles survive the round trip bit-for-bit") {
  for (double v : {0.0, -0.0, 1.0, -1.5, 3.141592653589793, 1e-300, -2.2250738585072014e-308,
                   6.02214076e23, 0x1.fffffffffffffp+1023}) {
    const double back = grad::double_from_hex(grad::double_to_hex(v));
    CHECK(std::memcmp(&back, &v, sizeof v) == 0);
  }
  CHECK_THROWS_AS(grad::double_from_hex("not-a-number"), std::invalid_argument);
}

TEST_CASE("checkpoints restore networks value-exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "chansep_grad_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "ckpt.json";

  grad::Checkpoint ckpt;
  ckpt.algorithm = "alg1";
  ckpt.channel_classes = {"A", "B"};
  ckpt.networks.emplace("encoder",
                        grad::make_network({6, 9, 4}, {Activation::Tanh, Activation::Linear}, 5));
  ckpt.networks.emplace("decoder.A", grad::make_network({4, 6}, {Activation::Linear}, 6));
  ckpt.extra = nlohmann::json{{"frame_len", 6}};
  grad::save_checkpoint(path, ckpt);

  const grad::Checkpoint back = grad::load_checkpoint(path);
  CHECK(back.algorithm == "alg1");
  CHECK(back.channel_classes == std::vector<std::string>{"A", "B"});
  CHECK(back.extra.at("frame_len").get<std::size_t>() == 6);
  REQUIRE(back.networks.count("encoder") == 1);
  CHECK(grad::parameter_snapshot(back.networks.at("encoder")) ==
        grad::parameter_snapshot(ckpt.networks.at("encoder")));
  CHECK(back.networks.at("encoder").layers[0].act == Activation::Tanh);

  // same checkpoint -> same bytes (sorted keys, no timestamps)
  const auto path2 = dir / "ckpt2.json";
  grad::save_checkpoint(path2, ckpt);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  const std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);

  CHECK_THROWS(grad::load_checkpoint(dir / "missing.json"));
  std::filesystem::remove_all(dir);
}
