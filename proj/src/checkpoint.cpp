#include "chansep/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace chansep::grad {

std::string double_to_hex(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double double_from_hex(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw std::invalid_argument("checkpoint: malformed float literal: " + s);
  }
  return v;
}

namespace {

nlohmann::json floats_to_json(const std::vector<double>& data) {
  nlohmann::json arr = nlohmann::json::array();
  for (double v : data) arr.push_back(double_to_hex(v));
  return arr;
}

std::vector<double> floats_from_json(const nlohmann::json& arr, std::size_t expected) {
  if (!arr.is_array() || arr.size() != expected) {
    throw std::invalid_argument("checkpoint: parameter array size mismatch");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : arr) out.push_back(double_from_hex(v.get<std::string>()));
  return out;
}

}  // namespace

nlohmann::json network_to_json(const Network& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : net.layers) {
    nlohmann::json jl;
    jl["out"] = l.out_dim();
    jl["in"] = l.in_dim();
    jl["activation"] = activation_name(l.act);
    jl["W"] = floats_to_json(l.W.data);
    jl["b"] = floats_to_json(l.b.data);
    layers.push_back(std::move(jl));
  }
  return nlohmann::json{{"layers", std::move(layers)}};
}

Network network_from_json(const nlohmann::json& j) {
  Network net;
  for (const auto& jl : j.at("layers")) {
    Layer l;
    const std::size_t out = jl.at("out").get<std::size_t>();
    const std::size_t in = jl.at("in").get<std::size_t>();
    l.act = activation_from_name(jl.at("activation").get<std::string>());
    l.W = Tensor::matrix(out, in);
    l.W.data = floats_from_json(jl.at("W"), out * in);
    l.b = Tensor::vector(out);
    l.b.data = floats_from_json(jl.at("b"), out);
    net.layers.push_back(std::move(l));
  }
  validate(net);
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json j;
  j["format"] = "chansep-checkpoint-v1";
  j["algorithm"] = ckpt.algorithm;
  j["channel_classes"] = ckpt.channel_classes;
  nlohmann::json nets;
  for (const auto& [name, net] : ckpt.networks) nets[name] = network_to_json(net);
  j["networks"] = std::move(nets);
  if (!ckpt.extra.is_null()) j["meta"] = ckpt.extra;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  out << j.dump(1) << "\n";
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "chansep-checkpoint-v1") {
    throw std::runtime_error("not a chansep checkpoint: " + path.string());
  }
  Checkpoint ckpt;
  ckpt.algorithm = j.at("algorithm").get<std::string>();
  ckpt.channel_classes = j.at("channel_classes").get<std::vector<std::string>>();
  for (const auto& [name, jnet] : j.at("networks").items()) {
    ckpt.networks.emplace(name, network_from_json(jnet));
  }
  ckpt.extra = j.value("meta", nlohmann::json());
  return ckpt;
}

}  // namespace chansep::grad
