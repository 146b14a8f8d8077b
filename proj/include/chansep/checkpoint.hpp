#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chansep/network.hpp"

namespace chansep::grad {

// Checkpoints are JSON documents listing layer shapes, activation tags and
// flattened row-major parameter arrays. Doubles are stored as C99 hex-float
// strings so load(save(x)) is value-exact.

std::string double_to_hex(double v);
double double_from_hex(const std::string& s);

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

struct Checkpoint {
  std::string algorithm;                      // alg1 | alg2-decoders | alg3
  std::vector<std::string> channel_classes;   // channel order metadata
  std::map<std::string, Network> networks;    // named networks, sorted keys
  nlohmann::json extra;                       // free-form metadata (frame_len, ...)
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace chansep::grad
