#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gluco/tensor.hpp"

namespace gluco {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Self-describing flat container: a text header naming the model and its
// config, then named blocks of row-major little-endian 64-bit floats.
struct Checkpoint {
    std::string model;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::pair<std::string, Tensor>> blocks;

    const std::string* find_config(const std::string& key) const;
    const Tensor* find_block(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gluco
