#pragma once

// Binary model checkpoints: magic, little-endian u64 shape header, raw f64 weights.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "egdlab/mlp.hpp"

namespace egdlab::nn {

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void save_checkpoint(const std::filesystem::path& path, const Mlp2& mlp);
Mlp2 load_checkpoint(const std::filesystem::path& path);

}  // namespace egdlab::nn
