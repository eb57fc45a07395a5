#pragma once

// Dataset generators for sparse parity Parity(n, k) and modular arithmetic
// Mod(p, op).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "egdlab/matrix.hpp"

namespace egdlab::tasks {

enum class BitEncoding { zero_one, plus_minus };
enum class ModOp { add, mul };

struct ParitySpec {
    std::size_t n_bits = 50;
    std::size_t k_subset = 4;
    std::size_t n_train = 1000;
    std::size_t n_test = 10000;
    std::uint64_t seed = 0;
    BitEncoding encoding = BitEncoding::zero_one;
};

struct ModularSpec {
    std::uint64_t p = 97;
    ModOp op = ModOp::add;
    double data_ratio = 0.5;
    std::uint64_t seed = 0;
};

enum class TargetKind { sign, class_index };

struct EncodedDataset {
    DenseMatrix inputs;           // N x d
    std::vector<double> targets;  // +-1 (sign) or class index stored as double
    TargetKind target_kind = TargetKind::sign;
    std::size_t num_classes = 1;  // 1 for sign targets

    std::size_t size() const { return inputs.rows(); }
    std::size_t dim() const { return inputs.cols(); }
    // Rows `idx` gathered into a new dataset.
    EncodedDataset subset(const std::vector<std::size_t>& idx) const;
};

struct ParityData {
    EncodedDataset train;
    EncodedDataset test;
    std::vector<std::size_t> secret;  // sorted
};

struct ModularData {
    EncodedDataset train;
    EncodedDataset test;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> train_pairs;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> test_pairs;
};

// (-1)^(sum of bits over the secret subset); bits must be 0/1.
double parity_label(const std::vector<int>& bits, const std::vector<std::size_t>& secret);

ParityData gen_parity(const ParitySpec& spec);

bool is_prime(std::uint64_t p);
std::uint64_t modular_label(std::uint64_t a, std::uint64_t b, std::uint64_t p, ModOp op);
ModularData gen_modular(const ModularSpec& spec);

// CSV: header x0..x{d-1},target; inputs written as integers.
void write_dataset_csv(std::ostream& os, const EncodedDataset& data);

std::string to_string(BitEncoding e);
std::string to_string(ModOp op);
BitEncoding parse_encoding(const std::string& s);
ModOp parse_mod_op(const std::string& s);

}  // namespace egdlab::tasks
