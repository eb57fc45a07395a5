#include "egdlab/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace egdlab::tasks {

namespace {

// Fisher-Yates with an explicit engine; std::shuffle's algorithm is not
// pinned by the standard, this one is.
template <class T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

EncodedDataset sample_parity(std::size_t n, const ParitySpec& spec, const std::vector<std::size_t>& secret,
                             std::mt19937_64& rng) {
    EncodedDataset ds{DenseMatrix(n, spec.n_bits), std::vector<double>(n), TargetKind::sign, 1};
    std::vector<int> bits(spec.n_bits);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < spec.n_bits; ++j) {
            bits[j] = static_cast<int>(rng() >> 63);
            const double x = spec.encoding == BitEncoding::zero_one ? bits[j] : 2.0 * bits[j] - 1.0;
            ds.inputs(i, j) = x;
        }
        ds.targets[i] = parity_label(bits, secret);
    }
    return ds;
}

}  // namespace

EncodedDataset EncodedDataset::subset(const std::vector<std::size_t>& idx) const {
    EncodedDataset out{DenseMatrix(idx.size(), dim()), std::vector<double>(idx.size()), target_kind, num_classes};
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto src = inputs.row(idx[r]);
        std::copy(src.begin(), src.end(), out.inputs.row(r).begin());
        out.targets[r] = targets[idx[r]];
    }
    return out;
}

double parity_label(const std::vector<int>& bits, const std::vector<std::size_t>& secret) {
    int sum = 0;
    for (std::size_t j : secret) sum += bits.at(j);
    return sum % 2 == 0 ? 1.0 : -1.0;
}

ParityData gen_parity(const ParitySpec& spec) {
    if (spec.n_bits == 0 || spec.k_subset == 0 || spec.k_subset > spec.n_bits) {
        throw std::invalid_argument("gen_parity: need 1 <= k <= n");
    }
    if (spec.n_train == 0 || spec.n_test == 0) throw std::invalid_argument("gen_parity: empty split");
    std::mt19937_64 rng(spec.seed);
    std::vector<std::size_t> all(spec.n_bits);
    std::iota(all.begin(), all.end(), std::size_t{0});
    seeded_shuffle(all, rng);
    std::vector<std::size_t> secret(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(spec.k_subset));
    std::sort(secret.begin(), secret.end());

    ParityData out;
    out.secret = secret;
    out.train = sample_parity(spec.n_train, spec, secret, rng);
    out.test = sample_parity(spec.n_test, spec, secret, rng);
    return out;
}

bool is_prime(std::uint64_t p) {
    if (p < 2) return false;
    for (std::uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

std::uint64_t modular_label(std::uint64_t a, std::uint64_t b, std::uint64_t p, ModOp op) {
    return op == ModOp::add ? (a + b) % p : (a * b) % p;
}

ModularData gen_modular(const ModularSpec& spec) {
    if (!is_prime(spec.p)) throw std::invalid_argument("gen_modular: modulus " + std::to_string(spec.p) + " is not prime");
    if (!(spec.data_ratio > 0.0 && spec.data_ratio <= 1.0)) {
        throw std::invalid_argument("gen_modular: data_ratio must lie in (0, 1]");
    }
    const std::uint64_t p = spec.p;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> grid;
    grid.reserve(p * p);
    for (std::uint64_t a = 0; a < p; ++a)
        for (std::uint64_t b = 0; b < p; ++b) grid.emplace_back(a, b);
    std::mt19937_64 rng(spec.seed);
    seeded_shuffle(grid, rng);

    const auto total = static_cast<double>(grid.size());
    auto n_train = static_cast<std::size_t>(std::ceil(spec.data_ratio * total - 1e-9));
    n_train = std::clamp<std::size_t>(n_train, 1, grid.size());

    auto encode = [&](std::size_t begin, std::size_t end, std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs) {
        const std::size_t n = end - begin;
        pairs.assign(grid.begin() + static_cast<std::ptrdiff_t>(begin), grid.begin() + static_cast<std::ptrdiff_t>(end));
        if (n == 0) return EncodedDataset{};
        EncodedDataset ds{DenseMatrix(n, 2 * p), std::vector<double>(n), TargetKind::class_index, p};
        for (std::size_t i = 0; i < n; ++i) {
            const auto [a, b] = pairs[i];
            ds.inputs(i, a) = 1.0;
            ds.inputs(i, p + b) = 1.0;
            ds.targets[i] = static_cast<double>(modular_label(a, b, p, spec.op));
        }
        return ds;
    };

    ModularData out;
    out.train = encode(0, n_train, out.train_pairs);
    out.test = encode(n_train, grid.size(), out.test_pairs);
    return out;
}

void write_dataset_csv(std::ostream& os, const EncodedDataset& data) {
    for (std::size_t j = 0; j < data.dim(); ++j) os << 'x' << j << ',';
    os << "target\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j) os << static_cast<long long>(std::llround(data.inputs(i, j))) << ',';
        os << static_cast<long long>(std::llround(data.targets[i])) << '\n';
    }
}

std::string to_string(BitEncoding e) { return e == BitEncoding::zero_one ? "01" : "pm1"; }
std::string to_string(ModOp op) { return op == ModOp::add ? "add" : "mul"; }

BitEncoding parse_encoding(const std::string& s) {
    if (s == "01" || s == "zero_one") return BitEncoding::zero_one;
    if (s == "pm1" || s == "plus_minus") return BitEncoding::plus_minus;
    throw std::invalid_argument("unknown bit encoding '" + s + "' (expected 01 or pm1)");
}

ModOp parse_mod_op(const std::string& s) {
    if (s == "add" || s == "+") return ModOp::add;
    if (s == "mul" || s == "*" || s == "x") return ModOp::mul;
    throw std::invalid_argument("unknown modular op '" + s + "' (expected add or mul)");
}

}  // namespace egdlab::tasks
