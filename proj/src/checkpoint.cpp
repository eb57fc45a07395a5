#include "egdlab/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace egdlab::nn {

namespace {

constexpr std::array<char, 8> kMagic{'E', 'G', 'D', 'C', 'K', 'P', 'T', '1'};

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw CheckpointError("checkpoint: truncated header");
    return v;
}

void put_matrix(std::ostream& os, const DenseMatrix& m) {
    os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
}

DenseMatrix get_matrix(std::istream& is, std::uint64_t rows, std::uint64_t cols) {
    std::vector<double> buf(rows * cols);
    if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)))) {
        throw CheckpointError("checkpoint: truncated weights");
    }
    return DenseMatrix(rows, cols, std::move(buf));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Mlp2& mlp) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw CheckpointError("checkpoint: cannot open " + path.string() + " for writing");
    os.write(kMagic.data(), kMagic.size());
    put_u64(os, mlp.w_hidden.rows());
    put_u64(os, mlp.w_hidden.cols());
    put_u64(os, mlp.v_out.rows());
    put_u64(os, mlp.v_out.cols());
    put_u64(os, mlp.bias ? 1u : 0u);
    put_matrix(os, mlp.w_hidden);
    put_matrix(os, mlp.v_out);
    if (!os) throw CheckpointError("checkpoint: write failed for " + path.string());
}

Mlp2 load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CheckpointError("checkpoint: cannot open " + path.string());
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
        throw CheckpointError("checkpoint: bad magic in " + path.string());
    }
    const std::uint64_t m = get_u64(is);
    const std::uint64_t d = get_u64(is);
    const std::uint64_t c = get_u64(is);
    const std::uint64_t m2 = get_u64(is);
    const std::uint64_t flags = get_u64(is);
    if (m == 0 || d == 0 || c == 0 || m != m2 || m > (1u << 24) || d > (1u << 24) || c > (1u << 24)) {
        throw CheckpointError("checkpoint: inconsistent shape header");
    }
    if ((flags & ~1ull) != 0) throw CheckpointError("checkpoint: unknown flags");
    const bool bias = flags & 1u;
    if (bias && d < 2) throw CheckpointError("checkpoint: bias flag needs at least one input column");
    Mlp2 mlp{get_matrix(is, m, d), get_matrix(is, c, m2), bias};
    if (is.peek() != std::char_traits<char>::eof()) throw CheckpointError("checkpoint: trailing bytes");
    return mlp;
}

}  // namespace egdlab::nn
