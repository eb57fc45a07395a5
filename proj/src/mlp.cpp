#include "egdlab/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "egdlab/kernels.hpp"

namespace egdlab::nn {

namespace {

DenseMatrix with_bias_column(const DenseMatrix& x) {
    DenseMatrix out(x.rows(), x.cols() + 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto src = x.row(i);
        auto dst = out.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
        dst[x.cols()] = 1.0;
    }
    return out;
}

void check_batch(const Mlp2& mlp, const tasks::EncodedDataset& batch, LossKind kind) {
    if (batch.dim() != mlp.input_dim()) {
        throw ShapeError("loss_and_grads: batch dim " + std::to_string(batch.dim()) + " but network expects " +
                         std::to_string(mlp.input_dim()));
    }
    if (batch.targets.size() != batch.size()) throw ShapeError("loss_and_grads: target count mismatch");
    if (kind == LossKind::hinge && (mlp.output_dim() != 1 || batch.target_kind != tasks::TargetKind::sign)) {
        throw ShapeError("loss_and_grads: hinge loss needs a scalar output and +-1 targets");
    }
    if (kind == LossKind::cross_entropy &&
        (batch.target_kind != tasks::TargetKind::class_index || batch.num_classes != mlp.output_dim())) {
        throw ShapeError("loss_and_grads: cross-entropy needs class targets matching the output width");
    }
}

}  // namespace

Mlp2 init(const MlpShape& shape, std::uint64_t seed, double scale) {
    if (shape.input_dim == 0 || shape.width == 0 || shape.output_dim == 0) {
        throw std::invalid_argument("init: m, d, c must all be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t fan_in = shape.input_dim + (shape.bias ? 1 : 0);
    Mlp2 mlp{DenseMatrix(shape.width, fan_in), DenseMatrix(shape.output_dim, shape.width), shape.bias};
    const double sw = scale * std::sqrt(2.0 / static_cast<double>(shape.input_dim));
    const double sv = scale * std::sqrt(2.0 / static_cast<double>(shape.width));
    for (double& x : mlp.w_hidden.values()) x = sw * normal(rng);
    for (double& x : mlp.v_out.values()) x = sv * normal(rng);
    return mlp;
}

ForwardPass forward(const Mlp2& mlp, const DenseMatrix& inputs) {
    if (inputs.cols() != mlp.input_dim()) {
        throw ShapeError("forward: input dim " + std::to_string(inputs.cols()) + " vs " +
                         std::to_string(mlp.input_dim()));
    }
    ForwardPass fp;
    fp.pre_activation = mlp.bias ? kernels::parallel::gemm_nt(with_bias_column(inputs), mlp.w_hidden)
                                 : kernels::parallel::gemm_nt(inputs, mlp.w_hidden);
    fp.hidden = fp.pre_activation;
    kernels::parallel::relu_inplace(fp.hidden);
    fp.logits = kernels::parallel::gemm_nt(fp.hidden, mlp.v_out);
    return fp;
}

double data_loss(const DenseMatrix& logits, const tasks::EncodedDataset& data, LossKind loss_kind) {
    const std::size_t n = logits.rows();
    double total = 0.0;
    if (loss_kind == LossKind::hinge) {
        for (std::size_t i = 0; i < n; ++i) total += std::max(0.0, 1.0 - data.targets[i] * logits(i, 0));
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = logits.row(i);
            const double mx = *std::max_element(row.begin(), row.end());
            double z = 0.0;
            for (double l : row) z += std::exp(l - mx);
            const auto cls = static_cast<std::size_t>(data.targets[i]);
            total += std::log(z) + mx - row[cls];
        }
    }
    return total / static_cast<double>(n);
}

double l2_penalty(const Mlp2& mlp, double weight_decay) {
    if (weight_decay == 0.0) return 0.0;
    const double a = mlp.w_hidden.frobenius_norm();
    const double b = mlp.v_out.frobenius_norm();
    return 0.5 * weight_decay * (a * a + b * b);
}

GradientBundle loss_and_grads(const Mlp2& mlp, const tasks::EncodedDataset& batch, LossKind loss_kind,
                              double weight_decay) {
    check_batch(mlp, batch, loss_kind);
    const std::size_t n = batch.size();
    const std::size_t c = mlp.output_dim();
    const ForwardPass fp = forward(mlp, batch.inputs);
    const double inv_n = 1.0 / static_cast<double>(n);

    // d loss / d logits
    DenseMatrix delta_out(n, c);
    if (loss_kind == LossKind::hinge) {
        for (std::size_t i = 0; i < n; ++i) {
            const double y = batch.targets[i];
            if (y * fp.logits(i, 0) < 1.0) delta_out(i, 0) = -y * inv_n;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = fp.logits.row(i);
            const double mx = *std::max_element(row.begin(), row.end());
            double z = 0.0;
            for (double l : row) z += std::exp(l - mx);
            auto d = delta_out.row(i);
            for (std::size_t j = 0; j < c; ++j) d[j] = std::exp(row[j] - mx) / z * inv_n;
            d[static_cast<std::size_t>(batch.targets[i])] -= inv_n;
        }
    }

    GradientBundle g;
    g.data_loss = data_loss(fp.logits, batch, loss_kind);
    g.loss = g.data_loss + l2_penalty(mlp, weight_decay);
    g.g_out = kernels::parallel::gemm_tn(delta_out, fp.hidden);

    DenseMatrix delta_hidden = kernels::parallel::gemm_nn(delta_out, mlp.v_out);
    for (std::size_t i = 0; i < delta_hidden.size(); ++i) {
        if (!(fp.pre_activation.values()[i] > 0.0)) delta_hidden.values()[i] = 0.0;
    }
    // G_hidden = delta_hidden^T X, computed as (X^T delta_hidden)^T so the
    // zero entries of X are skipped.
    const DenseMatrix x = mlp.bias ? with_bias_column(batch.inputs) : batch.inputs;
    g.g_hidden = kernels::parallel::gemm_tn(x, delta_hidden).transposed();
    return g;
}

double accuracy(const DenseMatrix& logits, const tasks::EncodedDataset& data) {
    const std::size_t n = logits.rows();
    if (n == 0) return 0.0;
    std::size_t correct = 0;
    if (data.target_kind == tasks::TargetKind::sign) {
        for (std::size_t i = 0; i < n; ++i) {
            const double l = logits(i, 0);
            if ((l > 0.0 && data.targets[i] > 0.0) || (l < 0.0 && data.targets[i] < 0.0)) ++correct;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = logits.row(i);
            const auto arg = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
            if (arg == static_cast<std::size_t>(data.targets[i])) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

LossKind parse_loss_kind(const std::string& s) {
    if (s == "hinge") return LossKind::hinge;
    if (s == "cross_entropy" || s == "ce") return LossKind::cross_entropy;
    throw std::invalid_argument("unknown loss kind '" + s + "'");
}

std::string to_string(LossKind k) { return k == LossKind::hinge ? "hinge" : "cross_entropy"; }

}  // namespace egdlab::nn
