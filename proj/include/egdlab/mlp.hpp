#pragma once

// Two-layer ReLU network f(x) = V relu(W x) with exact backpropagation.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "egdlab/matrix.hpp"
#include "egdlab/tasks.hpp"

namespace egdlab::nn {

struct MlpShape {
    std::size_t input_dim = 1;   // d
    std::size_t width = 1;       // m
    std::size_t output_dim = 1;  // c
    bool bias = false;           // constant-1 input appended to the hidden layer
};

struct Mlp2 {
    DenseMatrix w_hidden;  // m x d (m x (d+1) with bias)
    DenseMatrix v_out;     // c x m
    bool bias = false;

    std::size_t input_dim() const { return w_hidden.cols() - (bias ? 1 : 0); }
    std::size_t width() const { return w_hidden.rows(); }
    std::size_t output_dim() const { return v_out.rows(); }
};

enum class LossKind { hinge, cross_entropy };

struct ForwardPass {
    DenseMatrix pre_activation;  // N x m, W x
    DenseMatrix hidden;          // N x m, relu(W x)
    DenseMatrix logits;          // N x c
};

struct GradientBundle {
    DenseMatrix g_hidden;  // m x d
    DenseMatrix g_out;     // c x m
    double loss = 0.0;       // data loss plus (wd/2) ||theta||^2
    double data_loss = 0.0;
};

// Weights ~ N(0, scale^2 * 2/fan_in), seeded.
Mlp2 init(const MlpShape& shape, std::uint64_t seed, double scale = 1.0);

ForwardPass forward(const Mlp2& mlp, const DenseMatrix& inputs);

GradientBundle loss_and_grads(const Mlp2& mlp, const tasks::EncodedDataset& batch, LossKind loss_kind,
                              double weight_decay);

// Fraction of correctly classified rows (sign for hinge targets, argmax for classes).
double accuracy(const DenseMatrix& logits, const tasks::EncodedDataset& data);

// Mean data loss of precomputed logits.
double data_loss(const DenseMatrix& logits, const tasks::EncodedDataset& data, LossKind loss_kind);

double l2_penalty(const Mlp2& mlp, double weight_decay);

LossKind parse_loss_kind(const std::string& s);
std::string to_string(LossKind k);

}  // namespace egdlab::nn
