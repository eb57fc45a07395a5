#pragma once

// Optimizer zoo for the two-layer network: vanilla SGD, EGD, column
// normalization, NGD and a Grokfast-style EMA filter. Weight decay is
// decoupled by default: theta <- (1 - lr wd) theta after the gradient step.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "egdlab/matrix.hpp"
#include "egdlab/mlp.hpp"
#include "egdlab/spectral.hpp"

namespace egdlab::nn {

enum class OptimizerKind { vanilla, egd, colnorm, ngd, grokfast_ema };
enum class Layer { hidden, out };

struct GrokSwitch {
    bool enabled = false;
    double acc_threshold = 0.99;
    int patience = 3;
};

// Baseline defaults for the EMA filter; these are not tuned for this lab.
struct EmaConfig {
    double alpha = 0.98;
    double lamb = 2.0;
};

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::vanilla;
    double lr = 0.01;
    double weight_decay = 0.0;
    std::size_t batch_size = 32;
    std::set<Layer> transform_layers{Layer::hidden};  // layers that get the spectral transform
    GrokSwitch grok_switch;
    EmaConfig ema;
    double svd_rel_tol = spectral::kDefaultRelTol;
    bool coupled_wd = false;  // wd gradient passes through the transform instead

    void validate() const;
};

struct OptimizerState {
    OptimizerKind active = OptimizerKind::vanilla;
    std::optional<DenseMatrix> ema_hidden;
    std::optional<DenseMatrix> ema_out;
    int streak = 0;  // consecutive evals at or above the grok threshold
    bool switched = false;
    DenseMatrix last_hidden_update;  // direction applied to W on the last step, before lr and wd

    static OptimizerState for_config(const OptimizerConfig& cfg);
};

class NonFiniteUpdateError : public std::runtime_error {
public:
    NonFiniteUpdateError(const std::string& layer)
        : std::runtime_error("non-finite update in layer '" + layer + "'"), layer(layer) {}
    std::string layer;
};

// Applies one update in place using the currently active kind.
void step(Mlp2& mlp, const GradientBundle& grads, const OptimizerConfig& cfg, OptimizerState& state);

// Direction the given kind would apply to a layer gradient (no EMA).
DenseMatrix transform_gradient(OptimizerKind kind, const DenseMatrix& g, double rel_tol);

// Feeds one evaluation into the grok switch; returns true when it flips.
bool observe_eval(const OptimizerConfig& cfg, OptimizerState& state, double test_acc);

OptimizerKind parse_optimizer_kind(const std::string& s);
std::string to_string(OptimizerKind k);
Layer parse_layer(const std::string& s);
std::string to_string(Layer l);

}  // namespace egdlab::nn
