#include "egdlab/optimizer.hpp"

namespace egdlab::nn {

namespace {

DenseMatrix layer_direction(OptimizerKind kind, Layer layer, const DenseMatrix& g, const OptimizerConfig& cfg,
                            std::optional<DenseMatrix>& ema) {
    switch (kind) {
        case OptimizerKind::vanilla:
            return g;
        case OptimizerKind::egd:
        case OptimizerKind::colnorm:
        case OptimizerKind::ngd:
            return cfg.transform_layers.contains(layer) ? transform_gradient(kind, g, cfg.svd_rel_tol) : g;
        case OptimizerKind::grokfast_ema: {
            if (!ema) {
                ema = g;
            } else {
                DenseMatrix& mu = *ema;
                const double a = cfg.ema.alpha;
                for (std::size_t i = 0; i < mu.size(); ++i) {
                    mu.values()[i] = a * mu.values()[i] + (1.0 - a) * g.values()[i];
                }
            }
            DenseMatrix dir = g;
            for (std::size_t i = 0; i < dir.size(); ++i) dir.values()[i] += cfg.ema.lamb * ema->values()[i];
            return dir;
        }
    }
    return g;
}

void apply_update(DenseMatrix& theta, const DenseMatrix& dir, const OptimizerConfig& cfg, const char* name) {
    auto t = theta.values();
    const auto d = dir.values();
    for (std::size_t i = 0; i < t.size(); ++i) t[i] -= cfg.lr * d[i];
    if (!cfg.coupled_wd && cfg.weight_decay != 0.0) {
        const double keep = 1.0 - cfg.lr * cfg.weight_decay;
        for (double& x : t) x *= keep;
    }
    if (!theta.all_finite()) throw NonFiniteUpdateError(name);
}

}  // namespace

void OptimizerConfig::validate() const {
    if (!(lr > 0.0)) throw std::invalid_argument("optimizer: lr must be > 0");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("optimizer: weight_decay must be >= 0");
    if (batch_size == 0) throw std::invalid_argument("optimizer: batch_size must be > 0");
    if (!(grok_switch.acc_threshold > 0.0 && grok_switch.acc_threshold <= 1.0)) {
        throw std::invalid_argument("optimizer: acc_threshold must lie in (0, 1]");
    }
    if (grok_switch.patience < 1) throw std::invalid_argument("optimizer: patience must be >= 1");
    if (!(svd_rel_tol > 0.0 && svd_rel_tol < 1.0)) throw std::invalid_argument("optimizer: svd_rel_tol in (0, 1)");
}

OptimizerState OptimizerState::for_config(const OptimizerConfig& cfg) {
    OptimizerState s;
    s.active = cfg.kind;
    return s;
}

DenseMatrix transform_gradient(OptimizerKind kind, const DenseMatrix& g, double rel_tol) {
    switch (kind) {
        case OptimizerKind::egd:
            return spectral::egd_transform(g, rel_tol);
        case OptimizerKind::colnorm:
            return spectral::column_normalize(g);
        case OptimizerKind::ngd:
            return spectral::ngd_transform(g, rel_tol);
        case OptimizerKind::vanilla:
        case OptimizerKind::grokfast_ema:
            break;
    }
    return g;
}

void step(Mlp2& mlp, const GradientBundle& grads, const OptimizerConfig& cfg, OptimizerState& state) {
    if (grads.g_hidden.rows() != mlp.w_hidden.rows() || grads.g_hidden.cols() != mlp.w_hidden.cols() ||
        grads.g_out.rows() != mlp.v_out.rows() || grads.g_out.cols() != mlp.v_out.cols()) {
        throw ShapeError("step: gradient shapes do not match the network");
    }
    if (!grads.g_hidden.all_finite()) throw NonFiniteUpdateError("hidden");
    if (!grads.g_out.all_finite()) throw NonFiniteUpdateError("out");

    DenseMatrix gh = grads.g_hidden;
    DenseMatrix go = grads.g_out;
    if (cfg.coupled_wd && cfg.weight_decay != 0.0) {
        gh += cfg.weight_decay * mlp.w_hidden;
        go += cfg.weight_decay * mlp.v_out;
    }
    DenseMatrix dh = layer_direction(state.active, Layer::hidden, gh, cfg, state.ema_hidden);
    const DenseMatrix dout = layer_direction(state.active, Layer::out, go, cfg, state.ema_out);
    apply_update(mlp.w_hidden, dh, cfg, "hidden");
    apply_update(mlp.v_out, dout, cfg, "out");
    state.last_hidden_update = std::move(dh);
}

bool observe_eval(const OptimizerConfig& cfg, OptimizerState& state, double test_acc) {
    if (!cfg.grok_switch.enabled || state.switched) return false;
    state.streak = test_acc >= cfg.grok_switch.acc_threshold ? state.streak + 1 : 0;
    if (state.streak >= cfg.grok_switch.patience) {
        state.switched = true;
        state.active = OptimizerKind::vanilla;
        return true;
    }
    return false;
}

OptimizerKind parse_optimizer_kind(const std::string& s) {
    if (s == "vanilla" || s == "sgd") return OptimizerKind::vanilla;
    if (s == "egd") return OptimizerKind::egd;
    if (s == "colnorm") return OptimizerKind::colnorm;
    if (s == "ngd") return OptimizerKind::ngd;
    if (s == "grokfast_ema" || s == "grokfast") return OptimizerKind::grokfast_ema;
    throw std::invalid_argument("unknown optimizer kind '" + s + "'");
}

std::string to_string(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::vanilla:
            return "vanilla";
        case OptimizerKind::egd:
            return "egd";
        case OptimizerKind::colnorm:
            return "colnorm";
        case OptimizerKind::ngd:
            return "ngd";
        case OptimizerKind::grokfast_ema:
            return "grokfast_ema";
    }
    return "?";
}

Layer parse_layer(const std::string& s) {
    if (s == "hidden") return Layer::hidden;
    if (s == "out" || s == "output") return Layer::out;
    throw std::invalid_argument("unknown layer '" + s + "'");
}

std::string to_string(Layer l) { return l == Layer::hidden ? "hidden" : "out"; }

}  // namespace egdlab::nn
