#include "egdlab/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "egdlab/spectral.hpp"

namespace egdlab::nn {

namespace {

RunRecord evaluate(const Mlp2& mlp, const tasks::EncodedDataset& train_set, const tasks::EncodedDataset& test_set,
                   const TrainConfig& tcfg, double weight_decay) {
    RunRecord r;
    const ForwardPass tr = forward(mlp, train_set.inputs);
    r.train_loss = data_loss(tr.logits, train_set, tcfg.loss_kind) + l2_penalty(mlp, weight_decay);
    r.train_acc = accuracy(tr.logits, train_set);
    r.test_acc = accuracy(forward(mlp, test_set.inputs).logits, test_set);
    return r;
}

void fill_spectrum(RunRecord& r, const DenseMatrix& direction, double rel_tol) {
    if (direction.empty()) return;
    const auto d = spectral::spectrum(direction, rel_tol);
    if (d.numerical_rank == 0) {
        r.s_max = r.s_min = 0.0;
        r.cond = std::numeric_limits<double>::infinity();
        return;
    }
    r.s_max = d.singular_values.front();
    r.s_min = d.singular_values[d.numerical_rank - 1];
    r.cond = d.condition_number;
}

// Direction the optimizer would apply on the first natural-order batch; used
// for the epoch-0 spectrum before any update has happened.
DenseMatrix probe_direction(const Mlp2& mlp, const tasks::EncodedDataset& train_set, const TrainConfig& tcfg,
                            const OptimizerConfig& ocfg) {
    std::vector<std::size_t> idx(std::min(ocfg.batch_size, train_set.size()));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const GradientBundle g = loss_and_grads(mlp, train_set.subset(idx), tcfg.loss_kind, ocfg.weight_decay);
    DenseMatrix gh = g.g_hidden;
    if (ocfg.coupled_wd && ocfg.weight_decay != 0.0) gh += ocfg.weight_decay * mlp.w_hidden;
    if (ocfg.kind == OptimizerKind::grokfast_ema) {
        // EMA of a single gradient is the gradient itself.
        return (1.0 + ocfg.ema.lamb) * gh;
    }
    return ocfg.transform_layers.contains(Layer::hidden) ? transform_gradient(ocfg.kind, gh, ocfg.svd_rel_tol) : gh;
}

bool diverged(const RunRecord& r) { return !std::isfinite(r.train_loss) || r.train_loss > 1e12; }

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
    if (eval_every < 1) throw std::invalid_argument("train: eval_every must be >= 1");
    if (width == 0) throw std::invalid_argument("train: width must be >= 1");
    if (!(init_scale > 0.0)) throw std::invalid_argument("train: init_scale must be > 0");
    if (early_stop_patience < 0) throw std::invalid_argument("train: early_stop_patience must be >= 0");
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch_size, std::uint64_t seed,
                                                    int epoch) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(epoch), 0x5eedu};
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(perm[i - 1], perm[j]);
    }
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t b = 0; b < n; b += batch_size) {
        out.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(b),
                         perm.begin() + static_cast<std::ptrdiff_t>(std::min(n, b + batch_size)));
    }
    return out;
}

TrainResult train(const tasks::EncodedDataset& train_set, const tasks::EncodedDataset& test_set,
                  const TrainConfig& tcfg, const OptimizerConfig& ocfg, const RecordCallback& on_record) {
    tcfg.validate();
    ocfg.validate();
    if (train_set.size() == 0 || test_set.size() == 0) throw std::invalid_argument("train: empty dataset");
    if (tcfg.loss_kind == LossKind::hinge && train_set.target_kind != tasks::TargetKind::sign) {
        throw std::invalid_argument("train: hinge loss needs +-1 targets");
    }
    const std::size_t c = train_set.target_kind == tasks::TargetKind::sign ? 1 : train_set.num_classes;
    MlpShape shape{train_set.dim(), tcfg.width, c, tcfg.bias};

    TrainResult res{{}, init(shape, tcfg.seed, tcfg.init_scale), OptimizerState::for_config(ocfg)};
    const auto t0 = std::chrono::steady_clock::now();
    auto stamp = [&](RunRecord& r, int epoch) {
        r.epoch = epoch;
        r.optimizer_active = to_string(res.state.active);
        if (tcfg.record_wall_time) {
            r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
    };

    RunRecord r0 = evaluate(res.model, train_set, test_set, tcfg, ocfg.weight_decay);
    if (tcfg.log_spectrum) fill_spectrum(r0, probe_direction(res.model, train_set, tcfg, ocfg), ocfg.svd_rel_tol);
    stamp(r0, 0);
    if (diverged(r0)) throw DivergenceError(0, r0);
    res.records.push_back(r0);
    if (on_record) on_record(r0);

    int streak = 0;
    for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
        for (const auto& idx : epoch_batches(train_set.size(), ocfg.batch_size, tcfg.seed, epoch)) {
            const GradientBundle g = loss_and_grads(res.model, train_set.subset(idx), tcfg.loss_kind, ocfg.weight_decay);
            if (!std::isfinite(g.loss) || g.loss > 1e12) throw DivergenceError(epoch, res.records.back());
            try {
                step(res.model, g, ocfg, res.state);
            } catch (const NonFiniteUpdateError&) {
                throw DivergenceError(epoch, res.records.back());
            }
        }
        if (epoch % tcfg.eval_every != 0 && epoch != tcfg.epochs) continue;
        RunRecord r = evaluate(res.model, train_set, test_set, tcfg, ocfg.weight_decay);
        if (diverged(r)) throw DivergenceError(epoch, res.records.back());
        if (tcfg.log_spectrum) fill_spectrum(r, res.state.last_hidden_update, ocfg.svd_rel_tol);
        stamp(r, epoch);
        observe_eval(ocfg, res.state, r.test_acc);
        res.records.push_back(r);
        if (on_record) on_record(r);
        if (tcfg.early_stop_patience > 0) {
            streak = r.test_acc >= tcfg.stop_acc ? streak + 1 : 0;
            if (streak >= tcfg.early_stop_patience) break;
        }
    }
    return res;
}

}  // namespace egdlab::nn
