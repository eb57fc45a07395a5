#pragma once

// Mini-batch training loop with periodic evaluation and spectrum logging.

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "egdlab/mlp.hpp"
#include "egdlab/optimizer.hpp"
#include "egdlab/tasks.hpp"

namespace egdlab::nn {

struct RunRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;
    double s_max = 0.0;  // spectrum of the last applied hidden-layer direction
    double s_min = 0.0;
    double cond = std::numeric_limits<double>::infinity();
    std::string optimizer_active;
    double wall_ms = 0.0;
};

struct TrainConfig {
    int epochs = 100;
    int eval_every = 1;
    std::uint64_t seed = 0;  // init and batch order
    LossKind loss_kind = LossKind::hinge;
    double init_scale = 1.0;
    bool bias = false;
    std::size_t width = 100;
    bool record_wall_time = false;  // off keeps outputs byte-identical across runs
    bool log_spectrum = true;
    // Stop after this many consecutive evals with test_acc >= stop_acc (0 disables).
    int early_stop_patience = 0;
    double stop_acc = 0.99;

    void validate() const;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int epoch, const RunRecord& last_good)
        : std::runtime_error("training diverged at epoch " + std::to_string(epoch)), epoch(epoch),
          last_good(last_good) {}
    int epoch;
    RunRecord last_good;
};

struct TrainResult {
    std::vector<RunRecord> records;
    Mlp2 model;
    OptimizerState state;
};

using RecordCallback = std::function<void(const RunRecord&)>;

// Record at epoch 0 (before any update) and every eval_every epochs after.
TrainResult train(const tasks::EncodedDataset& train_set, const tasks::EncodedDataset& test_set,
                  const TrainConfig& tcfg, const OptimizerConfig& ocfg, const RecordCallback& on_record = {});

// Epoch batches as index lists, shuffled with the given engine state.
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch_size, std::uint64_t seed,
                                                    int epoch);

}  // namespace egdlab::nn
