#pragma once

// Experiment recipes. Text format, one "key = value" per line:
//
//   egdlab-recipe v1
//   # comment
//   kind = modular
//   optimizers = vanilla, egd
//   seeds = 0, 1
//   lr.egd = 0.5          # per-optimizer override of lr
//
// The first non-blank line must be the version header. Unknown keys are an
// error. to_text() emits every field, so its output parses back to an equal
// recipe.

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "egdlab/mlp.hpp"
#include "egdlab/optimizer.hpp"
#include "egdlab/tasks.hpp"
#include "egdlab/toy_theory.hpp"
#include "egdlab/train.hpp"

namespace egdlab::exp {

inline constexpr const char* kRecipeHeader = "egdlab-recipe v1";

enum class RecipeKind { toy_theory, toy_sim, parity, modular, spectrum };

class RecipeError : public std::invalid_argument {
public:
    RecipeError(const std::string& field, const std::string& msg)
        : std::invalid_argument(field.empty() ? msg : field + ": " + msg), field(field) {}
    std::string field;
};

struct Recipe {
    std::string name = "run";
    RecipeKind kind = RecipeKind::toy_theory;
    std::vector<nn::OptimizerKind> optimizers{nn::OptimizerKind::vanilla, nn::OptimizerKind::egd};
    std::vector<std::uint64_t> seeds{0};
    int epochs = 100;
    int eval_every = 1;
    std::string output_dir = "runs";
    bool plot = true;
    int threads = 1;  // worker pool size for (optimizer, seed) runs

    // toy model
    toy::ToyConfig toy;
    std::int64_t k_max = 100000;
    std::size_t toy_n_train = 20000;
    std::size_t toy_n_test = 200000;

    // tasks
    tasks::ParitySpec parity;
    tasks::ModularSpec modular;
    bool dump_dataset = false;

    // network and optimizer
    nn::TrainConfig train;
    nn::OptimizerConfig opt;
    std::map<nn::OptimizerKind, double> lr_override;

    // spectrum probe
    std::size_t spec_rows = 64;
    std::size_t spec_cols = 128;
    std::size_t spec_rank = 0;  // 0 means full rank
    std::size_t spec_count = 10;

    double lr_for(nn::OptimizerKind k) const;
    void validate() const;
};

Recipe parse_recipe(const std::string& text);
Recipe load_recipe(const std::filesystem::path& path);
std::string to_text(const Recipe& r);

// Sets one field from its textual value; used by the parser and by CLI overrides.
void set_field(Recipe& r, const std::string& key, const std::string& value);

// Task defaults for a kind.
Recipe default_recipe(RecipeKind kind);

RecipeKind parse_recipe_kind(const std::string& s);
std::string to_string(RecipeKind k);

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& field, const std::string& s);

}  // namespace egdlab::exp
