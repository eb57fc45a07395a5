#pragma once

// Executes a recipe: fans (optimizer, seed) runs out to a worker pool, writes
// one CSV per run, a manifest and optional SVG plots into recipe.output_dir.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "egdlab/recipe.hpp"

namespace egdlab::exp {

struct RecipeResult {
    std::vector<std::filesystem::path> outputs;  // finished files, in job order
    std::filesystem::path manifest;
    int diverged_runs = 0;
    std::string first_error;
};

// Throws RecipeError before doing any work if the recipe is invalid.
RecipeResult run_recipe(const Recipe& recipe, std::ostream* log = nullptr);

std::string run_csv_name(nn::OptimizerKind kind, std::uint64_t seed);

// SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_sha1(const std::string& content);

}  // namespace egdlab::exp
