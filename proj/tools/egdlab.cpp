// egdlab command-line front end.
//
//   egdlab toy-theory --epsilon 0.001
//   egdlab parity --seed 0,1,2 --epochs 400 --out runs/parity
//   egdlab --recipe recipes/modular_p97.recipe
//   egdlab report runs/parity/vanilla_seed0.csv runs/parity/egd_seed0.csv
//
// Exit status: 0 success, 1 invalid input, 2 a training run diverged.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "egdlab/experiment.hpp"
#include "egdlab/kernels.hpp"
#include "egdlab/recipe.hpp"
#include "egdlab/report.hpp"

namespace {

using egdlab::exp::Recipe;
using egdlab::exp::RecipeKind;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitDiverged = 2;

// Flag name -> recipe key, for the per-subcommand convenience options.
using FlagMap = std::vector<std::pair<std::string, std::string>>;

const FlagMap kToyFlags{{"--epsilon", "epsilon"}, {"--s", "s"},           {"--theta", "theta"},
                        {"--eta", "eta"},         {"--u1", "u1"},         {"--u2", "u2"},
                        {"--zeta", "zeta"},       {"--k-max", "k_max"},   {"--n-train", "toy_n_train"},
                        {"--n-test", "toy_n_test"}};
const FlagMap kTrainFlags{{"--optimizers", "optimizers"}, {"--epochs", "epochs"},
                          {"--eval-every", "eval_every"}, {"--width", "width"},
                          {"--lr", "lr"},                 {"--wd", "weight_decay"},
                          {"--bs", "batch_size"},         {"--init-scale", "init_scale"},
                          {"--grok-switch", "grok_switch"}};
const FlagMap kParityFlags{{"--n", "n_bits"},
                           {"--k", "k_subset"},
                           {"--n-train", "n_train"},
                           {"--n-test", "n_test"},
                           {"--encoding", "encoding"}};
const FlagMap kModularFlags{{"--p", "p"}, {"--op", "op"}, {"--dr", "data_ratio"}};
const FlagMap kSpectrumFlags{{"--rows", "spec_rows"}, {"--cols", "spec_cols"}, {"--rank", "spec_rank"},
                             {"--count", "spec_count"}};

struct Subcommand {
    CLI::App* app = nullptr;
    RecipeKind kind{};
    std::map<std::string, std::string> values;  // recipe key -> text
    std::vector<std::string> sets;              // raw KEY=VALUE overrides
    bool dump = false;
};

void add_flags(Subcommand& sc, const FlagMap& flags) {
    for (const auto& [flag, key] : flags) sc.app->add_option(flag, sc.values[key], "sets recipe key '" + key + "'");
}

std::string default_out_root() {
    const char* env = std::getenv("EGDLAB_OUT");
    return env && *env ? env : "runs";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"egdlab: egalitarian gradient descent and grokking experiments"};
    app.require_subcommand(0, 1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string seeds;
    std::string out;
    int threads = 0;
    bool plot = true;
    bool plot_given = false;
    std::string recipe_path;
    bool quiet = false;
    app.add_option("--seed", seeds, "seed or comma-separated seed list");
    app.add_option("--out", out, "output directory (default $EGDLAB_OUT/<name>, else runs/<name>)");
    app.add_option("--threads", threads, "worker threads for independent runs")->check(CLI::PositiveNumber);
    app.add_flag_callback("--plot", [&] { plot = true; plot_given = true; }, "write SVG plots");
    app.add_flag_callback("--no-plot", [&] { plot = false; plot_given = true; }, "skip SVG plots");
    app.add_option("--recipe", recipe_path, "recipe file to run")->check(CLI::ExistingFile);
    app.add_flag("-q,--quiet", quiet, "no progress output");

    std::vector<Subcommand> subs;
    subs.reserve(5);
    auto make = [&](const char* name, const char* help, RecipeKind kind, std::initializer_list<const FlagMap*> maps) {
        Subcommand sc;
        sc.app = app.add_subcommand(name, help);
        sc.kind = kind;
        subs.push_back(std::move(sc));
        auto& ref = subs.back();
        for (const auto* m : maps) add_flags(ref, *m);
        ref.app->add_option("--set", ref.sets, "KEY=VALUE recipe override (repeatable)");
        return &ref;
    };
    make("toy-theory", "analytic toy-model error curves", RecipeKind::toy_theory, {&kToyFlags});
    make("toy-sim", "finite-sample toy simulation vs theory", RecipeKind::toy_sim, {&kToyFlags});
    auto* parity = make("parity", "sparse parity training runs", RecipeKind::parity, {&kTrainFlags, &kParityFlags});
    auto* modular = make("modular", "modular arithmetic training runs", RecipeKind::modular,
                         {&kTrainFlags, &kModularFlags});
    make("spectrum", "spectra of transformed random matrices", RecipeKind::spectrum, {&kSpectrumFlags});
    parity->app->add_flag("--dump-dataset", parity->dump, "also write the generated datasets as CSV");
    modular->app->add_flag("--dump-dataset", modular->dump, "also write the generated datasets as CSV");

    auto* report = app.add_subcommand("report", "compare run CSVs");
    std::vector<std::string> report_inputs;
    double threshold = 0.99;
    int patience = 3;
    std::string report_csv;
    report->add_option("csv", report_inputs, "run CSV files")->required();
    report->add_option("--threshold", threshold, "grok accuracy threshold");
    report->add_option("--patience", patience, "evals the threshold must hold")->check(CLI::PositiveNumber);
    report->add_option("--csv-out", report_csv, "also write the summary as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (report->parsed()) {
            std::vector<std::filesystem::path> paths(report_inputs.begin(), report_inputs.end());
            const auto rep = egdlab::exp::compare_files(paths, {threshold, patience});
            egdlab::exp::write_report_text(std::cout, rep);
            if (!report_csv.empty()) {
                std::ofstream os(report_csv);
                if (!os) throw std::invalid_argument("cannot write " + report_csv);
                egdlab::exp::write_report_csv(os, rep);
            }
            return kExitOk;
        }

        const Subcommand* active = nullptr;
        for (const auto& sc : subs)
            if (sc.app->parsed()) active = &sc;
        if (!active && recipe_path.empty()) {
            std::cerr << app.help();
            return kExitInvalid;
        }

        Recipe r = recipe_path.empty() ? egdlab::exp::default_recipe(active->kind)
                                       : egdlab::exp::load_recipe(recipe_path);
        if (active && !recipe_path.empty() && r.kind != active->kind) {
            throw egdlab::exp::RecipeError("kind", "recipe is '" + egdlab::exp::to_string(r.kind) +
                                                       "' but subcommand is '" + active->app->get_name() + "'");
        }
        if (active) {
            for (const auto& [key, value] : active->values)
                if (!value.empty()) egdlab::exp::set_field(r, key, value);
            for (const auto& kv : active->sets) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw egdlab::exp::RecipeError("--set", "expected KEY=VALUE, got " + kv);
                egdlab::exp::set_field(r, kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (active->dump) r.dump_dataset = true;
        }
        if (app.count("--seed") > 0) egdlab::exp::set_field(r, "seeds", seeds);
        if (plot_given) r.plot = plot;
        if (threads > 0) {
            r.threads = threads;
            if (threads > 1) egdlab::kernels::set_num_threads(1);  // parallelism goes to the run pool
        }
        if (!out.empty()) {
            r.output_dir = out;
        } else if (recipe_path.empty()) {
            r.output_dir = (std::filesystem::path(default_out_root()) / r.name).string();
        }

        auto res = egdlab::exp::run_recipe(r, quiet ? nullptr : &std::cerr);
        if (!quiet) std::cerr << "wrote " << res.outputs.size() << " file(s) and " << res.manifest.string() << '\n';
        if (res.diverged_runs > 0) {
            std::cerr << "error: " << res.diverged_runs << " run(s) diverged; first: " << res.first_error << '\n';
            return kExitDiverged;
        }
        return kExitOk;
    } catch (const egdlab::exp::RecipeError& e) {
        std::cerr << "invalid recipe: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const egdlab::exp::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
}
