#include "egdlab/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "egdlab/run_csv.hpp"
#include "egdlab/spectral.hpp"
#include "egdlab/svg_plot.hpp"
#include "egdlab/toy_sim.hpp"

namespace egdlab::exp {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Writes to "<path>.partial" and renames only after the body succeeds.
template <class F>
void write_atomically(const fs::path& path, F&& body) {
    const fs::path tmp = path.string() + ".partial";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        body(os);
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

struct Job {
    nn::OptimizerKind kind;
    std::uint64_t seed;
    fs::path csv;
};

struct JobResult {
    std::vector<nn::RunRecord> records;
    bool diverged = false;
    std::string error;
};

struct TaskData {
    tasks::EncodedDataset train;
    tasks::EncodedDataset test;
};

TaskData make_task(const Recipe& r, std::uint64_t seed) {
    if (r.kind == RecipeKind::parity) {
        tasks::ParitySpec s = r.parity;
        s.seed = seed;
        auto d = tasks::gen_parity(s);
        return {std::move(d.train), std::move(d.test)};
    }
    tasks::ModularSpec s = r.modular;
    s.seed = seed;
    auto d = tasks::gen_modular(s);
    return {std::move(d.train), std::move(d.test)};
}

JobResult run_training_job(const Recipe& r, const Job& job, const TaskData& data) {
    nn::TrainConfig t = r.train;
    t.epochs = r.epochs;
    t.eval_every = r.eval_every;
    t.seed = job.seed;
    nn::OptimizerConfig o = r.opt;
    o.kind = job.kind;
    o.lr = r.lr_for(job.kind);

    JobResult res;
    const std::string name = nn::to_string(job.kind);
    const fs::path tmp = job.csv.string() + ".partial";
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    write_run_header(os);
    try {
        nn::train(data.train, data.test, t, o, [&](const nn::RunRecord& rec) {
            write_run_row(os, name, job.seed, rec);
            res.records.push_back(rec);
        });
    } catch (const nn::DivergenceError& e) {
        res.diverged = true;
        res.error = name + "/seed " + std::to_string(job.seed) + ": " + e.what();
        return res;  // the .partial file stays behind
    }
    os.close();
    fs::rename(tmp, job.csv);
    return res;
}

void run_pool(std::size_t n_jobs, int threads, const std::function<void(std::size_t)>& work) {
    const auto n_workers = static_cast<std::size_t>(std::max(1, std::min<int>(threads, static_cast<int>(n_jobs))));
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < n_jobs; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n_jobs; i = next++) {
                try {
                    work(i);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> run_nn_recipe(const Recipe& r, const fs::path& dir, RecipeResult& out, std::ostream* log) {
    std::vector<Job> jobs;
    for (auto k : r.optimizers)
        for (auto s : r.seeds) jobs.push_back({k, s, dir / run_csv_name(k, s)});

    // Datasets depend only on the seed; build them once, up front.
    std::map<std::uint64_t, TaskData> data;
    for (auto s : r.seeds) {
        if (data.contains(s)) continue;
        data.emplace(s, make_task(r, s));
        if (r.dump_dataset) {
            write_atomically(dir / ("data_seed" + std::to_string(s) + "_train.csv"),
                             [&](std::ostream& os) { tasks::write_dataset_csv(os, data.at(s).train); });
            write_atomically(dir / ("data_seed" + std::to_string(s) + "_test.csv"),
                             [&](std::ostream& os) { tasks::write_dataset_csv(os, data.at(s).test); });
        }
    }

    std::vector<JobResult> results(jobs.size());
    std::mutex log_mu;
    run_pool(jobs.size(), r.threads, [&](std::size_t i) {
        results[i] = run_training_job(r, jobs[i], data.at(jobs[i].seed));
        if (log) {
            std::lock_guard lock(log_mu);
            const auto& recs = results[i].records;
            *log << nn::to_string(jobs[i].kind) << " seed " << jobs[i].seed << ": "
                 << (results[i].diverged ? "diverged" : "done");
            if (!recs.empty()) *log << ", final test_acc " << format_double(recs.back().test_acc);
            *log << '\n';
        }
    });

    std::vector<std::string> files;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (results[i].diverged) {
            ++out.diverged_runs;
            if (out.first_error.empty()) out.first_error = results[i].error;
            continue;
        }
        out.outputs.push_back(jobs[i].csv);
        files.push_back(jobs[i].csv.filename().string());
    }

    if (r.plot) {
        std::vector<Curve> curves;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const int color = static_cast<int>(
                std::find(r.optimizers.begin(), r.optimizers.end(), jobs[i].kind) - r.optimizers.begin());
            Curve tr{nn::to_string(jobs[i].kind) + "/" + std::to_string(jobs[i].seed) + " train", {}, {}, true, color};
            Curve te{nn::to_string(jobs[i].kind) + "/" + std::to_string(jobs[i].seed) + " test", {}, {}, false, color};
            for (const auto& rec : results[i].records) {
                tr.x.push_back(rec.epoch);
                tr.y.push_back(rec.train_acc);
                te.x.push_back(rec.epoch);
                te.y.push_back(rec.test_acc);
            }
            curves.push_back(std::move(tr));
            curves.push_back(std::move(te));
        }
        const fs::path svg = dir / (r.name + ".svg");
        write_atomically(svg, [&](std::ostream& os) { os << render_svg({r.name}, curves); });
        out.outputs.push_back(svg);
        files.push_back(svg.filename().string());
    }
    return files;
}

std::vector<std::string> run_toy_theory(const Recipe& r, const fs::path& dir, RecipeResult& out,
                                        std::vector<std::string>& notes) {
    const fs::path csv = dir / "toy_theory.csv";
    Curve van{"vanilla theory", {}, {}, false, 0};
    Curve egd{"egd theory", {}, {}, false, 1};
    write_atomically(csv, [&](std::ostream& os) {
        os << "k,theory_error,theory_error_orthant,egd_theory_error\n";
        for (auto k : toy::geometric_grid(r.k_max)) {
            const double e = toy::theory_error(r.toy, k);
            const double eg = toy::egd_theory_error(r.toy, k);
            os << k << ',' << format_double(e) << ',' << format_double(toy::theory_error_orthant(r.toy, k)) << ','
               << format_double(eg) << '\n';
            van.x.push_back(static_cast<double>(k));
            van.y.push_back(e);
            egd.x.push_back(static_cast<double>(k));
            egd.y.push_back(eg);
        }
    });
    out.outputs.push_back(csv);
    const auto est = toy::plateau_length_asymptotic(r.toy);
    notes.push_back("plateau_length_asymptotic = " + format_double(est.k_star) + " (" + toy::to_string(est.regime) +
                    ")");
    notes.push_back("plateau_length_exact = " + std::to_string(toy::plateau_length_exact(r.toy, r.k_max)));
    notes.push_back("egd_plateau_length_exact = " + std::to_string(toy::egd_plateau_length_exact(r.toy, r.k_max)));
    std::vector<std::string> files{csv.filename().string()};
    if (r.plot) {
        const fs::path svg = dir / (r.name + ".svg");
        write_atomically(svg, [&](std::ostream& os) {
            os << render_svg({r.name, "step k", "normalized test error"}, {van, egd});
        });
        out.outputs.push_back(svg);
        files.push_back(svg.filename().string());
    }
    return files;
}

std::vector<std::string> run_toy_sim(const Recipe& r, const fs::path& dir, RecipeResult& out, std::ostream* log) {
    std::vector<std::string> files;
    std::vector<Curve> curves;
    std::vector<fs::path> csvs(r.seeds.size());
    std::vector<std::vector<Curve>> seed_curves(r.seeds.size());
    run_pool(r.seeds.size(), r.threads, [&](std::size_t i) {
        const auto seed = r.seeds[i];
        // Test draws use a derived seed so train and test are independent.
        const auto train = toy::sample_train(r.toy, r.toy_n_train, seed);
        const auto test = toy::sample_test(r.toy, r.toy_n_test, seed ^ 0x9e3779b97f4a7c15ull);
        const auto van = toy::run_vanilla_gd(train, r.toy, r.k_max);
        const auto egd = toy::run_egd_toy(train, r.toy, r.k_max);
        csvs[i] = dir / ("toy_sim_seed" + std::to_string(seed) + ".csv");
        Curve cv{"vanilla/" + std::to_string(seed), {}, {}, false, 0};
        Curve ce{"egd/" + std::to_string(seed), {}, {}, false, 1};
        write_atomically(csvs[i], [&](std::ostream& os) {
            os << "k,vanilla_error,theory_error,egd_error,egd_theory_error,vanilla_loss\n";
            for (auto k : toy::geometric_grid(r.k_max)) {
                const auto& wv = van.iterates[static_cast<std::size_t>(k)].w;
                const auto& we = egd.iterates[static_cast<std::size_t>(k)].w;
                const double ev = toy::empirical_error(wv, test);
                const double ee = toy::empirical_error(we, test);
                os << k << ',' << format_double(ev) << ',' << format_double(toy::theory_error(r.toy, k)) << ','
                   << format_double(ee) << ',' << format_double(toy::egd_theory_error(r.toy, k)) << ','
                   << format_double(toy::quadratic_loss(wv, train)) << '\n';
                cv.x.push_back(static_cast<double>(k));
                cv.y.push_back(ev);
                ce.x.push_back(static_cast<double>(k));
                ce.y.push_back(ee);
            }
        });
        seed_curves[i] = {cv, ce};
    });
    for (std::size_t i = 0; i < csvs.size(); ++i) {
        out.outputs.push_back(csvs[i]);
        files.push_back(csvs[i].filename().string());
        for (auto& c : seed_curves[i]) curves.push_back(std::move(c));
        if (log) *log << "toy_sim seed " << r.seeds[i] << ": done\n";
    }
    if (r.plot) {
        const fs::path svg = dir / (r.name + ".svg");
        write_atomically(svg, [&](std::ostream& os) { os << render_svg({r.name, "step k", "test error"}, curves); });
        out.outputs.push_back(svg);
        files.push_back(svg.filename().string());
    }
    return files;
}

DenseMatrix random_rank_matrix(std::size_t rows, std::size_t cols, std::size_t rank, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    auto gaussian = [&](std::size_t m, std::size_t n) {
        DenseMatrix a(m, n);
        for (double& x : a.values()) x = normal(rng);
        return a;
    };
    if (rank == 0 || rank >= std::min(rows, cols)) return gaussian(rows, cols);
    return matmul(gaussian(rows, rank), gaussian(rank, cols));
}

std::vector<std::string> run_spectrum(const Recipe& r, const fs::path& dir, RecipeResult& out) {
    std::vector<std::string> files;
    for (auto seed : r.seeds) {
        const fs::path csv = dir / ("spectrum_seed" + std::to_string(seed) + ".csv");
        write_atomically(csv, [&](std::ostream& os) {
            os << "index,transform,rank,s_max,s_min,cond,frobenius\n";
            std::mt19937_64 rng(seed);
            for (std::size_t i = 0; i < r.spec_count; ++i) {
                const DenseMatrix g = random_rank_matrix(r.spec_rows, r.spec_cols, r.spec_rank, rng);
                const std::vector<std::pair<std::string, DenseMatrix>> variants{
                    {"raw", g},
                    {"egd", spectral::egd_transform(g, r.opt.svd_rel_tol)},
                    {"ngd", spectral::ngd_transform(g, r.opt.svd_rel_tol)},
                    {"colnorm", spectral::column_normalize(g)},
                };
                for (const auto& [name, m] : variants) {
                    const auto d = spectral::spectrum(m, r.opt.svd_rel_tol);
                    const double smax = d.numerical_rank ? d.singular_values.front() : 0.0;
                    const double smin = d.numerical_rank ? d.singular_values[d.numerical_rank - 1] : 0.0;
                    os << i << ',' << name << ',' << d.numerical_rank << ',' << format_double(smax) << ','
                       << format_double(smin) << ',' << format_double(d.condition_number) << ','
                       << format_double(d.frobenius_norm) << '\n';
                }
            }
        });
        out.outputs.push_back(csv);
        files.push_back(csv.filename().string());
    }
    return files;
}

}  // namespace

std::string run_csv_name(nn::OptimizerKind kind, std::uint64_t seed) {
    return nn::to_string(kind) + "_seed" + std::to_string(seed) + ".csv";
}

std::string git_blob_sha1(const std::string& content) {
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("sha1: cannot allocate digest context");
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                    EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, md, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw std::runtime_error("sha1: digest failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

RecipeResult run_recipe(const Recipe& recipe, std::ostream* log) {
    recipe.validate();
    const fs::path dir = recipe.output_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw RecipeError("output_dir", "cannot create " + dir.string());

    RecipeResult out;
    std::vector<std::string> files;
    std::vector<std::string> notes;
    switch (recipe.kind) {
        case RecipeKind::toy_theory:
            files = run_toy_theory(recipe, dir, out, notes);
            break;
        case RecipeKind::toy_sim:
            files = run_toy_sim(recipe, dir, out, log);
            break;
        case RecipeKind::parity:
        case RecipeKind::modular:
            files = run_nn_recipe(recipe, dir, out, log);
            break;
        case RecipeKind::spectrum:
            files = run_spectrum(recipe, dir, out);
            break;
    }

    // The manifest is itself a valid recipe; results go in comment lines.
    out.manifest = dir / "manifest.txt";
    write_atomically(out.manifest, [&](std::ostream& os) {
        os << to_text(recipe);
        for (const auto& n : notes) os << "# " << n << '\n';
        for (const auto& f : files) os << "# sha1 " << git_blob_sha1(read_file(dir / f)) << ' ' << f << '\n';
        if (out.diverged_runs > 0) os << "# diverged_runs " << out.diverged_runs << '\n';
    });
    return out;
}

}  // namespace egdlab::exp
