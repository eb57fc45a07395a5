#pragma once

// Cross-run comparison: grok epochs, final accuracy, worst conditioning.

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "egdlab/run_csv.hpp"

namespace egdlab::exp {

inline constexpr int kNeverGrokked = std::numeric_limits<int>::max();

struct GrokCriterion {
    double threshold = 0.99;
    int patience = 3;  // consecutive evaluations at or above threshold
};

struct RunSummary {
    std::string label;  // optimizer/seed
    std::string optimizer;
    std::uint64_t seed = 0;
    int grok_epoch = kNeverGrokked;
    int last_epoch = 0;
    double final_test_acc = 0.0;
    double max_cond = 0.0;
};

struct PairRatio {
    std::string a;
    std::string b;
    double ratio = 1.0;     // grok_epoch(a) / grok_epoch(b)
    std::string relation;   // "=", ">" (lower bound), "<" (upper bound) or "n/a"
};

struct Report {
    std::vector<RunSummary> runs;
    std::vector<PairRatio> ratios;
};

// First epoch starting a run of `patience` evals with test_acc >= threshold.
int grok_epoch(const std::vector<nn::RunRecord>& records, const GrokCriterion& c = {});

RunSummary summarize(const RunTable& t, const GrokCriterion& c = {});
Report compare(const std::vector<RunTable>& tables, const GrokCriterion& c = {});
Report compare_files(const std::vector<std::filesystem::path>& paths, const GrokCriterion& c = {});

void write_report_text(std::ostream& os, const Report& r);
void write_report_csv(std::ostream& os, const Report& r);

std::string format_epoch(int epoch);

}  // namespace egdlab::exp
