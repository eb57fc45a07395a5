#include "egdlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "egdlab/recipe.hpp"

namespace egdlab::exp {

int grok_epoch(const std::vector<nn::RunRecord>& records, const GrokCriterion& c) {
    int streak = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        streak = records[i].test_acc >= c.threshold ? streak + 1 : 0;
        if (streak >= c.patience) return records[i + 1 - static_cast<std::size_t>(streak)].epoch;
    }
    return kNeverGrokked;
}

RunSummary summarize(const RunTable& t, const GrokCriterion& c) {
    RunSummary s;
    s.optimizer = t.optimizer;
    s.seed = t.seed;
    s.label = t.optimizer + "/" + std::to_string(t.seed);
    s.grok_epoch = grok_epoch(t.records, c);
    if (!t.records.empty()) {
        s.last_epoch = t.records.back().epoch;
        s.final_test_acc = t.records.back().test_acc;
    }
    for (const auto& r : t.records) {
        if (r.epoch == 0) continue;  // the epoch-0 row is a probe, not an applied update
        s.max_cond = std::max(s.max_cond, r.cond);
    }
    return s;
}

Report compare(const std::vector<RunTable>& tables, const GrokCriterion& c) {
    if (tables.size() < 2) throw std::invalid_argument("report: need at least two runs to compare");
    Report rep;
    for (const auto& t : tables) rep.runs.push_back(summarize(t, c));
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.runs.size(); ++j) {
            const auto& a = rep.runs[i];
            const auto& b = rep.runs[j];
            PairRatio p{a.label, b.label, 1.0, "="};
            const bool ga = a.grok_epoch != kNeverGrokked;
            const bool gb = b.grok_epoch != kNeverGrokked;
            // Epoch 0 is clamped to 1 so that ratios stay finite.
            const double ea = std::max(1, a.grok_epoch);
            const double eb = std::max(1, b.grok_epoch);
            if (ga && gb) {
                p.ratio = ea / eb;
            } else if (!ga && gb) {
                p.ratio = std::max(1, a.last_epoch) / eb;
                p.relation = ">";
            } else if (ga && !gb) {
                p.ratio = ea / std::max(1, b.last_epoch);
                p.relation = "<";
            } else {
                p.ratio = std::nan("");
                p.relation = "n/a";
            }
            rep.ratios.push_back(p);
        }
    }
    return rep;
}

Report compare_files(const std::vector<std::filesystem::path>& paths, const GrokCriterion& c) {
    std::vector<RunTable> tables;
    for (const auto& p : paths) tables.push_back(read_run_csv(p));
    return compare(tables, c);
}

std::string format_epoch(int epoch) { return epoch == kNeverGrokked ? "inf" : std::to_string(epoch); }

void write_report_text(std::ostream& os, const Report& r) {
    os << std::left << std::setw(24) << "run" << std::setw(12) << "grok_epoch" << std::setw(16) << "final_test_acc"
       << "max_cond\n";
    for (const auto& s : r.runs) {
        os << std::setw(24) << s.label << std::setw(12) << format_epoch(s.grok_epoch) << std::setw(16)
           << format_double(s.final_test_acc) << format_double(s.max_cond) << '\n';
    }
    os << '\n';
    for (const auto& p : r.ratios) {
        os << p.a << " / " << p.b << ": ";
        if (p.relation == "n/a") {
            os << "n/a (neither grokked)\n";
        } else {
            os << (p.relation == "=" ? "" : p.relation) << format_double(p.ratio) << '\n';
        }
    }
}

void write_report_csv(std::ostream& os, const Report& r) {
    os << "run,optimizer,seed,grok_epoch,final_test_acc,max_cond\n";
    for (const auto& s : r.runs) {
        os << s.label << ',' << s.optimizer << ',' << s.seed << ',' << format_epoch(s.grok_epoch) << ','
           << format_double(s.final_test_acc) << ',' << format_double(s.max_cond) << '\n';
    }
    os << "\npair_a,pair_b,relation,ratio\n";
    for (const auto& p : r.ratios) {
        os << p.a << ',' << p.b << ',' << p.relation << ',' << format_double(p.ratio) << '\n';
    }
}

}  // namespace egdlab::exp
