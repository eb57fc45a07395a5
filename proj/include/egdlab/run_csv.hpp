#pragma once

// RunRecord CSV files. Line 1 is a schema comment, line 2 the column header.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "egdlab/train.hpp"

namespace egdlab::exp {

inline constexpr const char* kRunCsvSchema = "# egdlab-run v1";
inline const std::vector<std::string> kRunCsvColumns{"epoch",    "optimizer", "seed",           "train_loss",
                                                     "train_acc", "test_acc", "s_max",          "s_min",
                                                     "cond",      "optimizer_active", "wall_ms"};

class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string& column, const std::string& msg)
        : std::runtime_error(column.empty() ? msg : "column '" + column + "': " + msg), column(column) {}
    std::string column;
};

struct RunTable {
    std::string optimizer;
    std::uint64_t seed = 0;
    std::vector<nn::RunRecord> records;
};

void write_run_header(std::ostream& os);
void write_run_row(std::ostream& os, const std::string& optimizer, std::uint64_t seed, const nn::RunRecord& r);

RunTable read_run_csv(std::istream& is, const std::string& source = "<stream>");
RunTable read_run_csv(const std::filesystem::path& path);

}  // namespace egdlab::exp
