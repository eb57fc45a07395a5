#include "egdlab/run_csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "egdlab/recipe.hpp"

namespace egdlab::exp {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double cell_double(const std::string& column, const std::string& s, std::size_t row) {
    try {
        return parse_double(column, s);
    } catch (const std::exception&) {
        throw SchemaError(column, "row " + std::to_string(row) + ": not a number: '" + s + "'");
    }
}

}  // namespace

void write_run_header(std::ostream& os) {
    os << kRunCsvSchema << '\n';
    for (std::size_t i = 0; i < kRunCsvColumns.size(); ++i) os << (i ? "," : "") << kRunCsvColumns[i];
    os << '\n';
}

void write_run_row(std::ostream& os, const std::string& optimizer, std::uint64_t seed, const nn::RunRecord& r) {
    os << r.epoch << ',' << optimizer << ',' << seed << ',' << format_double(r.train_loss) << ','
       << format_double(r.train_acc) << ',' << format_double(r.test_acc) << ',' << format_double(r.s_max) << ','
       << format_double(r.s_min) << ',' << format_double(r.cond) << ',' << r.optimizer_active << ','
       << format_double(r.wall_ms) << '\n';
}

RunTable read_run_csv(std::istream& is, const std::string& source) {
    std::string line;
    if (!std::getline(is, line) || line != kRunCsvSchema) {
        throw SchemaError("", source + ": missing schema line '" + kRunCsvSchema + "'");
    }
    if (!std::getline(is, line)) throw SchemaError("", source + ": missing column header");
    const auto header = split_csv(line);
    for (std::size_t i = 0; i < kRunCsvColumns.size(); ++i) {
        if (i >= header.size()) throw SchemaError(kRunCsvColumns[i], source + ": column missing");
        if (header[i] != kRunCsvColumns[i]) {
            throw SchemaError(header[i], source + ": expected '" + kRunCsvColumns[i] + "' at position " +
                                             std::to_string(i));
        }
    }
    if (header.size() > kRunCsvColumns.size()) {
        throw SchemaError(header[kRunCsvColumns.size()], source + ": unexpected extra column");
    }

    RunTable t;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        ++row;
        const auto c = split_csv(line);
        if (c.size() != kRunCsvColumns.size()) {
            throw SchemaError(c.size() < kRunCsvColumns.size() ? kRunCsvColumns[c.size()] : "",
                              source + ": row " + std::to_string(row) + " has " + std::to_string(c.size()) +
                                  " cells");
        }
        nn::RunRecord r;
        const double epoch = cell_double("epoch", c[0], row);
        if (epoch != static_cast<double>(static_cast<int>(epoch)) || epoch < 0) {
            throw SchemaError("epoch", "row " + std::to_string(row) + ": not a non-negative integer");
        }
        r.epoch = static_cast<int>(epoch);
        const double seed = cell_double("seed", c[2], row);
        if (seed < 0) throw SchemaError("seed", "row " + std::to_string(row) + ": negative");
        r.train_loss = cell_double("train_loss", c[3], row);
        r.train_acc = cell_double("train_acc", c[4], row);
        r.test_acc = cell_double("test_acc", c[5], row);
        for (auto [name, v] : {std::pair{"train_acc", r.train_acc}, std::pair{"test_acc", r.test_acc}}) {
            if (!(v >= 0.0 && v <= 1.0)) throw SchemaError(name, "row " + std::to_string(row) + ": outside [0, 1]");
        }
        r.s_max = cell_double("s_max", c[6], row);
        r.s_min = cell_double("s_min", c[7], row);
        r.cond = cell_double("cond", c[8], row);
        if (c[1].empty()) throw SchemaError("optimizer", "row " + std::to_string(row) + ": empty");
        r.optimizer_active = c[9];
        r.wall_ms = cell_double("wall_ms", c[10], row);
        if (row == 1) {
            t.optimizer = c[1];
            t.seed = static_cast<std::uint64_t>(seed);
        } else if (c[1] != t.optimizer) {
            throw SchemaError("optimizer", "row " + std::to_string(row) + ": mixed optimizers in one file");
        }
        t.records.push_back(r);
    }
    return t;
}

RunTable read_run_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    return read_run_csv(is, path.string());
}

}  // namespace egdlab::exp
