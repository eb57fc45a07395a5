#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "egdlab/tasks.hpp"

using namespace egdlab::tasks;

TEST_CASE("parity labels") {
    CHECK(parity_label(std::vector<int>(5, 0), {0, 2}) == 1.0);
    CHECK(parity_label({1, 0, 1, 1, 0}, {0, 2}) == 1.0);
    CHECK(parity_label({1, 0, 0, 1, 0}, {0, 2}) == -1.0);
}

TEST_CASE("parity generator") {
    ParitySpec s;
    s.n_train = 10000;
    s.n_test = 500;
    s.seed = 7;
    const auto d = gen_parity(s);
    REQUIRE(d.secret.size() == 4);
    CHECK(std::set<std::size_t>(d.secret.begin(), d.secret.end()).size() == 4);
    CHECK(std::is_sorted(d.secret.begin(), d.secret.end()));
    CHECK(d.train.size() == 10000);
    CHECK(d.test.size() == 500);
    CHECK(d.train.dim() == 50);

    double mean = 0;
    bool binary = true, labels = true;
    for (std::size_t i = 0; i < d.train.size(); ++i) {
        int sum = 0;
        for (std::size_t j = 0; j < 50; ++j) {
            const double x = d.train.inputs(i, j);
            binary &= x == 0.0 || x == 1.0;
        }
        for (auto j : d.secret) sum += static_cast<int>(d.train.inputs(i, j));
        labels &= d.train.targets[i] == (sum % 2 ? -1.0 : 1.0);
        mean += d.train.targets[i];
    }
    CHECK(binary);
    CHECK(labels);
    CHECK(std::abs(mean / 10000) < 3 / std::sqrt(10000.0));

    const auto again = gen_parity(s);
    CHECK(again.secret == d.secret);
    CHECK(std::equal(d.test.inputs.data(), d.test.inputs.data() + 500 * 50, again.test.inputs.data()));
    s.seed = 8;
    CHECK_FALSE(std::equal(d.test.inputs.data(), d.test.inputs.data() + 500 * 50, gen_parity(s).test.inputs.data()));

    s.k_subset = 51;
    CHECK_THROWS_AS(gen_parity(s), std::invalid_argument);
}

TEST_CASE("parity bit flips") {
    const std::vector<std::size_t> secret{1, 4, 7};
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        std::vector<int> bits(10);
        for (auto& b : bits) b = static_cast<int>(rng() & 1);
        const double y = parity_label(bits, secret);
        const std::size_t j = rng() % 10;
        auto flipped = bits;
        flipped[j] ^= 1;
        const bool inside = std::find(secret.begin(), secret.end(), j) != secret.end();
        CHECK(parity_label(flipped, secret) == (inside ? -y : y));
    }
}

TEST_CASE("plus-minus encoding keeps labels") {
    ParitySpec s;
    s.n_train = 50;
    s.n_test = 10;
    s.encoding = BitEncoding::plus_minus;
    const auto pm = gen_parity(s);
    s.encoding = BitEncoding::zero_one;
    const auto zo = gen_parity(s);
    CHECK(pm.train.targets == zo.train.targets);
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 50; ++j) CHECK(pm.train.inputs(i, j) == 2 * zo.train.inputs(i, j) - 1);
}

TEST_CASE("modular labels") {
    CHECK(modular_label(3, 5, 7, ModOp::add) == 1);
    CHECK(modular_label(3, 5, 7, ModOp::mul) == 1);
    CHECK(is_prime(97));
    CHECK_FALSE(is_prime(91));
    CHECK_FALSE(is_prime(1));
}

TEST_CASE("modular split") {
    ModularSpec s;
    const auto d = gen_modular(s);
    CHECK(d.train.size() == 4705);
    CHECK(d.test.size() == 4704);
    CHECK(d.train.dim() == 194);
    CHECK(d.train.num_classes == 97);
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen(d.train_pairs.begin(), d.train_pairs.end());
    for (const auto& pr : d.test_pairs) CHECK(seen.insert(pr).second);
    CHECK(seen.size() == 97 * 97);

    bool onehot = true, labels = true;
    for (std::size_t i = 0; i < d.train.size(); ++i) {
        double sum = 0;
        for (std::size_t j = 0; j < 194; ++j) sum += d.train.inputs(i, j);
        const auto [a, b] = d.train_pairs[i];
        onehot &= sum == 2.0 && d.train.inputs(i, a) == 1.0 && d.train.inputs(i, 97 + b) == 1.0;
        labels &= d.train.targets[i] == static_cast<double>((a + b) % 97);
    }
    CHECK(onehot);
    CHECK(labels);
    CHECK(gen_modular(s).train_pairs == d.train_pairs);

    s.p = 91;
    CHECK_THROWS_AS(gen_modular(s), std::invalid_argument);
    s.p = 97;
    s.data_ratio = 0;
    CHECK_THROWS_AS(gen_modular(s), std::invalid_argument);
}

TEST_CASE("dataset CSV and parsing") {
    ModularSpec s;
    s.p = 3;
    s.data_ratio = 0.5;
    const auto d = gen_modular(s);
    std::ostringstream os;
    write_dataset_csv(os, d.train);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x0,x1,x2,x3,x4,x5,target");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 5);

    CHECK(parse_encoding(to_string(BitEncoding::plus_minus)) == BitEncoding::plus_minus);
    CHECK(parse_mod_op(to_string(ModOp::mul)) == ModOp::mul);
    CHECK_THROWS_AS(parse_mod_op("div"), std::invalid_argument);
}
