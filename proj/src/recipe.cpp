#include "egdlab/recipe.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <functional>
#include <sstream>

namespace egdlab::exp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class Int>
Int parse_int(const std::string& field, const std::string& s) {
    Int v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw RecipeError(field, "expected an integer, got '" + s + "'");
    return v;
}

bool parse_bool(const std::string& field, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw RecipeError(field, "expected true or false, got '" + s + "'");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

template <class T, class F>
std::string join(const std::vector<T>& v, F&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out;
}

template <class F>
auto wrap(const std::string& field, F&& f) {
    try {
        return f();
    } catch (const RecipeError&) {
        throw;
    } catch (const std::exception& e) {
        throw RecipeError(field, e.what());
    }
}

struct Field {
    std::string key;
    std::function<std::string(const Recipe&)> get;
    std::function<void(Recipe&, const std::string&)> set;
};

#define EGD_DOUBLE(name, member) \
    Field{name, [](const Recipe& r) { return format_double(r.member); }, \
          [](Recipe& r, const std::string& v) { r.member = parse_double(name, v); }}
#define EGD_INT(name, member, type) \
    Field{name, [](const Recipe& r) { return std::to_string(r.member); }, \
          [](Recipe& r, const std::string& v) { r.member = parse_int<type>(name, v); }}
#define EGD_BOOL(name, member) \
    Field{name, [](const Recipe& r) { return bool_text(r.member); }, \
          [](Recipe& r, const std::string& v) { r.member = parse_bool(name, v); }}

const std::vector<Field>& fields() {
    static const std::vector<Field> table{
        Field{"name", [](const Recipe& r) { return r.name; }, [](Recipe& r, const std::string& v) { r.name = v; }},
        Field{"kind", [](const Recipe& r) { return to_string(r.kind); },
              [](Recipe& r, const std::string& v) { r.kind = wrap("kind", [&] { return parse_recipe_kind(v); }); }},
        Field{"optimizers",
              [](const Recipe& r) { return join(r.optimizers, [](nn::OptimizerKind k) { return nn::to_string(k); }); },
              [](Recipe& r, const std::string& v) {
                  r.optimizers.clear();
                  for (const auto& s : split_list(v)) {
                      r.optimizers.push_back(wrap("optimizers", [&] { return nn::parse_optimizer_kind(s); }));
                  }
              }},
        Field{"seeds", [](const Recipe& r) { return join(r.seeds, [](std::uint64_t s) { return std::to_string(s); }); },
              [](Recipe& r, const std::string& v) {
                  r.seeds.clear();
                  for (const auto& s : split_list(v)) r.seeds.push_back(parse_int<std::uint64_t>("seeds", s));
              }},
        EGD_INT("epochs", epochs, int),
        EGD_INT("eval_every", eval_every, int),
        Field{"output_dir", [](const Recipe& r) { return r.output_dir; },
              [](Recipe& r, const std::string& v) { r.output_dir = v; }},
        EGD_BOOL("plot", plot),
        EGD_INT("threads", threads, int),

        EGD_DOUBLE("epsilon", toy.epsilon),
        EGD_DOUBLE("s", toy.s),
        EGD_DOUBLE("theta", toy.theta),
        EGD_DOUBLE("eta", toy.eta),
        EGD_DOUBLE("u1", toy.u1),
        EGD_DOUBLE("u2", toy.u2),
        EGD_DOUBLE("zeta", toy.zeta),
        EGD_INT("k_max", k_max, std::int64_t),
        EGD_INT("toy_n_train", toy_n_train, std::size_t),
        EGD_INT("toy_n_test", toy_n_test, std::size_t),

        EGD_INT("n_bits", parity.n_bits, std::size_t),
        EGD_INT("k_subset", parity.k_subset, std::size_t),
        EGD_INT("n_train", parity.n_train, std::size_t),
        EGD_INT("n_test", parity.n_test, std::size_t),
        Field{"encoding", [](const Recipe& r) { return tasks::to_string(r.parity.encoding); },
              [](Recipe& r, const std::string& v) {
                  r.parity.encoding = wrap("encoding", [&] { return tasks::parse_encoding(v); });
              }},
        EGD_INT("p", modular.p, std::uint64_t),
        Field{"op", [](const Recipe& r) { return tasks::to_string(r.modular.op); },
              [](Recipe& r, const std::string& v) { r.modular.op = wrap("op", [&] { return tasks::parse_mod_op(v); }); }},
        EGD_DOUBLE("data_ratio", modular.data_ratio),
        EGD_BOOL("dump_dataset", dump_dataset),

        EGD_INT("width", train.width, std::size_t),
        EGD_BOOL("bias", train.bias),
        EGD_DOUBLE("init_scale", train.init_scale),
        Field{"loss", [](const Recipe& r) { return nn::to_string(r.train.loss_kind); },
              [](Recipe& r, const std::string& v) {
                  r.train.loss_kind = wrap("loss", [&] { return nn::parse_loss_kind(v); });
              }},
        EGD_BOOL("record_wall_time", train.record_wall_time),
        EGD_BOOL("log_spectrum", train.log_spectrum),
        EGD_INT("early_stop_patience", train.early_stop_patience, int),
        EGD_DOUBLE("stop_acc", train.stop_acc),

        EGD_DOUBLE("lr", opt.lr),
        EGD_DOUBLE("weight_decay", opt.weight_decay),
        EGD_INT("batch_size", opt.batch_size, std::size_t),
        Field{"transform_layers",
              [](const Recipe& r) {
                  return join(std::vector<nn::Layer>(r.opt.transform_layers.begin(), r.opt.transform_layers.end()),
                              [](nn::Layer l) { return nn::to_string(l); });
              },
              [](Recipe& r, const std::string& v) {
                  r.opt.transform_layers.clear();
                  for (const auto& s : split_list(v)) {
                      r.opt.transform_layers.insert(wrap("transform_layers", [&] { return nn::parse_layer(s); }));
                  }
              }},
        EGD_BOOL("coupled_wd", opt.coupled_wd),
        EGD_DOUBLE("svd_rel_tol", opt.svd_rel_tol),
        EGD_BOOL("grok_switch", opt.grok_switch.enabled),
        EGD_DOUBLE("switch_threshold", opt.grok_switch.acc_threshold),
        EGD_INT("switch_patience", opt.grok_switch.patience, int),
        EGD_DOUBLE("ema_alpha", opt.ema.alpha),
        EGD_DOUBLE("ema_lamb", opt.ema.lamb),

        EGD_INT("spec_rows", spec_rows, std::size_t),
        EGD_INT("spec_cols", spec_cols, std::size_t),
        EGD_INT("spec_rank", spec_rank, std::size_t),
        EGD_INT("spec_count", spec_count, std::size_t),
    };
    return table;
}

#undef EGD_DOUBLE
#undef EGD_INT
#undef EGD_BOOL

}  // namespace

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

double parse_double(const std::string& field, const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw RecipeError(field, "expected a number, got '" + s + "'");
    return v;
}

RecipeKind parse_recipe_kind(const std::string& s) {
    if (s == "toy_theory" || s == "toy-theory") return RecipeKind::toy_theory;
    if (s == "toy_sim" || s == "toy-sim") return RecipeKind::toy_sim;
    if (s == "parity") return RecipeKind::parity;
    if (s == "modular") return RecipeKind::modular;
    if (s == "spectrum") return RecipeKind::spectrum;
    throw std::invalid_argument("unknown recipe kind '" + s + "'");
}

std::string to_string(RecipeKind k) {
    switch (k) {
        case RecipeKind::toy_theory:
            return "toy_theory";
        case RecipeKind::toy_sim:
            return "toy_sim";
        case RecipeKind::parity:
            return "parity";
        case RecipeKind::modular:
            return "modular";
        case RecipeKind::spectrum:
            return "spectrum";
    }
    return "?";
}

double Recipe::lr_for(nn::OptimizerKind k) const {
    const auto it = lr_override.find(k);
    return it == lr_override.end() ? opt.lr : it->second;
}

void Recipe::validate() const {
    if (name.empty()) throw RecipeError("name", "must not be empty");
    if (seeds.empty()) throw RecipeError("seeds", "seed list is empty");
    if (output_dir.empty()) throw RecipeError("output_dir", "must not be empty");
    if (threads < 1) throw RecipeError("threads", "must be >= 1");
    auto check = [](const std::string& field, auto&& f) {
        try {
            f();
        } catch (const RecipeError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw RecipeError(field, e.what());
        }
    };
    switch (kind) {
        case RecipeKind::toy_theory:
        case RecipeKind::toy_sim:
            check("toy", [&] { toy.validate(); });
            if (k_max < 0) throw RecipeError("k_max", "must be >= 0");
            if (kind == RecipeKind::toy_sim && (toy_n_train == 0 || toy_n_test == 0)) {
                throw RecipeError("toy_n_train", "sample sizes must be >= 1");
            }
            break;
        case RecipeKind::parity:
        case RecipeKind::modular: {
            if (optimizers.empty()) throw RecipeError("optimizers", "optimizer list is empty");
            if (kind == RecipeKind::parity) {
                if (parity.n_bits == 0 || parity.k_subset == 0 || parity.k_subset > parity.n_bits) {
                    throw RecipeError("k_subset", "need 1 <= k_subset <= n_bits");
                }
                if (parity.n_train == 0 || parity.n_test == 0) throw RecipeError("n_train", "splits must be non-empty");
                if (train.loss_kind != nn::LossKind::hinge) throw RecipeError("loss", "parity uses hinge loss");
            } else {
                if (!tasks::is_prime(modular.p)) throw RecipeError("p", std::to_string(modular.p) + " is not prime");
                if (!(modular.data_ratio > 0.0 && modular.data_ratio < 1.0)) {
                    throw RecipeError("data_ratio", "must lie in (0, 1) so the test split is non-empty");
                }
                if (train.loss_kind != nn::LossKind::cross_entropy) {
                    throw RecipeError("loss", "modular uses cross_entropy loss");
                }
            }
            check("train", [&] { train.validate(); });
            for (auto k : optimizers) {
                nn::OptimizerConfig o = opt;
                o.kind = k;
                o.lr = lr_for(k);
                check(lr_override.contains(k) ? "lr." + nn::to_string(k) : std::string("lr"), [&] { o.validate(); });
            }
            break;
        }
        case RecipeKind::spectrum:
            if (spec_rows == 0 || spec_cols == 0) throw RecipeError("spec_rows", "shape must be non-empty");
            if (spec_rank > std::min(spec_rows, spec_cols)) throw RecipeError("spec_rank", "exceeds min(rows, cols)");
            if (spec_count == 0) throw RecipeError("spec_count", "must be >= 1");
            break;
    }
}

void set_field(Recipe& r, const std::string& key, const std::string& value) {
    if (key.rfind("lr.", 0) == 0) {
        const auto kind = wrap(key, [&] { return nn::parse_optimizer_kind(key.substr(3)); });
        r.lr_override[kind] = parse_double(key, value);
        return;
    }
    for (const auto& f : fields()) {
        if (f.key == key) {
            f.set(r, value);
            return;
        }
    }
    throw RecipeError(key, "unknown recipe key");
}

Recipe parse_recipe(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::istringstream is(text);
    std::string line;
    bool header = false;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        if (!header) {
            if (body != kRecipeHeader) {
                throw RecipeError("", "line " + std::to_string(lineno) + ": expected header '" + kRecipeHeader + "'");
            }
            header = true;
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw RecipeError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        entries.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    if (!header) throw RecipeError("", std::string("missing header '") + kRecipeHeader + "'");
    // Kind first, so the remaining keys overlay that kind's defaults.
    Recipe r;
    for (const auto& [k, v] : entries) {
        if (k == "kind") r = default_recipe(wrap("kind", [&] { return parse_recipe_kind(v); }));
    }
    for (const auto& [k, v] : entries) set_field(r, k, v);
    return r;
}

Recipe load_recipe(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw RecipeError("", "cannot read recipe " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_recipe(ss.str());
}

std::string to_text(const Recipe& r) {
    std::string out = std::string(kRecipeHeader) + "\n";
    for (const auto& f : fields()) out += f.key + " = " + f.get(r) + "\n";
    for (const auto& [k, v] : r.lr_override) out += "lr." + nn::to_string(k) + " = " + format_double(v) + "\n";
    return out;
}

Recipe default_recipe(RecipeKind kind) {
    Recipe r;
    r.kind = kind;
    r.name = to_string(kind);
    switch (kind) {
        case RecipeKind::toy_theory:
        case RecipeKind::toy_sim:
            r.optimizers = {nn::OptimizerKind::vanilla, nn::OptimizerKind::egd};
            break;
        case RecipeKind::parity:
            r.train.width = 100;
            r.train.loss_kind = nn::LossKind::hinge;
            r.opt.lr = 0.023;
            r.opt.weight_decay = 1e-2;
            r.opt.batch_size = 32;
            r.epochs = 300;
            r.optimizers = {nn::OptimizerKind::vanilla, nn::OptimizerKind::egd, nn::OptimizerKind::colnorm};
            break;
        case RecipeKind::modular:
            r.train.width = 512;
            r.train.loss_kind = nn::LossKind::cross_entropy;
            r.opt.lr = 0.7;
            r.opt.weight_decay = 1e-4;
            r.opt.batch_size = 512;
            r.epochs = 300;
            r.optimizers = {nn::OptimizerKind::vanilla, nn::OptimizerKind::egd, nn::OptimizerKind::colnorm};
            break;
        case RecipeKind::spectrum:
            break;
    }
    return r;
}

}  // namespace egdlab::exp
