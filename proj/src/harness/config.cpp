#include "normstance/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "normstance/error.hpp"
#include "normstance/util.hpp"

namespace normstance::harness {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

bool valid_key(std::string_view key) {
    return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

class ValueParser {
public:
    ValueParser(std::string_view text, const std::string& origin, std::size_t line)
        : text_(text), origin_(origin), line_(line) {}

    ConfigValue parse() {
        skip_ws();
        ConfigValue out;
        if (peek() == '[') {
            ++pos_;
            std::vector<ConfigScalar> items;
            skip_ws();
            if (peek() == ']') {
                ++pos_;
            } else {
                while (true) {
                    items.push_back(scalar());
                    skip_ws();
                    if (peek() == ',') {
                        ++pos_;
                        skip_ws();
                        if (peek() == ']') {
                            ++pos_;
                            break;
                        }
                        continue;
                    }
                    if (peek() == ']') {
                        ++pos_;
                        break;
                    }
                    fail("expected ',' or ']' in array");
                }
            }
            out = std::move(items);
        } else {
            std::visit([&](auto&& v) { out = v; }, scalar());
        }
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected text after value");
        return out;
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(origin_, line_, what); }

    ConfigScalar scalar() {
        if (peek() == '"') {
            ++pos_;
            std::string s;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                    const char esc = text_[++pos_];
                    switch (esc) {
                        case 'n': s += '\n'; break;
                        case 't': s += '\t'; break;
                        case '"': s += '"'; break;
                        case '\\': s += '\\'; break;
                        default: fail(std::string("unsupported escape \\") + esc);
                    }
                    ++pos_;
                    continue;
                }
                s += text_[pos_++];
            }
            if (peek() != '"') fail("unterminated string");
            ++pos_;
            return s;
        }
        const auto start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != ' ' &&
               text_[pos_] != '\t') {
            ++pos_;
        }
        const auto token = text_.substr(start, pos_ - start);
        if (token == "true") return true;
        if (token == "false") return false;
        if (token.empty()) fail("missing value");
        try {
            return parse_double(token);
        } catch (const ValidationError&) {
            fail("cannot parse value '" + std::string(token) + "'");
        }
    }

    std::string_view text_;
    const std::string& origin_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

[[noreturn]] void bad_type(const std::string& origin, const std::string& key, const ConfigEntry& e,
                           const char* expected) {
    throw ParseError(origin, e.line, "'" + key + "' must be " + expected);
}

std::string as_string(const std::string& origin, const std::string& key, const ConfigEntry& e) {
    if (const auto* s = std::get_if<std::string>(&e.value)) return *s;
    bad_type(origin, key, e, "a string");
}

double as_number(const std::string& origin, const std::string& key, const ConfigEntry& e) {
    if (const auto* d = std::get_if<double>(&e.value)) return *d;
    bad_type(origin, key, e, "a number");
}

long long as_integer(const std::string& origin, const std::string& key, const ConfigEntry& e) {
    const double d = as_number(origin, key, e);
    if (std::floor(d) != d || std::abs(d) > 9.0e15) bad_type(origin, key, e, "an integer");
    return static_cast<long long>(d);
}

std::vector<ConfigScalar> as_array(const std::string& origin, const std::string& key, const ConfigEntry& e) {
    if (const auto* a = std::get_if<std::vector<ConfigScalar>>(&e.value)) return *a;
    bad_type(origin, key, e, "an array");
}

std::vector<double> as_numbers(const std::string& origin, const std::string& key, const ConfigEntry& e) {
    std::vector<double> out;
    for (const auto& item : as_array(origin, key, e)) {
        const auto* d = std::get_if<double>(&item);
        if (!d) bad_type(origin, key, e, "an array of numbers");
        out.push_back(*d);
    }
    return out;
}

std::vector<std::string> as_strings(const std::string& origin, const std::string& key, const ConfigEntry& e) {
    std::vector<std::string> out;
    for (const auto& item : as_array(origin, key, e)) {
        const auto* s = std::get_if<std::string>(&item);
        if (!s) bad_type(origin, key, e, "an array of strings");
        out.push_back(*s);
    }
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

ConfigDocument parse_config_text(std::string_view text, const std::string& origin) {
    ConfigDocument doc;
    doc[""];
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(origin, line_no, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!valid_key(section)) throw ParseError(origin, line_no, "invalid section name '" + section + "'");
            if (doc.contains(section)) throw ParseError(origin, line_no, "duplicate section [" + section + "]");
            doc[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(origin, line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        if (!valid_key(key)) throw ParseError(origin, line_no, "invalid key '" + key + "'");
        auto& table = doc[section];
        if (table.contains(key)) throw ParseError(origin, line_no, "duplicate key '" + key + "'");
        table[key] = ConfigEntry{ValueParser(line.substr(eq + 1), origin, line_no).parse(), line_no};
    }
    return doc;
}

std::vector<ModelSpec> ExperimentConfig::default_models() {
    return {{"linear", pulearn::TrainConfig::linear_defaults()}, {"mlp", pulearn::TrainConfig::mlp_defaults()}};
}

void ExperimentConfig::validate(bool check_paths) const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ValidationError("invalid experiment config: " + what);
    };
    require(!portions.empty(), "portions must not be empty");
    for (double p : portions) require(p >= 0.0 && p <= 1.0, "portion " + format_double(p) + " outside [0, 1]");
    std::set<std::string> portion_dirs;
    for (double p : portions) {
        require(portion_dirs.insert(format_fixed(p, 2)).second, "duplicate portion " + format_fixed(p, 2));
    }
    require(!seeds.empty(), "seeds must not be empty");
    require(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() == seeds.size(), "duplicate seeds");
    require(!models.empty(), "no models configured");
    std::set<std::string> names;
    for (const auto& m : models) {
        require(valid_key(m.name), "invalid model name '" + m.name + "'");
        require(names.insert(m.name).second, "duplicate model '" + m.name + "'");
        m.config.validate();
    }
    require(folds.has_value() || k >= 2, "k must be >= 2");
    require(jobs >= 1, "jobs must be >= 1");
    if (check_paths) {
        require(!corpus.empty() && std::filesystem::exists(corpus), "corpus not found: " + corpus.string());
        require(!embeddings.empty() && std::filesystem::exists(embeddings),
                "embeddings not found: " + embeddings.string());
        if (folds) require(std::filesystem::exists(*folds), "folds file not found: " + folds->string());
    }
}

void apply_model_key(pulearn::TrainConfig& c, const std::string& key, const ConfigEntry& e, const std::string& origin) {
    auto integer = [&] {
        const auto v = as_integer(origin, key, e);
        if (v < 0 || v > 1'000'000'000) throw ParseError(origin, e.line, "'" + key + "' out of range");
        return static_cast<int>(v);
    };
    auto wrap = [&](auto parse) {
        try {
            return parse(as_string(origin, key, e));
        } catch (const ParseError&) {
            throw;
        } catch (const ValidationError& err) {
            throw ParseError(origin, e.line, err.what());
        }
    };
    if (key == "kind") {
        c.model_kind = wrap(pulearn::parse_model_kind);
    } else if (key == "hidden_size") {
        c.hidden_size = integer();
    } else if (key == "hidden_layers") {
        c.hidden_layers = integer();
    } else if (key == "batch_size") {
        c.batch_size = integer();
    } else if (key == "learning_rate") {
        c.learning_rate = as_number(origin, key, e);
    } else if (key == "eta") {
        c.eta = as_number(origin, key, e);
    } else if (key == "decay") {
        c.decay = wrap(pulearn::parse_step_decay);
    } else if (key == "loss") {
        c.loss_kind = wrap(pulearn::parse_loss_kind);
    } else if (key == "learning_mode") {
        c.learning_mode = wrap(pulearn::parse_learning_mode);
    } else if (key == "class_prior") {
        c.class_prior = as_number(origin, key, e);
    } else if (key == "prior_weight_s") {
        c.prior_weight_s = as_number(origin, key, e);
    } else if (key == "fairness") {
        c.fairness_kind = wrap(pulearn::parse_fairness_kind);
    } else if (key == "lambda_reg") {
        c.lambda_reg = as_number(origin, key, e);
    } else if (key == "lambda_fair") {
        c.lambda_fair = as_number(origin, key, e);
    } else if (key == "rounds") {
        c.rounds = integer();
    } else if (key == "n_experiments") {
        c.n_experiments = integer();
    } else {
        throw ParseError(origin, e.line, "unknown model key '" + key + "'");
    }
}

ExperimentConfig experiment_config_from(const ConfigDocument& doc, const std::filesystem::path& base_dir,
                                        const std::string& origin) {
    ExperimentConfig cfg;
    std::vector<std::string> model_names{"linear", "mlp"};

    const auto top = doc.find("");
    if (top != doc.end()) {
        for (const auto& [key, e] : top->second) {
            if (key == "corpus") {
                cfg.corpus = resolve(base_dir, as_string(origin, key, e));
            } else if (key == "embeddings") {
                cfg.embeddings = resolve(base_dir, as_string(origin, key, e));
            } else if (key == "folds") {
                cfg.folds = resolve(base_dir, as_string(origin, key, e));
            } else if (key == "k") {
                cfg.k = static_cast<int>(as_integer(origin, key, e));
            } else if (key == "fold_seed") {
                cfg.fold_seed = static_cast<std::uint64_t>(as_integer(origin, key, e));
            } else if (key == "portions") {
                cfg.portions = as_numbers(origin, key, e);
            } else if (key == "models") {
                model_names = as_strings(origin, key, e);
            } else if (key == "seeds") {
                cfg.seeds.clear();
                for (double s : as_numbers(origin, key, e)) {
                    if (s < 0 || std::floor(s) != s) throw ParseError(origin, e.line, "seeds must be nonnegative integers");
                    cfg.seeds.push_back(static_cast<std::uint64_t>(s));
                }
            } else if (key == "out") {
                cfg.out = resolve(base_dir, as_string(origin, key, e));
            } else if (key == "jobs") {
                cfg.jobs = static_cast<int>(as_integer(origin, key, e));
            } else {
                throw ParseError(origin, e.line, "unknown key '" + key + "'");
            }
        }
    }

    for (const auto& [section, table] : doc) {
        if (section.empty()) continue;
        if (std::find(model_names.begin(), model_names.end(), section) == model_names.end()) {
            throw ValidationError(origin + ": section [" + section + "] does not name a configured model");
        }
    }

    for (const auto& name : model_names) {
        const auto sec = doc.find(name);
        pulearn::ModelKind kind;
        if (sec != doc.end() && sec->second.contains("kind")) {
            const auto& e = sec->second.at("kind");
            try {
                kind = pulearn::parse_model_kind(as_string(origin, "kind", e));
            } catch (const ParseError&) {
                throw;
            } catch (const ValidationError& err) {
                throw ParseError(origin, e.line, err.what());
            }
        } else if (name == "linear" || name == "mlp") {
            kind = pulearn::parse_model_kind(name);
        } else {
            throw ValidationError(origin + ": model '" + name + "' needs a [" + name + "] section with a kind");
        }
        auto config = kind == pulearn::ModelKind::Linear ? pulearn::TrainConfig::linear_defaults()
                                                         : pulearn::TrainConfig::mlp_defaults();
        if (sec != doc.end()) {
            for (const auto& [key, e] : sec->second) apply_model_key(config, key, e, origin);
        }
        cfg.models.push_back({name, config});
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    const auto doc = parse_config_text(read_text_file(path), path.string());
    return experiment_config_from(doc, path.parent_path(), path.string());
}

}  // namespace normstance::harness
