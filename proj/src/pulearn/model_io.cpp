#include "normstance/pulearn/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "normstance/error.hpp"
#include "normstance/util.hpp"

namespace normstance::pulearn {

using nlohmann::json;

namespace {

constexpr char kMagic[5] = {'E', 'M', 'P', 'M', '1'};

static_assert(std::endian::native == std::endian::little, "model I/O assumes a little-endian host");

json config_json(const TrainConfig& c) {
    return json{
        {"model_kind", std::string(to_string(c.model_kind))},
        {"hidden_size", c.hidden_size},
        {"hidden_layers", c.hidden_layers},
        {"batch_size", c.batch_size},
        {"learning_rate", c.learning_rate},
        {"eta", c.eta},
        {"decay", std::string(to_string(c.decay))},
        {"loss_kind", std::string(to_string(c.loss_kind))},
        {"learning_mode", std::string(to_string(c.learning_mode))},
        {"class_prior", c.class_prior},
        {"prior_weight_s", c.prior_weight_s},
        {"fairness_kind", std::string(to_string(c.fairness_kind))},
        {"lambda_reg", c.lambda_reg},
        {"lambda_fair", c.lambda_fair},
        {"rounds", c.rounds},
        {"n_experiments", c.n_experiments},
        {"seed", c.seed},
    };
}

TrainConfig config_from(const json& j) {
    TrainConfig c;
    c.model_kind = parse_model_kind(j.at("model_kind").get<std::string>());
    c.hidden_size = j.at("hidden_size").get<int>();
    c.hidden_layers = j.at("hidden_layers").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.eta = j.at("eta").get<double>();
    c.decay = parse_step_decay(j.at("decay").get<std::string>());
    c.loss_kind = parse_loss_kind(j.at("loss_kind").get<std::string>());
    c.learning_mode = parse_learning_mode(j.at("learning_mode").get<std::string>());
    c.class_prior = j.at("class_prior").get<double>();
    c.prior_weight_s = j.at("prior_weight_s").get<double>();
    c.fairness_kind = parse_fairness_kind(j.at("fairness_kind").get<std::string>());
    c.lambda_reg = j.at("lambda_reg").get<double>();
    c.lambda_fair = j.at("lambda_fair").get<double>();
    c.rounds = j.at("rounds").get<int>();
    c.n_experiments = j.at("n_experiments").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

}  // namespace

std::string config_to_json(const TrainConfig& config) { return config_json(config).dump(); }

TrainConfig config_from_json(const std::string& json_text) {
    try {
        return config_from(json::parse(json_text));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad training config JSON: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
    const json header{
        {"format_version", kModelFormatVersion},
        {"model_kind", std::string(to_string(model.model.kind()))},
        {"input_dim", model.model.input_dim()},
        {"hidden_size", model.model.hidden_size()},
        {"hidden_layers", model.model.hidden_layers()},
        {"class_prior", model.class_prior},
        {"seed", model.config.seed},
        {"config", config_json(model.config)},
    };
    const std::string text = header.dump();
    const auto& params = model.model.parameters();

    std::string out(kMagic, sizeof(kMagic));
    const auto header_len = static_cast<std::uint32_t>(text.size());
    out.append(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out += text;
    const auto count = static_cast<std::uint64_t>(params.size());
    out.append(reinterpret_cast<const char*>(&count), sizeof(count));
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        const auto v = static_cast<float>(params[i]);
        out.append(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    write_text_file(path, out);
}

TrainedModel load_model(const std::filesystem::path& path) {
    const std::string bytes = read_text_file(path);
    const auto where = path.string();
    std::size_t pos = 0;
    auto take = [&](void* dst, std::size_t n) {
        if (pos + n > bytes.size()) throw ValidationError(where + ": truncated model file");
        std::memcpy(dst, bytes.data() + pos, n);
        pos += n;
    };

    char magic[5];
    take(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw ValidationError(where + ": bad magic, expected EMPM1");
    std::uint32_t header_len = 0;
    take(&header_len, sizeof(header_len));
    if (pos + header_len > bytes.size()) throw ValidationError(where + ": truncated header");
    json header;
    try {
        header = json::parse(bytes.substr(pos, header_len));
    } catch (const json::exception& e) {
        throw ValidationError(where + ": bad header JSON: " + e.what());
    }
    pos += header_len;

    if (header.value("format_version", 0) != kModelFormatVersion) {
        throw ValidationError(where + ": unsupported model format version");
    }
    TrainConfig config;
    ScoreModel shape = ScoreModel::linear(1);
    double prior = 0.0;
    try {
        config = config_from(header.at("config"));
        shape = ScoreModel::with_shape(parse_model_kind(header.at("model_kind").get<std::string>()),
                                       header.at("input_dim").get<std::size_t>(),
                                       header.at("hidden_size").get<std::size_t>(),
                                       header.at("hidden_layers").get<std::size_t>());
        prior = header.at("class_prior").get<double>();
    } catch (const json::exception& e) {
        throw ValidationError(where + ": bad header: " + e.what());
    }

    std::uint64_t count = 0;
    take(&count, sizeof(count));
    if (count != shape.parameter_count()) {
        throw ValidationError(where + ": parameter count " + std::to_string(count) + " does not match shape (" +
                              std::to_string(shape.parameter_count()) + ")");
    }
    for (std::uint64_t i = 0; i < count; ++i) {
        float v = 0.0f;
        take(&v, sizeof(v));
        shape.parameters()[static_cast<Eigen::Index>(i)] = v;
    }
    if (pos != bytes.size()) throw ValidationError(where + ": trailing bytes after parameters");
    return TrainedModel{std::move(shape), config, prior, {}};
}

}  // namespace normstance::pulearn
