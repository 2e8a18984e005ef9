#include "nids/artifact.hpp"

#include "nids/dataset.hpp"
#include "nids/errors.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nids {

namespace {

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

const char* activation_tag(Activation a) {
    switch (a) {
        case Activation::SatLin: return "satlin";
        case Activation::Linear: return "linear";
        case Activation::Softmax: return "softmax";
    }
    return "linear";
}

Activation activation_from_tag(const std::string& tag) {
    if (tag == "satlin") return Activation::SatLin;
    if (tag == "linear") return Activation::Linear;
    if (tag == "softmax") return Activation::Softmax;
    throw DataError("artifact: unknown activation tag '" + tag + "'");
}

const char* loss_tag(LossKind k) {
    return k == LossKind::MeanSquaredError ? "mse" : "cross_entropy";
}

LossKind loss_from_tag(const std::string& tag) {
    if (tag == "mse") return LossKind::MeanSquaredError;
    if (tag == "cross_entropy") return LossKind::CrossEntropy;
    throw DataError("artifact: unknown loss tag '" + tag + "'");
}

// Parameter arrays travel as base64 of little-endian float64 bytes.
std::string encode_doubles(const std::vector<double>& values) {
    return base64_encode(reinterpret_cast<const unsigned char*>(values.data()),
                         values.size() * sizeof(double));
}

std::vector<double> decode_doubles(const std::string& text, std::size_t expected,
                                   const std::string& what) {
    const auto bytes = base64_decode(text);
    if (bytes.size() != expected * sizeof(double))
        throw DataError("artifact: " + what + " has " + std::to_string(bytes.size()) +
                        " bytes, expected " + std::to_string(expected * sizeof(double)));
    std::vector<double> values(expected);
    std::memcpy(values.data(), bytes.data(), bytes.size());
    return values;
}

std::vector<double> weights_row_major(const Eigen::MatrixXd& w) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) flat.push_back(w(i, j));
    return flat;
}

nlohmann::json schema_to_json(const OutlierModel& outlier, const FeatureSchema& schema) {
    nlohmann::json j;
    j["outlier"]["c"] = outlier.c;
    j["outlier"]["k"] = outlier.k;
    j["outlier"]["median"] = outlier.median;
    j["outlier"]["mad"] = outlier.mad;
    j["kept_numeric"] = schema.kept_numeric;
    j["zero_ratio_threshold"] = schema.zero_ratio_threshold;
    nlohmann::json lo = nlohmann::json::array();
    nlohmann::json hi = nlohmann::json::array();
    for (const auto& [mn, mx] : schema.scaling) {
        lo.push_back(mn);
        hi.push_back(mx);
    }
    j["scaling_min"] = lo;
    j["scaling_max"] = hi;
    j["vocab"]["protocol"] = schema.vocab.protocol;
    j["vocab"]["service"] = schema.vocab.service;
    j["vocab"]["flag"] = schema.vocab.flag;
    j["input_dim"] = schema.input_dim;
    return j;
}

void schema_from_json(const nlohmann::json& j, OutlierModel& outlier, FeatureSchema& schema) {
    const auto& out = j.at("outlier");
    outlier.c = out.at("c").get<double>();
    outlier.k = out.at("k").get<double>();
    const auto med = out.at("median").get<std::vector<double>>();
    const auto mad = out.at("mad").get<std::vector<double>>();
    if (med.size() != kNumericFeatureCount || mad.size() != kNumericFeatureCount)
        throw DataError("artifact: outlier model must carry " +
                        std::to_string(kNumericFeatureCount) + " (median, mad) pairs");
    std::copy(med.begin(), med.end(), outlier.median.begin());
    std::copy(mad.begin(), mad.end(), outlier.mad.begin());

    schema.kept_numeric = j.at("kept_numeric").get<std::vector<int>>();
    schema.zero_ratio_threshold = j.at("zero_ratio_threshold").get<double>();
    const auto lo = j.at("scaling_min").get<std::vector<double>>();
    const auto hi = j.at("scaling_max").get<std::vector<double>>();
    if (lo.size() != hi.size() || lo.size() != schema.kept_numeric.size())
        throw DataError("artifact: scaling arrays do not match kept feature count");
    schema.scaling.clear();
    for (std::size_t i = 0; i < lo.size(); ++i) schema.scaling.emplace_back(lo[i], hi[i]);
    schema.vocab.protocol = j.at("vocab").at("protocol").get<std::vector<std::string>>();
    schema.vocab.service = j.at("vocab").at("service").get<std::vector<std::string>>();
    schema.vocab.flag = j.at("vocab").at("flag").get<std::vector<std::string>>();
    schema.input_dim = j.at("input_dim").get<int>();
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    cfg.train_path = j.at("train_path").get<std::string>();
    cfg.test_path = j.at("test_path").get<std::string>();
    cfg.k = j.at("k").get<double>();
    cfg.c = j.at("c").get<double>();
    cfg.zero_ratio_threshold = j.at("zero_ratio_threshold").get<double>();
    cfg.code_sizes = j.at("code_sizes").get<std::vector<int>>();
    cfg.pretrain_iters = j.at("pretrain_iters").get<int>();
    cfg.finetune_iters = j.at("finetune_iters").get<int>();
    cfg.head_iters = j.at("head_iters").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.model = j.at("model").get<std::string>();
    cfg.out_dir = j.at("out_dir").get<std::string>();
    return cfg;
}

} // namespace

std::string base64_encode(const unsigned char* data, std::size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        unsigned int chunk = static_cast<unsigned int>(data[i]) << 16;
        if (i + 1 < len) chunk |= static_cast<unsigned int>(data[i + 1]) << 8;
        if (i + 2 < len) chunk |= static_cast<unsigned int>(data[i + 2]);
        out.push_back(kB64Alphabet[(chunk >> 18) & 0x3f]);
        out.push_back(kB64Alphabet[(chunk >> 12) & 0x3f]);
        out.push_back(i + 1 < len ? kB64Alphabet[(chunk >> 6) & 0x3f] : '=');
        out.push_back(i + 2 < len ? kB64Alphabet[chunk & 0x3f] : '=');
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0) throw DataError("base64: length not a multiple of 4");
    static const auto value_of = [] {
        std::array<int, 256> table{};
        table.fill(-1);
        for (int i = 0; i < 64; ++i)
            table[static_cast<unsigned char>(kB64Alphabet[i])] = i;
        return table;
    }();

    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        unsigned int chunk = 0;
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char ch = text[i + static_cast<std::size_t>(k)];
            chunk <<= 6;
            if (ch == '=') {
                if (i + 4 != text.size() || k < 2) throw DataError("base64: misplaced padding");
                ++pad;
            } else {
                const int v = value_of[static_cast<unsigned char>(ch)];
                if (v < 0 || pad > 0) throw DataError("base64: invalid character");
                chunk |= static_cast<unsigned int>(v);
            }
        }
        out.push_back(static_cast<unsigned char>((chunk >> 16) & 0xff));
        if (pad < 2) out.push_back(static_cast<unsigned char>((chunk >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<unsigned char>(chunk & 0xff));
    }
    return out;
}

std::map<std::string, int> default_class_index() {
    std::map<std::string, int> index;
    for (int c = 0; c < kClassCount; ++c)
        index[category_name(static_cast<AttackCategory>(c))] = c;
    return index;
}

std::string schema_hash(const OutlierModel& outlier, const FeatureSchema& schema) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0')
        << fnv1a64(schema_to_json(outlier, schema).dump());
    return out.str();
}

void save_artifact(const std::string& path, const ModelArtifact& artifact) {
    nlohmann::json j;
    j["format_version"] = artifact.format_version;
    j["model"] = artifact.model_tag;
    j["class_index"] = artifact.class_index;
    j["preprocess"] = schema_to_json(artifact.outlier, artifact.schema);
    j["schema_hash"] = schema_hash(artifact.outlier, artifact.schema);

    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : artifact.network.layers) {
        nlohmann::json lj;
        lj["fan_in"] = layer.weights.rows();
        lj["fan_out"] = layer.weights.cols();
        lj["activation"] = activation_tag(layer.activation);
        lj["weights"] = encode_doubles(weights_row_major(layer.weights));
        std::vector<double> bias(layer.bias.data(), layer.bias.data() + layer.bias.size());
        lj["bias"] = encode_doubles(bias);
        layers.push_back(lj);
    }
    j["network"]["loss"] = loss_tag(artifact.network.loss);
    j["network"]["layers"] = layers;

    j["config"] = nlohmann::json::parse(config_json(artifact.config));
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : artifact.stages)
        stages.push_back({{"name", s.name},
                          {"final_loss", s.final_loss},
                          {"iterations", s.iterations}});
    j["training"]["stages"] = stages;
    j["training"]["warnings"] = artifact.warnings;

    std::ofstream out(path);
    if (!out) throw DataError("cannot write artifact to '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw DataError("failed writing artifact to '" + path + "'");
}

ModelArtifact load_artifact(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open artifact '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("artifact '" + path + "' is not valid JSON: " + e.what());
    }

    try {
        ModelArtifact artifact;
        artifact.format_version = j.at("format_version").get<int>();
        if (artifact.format_version != kArtifactFormatVersion)
            throw DataError("artifact format version " +
                            std::to_string(artifact.format_version) +
                            " is not supported (expected " +
                            std::to_string(kArtifactFormatVersion) + ")");
        artifact.model_tag = j.at("model").get<std::string>();
        artifact.class_index = j.at("class_index").get<std::map<std::string, int>>();
        schema_from_json(j.at("preprocess"), artifact.outlier, artifact.schema);

        artifact.network.loss = loss_from_tag(j.at("network").at("loss").get<std::string>());
        for (const auto& lj : j.at("network").at("layers")) {
            const auto fan_in = lj.at("fan_in").get<Eigen::Index>();
            const auto fan_out = lj.at("fan_out").get<Eigen::Index>();
            const auto flat = decode_doubles(
                lj.at("weights").get<std::string>(),
                static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out),
                "layer weights");
            DenseLayer layer;
            layer.activation = activation_from_tag(lj.at("activation").get<std::string>());
            layer.weights.resize(fan_in, fan_out);
            for (Eigen::Index i = 0; i < fan_in; ++i)
                for (Eigen::Index k = 0; k < fan_out; ++k)
                    layer.weights(i, k) = flat[static_cast<std::size_t>(i * fan_out + k)];
            const auto bias =
                decode_doubles(lj.at("bias").get<std::string>(),
                               static_cast<std::size_t>(fan_out), "layer bias");
            layer.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), fan_out);
            artifact.network.layers.push_back(std::move(layer));
        }
        validate(artifact.network);

        artifact.config = config_from_json(j.at("config"));
        for (const auto& sj : j.at("training").at("stages"))
            artifact.stages.push_back(StageRecord{sj.at("name").get<std::string>(),
                                                  sj.at("final_loss").get<double>(),
                                                  sj.at("iterations").get<int>()});
        artifact.warnings =
            j.at("training").at("warnings").get<std::vector<std::string>>();
        return artifact;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("artifact '" + path + "' is malformed: " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError("artifact '" + path + "' is inconsistent: " + e.what());
    }
}

} // namespace nids
