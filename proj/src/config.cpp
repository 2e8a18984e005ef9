#include "nids/config.hpp"

#include "nids/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nids {

void validate(const PipelineConfig& cfg) {
    if (cfg.pretrain_iters < 0 || cfg.finetune_iters < 0 || cfg.head_iters < 0)
        throw DataError("config: iteration counts must be >= 0");
    if (!(cfg.zero_ratio_threshold > 0.0 && cfg.zero_ratio_threshold < 1.0))
        throw DataError("config: zero_ratio_threshold must lie in (0,1)");
    if (!(cfg.k > 0.0)) throw DataError("config: k must be positive");
    if (!(cfg.c > 0.0)) throw DataError("config: c must be positive");
    if (cfg.code_sizes.empty()) throw DataError("config: code_sizes must be nonempty");
    for (int s : cfg.code_sizes)
        if (s <= 0) throw DataError("config: code sizes must be positive");
    if (cfg.model != "ae" && cfg.model != "mlp")
        throw DataError("config: model must be 'ae' or 'mlp'");
}

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<int> parse_code_sizes(const std::string& text) {
    std::vector<int> sizes;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        token = trim(token);
        if (token.empty()) continue;
        int value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size())
            throw DataError("config: invalid code size '" + token + "'");
        sizes.push_back(value);
    }
    if (sizes.empty()) throw DataError("config: empty code size list");
    return sizes;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DataError("config: invalid value '" + text + "' for key '" + key + "'");
    return value;
}

} // namespace

PipelineConfig load_config_file(const std::string& path, const PipelineConfig& base) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file '" + path + "'");

    PipelineConfig cfg = base;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("config line " + std::to_string(line_number) +
                            ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "train_path") cfg.train_path = value;
        else if (key == "test_path") cfg.test_path = value;
        else if (key == "k") cfg.k = parse_number<double>(key, value);
        else if (key == "c") cfg.c = parse_number<double>(key, value);
        else if (key == "zero_ratio_threshold")
            cfg.zero_ratio_threshold = parse_number<double>(key, value);
        else if (key == "code_sizes") cfg.code_sizes = parse_code_sizes(value);
        else if (key == "pretrain_iters") cfg.pretrain_iters = parse_number<int>(key, value);
        else if (key == "finetune_iters") cfg.finetune_iters = parse_number<int>(key, value);
        else if (key == "head_iters") cfg.head_iters = parse_number<int>(key, value);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "model") cfg.model = value;
        else if (key == "out_dir") cfg.out_dir = value;
        else
            throw DataError("config line " + std::to_string(line_number) +
                            ": unknown key '" + key + "'");
    }
    return cfg;
}

std::string config_json(const PipelineConfig& cfg) {
    nlohmann::json j;
    j["train_path"] = cfg.train_path;
    j["test_path"] = cfg.test_path;
    j["k"] = cfg.k;
    j["c"] = cfg.c;
    j["zero_ratio_threshold"] = cfg.zero_ratio_threshold;
    j["code_sizes"] = cfg.code_sizes;
    j["pretrain_iters"] = cfg.pretrain_iters;
    j["finetune_iters"] = cfg.finetune_iters;
    j["head_iters"] = cfg.head_iters;
    j["seed"] = cfg.seed;
    j["model"] = cfg.model;
    j["out_dir"] = cfg.out_dir;
    return j.dump();
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string config_hash(const PipelineConfig& cfg) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(config_json(cfg));
    return out.str();
}

} // namespace nids
