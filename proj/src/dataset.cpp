#include "nids/dataset.hpp"

#include "nids/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nids {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_numeric(const std::string& field, int line_number, int column) {
    const std::string t = trim(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw DataError("line " + std::to_string(line_number) + ": non-numeric value '" +
                        field + "' in numeric column " + std::to_string(column));
    if (!std::isfinite(value))
        throw DataError("line " + std::to_string(line_number) +
                        ": non-finite value in numeric column " + std::to_string(column));
    return value;
}

// Columns 2-4 are categorical; all other feature columns are numeric.
RawRecord record_from_fields(const std::vector<std::string>& fields, int line_number) {
    RawRecord rec;
    int numeric_index = 0;
    for (int col = 0; col < kRawFeatureCount; ++col) {
        const std::string& f = fields[static_cast<std::size_t>(col)];
        switch (col) {
            case 1: rec.protocol = trim(f); break;
            case 2: rec.service = trim(f); break;
            case 3: rec.flag = trim(f); break;
            default:
                rec.numeric[static_cast<std::size_t>(numeric_index++)] =
                    parse_numeric(f, line_number, col + 1);
        }
    }
    return rec;
}

} // namespace

const char* category_name(AttackCategory c) {
    switch (c) {
        case AttackCategory::Normal: return "normal";
        case AttackCategory::DoS: return "dos";
        case AttackCategory::Probe: return "probe";
        case AttackCategory::R2L: return "r2l";
        case AttackCategory::U2R: return "u2r";
        case AttackCategory::Unknown: return "unknown";
    }
    return "unknown";
}

const std::map<std::string, AttackCategory>& attack_taxonomy() {
    static const std::map<std::string, AttackCategory> taxonomy = {
        {"back", AttackCategory::DoS},
        {"land", AttackCategory::DoS},
        {"neptune", AttackCategory::DoS},
        {"pod", AttackCategory::DoS},
        {"smurf", AttackCategory::DoS},
        {"teardrop", AttackCategory::DoS},
        {"ftp_write", AttackCategory::R2L},
        {"guess_passwd", AttackCategory::R2L},
        {"imap", AttackCategory::R2L},
        {"multihop", AttackCategory::R2L},
        {"phf", AttackCategory::R2L},
        {"spy", AttackCategory::R2L},
        {"warezclient", AttackCategory::R2L},
        {"warezmaster", AttackCategory::R2L},
        {"buffer_overflow", AttackCategory::U2R},
        {"loadmodule", AttackCategory::U2R},
        {"perl", AttackCategory::U2R},
        {"rootkit", AttackCategory::U2R},
        {"ipsweep", AttackCategory::Probe},
        {"nmap", AttackCategory::Probe},
        {"portsweep", AttackCategory::Probe},
        {"satan", AttackCategory::Probe},
    };
    return taxonomy;
}

AttackCategory categorize_label(const std::string& label) {
    const std::string key = to_lower(trim(label));
    if (key == "normal") return AttackCategory::Normal;
    auto it = attack_taxonomy().find(key);
    if (it != attack_taxonomy().end()) return it->second;
    return AttackCategory::Unknown;
}

const std::array<std::string, kNumericFeatureCount>& numeric_feature_names() {
    static const std::array<std::string, kNumericFeatureCount> names = {
        "duration", "src_bytes", "dst_bytes", "land", "wrong_fragment", "urgent",
        "hot", "num_failed_logins", "logged_in", "num_compromised", "root_shell",
        "su_attempted", "num_root", "num_file_creations", "num_shells",
        "num_access_files", "num_outbound_cmds", "is_host_login", "is_guest_login",
        "count", "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate",
        "srv_rerror_rate", "same_srv_rate", "diff_srv_rate", "srv_diff_host_rate",
        "dst_host_count", "dst_host_srv_count", "dst_host_same_srv_rate",
        "dst_host_diff_srv_rate", "dst_host_same_src_port_rate",
        "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
        "dst_host_srv_serror_rate", "dst_host_rerror_rate", "dst_host_srv_rerror_rate",
    };
    return names;
}

LabeledDataset parse_split(const std::string& path, Split split) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    LabeledDataset ds;
    ds.split = split;
    std::string line;
    int line_number = 0;
    try {
        while (std::getline(in, line)) {
            ++line_number;
            if (trim(line).empty()) continue;
            const auto fields = split_fields(line);
            if (fields.size() != kRawFeatureCount + 2)
                throw DataError("line " + std::to_string(line_number) + ": expected " +
                                std::to_string(kRawFeatureCount + 2) + " fields, got " +
                                std::to_string(fields.size()));
            RawRecord rec = record_from_fields(fields, line_number);
            rec.attack_label = to_lower(trim(fields[kRawFeatureCount]));
            rec.difficulty = static_cast<int>(
                parse_numeric(fields[kRawFeatureCount + 1], line_number, kRawFeatureCount + 2));
            ds.categories.push_back(categorize_label(rec.attack_label));
            ds.records.push_back(std::move(rec));
        }
    } catch (const DataError& e) {
        throw DataError("'" + path + "' " + e.what());
    }
    if (ds.records.empty()) throw DataError("'" + path + "' contains no records");
    return ds;
}

LabeledDataset filter_novel_test_attacks(const LabeledDataset& ds) {
    if (ds.split != Split::Test)
        throw DataError("novel-attack filtering applies to the Test split only");
    LabeledDataset out;
    out.split = ds.split;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.categories[i] == AttackCategory::Unknown) continue;
        out.records.push_back(ds.records[i]);
        out.categories.push_back(ds.categories[i]);
    }
    return out;
}

LabeledDataset drop_category(const LabeledDataset& ds, AttackCategory cat) {
    LabeledDataset out;
    out.split = ds.split;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.categories[i] == cat) continue;
        out.records.push_back(ds.records[i]);
        out.categories.push_back(ds.categories[i]);
    }
    return out;
}

std::map<AttackCategory, std::size_t> class_histogram(const LabeledDataset& ds) {
    std::map<AttackCategory, std::size_t> hist = {
        {AttackCategory::Normal, 0}, {AttackCategory::DoS, 0},
        {AttackCategory::Probe, 0},  {AttackCategory::R2L, 0},
        {AttackCategory::U2R, 0},    {AttackCategory::Unknown, 0},
    };
    for (auto c : ds.categories) ++hist[c];
    return hist;
}

RawRecord parse_score_line(const std::string& line, int line_number) {
    const auto fields = split_fields(line);
    if (fields.size() < kRawFeatureCount || fields.size() > kRawFeatureCount + 2)
        throw DataError("line " + std::to_string(line_number) + ": expected " +
                        std::to_string(kRawFeatureCount) + "-" +
                        std::to_string(kRawFeatureCount + 2) + " fields, got " +
                        std::to_string(fields.size()));
    RawRecord rec = record_from_fields(fields, line_number);
    if (fields.size() >= kRawFeatureCount + 1)
        rec.attack_label = to_lower(trim(fields[kRawFeatureCount]));
    if (fields.size() == kRawFeatureCount + 2)
        rec.difficulty = static_cast<int>(
            parse_numeric(fields[kRawFeatureCount + 1], line_number, kRawFeatureCount + 2));
    return rec;
}

} // namespace nids
