#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nids {

inline constexpr int kNumericFeatureCount = 38;
inline constexpr int kRawFeatureCount = 41;
inline constexpr int kClassCount = 4;

enum class Split { Train, Test };

// Categories 0..3 are the classifier's class indices. U2R is dropped from
// the pipeline after outlier removal; Unknown marks test-only attack labels
// outside the taxonomy, removed by filter_novel_test_attacks.
enum class AttackCategory : std::uint8_t {
    Normal = 0,
    DoS = 1,
    Probe = 2,
    R2L = 3,
    U2R = 4,
    Unknown = 5,
};

const char* category_name(AttackCategory c);

// One NSL-KDD connection record. Columns 2-4 (protocol_type, service, flag)
// are categorical; the remaining 38 columns are numeric in file order.
struct RawRecord {
    std::array<double, kNumericFeatureCount> numeric{};
    std::string protocol;
    std::string service;
    std::string flag;
    std::string attack_label;
    int difficulty = 0;
};

struct LabeledDataset {
    std::vector<RawRecord> records;
    std::vector<AttackCategory> categories;
    Split split = Split::Train;

    std::size_t size() const { return records.size(); }
};

/// The 22 attack names of the NSL-KDD taxonomy mapped to their categories.
const std::map<std::string, AttackCategory>& attack_taxonomy();

/// Category for an attack label (trimmed, case-insensitive); Unknown when
/// the label is neither "normal" nor in the taxonomy.
AttackCategory categorize_label(const std::string& label);

/// Canonical names of the 38 numeric columns, used in summaries.
const std::array<std::string, kNumericFeatureCount>& numeric_feature_names();

/// Parses a 43-column comma-separated NSL-KDD file. Throws DataError naming
/// the offending line on wrong field counts or non-numeric numeric fields,
/// and on empty files.
LabeledDataset parse_split(const std::string& path, Split split);

/// Removes records whose attack label is outside the taxonomy. Only valid on
/// the Test split; the Train split contains no novel attacks by construction.
LabeledDataset filter_novel_test_attacks(const LabeledDataset& ds);

LabeledDataset drop_category(const LabeledDataset& ds, AttackCategory cat);

std::map<AttackCategory, std::size_t> class_histogram(const LabeledDataset& ds);

/// Lax line parser for the scoring path: accepts 41 fields (features only),
/// 42 (features + label) or 43 (features + label + difficulty).
RawRecord parse_score_line(const std::string& line, int line_number);

} // namespace nids
