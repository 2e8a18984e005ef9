#pragma once

#include "nids/features.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nids {

// Full pipeline configuration. Defaults reproduce the reference experiment:
// MAD outlier cut at k=10, 80% zero-ratio threshold, AE[50] with 100/100/300
// pretrain/head/fine-tune SCG iterations.
struct PipelineConfig {
    std::string train_path;
    std::string test_path;
    double k = kDefaultOutlierK;
    double c = kMadScale;
    double zero_ratio_threshold = kDefaultZeroRatioThreshold;
    std::vector<int> code_sizes{50};
    int pretrain_iters = 100;
    int finetune_iters = 300;
    int head_iters = 100;
    std::uint64_t seed = 1;
    std::string model = "ae"; // "ae" or "mlp"
    std::string out_dir = ".";
};

/// Throws DataError when iteration counts are negative, the threshold is
/// outside (0,1), k <= 0, code sizes are non-positive or the model tag is
/// unknown.
void validate(const PipelineConfig& cfg);

/// Reads a flat key=value file ('#' comments, blank lines allowed) over
/// `base`; command-line flags are applied afterwards and win.
PipelineConfig load_config_file(const std::string& path, const PipelineConfig& base);

/// Canonical JSON snapshot used for hashing and for the artifact.
std::string config_json(const PipelineConfig& cfg);

std::uint64_t fnv1a64(std::string_view text);

/// 16-hex-digit FNV-1a hash of the config snapshot.
std::string config_hash(const PipelineConfig& cfg);

} // namespace nids
