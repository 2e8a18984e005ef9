#pragma once

#include "nids/config.hpp"
#include "nids/neuralnet.hpp"

#include <map>
#include <string>
#include <vector>

namespace nids {

inline constexpr int kArtifactFormatVersion = 1;

struct StageRecord {
    std::string name; // "pretrain_tier_1", "head", "fine_tune", "mlp"
    double final_loss = 0.0;
    int iterations = 0;
};

// Self-describing model bundle: everything needed for standalone inference
// plus the training provenance. Serialized as a single JSON document with
// base64-encoded little-endian parameter arrays (layers in forward order;
// each layer's weights row-major by input index, then its bias).
struct ModelArtifact {
    int format_version = kArtifactFormatVersion;
    std::string model_tag;
    OutlierModel outlier;
    FeatureSchema schema;
    Network network;
    std::map<std::string, int> class_index;
    PipelineConfig config;
    std::vector<StageRecord> stages;
    std::vector<std::string> warnings;
};

std::map<std::string, int> default_class_index();

/// Hash over the serialized preprocessing state; encoded-dataset caches carry
/// the same value and eval refuses mismatched pairs.
std::string schema_hash(const OutlierModel& outlier, const FeatureSchema& schema);

void save_artifact(const std::string& path, const ModelArtifact& artifact);

/// Throws DataError naming the problem on unreadable files, unrecognized
/// format versions, or parameter arrays whose length contradicts the
/// declared dimensions.
ModelArtifact load_artifact(const std::string& path);

std::string base64_encode(const unsigned char* data, std::size_t len);
std::vector<unsigned char> base64_decode(const std::string& text);

} // namespace nids
