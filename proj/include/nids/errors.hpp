#pragma once

#include <stdexcept>
#include <string>

namespace nids {

/// Malformed input files, unreadable paths, schema or version mismatches.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Optimization failures; carries the SCG iteration that produced them.
class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, int iteration)
        : std::runtime_error(what), iteration(iteration) {}

    int iteration = -1;
};

} // namespace nids
