#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qcarpet/io/config.hpp"

namespace qcarpet::io {

struct ManifestEntry {
    std::string product;
    std::filesystem::path path;  ///< relative to the output directory
    std::uintmax_t bytes = 0;
    std::string sha256;
};

struct ProductFailure {
    std::string product;
    std::string message;
};

struct Manifest {
    std::vector<ManifestEntry> files;
    std::vector<ProductFailure> failures;

    bool ok() const noexcept { return failures.empty(); }
};

std::string sha256_hex(std::string_view bytes);

/// Executes every requested product and writes its files under
/// config.outputs.dir, followed by manifest.csv. Product failures are
/// collected, not thrown.
Manifest run(const RunConfig& config, int parallelism);

} // namespace qcarpet::io
