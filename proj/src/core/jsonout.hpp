#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>

namespace degreescope::report {

// Deterministic serialization for every emitted artifact: object keys in
// sorted order (nlohmann's default map backing), floating-point numbers at
// 12 significant digits, UTF-8 passed through. Identical inputs and flags
// therefore produce byte-identical files.
std::string dump_json(const nlohmann::json& value, int indent = 2);

// Write-temp-then-rename so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

void write_json_atomic(const std::filesystem::path& path,
                       const nlohmann::json& value);

} // namespace degreescope::report
