// Small shared I/O utilities: JSON files, CSV emission, content hashing.
#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace risac {

using nlohmann::json;

json json_from_file(const std::string& path);
void json_to_file(const std::string& path, const json& j, int indent = 2);

std::uint64_t fnv1a64(const std::string& s);

// Shortest decimal form that round-trips a double; keeps CSV output
// byte-stable across runs.
std::string format_double(double v);

void ensure_directory(const std::string& path);
bool file_exists(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace risac
