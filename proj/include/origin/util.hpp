#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace origin {

// ISO-8601 UTC. Honors SOURCE_DATE_EPOCH so runs can be made byte-reproducible.
std::string iso_timestamp();
std::string iso_timestamp(int64_t epoch_seconds);

// 64-bit FNV-1a, the seed mixer for scripted generation.
uint64_t fnv1a64(std::string_view data, uint64_t seed = 14695981039346656037ull);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

} // namespace origin
