#include "origin/util.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "origin/errors.hpp"

namespace origin {

std::string iso_timestamp(int64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
#if defined(_WIN32)
    gmtime_s(&tm, &t);
#else
    gmtime_r(&t, &tm);
#endif
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string iso_timestamp() {
    if (const char* fixed = std::getenv("SOURCE_DATE_EPOCH")) {
        return iso_timestamp(std::strtoll(fixed, nullptr, 10));
    }
    return iso_timestamp(static_cast<int64_t>(std::time(nullptr)));
}

uint64_t fnv1a64(std::string_view data, uint64_t seed) {
    uint64_t hash = seed;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::IoFailure, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) raise(Errc::IoFailure, "read failed: " + path);
    return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::IoFailure, "cannot open for write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) raise(Errc::IoFailure, "write failed: " + path);
}

} // namespace origin
