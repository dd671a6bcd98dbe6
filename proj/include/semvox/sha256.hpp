#ifndef SEMVOX_SHA256_HPP
#define SEMVOX_SHA256_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace semvox {

// Lowercase hex digest.
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& p);

} // namespace semvox

#endif
