#pragma once

#include <string>
#include <string_view>

namespace fermi {

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

}  // namespace fermi
