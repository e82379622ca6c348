#pragma once

#include <string>

namespace fekete {

/// Writes content to path + ".tmp" and renames it over path, creating parent
/// directories as needed.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace fekete
