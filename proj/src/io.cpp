#include "fekete/io.hpp"

#include <filesystem>
#include <fstream>

#include "fekete/errors.hpp"

namespace fekete {

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = fs::path(path + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw Error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace fekete
