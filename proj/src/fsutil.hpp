#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "litm/common.hpp"

namespace litm::detail {

// Write through a temp file in the same directory, then rename into place.
inline void atomic_write(const std::string& path,
                         const std::function<void(std::ostream&)>& body) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorCode::io, "cannot open for writing: " + tmp.string());
    body(os);
    os.flush();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(ErrorCode::io, "write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::io, "rename failed: " + path);
  }
}

}  // namespace litm::detail
