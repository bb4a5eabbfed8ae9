#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace adjrk::log {

/// Verbosity is taken from the EXACT_ADJOINT_LOG environment variable:
/// 0 (default) quiet, 1 info, 2 debug.
inline int level() {
  static const int lvl = [] {
    const char* env = std::getenv("EXACT_ADJOINT_LOG");
    if (env == nullptr) return 0;
    return std::atoi(env);
  }();
  return lvl;
}

template <class... Args>
void info(Args&&... args) {
  if (level() < 1) return;
  std::ostringstream os;
  (os << ... << args);
  std::cerr << "[adjrk] " << os.str() << "\n";
}

template <class... Args>
void debug(Args&&... args) {
  if (level() < 2) return;
  std::ostringstream os;
  (os << ... << args);
  std::cerr << "[adjrk:debug] " << os.str() << "\n";
}

}  // namespace adjrk::log
