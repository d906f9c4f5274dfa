#include "segraph/common.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace segraph {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("SEGRAPH_LOG");
    if (env == nullptr) return LogLevel::Error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    return LogLevel::Error;
  }();
  return level;
}

void log_line(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  const char* tag = level == LogLevel::Error ? "error" : (level == LogLevel::Info ? "info" : "debug");
  std::fprintf(stderr, "[segraph %s] %s\n", tag, msg.c_str());
}

}  // namespace segraph
