#include "mollify/parallel.hpp"

#include <cstdlib>
#include <string>

namespace mollify {

std::size_t worker_count() {
  const std::size_t hardware = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("MOLLIFY_THREADS");
  if (env == nullptr || *env == '\0') return hardware;
  try {
    const long v = std::stol(env);
    return v > 0 ? static_cast<std::size_t>(v) : hardware;
  } catch (...) {
    return hardware;
  }
}

}  // namespace mollify
