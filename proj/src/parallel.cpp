#include "greenlinker/parallel.hpp"

#include <cstdlib>
#include <string>

#include "greenlinker/error.hpp"

namespace greenlinker {

int resolve_threads(std::optional<int> requested) {
  if (requested) {
    if (*requested < 1) throw ValidationError("thread count must be >= 1");
    return *requested;
  }
  if (const char* env = std::getenv("GREENLINKER_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string("GREENLINKER_THREADS is not a positive integer: ") + env);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace greenlinker
