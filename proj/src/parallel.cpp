#include "bmc/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace bmc {

unsigned
default_thread_count()
{
  if (const char* env = std::getenv("BMC_KERNEL_THREADS")) {
    unsigned value = 0;
    auto [end, ec] = std::from_chars(env, env + std::strlen(env), value);
    if (ec == std::errc() && value > 0)
      return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

unsigned
resolve_threads(int requested)
{
  return requested > 0 ? static_cast<unsigned>(requested) : default_thread_count();
}

} // namespace bmc
