#include "litm/random.hpp"

#include <cmath>
#include <numbers>

namespace litm {

std::int64_t RandomSource::uniform_int(std::int64_t n) {
  if (n <= 0) fail(ErrorCode::invalid_argument, "uniform_int: n must be positive");
  const auto un = static_cast<std::uint64_t>(n);
  // 2^64 mod n draws at the top of the range would bias x % n; reject them.
  const std::uint64_t rem = (UINT64_MAX % un + 1) % un;
  const std::uint64_t limit = UINT64_MAX - rem;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x <= limit) return static_cast<std::int64_t>(x % un);
  }
}

double RandomSource::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 shifted into (0, 1] so the log stays finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace litm
