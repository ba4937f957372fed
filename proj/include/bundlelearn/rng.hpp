#pragma once

// Seeded Gaussian noise that gives the same stream on every platform:
// std::mt19937_64 (whose output the standard pins down), the top 53 bits as
// a uniform double in [0, 1), and the Marsaglia polar method for normals. The
// std:: distributions are not used because their algorithms vary by library.

#include <cmath>
#include <cstdint>
#include <random>

namespace bundlelearn {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 engine_;
  double spare_{0.0};
  bool has_spare_{false};
};

}  // namespace bundlelearn
