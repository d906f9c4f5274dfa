#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>

namespace segraph {

using Scalar = double;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using ArrayXX = Eigen::ArrayXXd;
using ArrayXXi = Eigen::ArrayXXi;

inline constexpr Scalar kPi = 3.14159265358979323846;

inline Scalar deg2rad(Scalar deg) { return deg * kPi / 180.0; }
inline Scalar rad2deg(Scalar rad) { return rad * 180.0 / kPi; }

/// Axis-aligned pixel rectangle on a range image, inclusive bounds.
struct BBox {
  int r0 = 0, c0 = 0, r1 = 0, c1 = 0;
  int height() const { return r1 - r0 + 1; }
  int width() const { return c1 - c0 + 1; }
};

/// Deterministic RNG. The engine is std::mt19937_64 but all value scaling is
/// done by hand so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  Scalar uniform() {
    return static_cast<Scalar>(engine_() >> 11) * (1.0 / 9007199254740992.0);
  }

  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), n > 0. Rejection-free modulo is fine here:
  /// n is always tiny compared to 2^64.
  int uniform_int(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

  /// Standard normal via Box-Muller, one spare cached.
  Scalar normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    Scalar u1 = 0;
    while (u1 <= 1e-300) u1 = uniform();
    const Scalar u2 = uniform();
    const Scalar mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * kPi * u2);
  }

  Scalar normal(Scalar mean, Scalar sigma) { return mean + sigma * normal(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  Scalar spare_ = 0;
};

/// splitmix64 step; used to derive independent seeds from (seed, index) pairs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Level parsed once from SEGRAPH_LOG={error,info,debug}; defaults to error.
LogLevel log_level();
void log_line(LogLevel level, const std::string& msg);
inline void log_info(const std::string& msg) { log_line(LogLevel::Info, msg); }
inline void log_debug(const std::string& msg) { log_line(LogLevel::Debug, msg); }
inline void log_error(const std::string& msg) { log_line(LogLevel::Error, msg); }

}  // namespace segraph
