#pragma once

#include <cmath>
#include <cstdint>

#include "biobench/errors.hpp"

namespace biobench::fxp {

// Signed fixed-point format: total_bits in {16, 32}, frac_bits fractional
// bits. Real value of a raw integer r is r / 2^frac_bits.
struct QFormat {
  int total_bits;
  int frac_bits;

  constexpr QFormat(int total, int frac) : total_bits(total), frac_bits(frac) {}

  void validate() const;

  constexpr std::int64_t raw_max() const {
    return (std::int64_t{1} << (total_bits - 1)) - 1;
  }
  constexpr std::int64_t raw_min() const {
    return -(std::int64_t{1} << (total_bits - 1));
  }
  double lsb() const { return std::ldexp(1.0, -frac_bits); }
  bool representable_one() const { return frac_bits <= total_bits - 2; }

  constexpr bool operator==(const QFormat&) const = default;
};

inline constexpr QFormat kQ15{16, 15};     // 16-bit data paths
inline constexpr QFormat kQ16_16{32, 16};  // 32-bit data paths

struct QValue {
  std::int32_t raw = 0;
  QFormat format = kQ15;

  double to_real() const { return static_cast<double>(raw) * format.lsb(); }
};

// Round-to-nearest conversion; out-of-range input saturates and sets the
// optional flag.
QValue q_from_real(double x, QFormat fmt, bool* saturated = nullptr);
double q_to_real(QValue v);

// Double-width product, arithmetic shift by frac_bits (truncation), then
// saturation to the format's signed range. Formats must match.
QValue q_mul(QValue a, QValue b);

// Multiply-accumulate register: raw products sum into a 64-bit accumulator
// with no intermediate shift; finalize applies the single shift with
// saturation. Overflow past 64 bits clamps and raises the saturation flag.
class Accumulator {
 public:
  explicit Accumulator(QFormat fmt) : fmt_(fmt) { fmt_.validate(); }

  void mac(QValue a, QValue b);
  void mac_raw(std::int64_t a_raw, std::int64_t b_raw);

  QValue finalize() const;
  std::int64_t raw() const { return acc_; }
  bool saturated() const { return saturated_; }
  const QFormat& format() const { return fmt_; }

 private:
  QFormat fmt_;
  std::int64_t acc_ = 0;
  bool saturated_ = false;
};

// Clamp a double-width raw value into the format's signed range.
std::int64_t saturate_raw(std::int64_t raw, QFormat fmt, bool* saturated = nullptr);

}  // namespace biobench::fxp
