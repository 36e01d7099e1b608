#include "biobench/fxp.hpp"

namespace biobench::fxp {

void QFormat::validate() const {
  if (total_bits != 16 && total_bits != 32)
    throw DomainError("QFormat: total_bits must be 16 or 32");
  if (frac_bits < 0 || frac_bits >= total_bits)
    throw DomainError("QFormat: frac_bits must lie in [0, total_bits)");
}

std::int64_t saturate_raw(std::int64_t raw, QFormat fmt, bool* saturated) {
  if (raw > fmt.raw_max()) {
    if (saturated) *saturated = true;
    return fmt.raw_max();
  }
  if (raw < fmt.raw_min()) {
    if (saturated) *saturated = true;
    return fmt.raw_min();
  }
  return raw;
}

QValue q_from_real(double x, QFormat fmt, bool* saturated) {
  fmt.validate();
  if (!std::isfinite(x)) throw DomainError("q_from_real: non-finite input");
  const double scaled = x * std::ldexp(1.0, fmt.frac_bits);
  // llround is round-half-away-from-zero; good enough for round-to-nearest.
  std::int64_t raw;
  if (scaled >= static_cast<double>(fmt.raw_max()))
    raw = fmt.raw_max() + 1;  // force saturation path
  else if (scaled <= static_cast<double>(fmt.raw_min()))
    raw = fmt.raw_min() - 1;
  else
    raw = std::llround(scaled);
  raw = saturate_raw(raw, fmt, saturated);
  return QValue{static_cast<std::int32_t>(raw), fmt};
}

double q_to_real(QValue v) { return v.to_real(); }

QValue q_mul(QValue a, QValue b) {
  if (!(a.format == b.format)) throw DomainError("q_mul: format mismatch");
  const std::int64_t wide = static_cast<std::int64_t>(a.raw) * static_cast<std::int64_t>(b.raw);
  const std::int64_t shifted = wide >> a.format.frac_bits;
  const std::int64_t sat = saturate_raw(shifted, a.format);
  return QValue{static_cast<std::int32_t>(sat), a.format};
}

void Accumulator::mac(QValue a, QValue b) {
  if (!(a.format == fmt_) || !(b.format == fmt_))
    throw DomainError("Accumulator: format mismatch");
  mac_raw(a.raw, b.raw);
}

void Accumulator::mac_raw(std::int64_t a_raw, std::int64_t b_raw) {
  std::int64_t prod, sum;
  if (__builtin_mul_overflow(a_raw, b_raw, &prod) ||
      __builtin_add_overflow(acc_, prod, &sum)) {
    saturated_ = true;
    acc_ = (acc_ >= 0) ? INT64_MAX : INT64_MIN;
    return;
  }
  acc_ = sum;
}

QValue Accumulator::finalize() const {
  const std::int64_t shifted = acc_ >> fmt_.frac_bits;
  bool sat = saturated_;
  const std::int64_t raw = saturate_raw(shifted, fmt_, &sat);
  return QValue{static_cast<std::int32_t>(raw), fmt_};
}

}  // namespace biobench::fxp
