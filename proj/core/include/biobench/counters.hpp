#pragma once

#include <cstdint>
#include <string>

namespace biobench {

// Operation counters behind the main-operations metric. Kernels account in
// bulk (one add per loop nest, not per instruction), so totals for a fixed
// input are deterministic.
struct OpCounters {
  std::uint64_t branches = 0;
  std::uint64_t fxp_mul = 0;  // integer multiplies and divides
  std::uint64_t fxp_mac = 0;
  std::uint64_t fp_mul = 0;  // float multiplies, divides, transcendentals
  std::uint64_t fp_mac = 0;
  std::uint64_t loads_stores = 0;

  void reset() { *this = OpCounters{}; }

  OpCounters& operator+=(const OpCounters& o) {
    branches += o.branches;
    fxp_mul += o.fxp_mul;
    fxp_mac += o.fxp_mac;
    fp_mul += o.fp_mul;
    fp_mac += o.fp_mac;
    loads_stores += o.loads_stores;
    return *this;
  }

  OpCounters operator-(const OpCounters& o) const {
    OpCounters r = *this;
    r.branches -= o.branches;
    r.fxp_mul -= o.fxp_mul;
    r.fxp_mac -= o.fxp_mac;
    r.fp_mul -= o.fp_mul;
    r.fp_mac -= o.fp_mac;
    r.loads_stores -= o.loads_stores;
    return r;
  }

  // Compute work only; data movement is reported but never ranked.
  std::uint64_t compute_total() const {
    return branches + fxp_mul + fxp_mac + fp_mul + fp_mac;
  }

  std::uint64_t total() const { return compute_total() + loads_stores; }

  bool operator==(const OpCounters&) const = default;
};

enum class OpCategory { branches, fxp_mul, fxp_mac, fp_mul, fp_mac };

OpCategory dominant_category(const OpCounters& c);
std::string category_name(OpCategory c);

// How an application's generic arithmetic is attributed. Apps that ship as
// fixed-point ports on the device count their multiplies as FXP even where
// the desk kernel itself runs in doubles; integer kernels (q15 FFT, q15
// CNN) force the FXP columns regardless of attribution.
enum class ArithAttribution { fxp, fp };

class KernelContext {
 public:
  explicit KernelContext(ArithAttribution a = ArithAttribution::fp) : attr_(a) {}

  void mul(std::uint64_t n) {
    (attr_ == ArithAttribution::fxp ? c_.fxp_mul : c_.fp_mul) += n;
  }
  void mac(std::uint64_t n) {
    (attr_ == ArithAttribution::fxp ? c_.fxp_mac : c_.fp_mac) += n;
  }
  void branch(std::uint64_t n) { c_.branches += n; }
  void mem(std::uint64_t n) { c_.loads_stores += n; }

  void mul_fxp(std::uint64_t n) { c_.fxp_mul += n; }
  void mac_fxp(std::uint64_t n) { c_.fxp_mac += n; }
  void mul_fp(std::uint64_t n) { c_.fp_mul += n; }
  void mac_fp(std::uint64_t n) { c_.fp_mac += n; }

  const OpCounters& counters() const { return c_; }
  ArithAttribution attribution() const { return attr_; }
  void reset() { c_.reset(); }

 private:
  OpCounters c_;
  ArithAttribution attr_;
};

}  // namespace biobench
