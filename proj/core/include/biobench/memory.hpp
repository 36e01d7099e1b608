#pragma once

#include <cstdint>

#include "biobench/errors.hpp"

namespace biobench {

// Memory accounting for the static/dynamic metrics. Sizes are the widths a
// microcontroller port would hold resident (int16 samples, int32
// intermediates, fp32 model state), not host sizeof, so the numbers are
// comparable with device RAM budgets. Dynamic peak is the heap high-water
// of paired alloc/release calls plus a configured stack bound; static is
// read-only parameters and tables plus a fixed code allowance per stage.
class MemoryLedger {
 public:
  static constexpr std::uint64_t kCodeAllowancePerStage = 8 * 1024;

  void alloc(std::uint64_t bytes) {
    live_ += bytes;
    if (live_ > peak_) peak_ = live_;
  }

  void release(std::uint64_t bytes) {
    if (bytes > live_) throw StateError("MemoryLedger: release exceeds live bytes");
    live_ -= bytes;
  }

  void note_static(std::uint64_t bytes) { static_ += bytes; }
  void add_code_allowance(int stages) {
    static_ += kCodeAllowancePerStage * static_cast<std::uint64_t>(stages);
  }

  void set_stack_bound(std::uint64_t bytes) { stack_bound_ = bytes; }

  std::uint64_t dynamic_peak_bytes() const { return peak_ + stack_bound_; }
  std::uint64_t heap_peak_bytes() const { return peak_; }
  std::uint64_t live_bytes() const { return live_; }
  std::uint64_t static_bytes() const { return static_; }
  std::uint64_t stack_bound_bytes() const { return stack_bound_; }

  void reset_run() {
    live_ = 0;
    peak_ = 0;
  }

 private:
  std::uint64_t live_ = 0;
  std::uint64_t peak_ = 0;
  std::uint64_t static_ = 0;
  std::uint64_t stack_bound_ = 0;
};

// Scoped device-byte allocation.
class ScopedAlloc {
 public:
  ScopedAlloc(MemoryLedger& ledger, std::uint64_t bytes) : ledger_(ledger), bytes_(bytes) {
    ledger_.alloc(bytes_);
  }
  ~ScopedAlloc() { ledger_.release(bytes_); }
  ScopedAlloc(const ScopedAlloc&) = delete;
  ScopedAlloc& operator=(const ScopedAlloc&) = delete;

 private:
  MemoryLedger& ledger_;
  std::uint64_t bytes_;
};

}  // namespace biobench
