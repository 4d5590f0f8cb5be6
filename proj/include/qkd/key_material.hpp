#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qkd {

// One mixed-radix raw-key symbol: value in [0, radix), radix >= 2.
struct Symbol {
  std::uint32_t value;
  std::uint32_t radix;

  bool operator==(const Symbol&) const = default;
};

// Ordered raw-key symbols. Radices are not restricted to powers of two
// (adaptive framing emits e.g. radix-3 symbols), so information content is
// accounted exactly as sum(log2 radix) rather than by flattening to bits.
class KeyMaterial {
public:
  KeyMaterial() = default;

  void push(std::uint32_t value, std::uint32_t radix) {
    if (radix < 2 || value >= radix) {
      throw std::logic_error("key symbol must satisfy value < radix, radix >= 2");
    }
    symbols_.push_back({value, radix});
  }

  void append(const KeyMaterial& other) {
    symbols_.insert(symbols_.end(), other.symbols_.begin(), other.symbols_.end());
  }

  const std::vector<Symbol>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }

  double bit_count() const {
    double bits = 0.0;
    for (const Symbol& s : symbols_) bits += std::log2(static_cast<double>(s.radix));
    return bits;
  }

  bool operator==(const KeyMaterial&) const = default;

private:
  std::vector<Symbol> symbols_;
};

}  // namespace qkd
