#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace a2nav {

// Pluggable sentence encoder used for semantic translation of free-form
// action phrases. Implementations must be deterministic and return unit
// vectors of a fixed dimension.
class TextEncoder {
 public:
  virtual ~TextEncoder() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<double> encode(std::string_view text) const = 0;
};

// Built-in default: hashed character-trigram bag mapped to a 256-dim unit
// vector. Dependency-free and fully offline.
class TrigramEncoder : public TextEncoder {
 public:
  static constexpr std::size_t kDim = 256;
  std::size_t dim() const override { return kDim; }
  std::vector<double> encode(std::string_view text) const override;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace a2nav
