#include "a2nav/encoder.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

namespace a2nav {

namespace {

std::uint64_t fnv1a64(const char* data, std::size_t len) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::vector<double> TrigramEncoder::encode(std::string_view text) const {
  std::string padded = " ";
  for (char c : text) {
    const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (std::isspace(static_cast<unsigned char>(lc))) {
      if (padded.back() != ' ') padded.push_back(' ');
    } else {
      padded.push_back(lc);
    }
  }
  if (padded.back() != ' ') padded.push_back(' ');

  std::vector<double> v(kDim, 0.0);
  if (padded.size() >= 3) {
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
      const std::uint64_t h = fnv1a64(padded.data() + i, 3);
      const std::size_t idx = static_cast<std::size_t>(h % kDim);
      const double sign = ((h >> 32) & 1u) ? 1.0 : -1.0;
      v[idx] += sign;
    }
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) {
    v[0] = 1.0;  // degenerate input maps to a fixed unit vector
    return v;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace a2nav
