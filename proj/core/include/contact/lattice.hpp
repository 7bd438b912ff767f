#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace contact {

/// Largest lattice dimension the toolkit supports.
inline constexpr int kMaxDim = 4;

// A point of Z^d. Coordinates beyond the active dimension stay zero, so
// equality, ordering and hashing never need to know d.
struct Site {
  std::array<int32_t, kMaxDim> c{};

  Site() = default;
  Site(std::initializer_list<int32_t> xs) {
    int i = 0;
    for (int32_t x : xs) {
      if (i >= kMaxDim) throw std::invalid_argument("Site: too many coordinates");
      c[i++] = x;
    }
  }

  static Site origin() { return {}; }
  static Site unit(int axis) {
    Site s;
    s.c[static_cast<size_t>(axis)] = 1;
    return s;
  }

  int32_t operator[](int i) const { return c[static_cast<size_t>(i)]; }
  int32_t& operator[](int i) { return c[static_cast<size_t>(i)]; }

  friend Site operator+(Site a, const Site& b) {
    for (int i = 0; i < kMaxDim; ++i) a.c[i] += b.c[i];
    return a;
  }
  friend Site operator-(Site a, const Site& b) {
    for (int i = 0; i < kMaxDim; ++i) a.c[i] -= b.c[i];
    return a;
  }
  friend Site operator*(int32_t k, Site a) {
    for (int i = 0; i < kMaxDim; ++i) a.c[i] *= k;
    return a;
  }
  Site operator-() const {
    Site s;
    for (int i = 0; i < kMaxDim; ++i) s.c[i] = -c[i];
    return s;
  }

  friend bool operator==(const Site&, const Site&) = default;
  // Lexicographic order on coordinates; used for canonical edge keys and for
  // deterministic tie-breaking.
  friend auto operator<=>(const Site&, const Site&) = default;

  int32_t sup_norm() const {
    int32_t m = 0;
    for (int i = 0; i < kMaxDim; ++i) m = std::max(m, std::abs(c[i]));
    return m;
  }
  int64_t l1_norm() const {
    int64_t m = 0;
    for (int i = 0; i < kMaxDim; ++i) m += std::abs(c[i]);
    return m;
  }

  std::string to_string(int dim) const {
    std::string s;
    for (int i = 0; i < dim; ++i) {
      if (i) s += ' ';
      s += std::to_string(c[static_cast<size_t>(i)]);
    }
    return s;
  }
};

struct SiteHash {
  size_t operator()(const Site& s) const noexcept {
    uint64_t h = 0x6a09e667f3bcc908ull;
    for (int i = 0; i < kMaxDim; ++i) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(s.c[i])) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdull;
      h ^= h >> 33;
    }
    return static_cast<size_t>(h);
  }
};

enum class BoundaryPolicy : uint8_t {
  cutoff,  // edges leaving the window do not exist
  flag,    // as cutoff, but infection events on boundary sites are flagged
};

// Finite truncation of Z^d: the sites with sup-norm <= radius. Edges never
// cross the boundary, so the edge set is exactly the nearest-neighbor pairs
// inside the box.
struct Window {
  int radius = 0;
  BoundaryPolicy policy = BoundaryPolicy::flag;

  bool contains(const Site& s, int dim) const {
    for (int i = 0; i < dim; ++i)
      if (std::abs(s[i]) > radius) return false;
    for (int i = dim; i < kMaxDim; ++i)
      if (s[i] != 0) return false;
    return true;
  }
  bool on_boundary(const Site& s, int dim) const {
    for (int i = 0; i < dim; ++i)
      if (std::abs(s[i]) == radius) return true;
    return false;
  }
  int64_t site_count(int dim) const {
    int64_t n = 1;
    for (int i = 0; i < dim; ++i) n *= 2 * static_cast<int64_t>(radius) + 1;
    return n;
  }
};

}  // namespace contact
