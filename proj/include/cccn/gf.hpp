#pragma once

#include <cstdint>
#include <vector>

#include "cccn/errors.hpp"

namespace cccn {

using FieldElement = std::uint16_t;  // holds any value for m <= 16

struct FieldParams {
  int m = 8;
  // Irreducible reduction polynomial, leading term included.
  std::uint32_t reduction_poly = 0x11B;  // x^8 + x^4 + x^3 + x + 1

  static FieldParams standard(int m) {
    switch (m) {
      case 4: return {4, 0x13};       // x^4 + x + 1
      case 8: return {8, 0x11B};
      case 16: return {16, 0x1100B};  // x^16 + x^12 + x^3 + x + 1
      default: throw InvalidParameters("no standard polynomial for m=" + std::to_string(m));
    }
  }
};

namespace detail {

inline int poly_degree(std::uint32_t p) {
  int d = -1;
  while (p) { ++d; p >>= 1; }
  return d;
}

// Remainder of a mod b over F_2[x].
inline std::uint32_t poly_mod(std::uint32_t a, std::uint32_t b) {
  int db = poly_degree(b);
  for (int da = poly_degree(a); da >= db; --da)
    if (a >> da & 1u) a ^= b << (da - db);
  return a;
}

inline bool poly_irreducible(std::uint32_t p) {
  int d = poly_degree(p);
  if (d < 1) return false;
  if (d == 1) return true;
  // Trial division by every polynomial of degree 1..d/2.
  for (std::uint32_t f = 2; poly_degree(f) <= d / 2; ++f)
    if (poly_mod(p, f) == 0) return false;
  return true;
}

}  // namespace detail

// Arithmetic over F_{2^m}. Multiplication is carry-less shift/xor with
// modular reduction; a full product table backs it for m <= 8. Both routes
// are bit-exact against the schoolbook polynomial oracle in the tests.
class Field {
 public:
  explicit Field(FieldParams params = {}) : params_(params) {
    if (params_.m < 1 || params_.m > 16)
      throw InvalidParameters("field bit-width must be in [1,16]");
    if (detail::poly_degree(params_.reduction_poly) != params_.m)
      throw InvalidParameters("reduction polynomial degree != m");
    if (!detail::poly_irreducible(params_.reduction_poly))
      throw InvalidParameters("reduction polynomial is reducible");
    if (params_.m <= 8) {
      const std::uint32_t n = size();
      mul_table_.resize(n * n);
      for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b <= a; ++b) {
          FieldElement p = clmul_reduce(static_cast<FieldElement>(a),
                                        static_cast<FieldElement>(b));
          mul_table_[a * n + b] = p;
          mul_table_[b * n + a] = p;
        }
    }
  }

  const FieldParams& params() const { return params_; }
  int m() const { return params_.m; }
  std::uint32_t size() const { return 1u << params_.m; }
  FieldElement mask() const { return static_cast<FieldElement>(size() - 1); }

  static FieldElement add(FieldElement a, FieldElement b) {
    return static_cast<FieldElement>(a ^ b);
  }

  FieldElement mul(FieldElement a, FieldElement b) const {
    if (!mul_table_.empty()) return mul_table_[a * size() + b];
    return clmul_reduce(a, b);
  }

  FieldElement inv(FieldElement a) const {
    if (a == 0) throw InversionOfZero();
    // a^(2^m - 2); the multiplicative group has order 2^m - 1.
    return pow(a, size() - 2);
  }

  FieldElement pow(FieldElement a, std::uint32_t e) const {
    FieldElement r = 1;
    while (e) {
      if (e & 1u) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

 private:
  FieldElement clmul_reduce(FieldElement a, FieldElement b) const {
    std::uint32_t acc = 0, x = a;
    for (std::uint32_t y = b; y; y >>= 1, x <<= 1)
      if (y & 1u) acc ^= x;
    return static_cast<FieldElement>(detail::poly_mod(acc, params_.reduction_poly));
  }

  FieldParams params_;
  std::vector<FieldElement> mul_table_;
};

}  // namespace cccn
