// signal.hpp - complex sample buffers with signed indexing
//
// The transceiver chain indexes prefix samples with negative time indices
// (the chirp phase c1*l^2 is not shift-invariant, so the index origin is part
// of the data, not a convention of the caller). SignedVec keeps the origin
// attached to the buffer.

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace afdm {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline double energy(const cvec& v) {
  double e = 0.0;
  for (const auto& z : v) e += std::norm(z);
  return e;
}

inline double rel_error(const cvec& a, const cvec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("rel_error: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : 1.0 / 0.0;
  return std::sqrt(num / den);
}

// Buffer over the signed index range [-origin, size-origin).
struct SignedVec {
  cvec v;
  int origin = 0;  // v[origin] holds index 0

  SignedVec() = default;
  SignedVec(int lo, int hi) : v(static_cast<std::size_t>(hi - lo)), origin(-lo) {}

  int lo() const { return -origin; }
  int hi() const { return static_cast<int>(v.size()) - origin; }
  int size() const { return static_cast<int>(v.size()); }

  cplx& at(int l) {
    if (l < lo() || l >= hi()) throw std::out_of_range("SignedVec::at");
    return v[static_cast<std::size_t>(l + origin)];
  }
  const cplx& at(int l) const {
    if (l < lo() || l >= hi()) throw std::out_of_range("SignedVec::at");
    return v[static_cast<std::size_t>(l + origin)];
  }
  // Zero-padded read.
  cplx get(int l) const {
    if (l < lo() || l >= hi()) return {0.0, 0.0};
    return v[static_cast<std::size_t>(l + origin)];
  }

  double energy() const { return afdm::energy(v); }
};

}  // namespace afdm
