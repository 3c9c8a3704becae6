// qam.hpp - Gray-labeled square QAM, unit average energy
//
// Bit convention: each symbol consumes Q_m bits, the first Q_m/2 select the
// in-phase level and the rest the quadrature level, MSB first. Per axis the
// bit group is a Gray label; decoding it to a binary index a gives amplitude
// (L-1) - 2a, so adjacent levels differ in exactly one bit. For QPSK bits 00
// map to (+1+j)/sqrt(2).

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "afdm/signal.hpp"

namespace afdm {

struct BadLength : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QamSpec {
  int bits_per_symbol;  // Q_m, even
  int levels;           // 2^(Q_m/2) per axis
  double scale;         // normalizes average symbol energy to 1

  explicit QamSpec(int qm) : bits_per_symbol(qm) {
    if (qm < 2 || qm > 16 || qm % 2 != 0)
      throw std::invalid_argument("QamSpec: Q_m must be even and reasonable");
    levels = 1 << (qm / 2);
    const double per_axis = (static_cast<double>(levels) * levels - 1.0) / 3.0;
    scale = 1.0 / std::sqrt(2.0 * per_axis);
  }

  int points() const { return 1 << bits_per_symbol; }

  static std::uint32_t gray_encode(std::uint32_t a) { return a ^ (a >> 1); }
  static std::uint32_t gray_decode(std::uint32_t g) {
    std::uint32_t a = 0;
    for (; g; g >>= 1) a ^= g;
    return a;
  }

  double axis_amplitude(std::uint32_t gray_bits) const {
    const std::uint32_t a = gray_decode(gray_bits);
    return scale * (static_cast<double>(levels - 1) - 2.0 * static_cast<double>(a));
  }

  std::uint32_t axis_bits(double amplitude) const {
    // nearest level index, clamped
    double a = (static_cast<double>(levels - 1) - amplitude / scale) / 2.0;
    long ai = std::lround(a);
    if (ai < 0) ai = 0;
    if (ai >= levels) ai = levels - 1;
    return gray_encode(static_cast<std::uint32_t>(ai));
  }

  cplx map(std::uint32_t symbol_bits) const {
    const int half = bits_per_symbol / 2;
    const std::uint32_t gi = symbol_bits >> half;
    const std::uint32_t gq = symbol_bits & ((1u << half) - 1u);
    return {axis_amplitude(gi), axis_amplitude(gq)};
  }

  std::uint32_t demap(cplx z) const {
    const int half = bits_per_symbol / 2;
    return (axis_bits(z.real()) << half) | axis_bits(z.imag());
  }
};

inline cvec qam_modulate(const std::vector<std::uint8_t>& bits, const QamSpec& spec) {
  const int qm = spec.bits_per_symbol;
  if (bits.size() % static_cast<std::size_t>(qm) != 0)
    throw BadLength("qam_modulate: bit count not divisible by Q_m");
  cvec out(bits.size() / static_cast<std::size_t>(qm));
  for (std::size_t s = 0; s < out.size(); ++s) {
    std::uint32_t v = 0;
    for (int b = 0; b < qm; ++b) v = (v << 1) | (bits[s * qm + static_cast<std::size_t>(b)] & 1u);
    out[s] = spec.map(v);
  }
  return out;
}

// Minimum-distance hard decision back to bits.
inline std::vector<std::uint8_t> qam_demodulate(const cvec& symbols, const QamSpec& spec) {
  const int qm = spec.bits_per_symbol;
  std::vector<std::uint8_t> bits(symbols.size() * static_cast<std::size_t>(qm));
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    const std::uint32_t v = spec.demap(symbols[s]);
    for (int b = 0; b < qm; ++b)
      bits[s * qm + static_cast<std::size_t>(b)] = static_cast<std::uint8_t>((v >> (qm - 1 - b)) & 1u);
  }
  return bits;
}

inline std::pair<std::size_t, std::size_t> ber_count(const std::vector<std::uint8_t>& tx,
                                                     const std::vector<std::uint8_t>& rx) {
  if (tx.size() != rx.size()) throw BadLength("ber_count: length mismatch");
  std::size_t err = 0;
  for (std::size_t i = 0; i < tx.size(); ++i) err += (tx[i] != rx[i]) ? 1u : 0u;
  return {err, tx.size()};
}

}  // namespace afdm
