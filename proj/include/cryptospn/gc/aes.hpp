#pragma once

#include <immintrin.h>

#include <array>
#include <cstddef>
#include <cstdint>

namespace cryptospn {

using Block = long long __attribute__((vector_size(16)));

inline Block zero_block() { return _mm_setzero_si128(); }
inline Block make_block(std::uint64_t high, std::uint64_t low) {
  return _mm_set_epi64x(static_cast<long long>(high), static_cast<long long>(low));
}
inline bool lsb(Block b) { return (_mm_cvtsi128_si32(b) & 1) != 0; }
inline bool equal(Block a, Block b) {
  const Block x = _mm_xor_si128(a, b);
  return _mm_testz_si128(x, x) != 0;
}
inline Block load_block(const std::uint8_t* p) { return _mm_loadu_si128(reinterpret_cast<const Block*>(p)); }
inline void store_block(std::uint8_t* p, Block b) { _mm_storeu_si128(reinterpret_cast<Block*>(p), b); }
/// b when c is set, zero otherwise.
inline Block select(bool c, Block b) { return _mm_and_si128(b, _mm_set1_epi8(c ? -1 : 0)); }

/// AES-128 encryption with AES-NI.
class Aes128 {
 public:
  explicit Aes128(Block key);
  explicit Aes128(const std::uint8_t key[16]) : Aes128(load_block(key)) {}

  Block encrypt(Block x) const;
  /// Encrypts n blocks in place, interleaving rounds for throughput.
  template <std::size_t N>
  void encrypt_n(Block* x) const {
    for (std::size_t i = 0; i < N; ++i) x[i] = _mm_xor_si128(x[i], keys_[0]);
    for (int r = 1; r < 10; ++r) {
      for (std::size_t i = 0; i < N; ++i) x[i] = _mm_aesenc_si128(x[i], keys_[r]);
    }
    for (std::size_t i = 0; i < N; ++i) x[i] = _mm_aesenclast_si128(x[i], keys_[10]);
  }

 private:
  std::array<Block, 11> keys_;
};

/// Tweakable correlation-robust hash H(x, t) = π(σ(x) ⊕ t) ⊕ σ(x), where π is
/// AES under a fixed public key and σ(xL‖xR) = (xL ⊕ xR)‖xL.
class TweakHash {
 public:
  TweakHash();

  static Block sigma(Block x) {
    return _mm_xor_si128(_mm_shuffle_epi32(x, 78), _mm_and_si128(x, make_block(~std::uint64_t{0}, 0)));
  }

  Block hash(Block x, std::uint64_t tweak) const {
    Block k[1] = {_mm_xor_si128(sigma(x), make_block(0, tweak))};
    const Block s = k[0];
    aes_.encrypt_n<1>(k);
    return _mm_xor_si128(k[0], s);
  }

  template <std::size_t N>
  void hash_n(Block* x, const std::uint64_t* tweaks) const {
    Block s[N];
    for (std::size_t i = 0; i < N; ++i) {
      s[i] = _mm_xor_si128(sigma(x[i]), make_block(0, tweaks[i]));
      x[i] = s[i];
    }
    aes_.encrypt_n<N>(x);
    for (std::size_t i = 0; i < N; ++i) x[i] = _mm_xor_si128(x[i], s[i]);
  }

 private:
  Aes128 aes_;
};

/// AES-CTR pseudo-random generator.
class AesPrg {
 public:
  explicit AesPrg(Block seed) : aes_(seed) {}
  /// Seed from a 64-bit value, for deterministic testing.
  static AesPrg from_u64(std::uint64_t seed, std::uint64_t domain = 0) { return AesPrg(make_block(domain, seed)); }
  /// Seed from the operating system.
  static AesPrg random();

  Block next();
  void fill(std::uint8_t* out, std::size_t n);

 private:
  Aes128 aes_;
  std::uint64_t counter_ = 0;
};

}  // namespace cryptospn
