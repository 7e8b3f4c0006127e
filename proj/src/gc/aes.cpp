#include "cryptospn/gc/aes.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

namespace cryptospn {
namespace {

template <int Rcon>
Block expand_step(Block key) {
  Block t = _mm_aeskeygenassist_si128(key, Rcon);
  t = _mm_shuffle_epi32(t, 0xff);
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  return _mm_xor_si128(key, t);
}

constexpr std::uint8_t kFixedKey[16] = {0x43, 0x72, 0x79, 0x70, 0x74, 0x6f, 0x53, 0x50,
                                        0x4e, 0x2d, 0x67, 0x63, 0x2d, 0x6b, 0x65, 0x79};

}  // namespace

Aes128::Aes128(Block key) {
  keys_[0] = key;
  keys_[1] = expand_step<0x01>(keys_[0]);
  keys_[2] = expand_step<0x02>(keys_[1]);
  keys_[3] = expand_step<0x04>(keys_[2]);
  keys_[4] = expand_step<0x08>(keys_[3]);
  keys_[5] = expand_step<0x10>(keys_[4]);
  keys_[6] = expand_step<0x20>(keys_[5]);
  keys_[7] = expand_step<0x40>(keys_[6]);
  keys_[8] = expand_step<0x80>(keys_[7]);
  keys_[9] = expand_step<0x1b>(keys_[8]);
  keys_[10] = expand_step<0x36>(keys_[9]);
}

Block Aes128::encrypt(Block x) const {
  encrypt_n<1>(&x);
  return x;
}

TweakHash::TweakHash() : aes_(kFixedKey) {}

AesPrg AesPrg::random() {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
  std::uint8_t seed[16];
  randombytes_buf(seed, sizeof seed);
  return AesPrg(load_block(seed));
}

Block AesPrg::next() { return aes_.encrypt(make_block(0, counter_++)); }

void AesPrg::fill(std::uint8_t* out, std::size_t n) {
  while (n >= 16) {
    store_block(out, next());
    out += 16;
    n -= 16;
  }
  if (n > 0) {
    std::uint8_t tmp[16];
    store_block(tmp, next());
    std::memcpy(out, tmp, n);
  }
}

}  // namespace cryptospn
