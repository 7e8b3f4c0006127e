#include "cryptospn/gc/ot.hpp"

#include <sodium.h>

#include <cstring>

#include "cryptospn/errors.hpp"

namespace cryptospn {
namespace {

constexpr std::uint64_t kPadTweak = std::uint64_t{1} << 63;

void ensure_sodium() {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
}

Block derive_key(std::size_t index, const std::uint8_t* a, const std::uint8_t* b, const std::uint8_t* shared) {
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, 16);
  const std::uint64_t idx = index;
  crypto_generichash_update(&st, reinterpret_cast<const std::uint8_t*>(&idx), sizeof idx);
  crypto_generichash_update(&st, a, kGroupElementBytes);
  crypto_generichash_update(&st, b, kGroupElementBytes);
  crypto_generichash_update(&st, shared, kGroupElementBytes);
  std::uint8_t out[16];
  crypto_generichash_final(&st, out, sizeof out);
  return load_block(out);
}

void checked_mult(std::uint8_t* out, const std::uint8_t* scalar, const std::uint8_t* point) {
  if (crypto_scalarmult_ristretto255(out, scalar, point) != 0) throw ProtocolError("degenerate group element in base OT");
}

void check_point(const std::uint8_t* p) {
  if (crypto_core_ristretto255_is_valid_point(p) != 1) throw ProtocolError("invalid group element in base OT");
}

std::size_t column_bytes(std::size_t count) { return (count + 7) / 8; }

// κ columns of `count` bits → `count` rows of κ bits.
std::vector<Block> transpose(const std::vector<std::uint8_t>& cols, std::size_t count) {
  const std::size_t cb = column_bytes(count);
  std::vector<std::array<std::uint8_t, 16>> rows(count, std::array<std::uint8_t, 16>{});
  for (std::size_t i = 0; i < kKappa; ++i) {
    const std::uint8_t* col = cols.data() + i * cb;
    for (std::size_t j = 0; j < count; ++j) {
      if ((col[j >> 3] >> (j & 7)) & 1U) rows[j][i >> 3] |= static_cast<std::uint8_t>(1U << (i & 7));
    }
  }
  std::vector<Block> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = load_block(rows[j].data());
  return out;
}

void prg_column(Block seed, std::uint8_t* out, std::size_t n) {
  AesPrg g(seed);
  g.fill(out, n);
}

const TweakHash& hasher() {
  static const TweakHash h;
  return h;
}

}  // namespace

std::vector<std::uint8_t> pack_bits(const BitVector& bits) {
  std::vector<std::uint8_t> out(column_bytes(bits.size()), 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i >> 3] |= static_cast<std::uint8_t>(1U << (i & 7));
  }
  return out;
}

BitVector unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t n) {
  if (bytes.size() != column_bytes(n)) throw ProtocolError("bit vector has the wrong length");
  BitVector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (bytes[i >> 3] >> (i & 7)) & 1U;
  return out;
}

std::vector<std::array<Block, 2>> base_ot_send(Channel& ch, std::size_t count) {
  ensure_sodium();
  std::uint8_t a[crypto_core_ristretto255_SCALARBYTES];
  std::uint8_t A[kGroupElementBytes];
  crypto_core_ristretto255_scalar_random(a);
  crypto_scalarmult_ristretto255_base(A, a);
  ch.send(MessageType::BaseOtMsg, std::span<const std::uint8_t>(A, sizeof A));
  const auto reply = ch.recv(MessageType::BaseOtMsg);
  if (reply.size() != count * kGroupElementBytes) throw ProtocolError("base OT reply has the wrong length");
  std::vector<std::array<Block, 2>> keys(count);
  std::uint8_t shared[kGroupElementBytes], diff[kGroupElementBytes];
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* B = reply.data() + i * kGroupElementBytes;
    check_point(B);
    checked_mult(shared, a, B);
    keys[i][0] = derive_key(i, A, B, shared);
    crypto_core_ristretto255_sub(diff, B, A);
    checked_mult(shared, a, diff);
    keys[i][1] = derive_key(i, A, B, shared);
  }
  sodium_memzero(a, sizeof a);
  return keys;
}

std::vector<Block> base_ot_receive(Channel& ch, const BitVector& choices) {
  ensure_sodium();
  const auto first = ch.recv(MessageType::BaseOtMsg);
  if (first.size() != kGroupElementBytes) throw ProtocolError("base OT message has the wrong length");
  const std::uint8_t* A = first.data();
  check_point(A);
  std::vector<std::uint8_t> reply(choices.size() * kGroupElementBytes);
  std::vector<Block> keys(choices.size());
  std::uint8_t b[crypto_core_ristretto255_SCALARBYTES], bG[kGroupElementBytes], shared[kGroupElementBytes];
  for (std::size_t i = 0; i < choices.size(); ++i) {
    std::uint8_t* B = reply.data() + i * kGroupElementBytes;
    crypto_core_ristretto255_scalar_random(b);
    crypto_scalarmult_ristretto255_base(bG, b);
    if (choices[i]) {
      crypto_core_ristretto255_add(B, A, bG);
    } else {
      std::memcpy(B, bG, kGroupElementBytes);
    }
    checked_mult(shared, b, A);
    keys[i] = derive_key(i, A, B, shared);
  }
  sodium_memzero(b, sizeof b);
  ch.send(MessageType::BaseOtMsg, reply);
  return keys;
}

OtExtSizes ot_extension_sizes(std::size_t count) {
  const std::uint64_t padded = 8 * column_bytes(count);
  return OtExtSizes{kKappa * count, kKappa * (padded - count), (2 * kKappa + 1) * count, padded - count};
}

void OtExtSender::setup(Channel& ch, std::size_t count) {
  count_ = count;
  pads_.clear();
  if (count == 0) return;
  std::uint8_t sbytes[16];
  store_block(sbytes, prg_.next());
  BitVector s(kKappa);
  for (std::size_t i = 0; i < kKappa; ++i) s[i] = (sbytes[i >> 3] >> (i & 7)) & 1U;
  const Block sblock = load_block(sbytes);
  const auto keys = base_ot_receive(ch, s);

  const std::size_t cb = column_bytes(count);
  const auto u = ch.recv(MessageType::OtextSetup);
  if (u.size() != kKappa * cb) throw ProtocolError("OT extension matrix has the wrong size");
  std::vector<std::uint8_t> q(kKappa * cb);
  for (std::size_t i = 0; i < kKappa; ++i) {
    std::uint8_t* col = q.data() + i * cb;
    prg_column(keys[i], col, cb);
    if (s[i]) {
      for (std::size_t k = 0; k < cb; ++k) col[k] ^= u[i * cb + k];
    }
  }
  const auto rows = transpose(q, count);
  const TweakHash& h = hasher();
  pads_.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    pads_[j][0] = h.hash(rows[j], kPadTweak | j);
    pads_[j][1] = h.hash(_mm_xor_si128(rows[j], sblock), kPadTweak | j);
  }
}

void OtExtSender::online(Channel& ch, const std::vector<std::array<Block, 2>>& messages) {
  if (messages.size() != count_) throw ProtocolError("OT extension count mismatch");
  if (count_ == 0) return;
  const auto e = unpack_bits(ch.recv(MessageType::OtextOnline), count_);
  std::vector<std::uint8_t> out(count_ * 2 * 16);
  for (std::size_t j = 0; j < count_; ++j) {
    const bool ej = e[j];
    store_block(out.data() + 32 * j, _mm_xor_si128(messages[j][0], pads_[j][ej ? 1 : 0]));
    store_block(out.data() + 32 * j + 16, _mm_xor_si128(messages[j][1], pads_[j][ej ? 0 : 1]));
  }
  ch.send(MessageType::OtextOnline, out);
  pads_.clear();
}

void OtExtReceiver::setup(Channel& ch, std::size_t count) {
  count_ = count;
  pads_.clear();
  if (count == 0) return;
  const auto keys = base_ot_send(ch, kKappa);
  random_choices_.resize(count);
  std::vector<std::uint8_t> rbytes(column_bytes(count));
  prg_.fill(rbytes.data(), rbytes.size());
  random_choices_ = unpack_bits(rbytes, count);
  rbytes = pack_bits(random_choices_);  // clears the padding bits

  const std::size_t cb = column_bytes(count);
  std::vector<std::uint8_t> t(kKappa * cb), u(kKappa * cb);
  for (std::size_t i = 0; i < kKappa; ++i) {
    std::uint8_t* tc = t.data() + i * cb;
    std::uint8_t* uc = u.data() + i * cb;
    prg_column(keys[i][0], tc, cb);
    prg_column(keys[i][1], uc, cb);
    for (std::size_t k = 0; k < cb; ++k) uc[k] ^= tc[k] ^ rbytes[k];
  }
  ch.send(MessageType::OtextSetup, u);
  const auto rows = transpose(t, count);
  const TweakHash& h = hasher();
  pads_.resize(count);
  for (std::size_t j = 0; j < count; ++j) pads_[j] = h.hash(rows[j], kPadTweak | j);
}

std::vector<Block> OtExtReceiver::online(Channel& ch, const BitVector& choices) {
  if (choices.size() != count_) throw ProtocolError("OT extension count mismatch");
  if (count_ == 0) return {};
  BitVector e(count_);
  for (std::size_t j = 0; j < count_; ++j) e[j] = choices[j] != random_choices_[j];
  ch.send(MessageType::OtextOnline, pack_bits(e));
  const auto y = ch.recv(MessageType::OtextOnline);
  if (y.size() != count_ * 32) throw ProtocolError("OT extension reply has the wrong size");
  std::vector<Block> out(count_);
  for (std::size_t j = 0; j < count_; ++j) {
    out[j] = _mm_xor_si128(load_block(y.data() + 32 * j + (choices[j] ? 16 : 0)), pads_[j]);
  }
  pads_.clear();
  return out;
}

}  // namespace cryptospn
