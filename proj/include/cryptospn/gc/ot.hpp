#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cryptospn/circuit/simulate.hpp"
#include "cryptospn/gc/aes.hpp"
#include "cryptospn/gc/channel.hpp"

namespace cryptospn {

inline constexpr std::size_t kKappa = 128;
inline constexpr std::size_t kGroupElementBytes = 32;

std::vector<std::uint8_t> pack_bits(const BitVector& bits);
BitVector unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t n);

/// Random 1-out-of-2 base OT (simplest OT over ristretto255). The sender
/// learns a key pair per transfer, the receiver the key of its choice bit.
/// Messages: sender → receiver one group element, receiver → sender one
/// group element per transfer.
std::vector<std::array<Block, 2>> base_ot_send(Channel& ch, std::size_t count);
std::vector<Block> base_ot_receive(Channel& ch, const BitVector& choices);

/// IKNP OT extension, sender side (the garbler). Setup runs κ base OTs as
/// receiver and takes the κ·count-bit extension matrix; online answers the
/// receiver's choice corrections with two masked κ-bit messages per transfer.
class OtExtSender {
 public:
  explicit OtExtSender(AesPrg& prg) : prg_(prg) {}

  void setup(Channel& ch, std::size_t count);
  void online(Channel& ch, const std::vector<std::array<Block, 2>>& messages);

  std::size_t count() const { return count_; }

 private:
  AesPrg& prg_;
  std::size_t count_ = 0;
  std::vector<std::array<Block, 2>> pads_;
};

/// IKNP OT extension, receiver side (the evaluator).
class OtExtReceiver {
 public:
  explicit OtExtReceiver(AesPrg& prg) : prg_(prg) {}

  void setup(Channel& ch, std::size_t count);
  std::vector<Block> online(Channel& ch, const BitVector& choices);

  std::size_t count() const { return count_; }

 private:
  AesPrg& prg_;
  std::size_t count_ = 0;
  BitVector random_choices_;
  std::vector<Block> pads_;
};

/// Payload sizes of the extension, in bits.
struct OtExtSizes {
  std::uint64_t setup_bits;         // κ·count
  std::uint64_t setup_padding_bits; // byte padding of each matrix column
  std::uint64_t online_bits;        // (2κ + 1)·count
  std::uint64_t online_padding_bits;
};
OtExtSizes ot_extension_sizes(std::size_t count);

}  // namespace cryptospn
