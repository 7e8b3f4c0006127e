#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cryptospn/gc/transport.hpp"

namespace cryptospn {

enum class MessageType : std::uint8_t {
  Hello = 1,
  Meta = 2,
  GcChunk = 3,
  BaseOtMsg = 4,
  OtextSetup = 5,
  OtextOnline = 6,
  GarblerLabels = 7,
  DecodeTable = 8,
  ResultAck = 9,
  Error = 10,
};
inline constexpr std::size_t kMessageTypeCount = 11;  // indexable by the numeric type

enum class Phase : std::uint8_t { Setup = 0, Online = 1 };

const char* to_string(MessageType type);
const char* to_string(Phase phase);

/// Setup carries only input-independent traffic; inputs and decode
/// information flow only online. ERROR is allowed everywhere.
bool allowed_in(MessageType type, Phase phase);

inline constexpr std::size_t kFrameHeaderBytes = 5;
inline constexpr std::uint32_t kMaxFramePayload = 1U << 30;

struct TrafficCounters {
  std::array<std::uint64_t, kMessageTypeCount> payload_sent{};
  std::array<std::uint64_t, kMessageTypeCount> payload_received{};
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;

  std::uint64_t payload(MessageType t) const {
    const auto i = static_cast<std::size_t>(t);
    return payload_sent[i] + payload_received[i];
  }
  std::uint64_t payload_total() const;
  std::uint64_t framing_total() const { return kFrameHeaderBytes * (frames_sent + frames_received); }
};

struct TranscriptEntry {
  Phase phase;
  bool outgoing;
  MessageType type;
  std::uint64_t bytes;
};

struct Frame {
  MessageType type;
  std::vector<std::uint8_t> payload;
};

/// Framing over a transport: 4-byte big-endian payload length, 1-byte type,
/// payload. Sending or receiving a type outside the current phase's whitelist
/// raises ProtocolError.
class Channel {
 public:
  explicit Channel(Transport& transport) : transport_(transport) {}

  Phase phase() const { return phase_; }
  void set_phase(Phase phase) { phase_ = phase; }

  void send(MessageType type, std::span<const std::uint8_t> payload);
  Frame recv_any();
  /// Receives a frame of the given type. An ERROR frame raises ProtocolError
  /// carrying the peer's message; any other type is reported to the peer.
  std::vector<std::uint8_t> recv(MessageType expected);
  /// Best-effort ERROR frame; never throws.
  void send_error(const std::string& message) noexcept;

  const TrafficCounters& counters(Phase phase) const { return counters_[static_cast<std::size_t>(phase)]; }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

 private:
  Transport& transport_;
  Phase phase_ = Phase::Setup;
  std::array<TrafficCounters, 2> counters_{};
  std::vector<TranscriptEntry> transcript_;
};

}  // namespace cryptospn
