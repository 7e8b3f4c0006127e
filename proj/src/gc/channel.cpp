#include "cryptospn/gc/channel.hpp"

#include "cryptospn/errors.hpp"

namespace cryptospn {

const char* to_string(MessageType type) {
  switch (type) {
    case MessageType::Hello: return "HELLO";
    case MessageType::Meta: return "META";
    case MessageType::GcChunk: return "GC_CHUNK";
    case MessageType::BaseOtMsg: return "BASE_OT_MSG";
    case MessageType::OtextSetup: return "OTEXT_SETUP";
    case MessageType::OtextOnline: return "OTEXT_ONLINE";
    case MessageType::GarblerLabels: return "GARBLER_LABELS";
    case MessageType::DecodeTable: return "DECODE_TABLE";
    case MessageType::ResultAck: return "RESULT_ACK";
    case MessageType::Error: return "ERROR";
  }
  return "?";
}

const char* to_string(Phase phase) { return phase == Phase::Setup ? "setup" : "online"; }

bool allowed_in(MessageType type, Phase phase) {
  switch (type) {
    case MessageType::Hello:
    case MessageType::Meta:
    case MessageType::GcChunk:
    case MessageType::BaseOtMsg:
    case MessageType::OtextSetup: return phase == Phase::Setup;
    case MessageType::OtextOnline:
    case MessageType::GarblerLabels:
    case MessageType::DecodeTable:
    case MessageType::ResultAck: return phase == Phase::Online;
    case MessageType::Error: return true;
  }
  return false;
}

std::uint64_t TrafficCounters::payload_total() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < kMessageTypeCount; ++i) t += payload_sent[i] + payload_received[i];
  return t;
}

void Channel::send(MessageType type, std::span<const std::uint8_t> payload) {
  if (!allowed_in(type, phase_)) {
    throw ProtocolError(std::string(to_string(type)) + " may not be sent in the " + to_string(phase_) + " phase");
  }
  if (payload.size() > kMaxFramePayload) throw ProtocolError("frame payload too large");
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::vector<std::uint8_t> buf;
  const bool inline_payload = n <= (1U << 16);
  buf.reserve(kFrameHeaderBytes + (inline_payload ? n : 0));
  buf.push_back(static_cast<std::uint8_t>(n >> 24));
  buf.push_back(static_cast<std::uint8_t>(n >> 16));
  buf.push_back(static_cast<std::uint8_t>(n >> 8));
  buf.push_back(static_cast<std::uint8_t>(n));
  buf.push_back(static_cast<std::uint8_t>(type));
  if (inline_payload) {
    buf.insert(buf.end(), payload.begin(), payload.end());
    transport_.send(buf.data(), buf.size());
  } else {
    transport_.send(buf.data(), buf.size());
    transport_.send(payload.data(), payload.size());
  }
  auto& c = counters_[static_cast<std::size_t>(phase_)];
  c.payload_sent[static_cast<std::size_t>(type)] += n;
  ++c.frames_sent;
  transcript_.push_back(TranscriptEntry{phase_, true, type, n});
}

Frame Channel::recv_any() {
  std::uint8_t header[kFrameHeaderBytes];
  transport_.recv(header, sizeof header);
  const std::uint32_t n = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                          (std::uint32_t{header[2]} << 8) | header[3];
  if (header[4] < 1 || header[4] >= kMessageTypeCount) {
    throw ProtocolError("unknown message type " + std::to_string(header[4]));
  }
  if (n > kMaxFramePayload) throw ProtocolError("frame payload too large");
  Frame f{static_cast<MessageType>(header[4]), std::vector<std::uint8_t>(n)};
  if (n > 0) transport_.recv(f.payload.data(), n);
  auto& c = counters_[static_cast<std::size_t>(phase_)];
  c.payload_received[header[4]] += n;
  ++c.frames_received;
  transcript_.push_back(TranscriptEntry{phase_, false, f.type, n});
  if (!allowed_in(f.type, phase_)) {
    send_error(std::string(to_string(f.type)) + " is not allowed in the " + to_string(phase_) + " phase");
    throw ProtocolError(std::string("peer sent ") + to_string(f.type) + " in the " + to_string(phase_) + " phase");
  }
  return f;
}

std::vector<std::uint8_t> Channel::recv(MessageType expected) {
  Frame f = recv_any();
  if (f.type == MessageType::Error) {
    throw ProtocolError("peer reported an error: " + std::string(f.payload.begin(), f.payload.end()));
  }
  if (f.type != expected) {
    const std::string msg = std::string("expected ") + to_string(expected) + ", got " + to_string(f.type);
    send_error(msg);
    throw ProtocolError(msg);
  }
  return std::move(f.payload);
}

void Channel::send_error(const std::string& message) noexcept {
  try {
    send(MessageType::Error, std::span(reinterpret_cast<const std::uint8_t*>(message.data()), message.size()));
  } catch (...) {
  }
}

}  // namespace cryptospn
