#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cryptospn/compiler/compiler.hpp"
#include "cryptospn/gc/aes.hpp"
#include "cryptospn/gc/channel.hpp"
#include "cryptospn/gc/ot.hpp"
#include "json.hpp"

namespace cryptospn {

inline constexpr std::uint16_t kProtocolVersion = 1;

enum class Role : std::uint8_t { Garbler, Evaluator };
const char* to_string(Role role);

struct SessionConfig {
  Role role = Role::Garbler;
  std::uint32_t kappa = 128;
  std::optional<std::uint64_t> seed;  // garbler only; fixes Δ and all labels
  std::size_t chunk_bytes = std::size_t{1} << 20;
};

struct PhaseReport {
  TrafficCounters traffic;
  double seconds = 0.0;
};

/// Measured traffic of one session, seen from one party (both directions).
struct SessionReport {
  Role role = Role::Garbler;
  std::string spn_digest;
  int precision = 32;
  std::uint64_t and_count = 0;
  std::uint64_t client_input_bits = 0;
  std::uint64_t server_input_bits = 0;
  PhaseReport setup;
  PhaseReport online;
  OtExtSizes ot;

  std::uint64_t garbled_table_bytes() const { return setup.traffic.payload(MessageType::GcChunk); }
  std::uint64_t garbler_label_bytes() const { return online.traffic.payload(MessageType::GarblerLabels); }
  /// Protocol payload (HELLO, META and RESULT_ACK excluded) per phase.
  std::uint64_t setup_payload_bytes() const;
  std::uint64_t online_payload_bytes() const;
  std::uint64_t control_bytes() const;
  std::uint64_t framing_bytes() const { return setup.traffic.framing_total() + online.traffic.framing_total(); }

  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Server side. setup() garbles and streams the circuit and prepares OT;
/// online() may run exactly once per setup.
class GarblerSession {
 public:
  GarblerSession(const CompiledSpn& compiled, Transport& transport, SessionConfig cfg);
  ~GarblerSession();

  void setup();
  void online(const BitVector& server_bits);
  const SessionReport& report() const { return report_; }
  const Channel& channel() const { return channel_; }
  /// White-box access for tests: 0-label of input wire `w` and Δ.
  Block input_label(Wire w, bool value) const;

 private:
  enum class State { Fresh, Ready, Done };
  const CompiledSpn& compiled_;
  Channel channel_;
  SessionConfig cfg_;
  AesPrg prg_;
  State state_ = State::Fresh;
  Block delta_;
  std::vector<Block> input_zero_;
  BitVector decode_;
  std::unique_ptr<OtExtSender> ot_;
  SessionReport report_;
};

/// Client side; online() returns the decoded output bits.
class EvaluatorSession {
 public:
  EvaluatorSession(const CompiledSpn& compiled, Transport& transport, SessionConfig cfg);
  ~EvaluatorSession();

  void setup();
  BitVector online(const BitVector& client_bits);
  const SessionReport& report() const { return report_; }
  const Channel& channel() const { return channel_; }

 private:
  enum class State { Fresh, Ready, Done };
  const CompiledSpn& compiled_;
  Channel channel_;
  SessionConfig cfg_;
  AesPrg prg_;
  State state_ = State::Fresh;
  std::vector<std::uint8_t> tables_;
  std::unique_ptr<OtExtReceiver> ot_;
  SessionReport report_;
};

/// Full setup + online on one transport. Errors are reported to the peer
/// with an ERROR frame before they propagate.
SessionReport run_garbler(const CompiledSpn& compiled, const BitVector& server_bits, Transport& transport,
                          const SessionConfig& cfg);

struct EvaluatorResult {
  double log2_prob = 0.0;
  BitVector output_bits;
  SessionReport report;
};
EvaluatorResult run_evaluator(const CompiledSpn& compiled, const BitVector& client_bits, Transport& transport,
                              const SessionConfig& cfg);

}  // namespace cryptospn
