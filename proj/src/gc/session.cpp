#include "cryptospn/gc/session.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include "cryptospn/errors.hpp"
#include "cryptospn/gc/garble.hpp"

namespace cryptospn {
namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void put_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
  v.push_back(static_cast<std::uint8_t>(x >> 8));
  v.push_back(static_cast<std::uint8_t>(x));
}

void put_u64(std::vector<std::uint8_t>& v, std::uint64_t x) {
  for (int i = 7; i >= 0; --i) v.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

std::vector<std::uint8_t> hello_payload(std::uint32_t kappa) {
  std::vector<std::uint8_t> v;
  put_u16(v, kProtocolVersion);
  put_u16(v, static_cast<std::uint16_t>(kappa));
  return v;
}

std::vector<std::uint8_t> digest_bytes(const std::string& hex) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoul(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

std::vector<std::uint8_t> meta_payload(const CompiledSpn& c, std::uint64_t and_count) {
  std::vector<std::uint8_t> v = digest_bytes(c.spn_digest);
  v.push_back(static_cast<std::uint8_t>(c.precision.bits()));
  v.push_back(static_cast<std::uint8_t>((c.hide_scope ? 1 : 0) | (c.marginals ? 2 : 0)));
  put_u64(v, and_count);
  put_u64(v, c.client_layout.total_bits());
  put_u64(v, c.server_layout.total_bits());
  return v;
}

void check_kappa(const SessionConfig& cfg) {
  if (cfg.kappa != kKappa) throw DomainError("kappa must be 128, got " + std::to_string(cfg.kappa));
}

void exchange_hello(Channel& ch, const SessionConfig& cfg, bool first) {
  const auto mine = hello_payload(cfg.kappa);
  if (first) ch.send(MessageType::Hello, mine);
  const auto theirs = ch.recv(MessageType::Hello);
  if (theirs != mine) {
    ch.send_error("protocol version or kappa mismatch");
    throw ProtocolError("peer uses a different protocol version or kappa");
  }
  if (!first) ch.send(MessageType::Hello, mine);
}

void exchange_meta(Channel& ch, const std::vector<std::uint8_t>& mine, bool first) {
  if (first) ch.send(MessageType::Meta, mine);
  const auto theirs = ch.recv(MessageType::Meta);
  if (theirs != mine) {
    ch.send_error("spn digest or circuit parameters do not match");
    throw ProtocolError("peer's spn digest or circuit parameters do not match");
  }
  if (!first) ch.send(MessageType::Meta, mine);
}

SessionReport base_report(Role role, const CompiledSpn& c, std::uint64_t and_count) {
  SessionReport r;
  r.role = role;
  r.spn_digest = c.spn_digest;
  r.precision = c.precision.bits();
  r.and_count = and_count;
  r.client_input_bits = c.client_layout.total_bits();
  r.server_input_bits = c.server_layout.total_bits();
  r.ot = ot_extension_sizes(r.client_input_bits);
  return r;
}

std::uint64_t count_ands(const Circuit& c) {
  std::uint64_t k = 0;
  for (auto g : c.kinds) k += g == GateKind::And;
  return k;
}

template <typename F>
auto guarded(Channel& ch, F&& f) {
  try {
    return f();
  } catch (const ProtocolError&) {
    throw;
  } catch (const std::exception& e) {
    ch.send_error(e.what());
    throw;
  }
}

}  // namespace

const char* to_string(Role role) { return role == Role::Garbler ? "garbler" : "evaluator"; }

std::uint64_t SessionReport::setup_payload_bytes() const {
  const auto& t = setup.traffic;
  return t.payload(MessageType::GcChunk) + t.payload(MessageType::BaseOtMsg) + t.payload(MessageType::OtextSetup);
}

std::uint64_t SessionReport::online_payload_bytes() const {
  const auto& t = online.traffic;
  return t.payload(MessageType::OtextOnline) + t.payload(MessageType::GarblerLabels) +
         t.payload(MessageType::DecodeTable);
}

std::uint64_t SessionReport::control_bytes() const {
  std::uint64_t k = 0;
  for (const auto* t : {&setup.traffic, &online.traffic}) {
    k += t->payload(MessageType::Hello) + t->payload(MessageType::Meta) + t->payload(MessageType::ResultAck) +
         t->payload(MessageType::Error);
  }
  return k;
}

nlohmann::json SessionReport::to_json() const {
  auto phase = [](const PhaseReport& p) {
    nlohmann::json per_type = nlohmann::json::object();
    for (std::size_t i = 1; i < kMessageTypeCount; ++i) {
      const auto t = static_cast<MessageType>(i);
      if (p.traffic.payload(t) > 0) per_type[to_string(t)] = p.traffic.payload(t);
    }
    return nlohmann::json{{"seconds", p.seconds},
                          {"payload_bytes", p.traffic.payload_total()},
                          {"framing_bytes", p.traffic.framing_total()},
                          {"frames", p.traffic.frames_sent + p.traffic.frames_received},
                          {"by_type", per_type}};
  };
  return {{"role", to_string(role)},
          {"spn_digest", spn_digest},
          {"precision", precision},
          {"and_gates", and_count},
          {"client_input_bits", client_input_bits},
          {"server_input_bits", server_input_bits},
          {"garbled_table_bytes", garbled_table_bytes()},
          {"garbler_label_bytes", garbler_label_bytes()},
          {"setup_payload_bytes", setup_payload_bytes()},
          {"online_payload_bytes", online_payload_bytes()},
          {"control_bytes", control_bytes()},
          {"framing_bytes", framing_bytes()},
          {"ot_setup_padding_bits", ot.setup_padding_bits},
          {"ot_online_padding_bits", ot.online_padding_bits},
          {"setup", phase(setup)},
          {"online", phase(online)}};
}

std::string SessionReport::to_table() const {
  std::ostringstream os;
  os << "session (" << to_string(role) << ")  precision b" << precision << "  AND gates " << and_count << "\n";
  os << "  " << std::left << std::setw(16) << "phase" << std::setw(16) << "message" << std::right << std::setw(14)
     << "payload B" << "\n";
  for (const auto* p : {&setup, &online}) {
    const Phase ph = p == &setup ? Phase::Setup : Phase::Online;
    for (std::size_t i = 1; i < kMessageTypeCount; ++i) {
      const auto t = static_cast<MessageType>(i);
      if (p->traffic.payload(t) == 0) continue;
      os << "  " << std::left << std::setw(16) << to_string(ph) << std::setw(16) << to_string(t) << std::right
         << std::setw(14) << p->traffic.payload(t) << "\n";
    }
    os << "  " << std::left << std::setw(16) << to_string(ph) << std::setw(16) << "(framing)" << std::right
       << std::setw(14) << p->traffic.framing_total() << "\n";
  }
  os << std::fixed << std::setprecision(3) << "  setup " << setup.seconds << " s, online " << online.seconds
     << " s\n";
  return os.str();
}

GarblerSession::GarblerSession(const CompiledSpn& compiled, Transport& transport, SessionConfig cfg)
    : compiled_(compiled),
      channel_(transport),
      cfg_(cfg),
      prg_(cfg.seed ? AesPrg::from_u64(*cfg.seed, 1) : AesPrg::random()) {
  check_kappa(cfg_);
}

GarblerSession::~GarblerSession() = default;

Block GarblerSession::input_label(Wire w, bool value) const {
  return value ? _mm_xor_si128(input_zero_[w], delta_) : input_zero_[w];
}

void GarblerSession::setup() {
  if (state_ != State::Fresh) throw ProtocolError("setup already ran");
  const auto t0 = Clock::now();
  const Circuit& c = compiled_.circuit;
  const std::uint64_t ands = count_ands(c);
  report_ = base_report(Role::Garbler, compiled_, ands);
  channel_.set_phase(Phase::Setup);
  guarded(channel_, [&] {
    exchange_hello(channel_, cfg_, true);
    exchange_meta(channel_, meta_payload(compiled_, ands), true);
    {
      Garbler g(c, prg_);
      g.garble([&](const std::uint8_t* p, std::size_t n) { channel_.send(MessageType::GcChunk, std::span(p, n)); },
               cfg_.chunk_bytes);
      delta_ = g.delta();
      input_zero_.resize(c.num_inputs);
      for (Wire i = 0; i < c.num_inputs; ++i) input_zero_[i] = g.zero_label(i);
      decode_ = g.decode_table();
    }
    ot_ = std::make_unique<OtExtSender>(prg_);
    ot_->setup(channel_, compiled_.client_layout.total_bits());
    return 0;
  });
  state_ = State::Ready;
  report_.setup.traffic = channel_.counters(Phase::Setup);
  report_.setup.seconds = since(t0);
}

void GarblerSession::online(const BitVector& server_bits) {
  if (state_ == State::Fresh) throw ProtocolError("online phase requires a completed setup");
  if (state_ == State::Done) {
    throw ProtocolError("this garbled circuit was already used; a fresh setup is required per query");
  }
  state_ = State::Done;
  const auto t0 = Clock::now();
  const Circuit& c = compiled_.circuit;
  channel_.set_phase(Phase::Online);
  guarded(channel_, [&] {
    const auto server_wires = party_input_wires(c, Party::Server);
    if (server_bits.size() != server_wires.size()) {
      throw DomainError("server input has " + std::to_string(server_bits.size()) + " bits, layout expects " +
                        std::to_string(server_wires.size()));
    }
    const auto client_wires = party_input_wires(c, Party::Client);
    std::vector<std::array<Block, 2>> pairs(client_wires.size());
    for (std::size_t j = 0; j < client_wires.size(); ++j) {
      pairs[j] = {input_label(client_wires[j], false), input_label(client_wires[j], true)};
    }
    ot_->online(channel_, pairs);
    std::vector<std::uint8_t> labels(server_wires.size() * kLabelBytes);
    for (std::size_t i = 0; i < server_wires.size(); ++i) {
      store_block(labels.data() + i * kLabelBytes, input_label(server_wires[i], server_bits[i]));
    }
    channel_.send(MessageType::GarblerLabels, labels);
    channel_.send(MessageType::DecodeTable, pack_bits(decode_));
    channel_.recv(MessageType::ResultAck);
    return 0;
  });
  report_.online.traffic = channel_.counters(Phase::Online);
  report_.online.seconds = since(t0);
}

EvaluatorSession::EvaluatorSession(const CompiledSpn& compiled, Transport& transport, SessionConfig cfg)
    : compiled_(compiled), channel_(transport), cfg_(cfg), prg_(AesPrg::random()) {
  check_kappa(cfg_);
}

EvaluatorSession::~EvaluatorSession() = default;

void EvaluatorSession::setup() {
  if (state_ != State::Fresh) throw ProtocolError("setup already ran");
  const auto t0 = Clock::now();
  const Circuit& c = compiled_.circuit;
  const std::uint64_t ands = count_ands(c);
  report_ = base_report(Role::Evaluator, compiled_, ands);
  channel_.set_phase(Phase::Setup);
  guarded(channel_, [&] {
    exchange_hello(channel_, cfg_, false);
    exchange_meta(channel_, meta_payload(compiled_, ands), false);
    const std::uint64_t expected = ands * kAndGateBytes;
    tables_.clear();
    tables_.reserve(expected);
    while (tables_.size() < expected) {
      const auto chunk = channel_.recv(MessageType::GcChunk);
      if (chunk.empty() || tables_.size() + chunk.size() > expected) {
        throw ProtocolError("garbled table stream does not match the circuit size");
      }
      tables_.insert(tables_.end(), chunk.begin(), chunk.end());
    }
    ot_ = std::make_unique<OtExtReceiver>(prg_);
    ot_->setup(channel_, compiled_.client_layout.total_bits());
    return 0;
  });
  state_ = State::Ready;
  report_.setup.traffic = channel_.counters(Phase::Setup);
  report_.setup.seconds = since(t0);
}

BitVector EvaluatorSession::online(const BitVector& client_bits) {
  if (state_ == State::Fresh) throw ProtocolError("online phase requires a completed setup");
  if (state_ == State::Done) {
    throw ProtocolError("this garbled circuit was already used; a fresh setup is required per query");
  }
  const Circuit& c = compiled_.circuit;
  const auto client_wires = party_input_wires(c, Party::Client);
  if (client_bits.size() != client_wires.size()) {
    throw DomainError("client input has " + std::to_string(client_bits.size()) + " bits, layout expects " +
                      std::to_string(client_wires.size()));
  }
  state_ = State::Done;
  const auto t0 = Clock::now();
  channel_.set_phase(Phase::Online);
  BitVector out = guarded(channel_, [&] {
    std::vector<Block> inputs(c.num_inputs);
    const auto mine = ot_->online(channel_, client_bits);
    for (std::size_t j = 0; j < client_wires.size(); ++j) inputs[client_wires[j]] = mine[j];
    const auto server_wires = party_input_wires(c, Party::Server);
    const auto labels = channel_.recv(MessageType::GarblerLabels);
    if (labels.size() != server_wires.size() * kLabelBytes) throw ProtocolError("garbler labels have the wrong size");
    for (std::size_t i = 0; i < server_wires.size(); ++i) {
      inputs[server_wires[i]] = load_block(labels.data() + i * kLabelBytes);
    }
    const auto decode = unpack_bits(channel_.recv(MessageType::DecodeTable), c.output_bits());
    const auto outputs = evaluate_garbled(c, tables_, inputs);
    std::vector<std::uint8_t>().swap(tables_);
    BitVector bits = decode_labels(outputs, decode);
    channel_.send(MessageType::ResultAck, {});
    return bits;
  });
  report_.online.traffic = channel_.counters(Phase::Online);
  report_.online.seconds = since(t0);
  return out;
}

SessionReport run_garbler(const CompiledSpn& compiled, const BitVector& server_bits, Transport& transport,
                          const SessionConfig& cfg) {
  GarblerSession s(compiled, transport, cfg);
  s.setup();
  s.online(server_bits);
  return s.report();
}

EvaluatorResult run_evaluator(const CompiledSpn& compiled, const BitVector& client_bits, Transport& transport,
                              const SessionConfig& cfg) {
  if (client_bits.size() != compiled.client_layout.total_bits()) {
    throw DomainError("client input does not match the layout");
  }
  EvaluatorSession s(compiled, transport, cfg);
  s.setup();
  EvaluatorResult r;
  r.output_bits = s.online(client_bits);
  r.log2_prob = decode_output(compiled, r.output_bits);
  r.report = s.report();
  return r;
}

}  // namespace cryptospn
