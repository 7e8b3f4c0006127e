#include "cryptospn/circuit/serialize.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace cryptospn {
namespace {

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void fixed(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      u8(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    u8(static_cast<std::uint8_t>(v));
  }
  void string(const std::string& s) {
    varint(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint8_t u8() {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof()) throw FormatError("circuit file truncated");
    return static_cast<std::uint8_t>(c);
  }
  std::uint64_t fixed(int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const std::uint8_t byte = u8();
      v |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
      if ((byte & 0x80) == 0) return v;
    }
    throw FormatError("malformed varint");
  }
  std::uint32_t u32_varint() {
    const std::uint64_t v = varint();
    if (v > 0xFFFFFFFFULL) throw FormatError("wire id out of range");
    return static_cast<std::uint32_t>(v);
  }
  std::string string() {
    const std::uint64_t n = varint();
    if (n > (1U << 20)) throw FormatError("name too long");
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::uint64_t>(in_.gcount()) != n) throw FormatError("circuit file truncated");
    return s;
  }

 private:
  std::istream& in_;
};

constexpr std::array<char, 4> kMagic{'C', 'S', 'P', 'N'};

}  // namespace

void write_circuit(std::ostream& out, const Circuit& c) {
  Writer w(out);
  for (char ch : kMagic) w.u8(static_cast<std::uint8_t>(ch));
  w.fixed(kCircuitFormatVersion, 2);
  w.u8(static_cast<std::uint8_t>(c.precision.bits()));
  w.fixed(c.num_gates(), 8);
  for (std::size_t g = 0; g < c.num_gates(); ++g) {
    w.u8(static_cast<std::uint8_t>(c.kinds[g]));
    switch (c.kinds[g]) {
      case GateKind::Xor:
      case GateKind::And:
        w.varint(c.lhs[g]);
        w.varint(c.rhs[g]);
        break;
      case GateKind::Inv:
      case GateKind::Const:
        w.varint(c.lhs[g]);
        break;
    }
  }
  w.varint(c.input_groups.size());
  for (const auto& g : c.input_groups) {
    w.string(g.name);
    w.u8(static_cast<std::uint8_t>(g.party));
    w.varint(g.first);
    w.varint(g.width);
  }
  w.varint(c.outputs.size());
  for (const auto& o : c.outputs) {
    w.string(o.name);
    w.varint(o.wires.size());
    for (Wire x : o.wires) w.varint(x);
  }
  if (!out) throw std::runtime_error("failed to write circuit");
}

Circuit read_circuit(std::istream& in) {
  Reader r(in);
  for (char ch : kMagic) {
    if (r.u8() != static_cast<std::uint8_t>(ch)) throw FormatError("not a circuit file (bad magic)");
  }
  const auto version = r.fixed(2);
  if (version != kCircuitFormatVersion) throw FormatError("unsupported circuit format version " + std::to_string(version));
  Circuit c;
  const auto bits = r.u8();
  if (bits != 32 && bits != 64) throw FormatError("unsupported precision " + std::to_string(bits));
  c.precision = FloatFormat::from_bits(bits);
  const std::uint64_t gates = r.fixed(8);
  if (gates > 0xFFFFFFFFULL) throw FormatError("gate count too large");
  c.kinds.reserve(gates);
  c.lhs.reserve(gates);
  c.rhs.reserve(gates);
  for (std::uint64_t g = 0; g < gates; ++g) {
    const auto kind = r.u8();
    if (kind > static_cast<std::uint8_t>(GateKind::Const)) throw FormatError("unknown gate kind");
    c.kinds.push_back(static_cast<GateKind>(kind));
    c.lhs.push_back(r.u32_varint());
    const bool binary = kind == static_cast<std::uint8_t>(GateKind::Xor) || kind == static_cast<std::uint8_t>(GateKind::And);
    c.rhs.push_back(binary ? r.u32_varint() : 0);
  }
  const std::uint64_t groups = r.varint();
  for (std::uint64_t i = 0; i < groups; ++i) {
    InputGroup g;
    g.name = r.string();
    const auto party = r.u8();
    if (party > 1) throw FormatError("unknown party tag");
    g.party = static_cast<Party>(party);
    g.first = r.u32_varint();
    g.width = r.u32_varint();
    c.num_inputs += g.width;
    c.input_groups.push_back(std::move(g));
  }
  const std::uint64_t outputs = r.varint();
  for (std::uint64_t i = 0; i < outputs; ++i) {
    OutputGroup o;
    o.name = r.string();
    const std::uint64_t n = r.varint();
    for (std::uint64_t k = 0; k < n; ++k) o.wires.push_back(r.u32_varint());
    c.outputs.push_back(std::move(o));
  }
  try {
    c.check();
  } catch (const std::exception& e) {
    throw FormatError(std::string("invalid circuit: ") + e.what());
  }
  return c;
}

void save_circuit(const std::filesystem::path& path, const Circuit& circuit) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_circuit(out, circuit);
}

Circuit load_circuit(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return read_circuit(in);
}

}  // namespace cryptospn
