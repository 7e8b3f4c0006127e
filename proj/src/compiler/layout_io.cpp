#include "cryptospn/compiler/layout_io.hpp"

#include "cryptospn/circuit/serialize.hpp"
#include "cryptospn/errors.hpp"
#include "cryptospn/spn/json_io.hpp"

namespace cryptospn {
namespace {

constexpr const char* kLayoutFormat = "cryptospn-layout";
constexpr int kLayoutVersion = 1;

nlohmann::json layout_json(const InputLayout& layout) {
  auto arr = nlohmann::json::array();
  for (const auto& e : layout.entries) {
    arr.push_back({{"name", e.name}, {"offset", e.offset}, {"width", e.width}, {"tag", to_string(e.tag)}});
  }
  return arr;
}

InputLayout layout_from(const nlohmann::json& arr) {
  if (!arr.is_array()) throw InputError("layout must be an array");
  InputLayout layout;
  for (const auto& e : arr) {
    layout.entries.push_back(LayoutEntry{e.at("name").get<std::string>(), e.at("offset").get<std::uint64_t>(),
                                         e.at("width").get<std::uint32_t>(),
                                         input_tag_from_string(e.at("tag").get<std::string>())});
  }
  return layout;
}

}  // namespace

nlohmann::json layout_to_json(const CompiledSpn& c) {
  return {{"format", kLayoutFormat},
          {"version", kLayoutVersion},
          {"precision", c.precision.bits()},
          {"hide_scope", c.hide_scope},
          {"marginals", c.marginals},
          {"spn_digest", c.spn_digest},
          {"num_rvs", c.num_rvs},
          {"leaf_family", family_tag(c.family)},
          {"num_leaves", c.num_leaves},
          {"selection", {{"switches", c.selection_switches}, {"width", c.selection_width}}},
          {"client_layout", layout_json(c.client_layout)},
          {"server_layout", layout_json(c.server_layout)}};
}

void layout_from_json(const nlohmann::json& j, CompiledSpn& c) {
  try {
    if (j.at("format").get<std::string>() != kLayoutFormat) throw InputError("not a cryptospn layout file");
    if (j.at("version").get<int>() != kLayoutVersion) {
      throw InputError("unsupported layout version " + std::to_string(j.at("version").get<int>()));
    }
    try {
      c.precision = FloatFormat::from_bits(j.at("precision").get<int>());
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    c.hide_scope = j.at("hide_scope").get<bool>();
    c.marginals = j.at("marginals").get<bool>();
    c.spn_digest = j.at("spn_digest").get<std::string>();
    c.num_rvs = j.at("num_rvs").get<std::uint32_t>();
    c.family = leaf_family_from_tag(j.at("leaf_family").get<std::string>());
    c.num_leaves = j.at("num_leaves").get<std::uint32_t>();
    c.selection_switches = j.at("selection").at("switches").get<std::uint64_t>();
    c.selection_width = j.at("selection").at("width").get<std::uint32_t>();
    c.client_layout = layout_from(j.at("client_layout"));
    c.server_layout = layout_from(j.at("server_layout"));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed layout: ") + e.what());
  }
}

std::filesystem::path layout_path(const std::filesystem::path& circuit_path) {
  return std::filesystem::path(circuit_path.string() + ".layout.json");
}

void save_compiled(const std::filesystem::path& circuit_path, const CompiledSpn& compiled) {
  save_circuit(circuit_path, compiled.circuit);
  write_text_file(layout_path(circuit_path), layout_to_json(compiled).dump(2) + "\n");
}

CompiledSpn load_compiled(const std::filesystem::path& circuit_path) {
  CompiledSpn c;
  c.circuit = load_circuit(circuit_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(layout_path(circuit_path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("layout is not valid JSON: ") + e.what());
  }
  layout_from_json(j, c);
  try {
    c.check();
  } catch (const DomainError& e) {
    throw InputError(std::string("circuit and layout disagree: ") + e.what());
  }
  return c;
}

}  // namespace cryptospn
