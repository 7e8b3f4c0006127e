#include "cryptospn/spn/json_io.hpp"

#include <sodium.h>

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "cryptospn/errors.hpp"
#include "cryptospn/spn/validate.hpp"

namespace cryptospn {
namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + " must be an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + " is missing \"" + key + "\"");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw InputError(where + " must be a number");
  return v.get<double>();
}

std::uint64_t index(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw InputError(where + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

LeafDist parse_params(const json& params, LeafFamily family, const std::string& where) {
  switch (family) {
    case LeafFamily::Gaussian:
      return Gaussian{number(field(params, "mu", where), where + ".mu"), number(field(params, "sigma2", where), where + ".sigma2")};
    case LeafFamily::Poisson:
      return Poisson{number(field(params, "lambda", where), where + ".lambda")};
    case LeafFamily::Bernoulli:
      return Bernoulli{number(field(params, "p", where), where + ".p")};
  }
  throw InputError(where + ": unknown family");
}

json params_json(const LeafDist& dist) {
  json p = json::object();
  if (const auto* g = std::get_if<Gaussian>(&dist)) {
    p["mu"] = g->mu;
    p["sigma2"] = g->sigma2;
  } else if (const auto* q = std::get_if<Poisson>(&dist)) {
    p["lambda"] = q->lambda;
  } else {
    p["p"] = std::get<Bernoulli>(dist).p;
  }
  return p;
}

}  // namespace

SpnGraph parse_spn(const std::string& text, bool check) {
  const json doc = parse_document(text);
  const std::uint64_t num_rvs = index(field(doc, "num_rvs", "document"), "num_rvs");
  const json& fam = field(doc, "leaf_family", "document");
  if (!fam.is_string()) throw InputError("leaf_family must be a string");
  const LeafFamily family = leaf_family_from_tag(fam.get<std::string>());
  const json& nodes = field(doc, "nodes", "document");
  if (!nodes.is_array()) throw InputError("nodes must be an array");

  std::unordered_map<std::uint64_t, std::uint32_t> id_to_index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const std::uint64_t id = index(field(nodes[i], "id", where), where + ".id");
    if (!id_to_index.emplace(id, static_cast<std::uint32_t>(i)).second) {
      throw InputError(where + ": duplicate node id " + std::to_string(id));
    }
  }
  const auto resolve = [&](std::uint64_t id, const std::string& where) {
    const auto it = id_to_index.find(id);
    if (it == id_to_index.end()) throw DomainError(where + ": dangling reference to node id " + std::to_string(id));
    return it->second;
  };

  std::vector<Node> out;
  out.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const json& n = nodes[i];
    const json& type = field(n, "type", where);
    if (!type.is_string()) throw InputError(where + ".type must be a string");
    const std::string t = type.get<std::string>();
    if (t == "leaf") {
      const std::uint64_t rv = index(field(n, "rv", where), where + ".rv");
      if (rv > 0xFFFFFFFFULL) throw DomainError(where + ".rv out of range");
      out.push_back(Node::leaf(static_cast<std::uint32_t>(rv), parse_params(field(n, "params", where), family, where + ".params")));
      continue;
    }
    if (t != "sum" && t != "prod") throw InputError(where + ".type must be sum, prod or leaf");
    const json& ch = field(n, "children", where);
    if (!ch.is_array()) throw InputError(where + ".children must be an array");
    std::vector<std::uint32_t> children;
    for (std::size_t k = 0; k < ch.size(); ++k) {
      children.push_back(resolve(index(ch[k], where + ".children"), where + ".children[" + std::to_string(k) + "]"));
    }
    if (t == "prod") {
      out.push_back(Node::product(std::move(children)));
      continue;
    }
    const json& ws = field(n, "weights", where);
    if (!ws.is_array()) throw InputError(where + ".weights must be an array");
    std::vector<double> weights;
    for (const auto& w : ws) weights.push_back(number(w, where + ".weights"));
    out.push_back(Node::sum(std::move(children), std::move(weights)));
  }
  const std::uint32_t root = resolve(index(field(doc, "root", "document"), "root"), "root");
  json meta = json::object();
  if (doc.contains("meta")) {
    meta = doc.at("meta");
    if (!meta.is_object()) throw InputError("meta must be an object");
  }
  if (num_rvs > 0xFFFFFFFFULL) throw DomainError("num_rvs out of range");
  SpnGraph spn(static_cast<std::uint32_t>(num_rvs), std::move(out), root, std::move(meta));
  if (spn.family() != family) throw DomainError("leaf parameters do not match leaf_family");
  if (check) require_valid(spn);
  return spn;
}

std::string serialize_spn(const SpnGraph& spn) {
  json doc = json::object();
  doc["num_rvs"] = spn.num_rvs();
  doc["leaf_family"] = family_tag(spn.family());
  json nodes = json::array();
  for (std::uint32_t i = 0; i < spn.size(); ++i) {
    const Node& n = spn.node(i);
    json j = json::object();
    j["id"] = i;
    j["type"] = to_string(n.type);
    if (n.type == NodeType::Leaf) {
      j["rv"] = n.rv;
      j["params"] = params_json(n.dist);
    } else {
      j["children"] = n.children;
      if (n.type == NodeType::Sum) j["weights"] = n.weights;
    }
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  doc["root"] = spn.root();
  doc["meta"] = spn.meta();
  return doc.dump(1) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

SpnGraph load_spn(const std::filesystem::path& path, bool check) { return parse_spn(read_text_file(path), check); }

void save_spn(const std::filesystem::path& path, const SpnGraph& spn) { write_text_file(path, serialize_spn(spn)); }

std::string sha256_hex(const std::string& data) {
  unsigned char h[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(h, reinterpret_cast<const unsigned char*>(data.data()), data.size());
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : h) {
    out.push_back(hex[c >> 4]);
    out.push_back(hex[c & 15]);
  }
  return out;
}

std::string spn_digest(const SpnGraph& spn) { return sha256_hex(serialize_spn(spn)); }

Evidence parse_evidence(const std::string& text) {
  const json doc = parse_document(text);
  const json& values = field(doc, "values", "evidence");
  if (!values.is_array()) throw InputError("evidence values must be an array");
  Evidence ev;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].is_null()) {
      ev.values.emplace_back(std::nullopt);
    } else {
      ev.values.emplace_back(number(values[i], "values[" + std::to_string(i) + "]"));
    }
  }
  return ev;
}

std::string serialize_evidence(const Evidence& ev) {
  json values = json::array();
  for (const auto& v : ev.values) values.push_back(v ? json(*v) : json(nullptr));
  return json{{"values", values}}.dump() + "\n";
}

Evidence load_evidence(const std::filesystem::path& path) { return parse_evidence(read_text_file(path)); }

}  // namespace cryptospn
