#include "mixbound/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mixbound/errors.hpp"
#include "mixbound/util.hpp"

namespace mixbound {

namespace {

using nlohmann::json;

json parse_or_throw(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

void check_schema(const json& doc, const char* what) {
  if (!doc.is_object() || !doc.contains("schema_version") ||
      !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != schema_version) {
    throw Error(std::string(what) + ": missing or unsupported schema_version " +
                "(expected " + std::to_string(schema_version) + ")");
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw Error("failed while writing: " + path);
}

std::uint64_t text_digest(const std::string& text) {
  Fnv1a64 hash;
  hash.update_bytes(text.data(), text.size());
  return hash.digest();
}

std::uint64_t file_digest(const std::string& path) {
  return text_digest(read_text_file(path));
}

ReversibleChain chain_from_json(const std::string& text) {
  const json doc = parse_or_throw(text, "chain");
  check_schema(doc, "chain file");
  if (!doc.contains("n") || !doc.contains("pi") || !doc.contains("edges")) {
    throw Error("chain file: need fields n, pi, edges");
  }
  const int n = doc["n"].get<int>();
  const auto& pi_json = doc["pi"];
  if (!pi_json.is_array() || static_cast<int>(pi_json.size()) != n) {
    throw Error("chain file: pi must be an array of n doubles");
  }
  Eigen::VectorXd pi(n);
  for (int i = 0; i < n; ++i) pi[i] = pi_json[i].get<double>();
  std::vector<EdgeSpec> edges;
  for (const auto& e : doc["edges"]) {
    EdgeSpec spec;
    spec.x = e.at("x").get<int>();
    spec.y = e.at("y").get<int>();
    spec.rate_xy = e.at("rate_xy").get<double>();
    spec.rate_yx = e.at("rate_yx").get<double>();
    edges.push_back(spec);
  }
  return build_chain(n, edges, pi);
}

std::string chain_to_json(const ReversibleChain& chain) {
  json doc;
  doc["schema_version"] = schema_version;
  doc["n"] = chain.n();
  json pi = json::array();
  for (int i = 0; i < chain.n(); ++i) pi.push_back(chain.pi()[i]);
  doc["pi"] = pi;
  json edges = json::array();
  for (int e = 0; e < chain.num_edges(); ++e) {
    const EdgeSpec& spec = chain.edge(e);
    json obj;
    obj["x"] = spec.x;
    obj["y"] = spec.y;
    obj["rate_xy"] = spec.rate_xy;
    obj["rate_yx"] = spec.rate_yx;
    edges.push_back(obj);
  }
  doc["edges"] = edges;
  return doc.dump(2) + "\n";
}

ExplicitPathFamily paths_from_json(const std::string& text, int expected_n) {
  const json doc = parse_or_throw(text, "path");
  check_schema(doc, "path file");
  if (!doc.contains("n") || !doc.contains("paths")) {
    throw Error("path file: need fields n, paths");
  }
  const int n = doc["n"].get<int>();
  if (expected_n >= 0 && n != expected_n) {
    throw Error("path file: n = " + std::to_string(n) +
                " does not match the chain's " + std::to_string(expected_n));
  }
  ExplicitPathFamily family(n);
  for (const auto& p : doc["paths"]) {
    const auto& verts = p.at("vertices");
    std::vector<int> vertices;
    for (const auto& v : verts) vertices.push_back(v.get<int>());
    if (!vertices.empty() &&
        (vertices.front() != p.at("x").get<int>() ||
         vertices.back() != p.at("y").get<int>())) {
      throw Error("path file: vertices must run from x to y");
    }
    family.set_path(vertices);
  }
  return family;
}

std::string bound_report_to_json(const BoundReport& report) {
  json doc;
  doc["schema_version"] = schema_version;
  doc["name"] = report.name;
  doc["value"] = report.value;
  doc["log_value"] = report.log_value;
  json params;
  for (const auto& [key, value] : report.parameters) params[key] = value;
  doc["parameters"] = params;
  json prov;
  for (const auto& [key, value] : report.provenance) prov[key] = value;
  doc["provenance"] = prov;
  return doc.dump(2) + "\n";
}

}  // namespace mixbound
