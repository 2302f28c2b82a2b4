#pragma once
// JSON exchange formats and content digests.
//
// Chain file:
//   { "schema_version": 1, "n": <int>, "pi": [..n doubles..],
//     "edges": [ { "x": i, "y": j, "rate_xy": r, "rate_yx": s }, ... ] }
// Path file:
//   { "schema_version": 1, "n": <int>,
//     "paths": [ { "x": i, "y": j, "vertices": [i, ..., j] }, ... ] }
//
// Serialization keeps object keys sorted and shortest-round-trip doubles, so
// identical inputs serialize to identical bytes.

#include <cstdint>
#include <string>

#include "mixbound/chain.hpp"
#include "mixbound/path_bounds.hpp"

namespace mixbound {

inline constexpr int schema_version = 1;

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a over the raw bytes.
std::uint64_t text_digest(const std::string& text);
std::uint64_t file_digest(const std::string& path);

ReversibleChain chain_from_json(const std::string& text);
std::string chain_to_json(const ReversibleChain& chain);

// expected_n >= 0 additionally pins the state count.
ExplicitPathFamily paths_from_json(const std::string& text, int expected_n = -1);

std::string bound_report_to_json(const BoundReport& report);

}  // namespace mixbound
