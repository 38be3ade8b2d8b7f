#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace bcqq::config {

// Key-value experiment spec text. Grammar: one `key = value` per line,
// `#` starts a comment, blank lines ignored. Keys are [A-Za-z0-9_.-]+.
// Duplicate keys are an error so a spec file has exactly one reading.
using KvMap = std::map<std::string, std::string>;

KvMap parse_text(std::string_view text);
KvMap parse_file(const std::string& path);

// Sorted `key=value` lines joined by '\n'. Two specs that resolve to the
// same settings produce the same canonical text and therefore the same hash.
std::string canonical_text(const KvMap& kv);

std::uint64_t fnv1a64(std::string_view bytes);

// 16 lowercase hex digits over canonical_text(kv).
std::string spec_hash(const KvMap& kv);

// Typed lookups. Missing key returns the fallback; a present key that fails
// to parse throws std::invalid_argument naming the key and the bad value.
std::string get_string(const KvMap& kv, const std::string& key, std::string fallback);
double get_double(const KvMap& kv, const std::string& key, double fallback);
std::int64_t get_int(const KvMap& kv, const std::string& key, std::int64_t fallback);
bool get_on_off(const KvMap& kv, const std::string& key, bool fallback);

// Throws std::invalid_argument listing every key of `kv` not present in
// `allowed` (comma-separated in the message), so typos never pass silently.
void require_known_keys(const KvMap& kv, const std::map<std::string, int>& allowed);

}  // namespace bcqq::config
