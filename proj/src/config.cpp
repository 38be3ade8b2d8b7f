#include "bcqq/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bcqq::config {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view key) {
    if (key.empty()) return false;
    for (char c : key) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
        if (!ok) return false;
    }
    return true;
}

[[noreturn]] void fail_line(int line, const std::string& what) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

}  // namespace

KvMap parse_text(std::string_view text) {
    KvMap kv;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) fail_line(line_no, "expected key=value, got '" + std::string(line) + "'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!valid_key(key)) fail_line(line_no, "invalid key '" + key + "'");
        if (value.empty()) fail_line(line_no, "empty value for key '" + key + "'");
        if (kv.count(key)) fail_line(line_no, "duplicate key '" + key + "'");
        kv.emplace(key, value);
    }
    return kv;
}

KvMap parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

std::string canonical_text(const KvMap& kv) {
    std::string out;
    for (const auto& [key, value] : kv) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string spec_hash(const KvMap& kv) {
    const std::uint64_t h = fnv1a64(canonical_text(kv));
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) out[15 - i] = digits[(h >> (4 * i)) & 0xf];
    return out;
}

std::string get_string(const KvMap& kv, const std::string& key, std::string fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? std::move(fallback) : it->second;
}

double get_double(const KvMap& kv, const std::string& key, double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string& s = it->second;
    double value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + s + "' as a number");
    return value;
}

std::int64_t get_int(const KvMap& kv, const std::string& key, std::int64_t fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string& s = it->second;
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + s + "' as an integer");
    return value;
}

bool get_on_off(const KvMap& kv, const std::string& key, bool fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if (it->second == "on") return true;
    if (it->second == "off") return false;
    throw std::invalid_argument("config key '" + key + "': expected on|off, got '" + it->second + "'");
}

void require_known_keys(const KvMap& kv, const std::map<std::string, int>& allowed) {
    std::string unknown;
    for (const auto& [key, value] : kv) {
        if (allowed.count(key)) continue;
        if (!unknown.empty()) unknown += ", ";
        unknown += key;
    }
    if (!unknown.empty()) throw std::invalid_argument("unknown config keys: " + unknown);
}

}  // namespace bcqq::config
