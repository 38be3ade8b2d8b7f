#include "bcqq/data.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "bcqq/bytesio.hpp"
#include "bcqq/env.hpp"

namespace bcqq::data {

namespace {

constexpr char kMagic[4] = {'B', 'C', 'Q', 'B'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kRecordBytes = 77;

std::string encode_metadata(const std::map<std::string, std::string>& meta) {
    std::string out;
    for (const auto& [k, v] : meta) {
        if (k.empty() || k.find('=') != std::string::npos || k.find('\n') != std::string::npos)
            throw std::invalid_argument("metadata key must be nonempty and free of '=' and newlines");
        if (v.find('\n') != std::string::npos)
            throw std::invalid_argument("metadata value must not contain newlines");
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::map<std::string, std::string> decode_metadata(const std::string& text) {
    std::map<std::string, std::string> meta;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos)
            throw std::runtime_error("buffer parse error: metadata line missing newline");
        const std::string line = text.substr(start, nl - start);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::runtime_error("buffer parse error: malformed metadata line '" + line + "'");
        meta[line.substr(0, eq)] = line.substr(eq + 1);
        start = nl + 1;
    }
    return meta;
}

} // namespace

void save_buffer(const Buffer& buf, const std::string& path) {
    std::string out;
    const std::string meta = encode_metadata(buf.metadata);
    out.reserve(20 + meta.size() + buf.items.size() * kRecordBytes);
    out.append(kMagic, 4);
    bytesio::put_u32(out, kVersion);
    bytesio::put_u32(out, static_cast<std::uint32_t>(meta.size()));
    out += meta;
    bytesio::put_u64(out, static_cast<std::uint64_t>(buf.items.size()));
    for (const auto& t : buf.items) {
        for (double v : t.s) bytesio::put_f64(out, v);
        bytesio::put_u32(out, t.action);
        bytesio::put_f64(out, t.reward);
        for (double v : t.sp) bytesio::put_f64(out, v);
        out.push_back(static_cast<char>(t.done));
    }
    bytesio::write_file(path, out);
}

Buffer load_buffer(const std::string& path) {
    const std::string raw = bytesio::read_file(path);
    bytesio::Reader r{raw};
    r.need(4, "magic");
    if (std::memcmp(raw.data(), kMagic, 4) != 0)
        throw std::runtime_error("buffer parse error at offset 0: bad magic, not a transition buffer");
    r.pos = 4;
    const std::uint32_t version = r.read_u32("version");
    if (version != kVersion)
        throw std::runtime_error("buffer parse error at offset 4: unsupported version " +
                                 std::to_string(version));
    const std::uint32_t meta_len = r.read_u32("metadata length");
    Buffer buf;
    buf.metadata = decode_metadata(r.read_bytes(meta_len, "metadata"));
    const std::uint64_t count = r.read_u64("record count");
    if (count > (raw.size() - r.pos) / kRecordBytes)
        throw std::runtime_error("buffer parse error at offset " + std::to_string(r.pos - 8) +
                                 ": record count exceeds file size");
    buf.items.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Transition t;
        for (auto& v : t.s) v = r.read_f64("state");
        t.action = r.read_u32("action");
        t.reward = r.read_f64("reward");
        for (auto& v : t.sp) v = r.read_f64("next state");
        t.done = r.read_u8("done flag");
        if (t.done > 2)
            throw std::runtime_error("buffer parse error at offset " + std::to_string(r.pos - 1) +
                                     ": done flag must be 0, 1, or 2");
        buf.items.push_back(t);
    }
    if (r.pos != raw.size())
        throw std::runtime_error("buffer parse error at offset " + std::to_string(r.pos) +
                                 ": trailing bytes after last record");
    return buf;
}

void export_buffer_csv(const Buffer& buf, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "s0,s1,s2,s3,a,r,sp0,sp1,sp2,sp3,done\n";
    for (const auto& t : buf.items) {
        for (double v : t.s) f << format_double(v) << ',';
        f << t.action << ',' << format_double(t.reward) << ',';
        for (double v : t.sp) f << format_double(v) << ',';
        f << static_cast<int>(t.done) << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

Buffer collect_transitions(std::size_t count, const PolicyFn& policy, Rng& rng,
                           std::map<std::string, std::string> metadata) {
    Buffer out;
    out.metadata = std::move(metadata);
    out.metadata["norm_bounds"] = norm_bounds_csv();
    out.metadata["env"] = "cartpole-v1";
    out.metadata["size"] = std::to_string(count);
    out.items.reserve(count);
    env::CartPole cart;
    env::State s = cart.reset(rng);
    while (out.items.size() < count) {
        const std::array<double, 4> ns = env::normalize(s);
        const int a = policy(ns, rng);
        const env::StepResult res = cart.step(a);
        Transition t;
        t.s = ns;
        t.action = static_cast<std::uint32_t>(a);
        t.reward = res.reward;
        t.sp = env::normalize(res.state);
        t.done = res.terminated ? 1 : (res.truncated ? 2 : 0);
        out.items.push_back(t);
        s = res.done() ? cart.reset(rng) : res.state;
    }
    return out;
}

std::string norm_bounds_csv() {
    return format_double(env::CartPole::kXThreshold) + ",3," +
           format_double(env::CartPole::kThetaThreshold) + ",3";
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t batch, Rng& rng) {
    if (n == 0) throw std::invalid_argument("cannot sample from an empty buffer");
    std::vector<std::size_t> idx(batch);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
    return idx;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace bcqq::data
