#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bcqq/rng.hpp"

namespace bcqq::data {

// Observations are stored normalized (every component in [-pi, pi]).
// done: 0 = episode continues, 1 = terminated, 2 = truncated. Targets
// bootstrap from the successor state unless done == 1.
struct Transition {
    std::array<double, 4> s{};
    std::uint32_t action = 0;
    double reward = 0.0;
    std::array<double, 4> sp{};
    std::uint8_t done = 0;
};

struct Buffer {
    std::map<std::string, std::string> metadata;
    std::vector<Transition> items;

    std::size_t size() const { return items.size(); }
};

// Binary container: "BCQB", u32 version, u32 metadata length, metadata as
// newline-separated key=value text, u64 record count, then fixed 77-byte
// little-endian records.
void save_buffer(const Buffer& buf, const std::string& path);
Buffer load_buffer(const std::string& path);

// Header: s0,s1,s2,s3,a,r,sp0,sp1,sp2,sp3,done. Doubles use shortest
// round-trip formatting.
void export_buffer_csv(const Buffer& buf, const std::string& path);

// Normalized observation in, action out.
using PolicyFn = std::function<int(const std::array<double, 4>&, Rng&)>;

// Runs episodes until `count` transitions are recorded, resetting the
// environment whenever an episode ends. The final episode may be cut off
// mid-flight; its last stored transition keeps done = 0. Observations are
// normalized before both the policy call and storage, and the
// normalization bounds are recorded under the metadata key "norm_bounds".
Buffer collect_transitions(std::size_t count, const PolicyFn& policy, Rng& rng,
                           std::map<std::string, std::string> metadata);

// The clip bounds behind env::normalize, as comma-separated text. Stored in
// buffer metadata; trainers refuse buffers whose recorded bounds differ.
std::string norm_bounds_csv();

// Uniform with replacement.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t batch, Rng& rng);

// Shortest round-trip decimal representation, used by every CSV writer.
std::string format_double(double v);

} // namespace bcqq::data
