#pragma once

#include <array>
#include <span>
#include <vector>

#include "bcqq/rng.hpp"

namespace bcqq::mlp {

// Two-hidden-layer ReLU network with a linear head. Parameters live in one
// flat vector laid out [W1, b1, W2, b2, W3, b3], each W row-major with one
// row per output unit.
class Mlp {
  public:
    Mlp(int in, int hidden, int out);

    // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
    static Mlp glorot(int in, int hidden, int out, Rng& rng);

    std::size_t param_count() const { return p_.size(); }
    int in_dim() const { return in_; }
    int hidden_dim() const { return hidden_; }
    int out_dim() const { return out_; }

    std::span<double> params() { return p_; }
    std::span<const double> params() const { return p_; }

    std::vector<double> forward(std::span<const double> x) const;
    std::array<double, 2> forward2(const std::array<double, 4>& x) const;

    // Adds this sample's parameter gradient, given d loss / d output, into
    // `grad` (same layout and length as params()).
    void accumulate_grad(std::span<const double> x, std::span<const double> dy,
                         std::span<double> grad) const;

  private:
    int in_;
    int hidden_;
    int out_;
    std::vector<double> p_;

    std::size_t w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0, w3_ = 0, b3_ = 0;
};

// Checkpoint: "BCQN" magic, version, layer sizes, then the flat parameter
// vector as little-endian doubles.
void save_mlp(const Mlp& net, const std::string& path);
Mlp load_mlp(const std::string& path);

} // namespace bcqq::mlp
