#include "bcqq/mlp.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "bcqq/bytesio.hpp"

namespace bcqq::mlp {

Mlp::Mlp(int in, int hidden, int out) : in_(in), hidden_(hidden), out_(out) {
    if (in < 1 || hidden < 1 || out < 1)
        throw std::invalid_argument("network dimensions must be positive");
    const std::size_t nin = static_cast<std::size_t>(in);
    const std::size_t nh = static_cast<std::size_t>(hidden);
    const std::size_t nout = static_cast<std::size_t>(out);
    w1_ = 0;
    b1_ = w1_ + nh * nin;
    w2_ = b1_ + nh;
    b2_ = w2_ + nh * nh;
    w3_ = b2_ + nh;
    b3_ = w3_ + nout * nh;
    p_.assign(b3_ + nout, 0.0);
}

Mlp Mlp::glorot(int in, int hidden, int out, Rng& rng) {
    Mlp net(in, hidden, out);
    const auto fill = [&](std::size_t off, std::size_t count, int fan_in, int fan_out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (std::size_t i = 0; i < count; ++i)
            net.p_[off + i] = rng.uniform(-limit, limit);
    };
    const std::size_t nin = static_cast<std::size_t>(in);
    const std::size_t nh = static_cast<std::size_t>(hidden);
    const std::size_t nout = static_cast<std::size_t>(out);
    fill(net.w1_, nh * nin, in, hidden);
    fill(net.w2_, nh * nh, hidden, hidden);
    fill(net.w3_, nout * nh, hidden, out);
    return net;
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != in_)
        throw std::invalid_argument("input dimension mismatch");
    const std::size_t nh = static_cast<std::size_t>(hidden_);
    std::vector<double> h1(nh);
    for (std::size_t j = 0; j < nh; ++j) {
        double acc = p_[b1_ + j];
        for (int i = 0; i < in_; ++i)
            acc += p_[w1_ + j * static_cast<std::size_t>(in_) + static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        h1[j] = acc > 0.0 ? acc : 0.0;
    }
    std::vector<double> h2(nh);
    for (std::size_t j = 0; j < nh; ++j) {
        double acc = p_[b2_ + j];
        for (std::size_t k = 0; k < nh; ++k) acc += p_[w2_ + j * nh + k] * h1[k];
        h2[j] = acc > 0.0 ? acc : 0.0;
    }
    std::vector<double> y(static_cast<std::size_t>(out_));
    for (std::size_t o = 0; o < y.size(); ++o) {
        double acc = p_[b3_ + o];
        for (std::size_t k = 0; k < nh; ++k) acc += p_[w3_ + o * nh + k] * h2[k];
        y[o] = acc;
    }
    return y;
}

std::array<double, 2> Mlp::forward2(const std::array<double, 4>& x) const {
    const auto y = forward(std::span<const double>(x.data(), x.size()));
    if (y.size() != 2) throw std::logic_error("forward2 requires a 2-output network");
    return {y[0], y[1]};
}

void Mlp::accumulate_grad(std::span<const double> x, std::span<const double> dy,
                          std::span<double> grad) const {
    if (static_cast<int>(x.size()) != in_ || static_cast<int>(dy.size()) != out_ ||
        grad.size() != p_.size())
        throw std::invalid_argument("gradient buffer dimension mismatch");
    const std::size_t nh = static_cast<std::size_t>(hidden_);
    const std::size_t nin = static_cast<std::size_t>(in_);

    std::vector<double> pre1(nh), h1(nh), pre2(nh), h2(nh);
    for (std::size_t j = 0; j < nh; ++j) {
        double acc = p_[b1_ + j];
        for (std::size_t i = 0; i < nin; ++i) acc += p_[w1_ + j * nin + i] * x[i];
        pre1[j] = acc;
        h1[j] = acc > 0.0 ? acc : 0.0;
    }
    for (std::size_t j = 0; j < nh; ++j) {
        double acc = p_[b2_ + j];
        for (std::size_t k = 0; k < nh; ++k) acc += p_[w2_ + j * nh + k] * h1[k];
        pre2[j] = acc;
        h2[j] = acc > 0.0 ? acc : 0.0;
    }

    std::vector<double> dh2(nh, 0.0);
    for (std::size_t o = 0; o < static_cast<std::size_t>(out_); ++o) {
        const double g = dy[o];
        grad[b3_ + o] += g;
        for (std::size_t k = 0; k < nh; ++k) {
            grad[w3_ + o * nh + k] += g * h2[k];
            dh2[k] += g * p_[w3_ + o * nh + k];
        }
    }
    std::vector<double> dh1(nh, 0.0);
    for (std::size_t j = 0; j < nh; ++j) {
        if (pre2[j] <= 0.0) continue;
        const double g = dh2[j];
        grad[b2_ + j] += g;
        for (std::size_t k = 0; k < nh; ++k) {
            grad[w2_ + j * nh + k] += g * h1[k];
            dh1[k] += g * p_[w2_ + j * nh + k];
        }
    }
    for (std::size_t j = 0; j < nh; ++j) {
        if (pre1[j] <= 0.0) continue;
        const double g = dh1[j];
        grad[b1_ + j] += g;
        for (std::size_t i = 0; i < nin; ++i) grad[w1_ + j * nin + i] += g * x[i];
    }
}

namespace {
constexpr char kNetMagic[4] = {'B', 'C', 'Q', 'N'};
constexpr std::uint32_t kNetVersion = 1;
} // namespace

void save_mlp(const Mlp& net, const std::string& path) {
    std::string out;
    out.append(kNetMagic, 4);
    bytesio::put_u32(out, kNetVersion);
    bytesio::put_u32(out, static_cast<std::uint32_t>(net.in_dim()));
    bytesio::put_u32(out, static_cast<std::uint32_t>(net.hidden_dim()));
    bytesio::put_u32(out, static_cast<std::uint32_t>(net.out_dim()));
    for (double v : net.params()) bytesio::put_f64(out, v);
    bytesio::write_file(path, out);
}

Mlp load_mlp(const std::string& path) {
    const std::string raw = bytesio::read_file(path);
    bytesio::Reader r{raw};
    if (r.read_bytes(4, "magic") != std::string(kNetMagic, 4))
        throw std::runtime_error("network parse error at offset 0: bad magic");
    const std::uint32_t version = r.read_u32("version");
    if (version != kNetVersion)
        throw std::runtime_error("network parse error at offset 4: unsupported version " +
                                 std::to_string(version));
    const auto in = static_cast<int>(r.read_u32("input size"));
    const auto hidden = static_cast<int>(r.read_u32("hidden size"));
    const auto out = static_cast<int>(r.read_u32("output size"));
    Mlp net(in, hidden, out);
    for (double& v : net.params()) v = r.read_f64("parameter");
    if (r.pos != raw.size())
        throw std::runtime_error("network parse error at offset " + std::to_string(r.pos) +
                                 ": trailing bytes");
    return net;
}

} // namespace bcqq::mlp
