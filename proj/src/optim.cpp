#include "bcqq/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcqq::optim {

std::string kind_name(Kind k) { return k == Kind::Adam ? "adam" : "amsgrad"; }

Kind kind_from_name(const std::string& name) {
    if (name == "adam") return Kind::Adam;
    if (name == "amsgrad") return Kind::Amsgrad;
    throw std::invalid_argument("unknown optimizer: " + name);
}

Optimizer::Optimizer(Kind kind, double lr, std::size_t dim) : kind_(kind), lr_(lr) {
    if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
    m_.assign(dim, 0.0);
    v_.assign(dim, 0.0);
    if (kind_ == Kind::Amsgrad) vhat_.assign(dim, 0.0);
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size())
        throw std::invalid_argument("optimizer dimension mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < m_.size(); ++i) {
        const double g = grad[i];
        m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g;
        v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g * g;
        double second = v_[i];
        if (kind_ == Kind::Amsgrad) {
            vhat_[i] = std::max(vhat_[i], v_[i]);
            second = vhat_[i];
        }
        const double denom = std::sqrt(second / bc2) + kEps;
        params[i] -= lr_ * (m_[i] / bc1) / denom;
    }
}

std::vector<double> Optimizer::state() const {
    std::vector<double> flat;
    flat.reserve(1 + m_.size() + v_.size() + vhat_.size());
    flat.push_back(static_cast<double>(t_));
    flat.insert(flat.end(), m_.begin(), m_.end());
    flat.insert(flat.end(), v_.begin(), v_.end());
    flat.insert(flat.end(), vhat_.begin(), vhat_.end());
    return flat;
}

void Optimizer::restore_state(std::span<const double> flat) {
    const std::size_t vhat_len = kind_ == Kind::Amsgrad ? m_.size() : 0;
    if (flat.size() != 1 + m_.size() + v_.size() + vhat_len)
        throw std::invalid_argument("optimizer state size mismatch");
    t_ = static_cast<long>(flat[0]);
    std::size_t off = 1;
    std::copy_n(flat.begin() + off, m_.size(), m_.begin());
    off += m_.size();
    std::copy_n(flat.begin() + off, v_.size(), v_.begin());
    off += v_.size();
    if (vhat_len > 0) std::copy_n(flat.begin() + off, vhat_len, vhat_.begin());
}

} // namespace bcqq::optim
