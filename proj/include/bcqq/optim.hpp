#pragma once

#include <span>
#include <string>
#include <vector>

namespace bcqq::optim {

enum class Kind { Adam, Amsgrad };

std::string kind_name(Kind k);
Kind kind_from_name(const std::string& name);

// First-order moment optimizer over a flat parameter vector. AMSGrad keeps
// the elementwise running maximum of the raw second moment and uses it in
// place of v, with bias correction applied afterwards.
class Optimizer {
  public:
    Optimizer(Kind kind, double lr, std::size_t dim);

    void step(std::span<double> params, std::span<const double> grad);

    Kind kind() const { return kind_; }
    double lr() const { return lr_; }
    long t() const { return t_; }

    // Serialized state, in this order: t, m, v, vhat (vhat only for AMSGrad).
    std::vector<double> state() const;
    void restore_state(std::span<const double> flat);

    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

  private:
    Kind kind_;
    double lr_;
    long t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
    std::vector<double> vhat_;
};

} // namespace bcqq::optim
