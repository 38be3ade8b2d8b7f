#include "bcqq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "bcqq/data.hpp"
#include "bcqq/grad.hpp"

namespace bcqq::analysis {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Map<const Eigen::MatrixXd> as_eigen(const Matrix& m) {
    // Row-major storage of a symmetric matrix reads fine as column-major.
    return Eigen::Map<const Eigen::MatrixXd>(m.a.data(), m.n, m.n);
}

void check_symmetric(const Matrix& m) {
    for (int i = 0; i < m.n; ++i)
        for (int j = i + 1; j < m.n; ++j)
            if (std::abs(m.at(i, j) - m.at(j, i)) > 1e-10)
                throw std::invalid_argument("matrix is not symmetric");
}

// One rank-1 update per action: F += p_a g_a g_a^T with g_a the score.
void accumulate_state_fim(Matrix& fim, const std::vector<std::vector<double>>& logit_grads,
                          std::span<const double> probs) {
    const int d = fim.n;
    const int A = static_cast<int>(probs.size());
    // mean gradient: sum_k p_k G_k
    std::vector<double> mean_grad(static_cast<std::size_t>(d), 0.0);
    for (int k = 0; k < A; ++k)
        for (int j = 0; j < d; ++j)
            mean_grad[static_cast<std::size_t>(j)] +=
                probs[static_cast<std::size_t>(k)] * logit_grads[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    std::vector<double> score(static_cast<std::size_t>(d));
    for (int a = 0; a < A; ++a) {
        for (int j = 0; j < d; ++j)
            score[static_cast<std::size_t>(j)] =
                logit_grads[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] - mean_grad[static_cast<std::size_t>(j)];
        const double pa = probs[static_cast<std::size_t>(a)];
        for (int i = 0; i < d; ++i) {
            const double si = pa * score[static_cast<std::size_t>(i)];
            if (si == 0.0) continue;
            for (int j = 0; j < d; ++j) fim.at(i, j) += si * score[static_cast<std::size_t>(j)];
        }
    }
}

} // namespace

double Matrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += at(i, i);
    return t;
}

Matrix empirical_fim_quantum(const ansatz::QModel& model,
                             std::span<const std::array<double, 4>> states) {
    const int P = model.tmpl.num_params();
    const int A = model.num_actions();
    const int d = model.trainable_count();
    Matrix fim = Matrix::zero(d);
    std::vector<std::vector<double>> G(static_cast<std::size_t>(A),
                                       std::vector<double>(static_cast<std::size_t>(d), 0.0));
    for (const auto& s : states) {
        const auto e = ansatz::expectations(model, s);
        const auto inner = grad::param_shift_expectation_grads(model, s);
        std::vector<double> logits(static_cast<std::size_t>(A));
        for (int a = 0; a < A; ++a) {
            logits[static_cast<std::size_t>(a)] =
                model.weights[static_cast<std::size_t>(a)] * e[static_cast<std::size_t>(a)];
            for (int j = 0; j < P; ++j)
                G[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] =
                    model.weights[static_cast<std::size_t>(a)] * inner.at(a, j);
            for (int m = 0; m < A; ++m)
                G[static_cast<std::size_t>(a)][static_cast<std::size_t>(P + m)] =
                    (m == a) ? e[static_cast<std::size_t>(a)] : 0.0;
        }
        const auto probs = ansatz::softmax(logits);
        accumulate_state_fim(fim, G, probs);
    }
    const double inv = 1.0 / static_cast<double>(states.size());
    for (double& v : fim.a) v *= inv;
    return fim;
}

Matrix empirical_fim_classical(const mlp::Mlp& net,
                               std::span<const std::array<double, 4>> states) {
    const int d = static_cast<int>(net.param_count());
    const int A = net.out_dim();
    Matrix fim = Matrix::zero(d);
    std::vector<std::vector<double>> G(static_cast<std::size_t>(A));
    for (const auto& s : states) {
        const auto logits = net.forward(s);
        for (int a = 0; a < A; ++a) {
            G[static_cast<std::size_t>(a)].assign(static_cast<std::size_t>(d), 0.0);
            std::vector<double> dy(static_cast<std::size_t>(A), 0.0);
            dy[static_cast<std::size_t>(a)] = 1.0;
            net.accumulate_grad(s, dy, G[static_cast<std::size_t>(a)]);
        }
        const auto probs = ansatz::softmax(logits);
        accumulate_state_fim(fim, G, probs);
    }
    const double inv = 1.0 / static_cast<double>(states.size());
    for (double& v : fim.a) v *= inv;
    return fim;
}

std::vector<double> symmetric_eigenvalues(const Matrix& m) {
    check_symmetric(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(as_eigen(m),
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    std::vector<double> eig(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + m.n);
    return eig;
}

Histogram eigen_spectrum(std::span<const Matrix> fims, int bins) {
    if (fims.empty()) throw std::invalid_argument("no matrices given");
    if (bins < 1) throw std::invalid_argument("bins must be >= 1");
    std::vector<double> pooled;
    for (const auto& m : fims) {
        const auto eig = symmetric_eigenvalues(m);
        pooled.insert(pooled.end(), eig.begin(), eig.end());
    }
    for (double& v : pooled) v = std::max(v, 0.0);
    const double hi = std::max(*std::max_element(pooled.begin(), pooled.end()), 1e-300);
    const double width = hi / bins;

    Histogram h;
    h.bin_lo.resize(static_cast<std::size_t>(bins));
    h.bin_hi.resize(static_cast<std::size_t>(bins));
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    for (int b = 0; b < bins; ++b) {
        h.bin_lo[static_cast<std::size_t>(b)] = b * width;
        h.bin_hi[static_cast<std::size_t>(b)] = (b + 1) * width;
    }
    for (double v : pooled) {
        int b = static_cast<int>(v / width);
        b = std::clamp(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    const double total = static_cast<double>(pooled.size());
    h.density.resize(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b)
        h.density[static_cast<std::size_t>(b)] =
            static_cast<double>(counts[static_cast<std::size_t>(b)]) / (total * width);
    return h;
}

double effective_dimension(std::span<const Matrix> fims, double n) {
    if (fims.empty()) throw std::invalid_argument("no matrices given");
    if (!(n >= 2.0)) throw std::invalid_argument("n must be >= 2");
    const double kappa = n / (2.0 * kPi * std::log(n));
    if (!(kappa > 1.0))
        throw std::invalid_argument("n too small: kappa_n must exceed 1");
    const int d = fims[0].n;

    double trace_sum = 0.0;
    for (const auto& m : fims) trace_sum += m.trace();
    const double mean_trace = trace_sum / static_cast<double>(fims.size());
    if (mean_trace == 0.0) return 0.0;
    const double c = static_cast<double>(d) / mean_trace;

    // log mean_theta exp(a_s) with a_s = 0.5 sum_i log(1 + kappa c lambda_i),
    // evaluated by log-sum-exp so large determinants cannot overflow.
    std::vector<double> log_sqrt_det;
    log_sqrt_det.reserve(fims.size());
    for (const auto& m : fims) {
        const auto eig = symmetric_eigenvalues(m);
        double acc = 0.0;
        for (double lambda : eig) {
            if (lambda < -1e-8)
                throw std::invalid_argument("matrix is not positive semidefinite");
            acc += std::log1p(kappa * c * std::max(lambda, 0.0));
        }
        log_sqrt_det.push_back(0.5 * acc);
    }
    const double peak = *std::max_element(log_sqrt_det.begin(), log_sqrt_det.end());
    double mean_exp = 0.0;
    for (double v : log_sqrt_det) mean_exp += std::exp(v - peak);
    mean_exp /= static_cast<double>(log_sqrt_det.size());
    const double log_mean = peak + std::log(mean_exp);
    return 2.0 * log_mean / std::log(kappa);
}

FourierSpectrum fourier_spectrum(const qsim::CircuitTemplate& tmpl,
                                 std::span<const double> params,
                                 std::span<const qsim::Observable> observables, int feature,
                                 int grid, std::span<const double> base_inputs) {
    if (feature < 0 || feature >= tmpl.num_features)
        throw std::invalid_argument("feature index out of range");
    if (grid < 2) throw std::invalid_argument("grid must be >= 2");
    if (static_cast<int>(base_inputs.size()) != tmpl.num_features)
        throw std::invalid_argument("base point length mismatch");

    std::vector<std::vector<double>> f(observables.size(),
                                       std::vector<double>(static_cast<std::size_t>(grid)));
    std::vector<double> inputs(base_inputs.begin(), base_inputs.end());
    for (int g = 0; g < grid; ++g) {
        inputs[static_cast<std::size_t>(feature)] = 2.0 * kPi * g / grid;
        const qsim::QubitState state = qsim::run_circuit(tmpl, inputs, params);
        for (std::size_t o = 0; o < observables.size(); ++o)
            f[o][static_cast<std::size_t>(g)] = qsim::expectation(state, observables[o]);
    }

    FourierSpectrum spec;
    spec.feature = feature;
    spec.power.assign(static_cast<std::size_t>(grid / 2 + 1), 0.0);
    for (std::size_t o = 0; o < observables.size(); ++o) {
        for (int w = 0; w < grid; ++w) {
            std::complex<double> c{0.0, 0.0};
            for (int g = 0; g < grid; ++g) {
                const double phase = -2.0 * kPi * w * g / grid;
                c += f[o][static_cast<std::size_t>(g)] *
                     std::complex<double>(std::cos(phase), std::sin(phase));
            }
            c /= static_cast<double>(grid);
            const int folded = w <= grid / 2 ? w : grid - w;
            spec.power[static_cast<std::size_t>(folded)] += std::norm(c);
        }
    }
    return spec;
}

FourierSpectrum fourier_spectrum(const ansatz::QModel& model, int feature, int grid,
                                 const std::array<double, 4>& base_point) {
    return fourier_spectrum(model.tmpl.circuit, model.theta, model.observables, feature, grid,
                            base_point);
}

double out_of_band_ratio(const FourierSpectrum& spec, int max_freq) {
    if (max_freq < 0) throw std::invalid_argument("max_freq must be >= 0");
    double total = 0.0;
    double outside = 0.0;
    for (std::size_t w = 0; w < spec.power.size(); ++w) {
        total += spec.power[w];
        if (static_cast<int>(w) > max_freq) outside += spec.power[w];
    }
    if (total == 0.0) return 0.0;
    return outside / total;
}

std::vector<std::array<double, 4>> sample_visitation_states(int count, Rng& rng) {
    const data::PolicyFn random_policy = [](const std::array<double, 4>&, Rng& r) {
        return static_cast<int>(r.below(2));
    };
    const data::Buffer buf =
        data::collect_transitions(static_cast<std::size_t>(count), random_policy, rng, {});
    std::vector<std::array<double, 4>> states(buf.items.size());
    for (std::size_t i = 0; i < buf.items.size(); ++i) states[i] = buf.items[i].s;
    return states;
}

namespace {

FimStudyResult run_study(const FimStudyConfig& cfg, int dim,
                         const std::function<Matrix(Rng&, std::span<const std::array<double, 4>>)>& fim_at_sample) {
    const Rng root(cfg.seed);
    Rng env_rng = root.substream("env");
    const Rng init = root.substream("init");
    const auto states = sample_visitation_states(cfg.num_states, env_rng);

    std::vector<Matrix> fims;
    fims.reserve(static_cast<std::size_t>(cfg.num_theta));
    for (int i = 0; i < cfg.num_theta; ++i) {
        Rng sample_rng = init.fork(static_cast<std::uint64_t>(i));
        fims.push_back(fim_at_sample(sample_rng, states));
    }

    FimStudyResult res;
    res.dim = dim;
    res.n_values = cfg.n_values;
    for (double n : cfg.n_values) res.d_eff.push_back(effective_dimension(fims, n));

    double trace_sum = 0.0;
    for (const auto& m : fims) trace_sum += m.trace();
    res.mean_trace = trace_sum / static_cast<double>(fims.size());
    if (res.mean_trace > 0.0) {
        const double c = static_cast<double>(dim) / res.mean_trace;
        std::vector<Matrix> scaled = fims;
        for (auto& m : scaled)
            for (double& v : m.a) v *= c;
        res.spectrum = eigen_spectrum(scaled, cfg.hist_bins);
    }
    return res;
}

} // namespace

FimStudyResult fim_study_quantum(ansatz::Encoding encoding, int layers,
                                 const FimStudyConfig& cfg) {
    Rng scratch(0);
    ansatz::QModel proto = ansatz::make_qmodel(encoding, layers, 4, scratch);
    const int d = proto.trainable_count();
    return run_study(cfg, d, [&proto, d](Rng& rng, std::span<const std::array<double, 4>> states) {
        std::vector<double> flat(static_cast<std::size_t>(d));
        for (double& v : flat) v = rng.uniform(-kPi, kPi);
        ansatz::set_params(proto, flat);
        return empirical_fim_quantum(proto, states);
    });
}

FimStudyResult fim_study_classical(int hidden, const FimStudyConfig& cfg) {
    Rng scratch(0);
    const int d = static_cast<int>(mlp::Mlp::glorot(4, hidden, 2, scratch).param_count());
    return run_study(cfg, d, [hidden](Rng& rng, std::span<const std::array<double, 4>> states) {
        const mlp::Mlp net = mlp::Mlp::glorot(4, hidden, 2, rng);
        return empirical_fim_classical(net, states);
    });
}

} // namespace bcqq::analysis
