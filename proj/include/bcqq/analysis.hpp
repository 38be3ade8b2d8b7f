#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bcqq/ansatz.hpp"
#include "bcqq/mlp.hpp"
#include "bcqq/qsim.hpp"
#include "bcqq/rng.hpp"

namespace bcqq::analysis {

// Dense symmetric matrix, row-major.
struct Matrix {
    int n = 0;
    std::vector<double> a;

    static Matrix zero(int n) { return {n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)}; }
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    double trace() const;
};

// Empirical Fisher information of the softmax policy p(a|s) over all
// trainables, averaged over `states`:
// F = (1/N) sum_s sum_a p_a grad(log p_a) grad(log p_a)^T.
// Quantum logits are w_a <O_a> (shift-rule gradients); classical logits are
// the network outputs (backprop gradients).
Matrix empirical_fim_quantum(const ansatz::QModel& model,
                             std::span<const std::array<double, 4>> states);
Matrix empirical_fim_classical(const mlp::Mlp& net,
                               std::span<const std::array<double, 4>> states);

struct Histogram {
    std::vector<double> bin_lo;
    std::vector<double> bin_hi;
    std::vector<double> density; // integrates to 1
};

// Pooled eigenvalue density over a set of symmetric matrices. Throws
// std::invalid_argument on non-symmetric input (tolerance 1e-10).
Histogram eigen_spectrum(std::span<const Matrix> fims, int bins);

// Eigenvalues of one symmetric matrix, ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

// d_eff(n) = 2 log( mean_theta sqrt(det(I + kappa_n Fhat)) ) / log kappa_n,
// kappa_n = n / (2 pi log n), with Fhat = c F and c chosen so the mean
// trace over the sample set equals the dimension. Throws
// std::invalid_argument when n is too small for kappa_n > 1 or when a
// matrix has an eigenvalue below -1e-8.
double effective_dimension(std::span<const Matrix> fims, double n);

// Power at integer frequencies 0..grid/2 of the model output as one input
// feature sweeps a uniform grid over [0, 2pi), other inputs fixed at
// `base_inputs`. Power is pooled over the listed observables.
struct FourierSpectrum {
    int feature = 0;
    std::vector<double> power;
};

FourierSpectrum fourier_spectrum(const qsim::CircuitTemplate& tmpl,
                                 std::span<const double> params,
                                 std::span<const qsim::Observable> observables, int feature,
                                 int grid, std::span<const double> base_inputs);
FourierSpectrum fourier_spectrum(const ansatz::QModel& model, int feature, int grid,
                                 const std::array<double, 4>& base_point);

// Fraction of total power above `max_freq`.
double out_of_band_ratio(const FourierSpectrum& spec, int max_freq);

// States visited by a uniformly random policy, normalized.
std::vector<std::array<double, 4>> sample_visitation_states(int count, Rng& rng);

struct FimStudyConfig {
    int num_states = 500;
    int num_theta = 100;
    std::vector<double> n_values = {1e3, 1e4, 1e5, 1e6};
    int hist_bins = 50;
    std::uint64_t seed = 1;
};

struct FimStudyResult {
    int dim = 0;
    std::vector<double> n_values;
    std::vector<double> d_eff;
    Histogram spectrum; // of the trace-normalized matrices
    double mean_trace = 0.0;
};

// Samples visitation states from substream "env" and parameter sets from
// substream "init" of the study seed, so two studies with equal seeds see
// matched data and matched parameter draws. Quantum parameter sets are
// uniform on [-pi, pi]^d; classical ones redraw the init distribution.
FimStudyResult fim_study_quantum(ansatz::Encoding encoding, int layers,
                                 const FimStudyConfig& cfg);
FimStudyResult fim_study_classical(int hidden, const FimStudyConfig& cfg);

} // namespace bcqq::analysis
