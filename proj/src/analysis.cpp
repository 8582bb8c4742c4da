#include "alpha/analysis.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>

#include "alpha/error.hpp"

namespace alpha {

double bound_constant(double theta0, double gap, double dist_sq) {
    if (!(theta0 > 0.0 && theta0 <= 1.0)) throw ConfigError("theta0 must lie in (0, 1]");
    return (1.0 - theta0) * gap + 0.5 * theta0 * theta0 * dist_sq;
}

double bound_constant(const Vector& x0, const Vector& y, double F0, double Fy, const Weights& v,
                      const ProbabilityVector& p, double theta0, const BlockMetric& metric) {
    const auto part = std::make_shared<const BlockPartition>(metric.partition());
    const BlockVector diff(part, x0 - y);
    const Weights w = v.hadamard(p.as_weights().pow(-2.0));
    return bound_constant(theta0, F0 - Fy, weighted_norm_sq(diff, w, metric));
}

double bound_nonaccelerated(double C, double theta0, std::size_t k) {
    if (k < 1) throw std::invalid_argument("bounds are stated for k >= 1");
    return C / (static_cast<double>(k - 1) * theta0 + 1.0);
}

double bound_accelerated(double C, double theta0, std::size_t k) {
    if (k < 1) throw std::invalid_argument("bounds are stated for k >= 1");
    const double d = static_cast<double>(k - 1) * theta0 + 2.0;
    return 4.0 * C / (d * d);
}

Vector reference_solution(const SmoothObjective& obj, const Regularizer& reg, std::size_t iterations) {
    if (obj.is_quadratic() && reg.is_zero()) {
        const Matrix A = obj.matrix().to_dense();
        Vector b(A.rows());
        for (Eigen::Index j = 0; j < b.size(); ++j) b[j] = obj.losses()[static_cast<std::size_t>(j)].target();
        return A.colPivHouseholderQr().solve(b);
    }
    SolverConfig config = make_preset(Preset::acc_prox_gd, obj, reg);
    config.iterations = iterations;
    config.evaluate = false;
    config.log_stride = iterations;
    return run_generic(obj, reg, config, initial_point(reg)).x;
}

InstanceData instance_data(const SmoothObjective& obj, const Regularizer& reg, const Sampling& s, const Weights& v,
                           const Vector& x0, const Vector& xstar) {
    InstanceData d;
    d.n = obj.num_blocks();
    d.gap = (obj.value(x0) + reg.value(x0)) - (obj.value(xstar) + reg.value(xstar));
    const BlockVector diff(obj.partition_ptr(), x0 - xstar);
    const auto& p = s.probability_vector();
    d.dist_v = weighted_norm_sq(diff, v, obj.metric());
    d.dist_v_p2 = weighted_norm_sq(diff, v.hadamard(p.as_weights().pow(-2.0)), obj.metric());
    d.min_p = p.min();
    d.expected_size = s.expected_size();
    return d;
}

double corollary_bound(Preset preset, const InstanceData& d, std::size_t k) {
    if (k < 1) throw std::invalid_argument("bounds are stated for k >= 1");
    const double kk = static_cast<double>(k);
    switch (preset) {
        case Preset::gd:
        case Preset::prox_gd:
            return d.dist_v / (2.0 * kk);
        case Preset::agd:
        case Preset::acc_prox_gd:
            return 2.0 * d.dist_v / ((kk + 1.0) * (kk + 1.0));
        case Preset::pcd:
            return ((1.0 - d.min_p) * d.gap + 0.5 * d.dist_v) / ((kk - 1.0) * d.min_p + 1.0);
        case Preset::apcd:
            return 2.0 * d.dist_v_p2 / ((kk + 1.0) * (kk + 1.0));
        case Preset::pcdm: {
            const double n = static_cast<double>(d.n);
            const double tau = d.expected_size;
            return n / ((kk - 1.0) * tau + n) * ((1.0 - tau / n) * d.gap + 0.5 * d.dist_v);
        }
        case Preset::approxis: {
            const double den = (kk - 1.0) * d.min_p + 2.0;
            return 4.0 * ((1.0 - d.min_p) * d.gap + 0.5 * d.min_p * d.min_p * d.dist_v_p2) / (den * den);
        }
    }
    throw ConfigError("unknown preset");
}

double apcd_serial_uniform_bound(const InstanceData& d, std::size_t k) {
    const double n = static_cast<double>(d.n);
    const double kk = static_cast<double>(k);
    return 2.0 * n * n * d.dist_v / ((kk + 1.0) * (kk + 1.0));
}

double pcd_serial_uniform_bound(const InstanceData& d, std::size_t k) {
    if (k < 1) throw std::invalid_argument("bounds are stated for k >= 1");
    const double n = static_cast<double>(d.n);
    const double kk = static_cast<double>(k);
    return n / (kk - 1.0 + n) * ((1.0 - 1.0 / n) * d.gap + 0.5 * d.dist_v);
}

GammaTable::GammaTable(const ProbabilityVector& p, std::size_t cap)
    : n_(p.size()), cap_(cap), p_(p.values()), table_(n_ * (cap + 1), 0.0) {
    for (std::size_t i = 0; i < n_; ++i) at(i, 0) = 1.0;
}

void GammaTable::step(double theta) {
    if (k_ >= cap_) throw ConfigError("gamma diagnostics are capped at k = " + std::to_string(cap_));
    const std::size_t k = k_;
    for (std::size_t i = 0; i < n_; ++i) {
        const double pi = p_[static_cast<Eigen::Index>(i)];
        const double gkk = at(i, k);
        for (std::size_t l = 0; l < k; ++l) at(i, l) *= 1.0 - theta;
        at(i, k) = (1.0 - theta) * gkk + theta - theta / pi;
        at(i, k + 1) = theta / pi;
        const double err = std::abs(at(i, k) + at(i, k + 1) - ((1.0 - theta) * gkk + theta));
        identity_error_ = std::max(identity_error_, err);
    }
    ++k_;
}

void GammaTable::push_z(const Vector& z) {
    if (history_.size() > cap_) throw ConfigError("gamma history is capped at " + std::to_string(cap_ + 1) + " points");
    history_.push_back(z);
}

Vector GammaTable::reconstruct_x(const BlockPartition& part) const {
    if (history_.size() < k_ + 1) throw ConfigError("z history does not reach the current k");
    Vector x = Vector::Zero(history_.front().size());
    for (std::size_t i = 0; i < n_; ++i) {
        const auto o = static_cast<Eigen::Index>(part.offset(i));
        const auto s = static_cast<Eigen::Index>(part.size(i));
        for (std::size_t l = 0; l <= k_; ++l) x.segment(o, s) += gamma(i, l) * history_[l].segment(o, s);
    }
    return x;
}

double GammaTable::psi_hat(const Regularizer& reg) const {
    if (history_.size() < k_ + 1) throw ConfigError("z history does not reach the current k");
    if (reg.is_zero()) return 0.0;
    const auto& part = reg.partition();
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const auto o = static_cast<Eigen::Index>(part.offset(i));
        const auto s = static_cast<Eigen::Index>(part.size(i));
        for (std::size_t l = 0; l <= k_; ++l) {
            const double g = gamma(i, l);
            if (g != 0.0) total += g * reg.block_value(i, history_[l].segment(o, s));
        }
    }
    return total;
}

double GammaTable::min_gamma() const {
    double m = gamma(0, 0);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t l = 0; l <= k_; ++l) m = std::min(m, gamma(i, l));
    return m;
}

double GammaTable::max_sum_deviation() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t l = 0; l <= k_; ++l) s += gamma(i, l);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

}  // namespace alpha
