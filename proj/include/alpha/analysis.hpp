#pragma once

#include <cstddef>
#include <vector>

#include "alpha/blockspace.hpp"
#include "alpha/regularizer.hpp"
#include "alpha/sampling.hpp"
#include "alpha/solver.hpp"

namespace alpha {

/// C = (1 - theta0)(F0 - Fy) + theta0^2 / 2 * dist_sq, with dist_sq = ||x0 - y||^2_{v p^-2}.
double bound_constant(double theta0, double gap, double dist_sq);
double bound_constant(const Vector& x0, const Vector& y, double F0, double Fy, const Weights& v,
                      const ProbabilityVector& p, double theta0, const BlockMetric& metric);

/// C / ((k - 1) theta0 + 1), k >= 1.
double bound_nonaccelerated(double C, double theta0, std::size_t k);
/// 4 C / ((k - 1) theta0 + 2)^2, k >= 1.
double bound_accelerated(double C, double theta0, std::size_t k);

/*
 * Reference minimizer: a least-squares solve for square losses with psi = 0,
 * otherwise `iterations` steps of accelerated proximal gradient descent from
 * initial_point(reg).
 */
Vector reference_solution(const SmoothObjective& obj, const Regularizer& reg, std::size_t iterations = 100000);

/// Quantities the closed-form corollary bounds depend on.
struct InstanceData {
    std::size_t n = 0;
    double gap = 0.0;            // F(x0) - F(x*)
    double dist_v = 0.0;         // ||x0 - x*||^2_v
    double dist_v_p2 = 0.0;      // ||x0 - x*||^2_{v p^-2}
    double min_p = 1.0;
    double expected_size = 1.0;  // tau = E|S|
};

InstanceData instance_data(const SmoothObjective& obj, const Regularizer& reg, const Sampling& s, const Weights& v,
                           const Vector& x0, const Vector& xstar);

/// Bound on F(x_k) - F* (an expectation for random samplings) of the named method, k >= 1.
double corollary_bound(Preset preset, const InstanceData& d, std::size_t k);
/// The serial-uniform accelerated coordinate descent form 2 n^2 ||x0 - x*||^2_v / (k + 1)^2.
double apcd_serial_uniform_bound(const InstanceData& d, std::size_t k);
/// The serial-uniform coordinate descent form n / (k - 1 + n) [(1 - 1/n) gap + 1/2 ||x0 - x*||^2_v].
double pcd_serial_uniform_bound(const InstanceData& d, std::size_t k);

/*
 * Coefficients gamma_{k,l}^i with x_k^i = sum_l gamma_{k,l}^i z_l^i, kept
 * together with the z history. Diagnostic only: memory is n x (cap + 1).
 */
class GammaTable {
public:
    explicit GammaTable(const ProbabilityVector& p, std::size_t cap = 200);

    std::size_t k() const { return k_; }
    std::size_t num_blocks() const { return n_; }
    double gamma(std::size_t i, std::size_t l) const { return table_[i * (cap_ + 1) + l]; }

    /// Applies theta_k: k -> k + 1. Throws once k reaches the cap.
    void step(double theta);
    /// Largest |gamma_{k,k-1} + gamma_{k,k} - ((1 - theta) gamma_{k-1,k-1} + theta)| seen so far.
    double identity_error() const { return identity_error_; }

    /// Appends z_k; the history must hold z_0, ..., z_k before reconstruction.
    void push_z(const Vector& z);
    std::size_t history_size() const { return history_.size(); }

    Vector reconstruct_x(const BlockPartition& part) const;
    /// sum_i sum_l gamma_{k,l}^i psi^i(z_l^i).
    double psi_hat(const Regularizer& reg) const;

    double min_gamma() const;
    /// max_i |sum_l gamma_{k,l}^i - 1|.
    double max_sum_deviation() const;

private:
    double& at(std::size_t i, std::size_t l) { return table_[i * (cap_ + 1) + l]; }

    std::size_t n_;
    std::size_t cap_;
    Vector p_;
    std::size_t k_ = 0;
    std::vector<double> table_;
    std::vector<Vector> history_;
    double identity_error_ = 0.0;
};

}  // namespace alpha
