#include "alpha/eso.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "alpha/error.hpp"
#include "alpha/rng.hpp"

namespace alpha {

bool EsoCertificate::certified() const {
    switch (certification) {
        case CertificationKind::quadratic_psd:
            return value >= kCertificateTolerance;
        case CertificationKind::monte_carlo:
            return value <= 1e-10;
        case CertificationKind::none:
            return method != EsoMethod::user_supplied;
    }
    return false;
}

Weights serial_eso(const SmoothObjective& obj) { return obj.block_lipschitz_constants(); }

Weights full_eso(const SmoothObjective& obj, LipschitzBound bound) { return obj.global_lipschitz_weights(bound); }

Weights default_eso(const SmoothObjective& obj, const Sampling& s) {
    if (s.kind() == Sampling::Kind::full) return full_eso(obj);
    if (s.is_serial()) return serial_eso(obj);
    throw ConfigError("no closed-form ESO for sampling " + s.describe() + "; supply v and certify it");
}

double certify_quadratic(const SmoothObjective& obj, const Sampling& s, const Weights& v, std::size_t cap) {
    if (!obj.is_quadratic()) throw ConfigError("psd certification needs square losses; use Monte Carlo");
    const std::size_t n = obj.num_blocks();
    if (s.num_blocks() != n || v.size() != n) throw ConfigError("sampling / v size does not match the block count");
    const Matrix P = pairwise_inclusion_matrix(s, cap);
    const Matrix M = obj.curvature_matrix();
    const auto& part = obj.partition();
    const auto& p = s.probability_vector();

    Matrix K(M.rows(), M.cols());
    for (std::size_t i = 0; i < n; ++i) {
        const auto oi = static_cast<Eigen::Index>(part.offset(i));
        const auto ni = static_cast<Eigen::Index>(part.size(i));
        for (std::size_t j = 0; j < n; ++j) {
            const auto oj = static_cast<Eigen::Index>(part.offset(j));
            const auto nj = static_cast<Eigen::Index>(part.size(j));
            K.block(oi, oj, ni, nj) = -P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * M.block(oi, oj, ni, nj);
        }
        K.block(oi, oi, ni, ni) += p[i] * v[i] * obj.metric().block_matrix(i);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(K, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

std::pair<double, double> eso_sides(const SmoothObjective& obj, const std::vector<Atom>& atoms,
                                    const ProbabilityVector& p, const Weights& v, const Vector& x, const Vector& h) {
    const auto& part = obj.partition();
    const Vector grad = obj.gradient(x);
    double rhs = obj.value(x);
    for (std::size_t i = 0; i < obj.num_blocks(); ++i) {
        const auto oi = static_cast<Eigen::Index>(part.offset(i));
        const auto ni = static_cast<Eigen::Index>(part.size(i));
        rhs += p[i] * grad.segment(oi, ni).dot(h.segment(oi, ni));
        rhs += 0.5 * p[i] * v[i] * obj.metric().quad_form(i, h.segment(oi, ni));
    }
    double lhs = 0.0;
    Vector xs(x.size());
    for (const auto& atom : atoms) {
        xs = x;
        for (std::size_t i : atom.blocks) {
            const auto oi = static_cast<Eigen::Index>(part.offset(i));
            const auto ni = static_cast<Eigen::Index>(part.size(i));
            xs.segment(oi, ni) += h.segment(oi, ni);
        }
        lhs += atom.probability * obj.value(xs);
    }
    return {lhs, rhs};
}

FalsificationReport falsify_monte_carlo(const SmoothObjective& obj, const Sampling& s, const Weights& v,
                                        std::size_t trials, std::uint64_t seed, std::size_t samples,
                                        std::size_t cap) {
    if (trials == 0) throw ConfigError("falsify_monte_carlo needs at least one trial");
    if (s.num_blocks() != obj.num_blocks() || v.size() != obj.num_blocks())
        throw ConfigError("sampling / v size does not match the block count");

    std::optional<std::vector<Atom>> atoms;
    const auto count = atom_count(s);
    if (count && *count <= cap) atoms = enumerate_atoms(s, cap);

    FalsificationReport report;
    report.trials = trials;
    report.exact = atoms.has_value();
    std::vector<double> worst(trials, 0.0), stderrs(trials, 0.0);
    const auto N = static_cast<Eigen::Index>(obj.dim());
    const auto T = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < T; ++t) {
        Rng rng(seed + static_cast<std::uint64_t>(t));
        Vector x(N), h(N);
        for (Eigen::Index c = 0; c < N; ++c) x[c] = rng.normal();
        for (Eigen::Index c = 0; c < N; ++c) h[c] = rng.normal();
        double lhs = 0.0, rhs = 0.0, se = 0.0;
        if (atoms) {
            std::tie(lhs, rhs) = eso_sides(obj, *atoms, s.probability_vector(), v, x, h);
        } else {
            // Sample mean of f(x + h_[S]) over `samples` draws.
            rhs = eso_sides(obj, {}, s.probability_vector(), v, x, h).second;
            SamplingDrawer drawer(s, seed ^ (0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(t)));
            BlockSet S;
            Vector xs(N);
            double mean = 0.0, m2 = 0.0;
            for (std::size_t k = 0; k < samples; ++k) {
                drawer.draw(S);
                xs = x;
                for (std::size_t i : S) {
                    const auto oi = static_cast<Eigen::Index>(obj.partition().offset(i));
                    const auto ni = static_cast<Eigen::Index>(obj.partition().size(i));
                    xs.segment(oi, ni) += h.segment(oi, ni);
                }
                const double fk = obj.value(xs);
                const double delta = fk - mean;
                mean += delta / static_cast<double>(k + 1);
                m2 += delta * (fk - mean);
            }
            lhs = mean;
            se = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
        }
        const double scale = std::max(1.0, std::abs(rhs));
        worst[static_cast<std::size_t>(t)] = (lhs - rhs) / scale;
        stderrs[static_cast<std::size_t>(t)] = se / scale;
    }
    report.worst = *std::max_element(worst.begin(), worst.end());
    report.std_error = *std::max_element(stderrs.begin(), stderrs.end());
    return report;
}

ProbabilityVector optimal_serial_probabilities(const Weights& L, const Vector& d, double floor) {
    if (static_cast<std::size_t>(d.size()) != L.size()) throw ConfigError("L and d lengths differ");
    const auto n = d.size();
    Vector w(n);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(d[i] >= 0.0)) throw ConfigError("distances must be nonnegative");
        w[i] = std::cbrt(L[static_cast<std::size_t>(i)] * d[i]);
        total += w[i];
    }
    if (total == 0.0) throw ConfigError("all block distances are zero; optimal probabilities undefined");
    for (Eigen::Index i = 0; i < n; ++i)
        if (d[i] == 0.0) w[i] = floor * total;
    return ProbabilityVector(w / w.sum());
}

}  // namespace alpha
