#pragma once

#include <cstdint>
#include <optional>

#include "alpha/objective.hpp"
#include "alpha/sampling.hpp"

namespace alpha {

enum class EsoMethod { serial_exact, full_exact, user_supplied };
enum class CertificationKind { quadratic_psd, monte_carlo, none };

/// Certificates at or above this lambda_min count as valid.
inline constexpr double kCertificateTolerance = -1e-10;

struct EsoCertificate {
    Weights v;
    EsoMethod method = EsoMethod::user_supplied;
    CertificationKind certification = CertificationKind::none;
    double value = 0.0;     // lambda_min, or worst relative violation
    std::size_t trials = 0; // Monte Carlo only
    bool certified() const;
};

/// v = L, valid for every serial sampling.
Weights serial_eso(const SmoothObjective& obj);
/// v = global Lipschitz weights, valid for the full sampling (and any other).
Weights full_eso(const SmoothObjective& obj, LipschitzBound bound = LipschitzBound::power);

/// serial_eso for serial samplings, full_eso for the full sampling; otherwise ConfigError.
Weights default_eso(const SmoothObjective& obj, const Sampling& s);

/*
 * For f(x) = 1/2 x^T M x + linear, E f(x + h_[S]) <= f(x) + <grad f(x), h>_p + 1/2 ||h||^2_{p v}
 * holds for all h iff blockdiag(p_i v_i B_i) - P (.) M is PSD, with P the pairwise
 * inclusion matrix expanded to coordinates. Returns its smallest eigenvalue.
 */
double certify_quadratic(const SmoothObjective& obj, const Sampling& s, const Weights& v,
                         std::size_t cap = default_atom_cap());

struct FalsificationReport {
    double worst = 0.0;       // max over trials of (lhs - rhs) / max(1, |rhs|)
    bool exact = true;        // expectation over enumerated atoms, else a sample mean
    double std_error = 0.0;   // largest relative standard error among trials (sample-mean mode)
    std::size_t trials = 0;
};

/// Random (x, h) with unit Gaussian coordinates; trial t uses seed + t.
FalsificationReport falsify_monte_carlo(const SmoothObjective& obj, const Sampling& s, const Weights& v,
                                        std::size_t trials, std::uint64_t seed = 0, std::size_t samples = 1000,
                                        std::size_t cap = default_atom_cap());

/// Evaluates both sides of the ESO inequality at (x, h); lhs is exact over `atoms`.
std::pair<double, double> eso_sides(const SmoothObjective& obj, const std::vector<Atom>& atoms,
                                    const ProbabilityVector& p, const Weights& v, const Vector& x, const Vector& h);

/// p_i proportional to (L_i d_i)^{1/3}; blocks with d_i = 0 get weight floor * (sum of the other weights).
ProbabilityVector optimal_serial_probabilities(const Weights& L, const Vector& d, double floor = 1e-6);

}  // namespace alpha
