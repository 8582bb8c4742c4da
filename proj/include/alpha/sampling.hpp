#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alpha/blockspace.hpp"
#include "alpha/rng.hpp"

namespace alpha {

/// Inclusion probabilities p_i = P(i in S), each in (0, 1].
class ProbabilityVector {
public:
    explicit ProbabilityVector(Vector p);

    std::size_t size() const { return static_cast<std::size_t>(p_.size()); }
    double operator[](std::size_t i) const { return p_[static_cast<Eigen::Index>(i)]; }
    const Vector& values() const { return p_; }
    double min() const { return p_.minCoeff(); }
    double sum() const { return p_.sum(); }
    bool is_uniform() const;
    Weights as_weights() const { return Weights(p_); }

private:
    Vector p_;
};

struct Atom {
    BlockSet blocks;
    double probability = 0.0;
};

/*
 * A proper sampling over the blocks {0, ..., n-1}. Construction rejects nil
 * and improper samplings.
 */
class Sampling {
public:
    enum class Kind { full, serial, tau_nice, distributed, explicit_atoms };

    static Sampling full(std::size_t n);
    static Sampling serial(Vector q);
    static Sampling serial_uniform(std::size_t n);
    static Sampling tau_nice(std::size_t n, std::size_t tau);
    /// c groups of n/c consecutive blocks; tau blocks drawn uniformly from each group.
    static Sampling distributed(std::size_t n, std::size_t groups, std::size_t tau);
    static Sampling from_atoms(std::size_t n, std::vector<Atom> atoms);

    /// Parses `full`, `serial-uniform`, `serial:<q,...>`, `tau-nice:<tau>`, `distributed:<c>,<tau>`.
    static Sampling parse(std::string_view spec, std::size_t n);

    Kind kind() const { return kind_; }
    std::size_t num_blocks() const { return n_; }
    std::size_t tau() const { return tau_; }
    std::size_t groups() const { return groups_; }
    const Vector& serial_probabilities() const { return q_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    const ProbabilityVector& probability_vector() const { return p_; }
    double expected_size() const { return p_.sum(); }
    bool is_serial() const;
    bool is_uniform() const { return p_.is_uniform(); }
    bool is_deterministic() const { return kind_ == Kind::full; }
    std::string describe() const;

private:
    Sampling(Kind kind, std::size_t n);
    void finalize();

    Kind kind_;
    std::size_t n_;
    std::size_t tau_ = 0;
    std::size_t groups_ = 0;
    Vector q_;                  // serial
    Vector q_cumulative_;       // serial
    std::vector<Atom> atoms_;   // explicit
    std::vector<double> atom_cumulative_;
    ProbabilityVector p_;

    friend class SamplingDrawer;
};

/*
 * Draws S_k ~ S. Owns the generator and a scratch permutation so that a
 * tau-nice draw is a partial Fisher-Yates shuffle of tau swaps.
 */
class SamplingDrawer {
public:
    SamplingDrawer(const Sampling& sampling, std::uint64_t seed);
    /// The drawer refers to `sampling`, which must outlive it.
    SamplingDrawer(Sampling&&, std::uint64_t) = delete;

    /// Fills `out` with the sorted sampled block indices.
    void draw(BlockSet& out);
    BlockSet draw() {
        BlockSet s;
        draw(s);
        return s;
    }

private:
    const Sampling* sampling_;
    Rng rng_;
    std::vector<std::size_t> perm_;
};

/// Enumeration cap: ALPHA_ATOM_CAP from the environment, else 2^20.
std::size_t default_atom_cap();

/// Number of atoms, or nullopt on overflow.
std::optional<std::size_t> atom_count(const Sampling& s);

/// All (subset, probability) pairs; throws AtomCapExceeded above `cap`.
std::vector<Atom> enumerate_atoms(const Sampling& s, std::size_t cap = default_atom_cap());

/// P_ij = P(i in S and j in S).
Matrix pairwise_inclusion_matrix(const Sampling& s, std::size_t cap = default_atom_cap());

}  // namespace alpha
