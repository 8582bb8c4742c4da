#include "alpha/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "alpha/error.hpp"

namespace alpha {

namespace {

constexpr double kSumTolerance = 1e-12;

// C(n, k), or nullopt when it does not fit in size_t.
std::optional<std::size_t> binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > static_cast<unsigned __int128>(SIZE_MAX)) return std::nullopt;
    }
    return static_cast<std::size_t>(r);
}

// Lexicographic k-subsets of {base, ..., base + n - 1}.
std::vector<BlockSet> combinations(std::size_t base, std::size_t n, std::size_t k) {
    std::vector<BlockSet> out;
    BlockSet cur(k);
    std::iota(cur.begin(), cur.end(), base);
    while (true) {
        out.push_back(cur);
        std::size_t j = k;
        while (j > 0 && cur[j - 1] == base + n - k + (j - 1)) --j;
        if (j == 0) break;
        ++cur[j - 1];
        for (std::size_t t = j; t < k; ++t) cur[t] = cur[t - 1] + 1;
    }
    return out;
}

std::size_t parse_size(std::string_view s, std::string_view what) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("invalid " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

std::vector<double> parse_doubles(std::string_view s) {
    std::vector<double> out;
    std::string tok;
    std::stringstream ss{std::string(s)};
    while (std::getline(ss, tok, ',')) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (tok.empty() || end != tok.c_str() + tok.size())
            throw ConfigError("invalid probability '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ProbabilityVector

ProbabilityVector::ProbabilityVector(Vector p) : p_(std::move(p)) {
    for (Eigen::Index i = 0; i < p_.size(); ++i)
        if (!(p_[i] > 0.0 && p_[i] <= 1.0))
            throw ConfigError("sampling is not proper: p_" + std::to_string(i) + " = " + std::to_string(p_[i]));
}

bool ProbabilityVector::is_uniform() const { return p_.maxCoeff() == p_.minCoeff(); }

// ---------------------------------------------------------------------------
// Sampling

Sampling::Sampling(Kind kind, std::size_t n)
    : kind_(kind), n_(n), p_(Vector::Ones(static_cast<Eigen::Index>(std::max<std::size_t>(n, 1)))) {
    if (n == 0) throw ConfigError("sampling needs at least one block");
}

Sampling Sampling::full(std::size_t n) {
    Sampling s(Kind::full, n);
    s.tau_ = n;
    s.finalize();
    return s;
}

Sampling Sampling::serial(Vector q) {
    Sampling s(Kind::serial, static_cast<std::size_t>(q.size()));
    if ((q.array() < 0.0).any()) throw ConfigError("serial sampling has a negative probability");
    if (std::abs(q.sum() - 1.0) > 1e-9)
        throw ConfigError("serial sampling probabilities sum to " + std::to_string(q.sum()) + ", not 1");
    s.q_ = q / q.sum();
    s.q_cumulative_.resize(q.size());
    double c = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) s.q_cumulative_[i] = (c += s.q_[i]);
    s.q_cumulative_[q.size() - 1] = 1.0;
    s.tau_ = 1;
    s.finalize();
    return s;
}

Sampling Sampling::serial_uniform(std::size_t n) {
    return serial(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

Sampling Sampling::tau_nice(std::size_t n, std::size_t tau) {
    Sampling s(Kind::tau_nice, n);
    if (tau < 1 || tau > n) throw ConfigError("tau-nice sampling needs 1 <= tau <= n");
    s.tau_ = tau;
    s.finalize();
    return s;
}

Sampling Sampling::distributed(std::size_t n, std::size_t groups, std::size_t tau) {
    Sampling s(Kind::distributed, n);
    if (groups < 1 || n % groups != 0)
        throw ConfigError("distributed sampling needs the group count to divide n (unequal groups are not supported)");
    if (tau < 1 || tau > n / groups) throw ConfigError("distributed sampling needs 1 <= tau <= n/c");
    s.groups_ = groups;
    s.tau_ = tau;
    s.finalize();
    return s;
}

Sampling Sampling::from_atoms(std::size_t n, std::vector<Atom> atoms) {
    Sampling s(Kind::explicit_atoms, n);
    double total = 0.0;
    for (auto& a : atoms) {
        if (!(a.probability >= 0.0)) throw ConfigError("atom probability must be nonnegative");
        std::sort(a.blocks.begin(), a.blocks.end());
        if (std::adjacent_find(a.blocks.begin(), a.blocks.end()) != a.blocks.end())
            throw ConfigError("atom lists a block twice");
        if (!a.blocks.empty() && a.blocks.back() >= n) throw ConfigError("atom block index out of range");
        total += a.probability;
    }
    if (std::abs(total - 1.0) > kSumTolerance)
        throw ConfigError("atom probabilities sum to " + std::to_string(total) + ", not 1");
    s.atoms_ = std::move(atoms);
    double c = 0.0;
    for (const auto& a : s.atoms_) s.atom_cumulative_.push_back(c += a.probability);
    s.atom_cumulative_.back() = 1.0;
    s.finalize();
    return s;
}

void Sampling::finalize() {
    const auto n = static_cast<Eigen::Index>(n_);
    Vector p(n);
    switch (kind_) {
    case Kind::full: p.setOnes(); break;
    case Kind::serial: p = q_; break;
    case Kind::tau_nice: p.setConstant(static_cast<double>(tau_) / static_cast<double>(n_)); break;
    case Kind::distributed:
        p.setConstant(static_cast<double>(tau_ * groups_) / static_cast<double>(n_));
        break;
    case Kind::explicit_atoms:
        p.setZero();
        for (const auto& a : atoms_)
            for (std::size_t i : a.blocks) p[static_cast<Eigen::Index>(i)] += a.probability;
        // Summation error may push a certain inclusion just past 1.
        p = p.cwiseMin(1.0);
        break;
    }
    p_ = ProbabilityVector(std::move(p));
}

bool Sampling::is_serial() const {
    if (kind_ == Kind::serial) return true;
    if (kind_ == Kind::tau_nice || kind_ == Kind::full) return tau_ == 1;
    if (kind_ == Kind::distributed) return groups_ == 1 && tau_ == 1;
    return std::all_of(atoms_.begin(), atoms_.end(),
                       [](const Atom& a) { return a.probability == 0.0 || a.blocks.size() == 1; });
}

std::string Sampling::describe() const {
    switch (kind_) {
    case Kind::full: return "full";
    case Kind::serial: return is_uniform() ? "serial-uniform" : "serial";
    case Kind::tau_nice: return "tau-nice:" + std::to_string(tau_);
    case Kind::distributed: return "distributed:" + std::to_string(groups_) + "," + std::to_string(tau_);
    case Kind::explicit_atoms: return "explicit(" + std::to_string(atoms_.size()) + " atoms)";
    }
    return "?";
}

Sampling Sampling::parse(std::string_view spec, std::size_t n) {
    if (spec == "full") return full(n);
    if (spec == "serial-uniform") return serial_uniform(n);
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ConfigError("unknown sampling '" + std::string(spec) + "'");
    const auto head = spec.substr(0, colon);
    const auto rest = spec.substr(colon + 1);
    if (head == "serial") {
        const auto q = parse_doubles(rest);
        if (q.size() != n)
            throw ConfigError("serial sampling lists " + std::to_string(q.size()) + " probabilities for " +
                              std::to_string(n) + " blocks");
        return serial(Eigen::Map<const Vector>(q.data(), static_cast<Eigen::Index>(q.size())));
    }
    if (head == "tau-nice") return tau_nice(n, parse_size(rest, "tau"));
    if (head == "distributed") {
        const auto comma = rest.find(',');
        if (comma == std::string_view::npos) throw ConfigError("distributed sampling needs '<c>,<tau>'");
        return distributed(n, parse_size(rest.substr(0, comma), "group count"),
                           parse_size(rest.substr(comma + 1), "tau"));
    }
    throw ConfigError("unknown sampling '" + std::string(spec) + "'");
}

// ---------------------------------------------------------------------------
// SamplingDrawer

SamplingDrawer::SamplingDrawer(const Sampling& sampling, std::uint64_t seed)
    : sampling_(&sampling), rng_(seed), perm_(sampling.num_blocks()) {
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
}

void SamplingDrawer::draw(BlockSet& out) {
    const Sampling& s = *sampling_;
    out.clear();
    switch (s.kind_) {
    case Sampling::Kind::full:
        out.resize(s.n_);
        std::iota(out.begin(), out.end(), std::size_t{0});
        return;
    case Sampling::Kind::serial: {
        const double u = rng_.uniform01();
        const double* c = s.q_cumulative_.data();
        auto it = std::upper_bound(c, c + s.q_cumulative_.size(), u);
        auto i = static_cast<std::size_t>(it - c);
        // Skip zero-probability blocks that share a cumulative value.
        while (s.q_[static_cast<Eigen::Index>(i)] == 0.0) ++i;
        out.push_back(i);
        return;
    }
    case Sampling::Kind::tau_nice: {
        const std::size_t n = s.n_;
        for (std::size_t j = 0; j < s.tau_; ++j) {
            const std::size_t r = j + static_cast<std::size_t>(rng_.uniform_index(n - j));
            std::swap(perm_[j], perm_[r]);
            out.push_back(perm_[j]);
        }
        break;
    }
    case Sampling::Kind::distributed: {
        const std::size_t size = s.n_ / s.groups_;
        for (std::size_t g = 0; g < s.groups_; ++g) {
            std::size_t* base = perm_.data() + g * size;
            for (std::size_t j = 0; j < s.tau_; ++j) {
                const std::size_t r = j + static_cast<std::size_t>(rng_.uniform_index(size - j));
                std::swap(base[j], base[r]);
                out.push_back(base[j]);
            }
        }
        break;
    }
    case Sampling::Kind::explicit_atoms: {
        const double u = rng_.uniform01();
        auto it = std::upper_bound(s.atom_cumulative_.begin(), s.atom_cumulative_.end(), u);
        auto a = static_cast<std::size_t>(it - s.atom_cumulative_.begin());
        while (s.atoms_[a].probability == 0.0) ++a;
        out = s.atoms_[a].blocks;
        return;
    }
    }
    std::sort(out.begin(), out.end());
}

// ---------------------------------------------------------------------------
// Enumeration

std::size_t default_atom_cap() {
    if (const char* env = std::getenv("ALPHA_ATOM_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::size_t{1} << 20;
}

std::optional<std::size_t> atom_count(const Sampling& s) {
    switch (s.kind()) {
    case Sampling::Kind::full: return 1;
    case Sampling::Kind::serial: return s.num_blocks();
    case Sampling::Kind::tau_nice: return binomial(s.num_blocks(), s.tau());
    case Sampling::Kind::distributed: {
        const auto per = binomial(s.num_blocks() / s.groups(), s.tau());
        if (!per) return std::nullopt;
        unsigned __int128 total = 1;
        for (std::size_t g = 0; g < s.groups(); ++g) {
            total *= *per;
            if (total > static_cast<unsigned __int128>(SIZE_MAX)) return std::nullopt;
        }
        return static_cast<std::size_t>(total);
    }
    case Sampling::Kind::explicit_atoms: return s.atoms().size();
    }
    return std::nullopt;
}

std::vector<Atom> enumerate_atoms(const Sampling& s, std::size_t cap) {
    const auto count = atom_count(s);
    if (!count || *count > cap)
        throw AtomCapExceeded("sampling " + s.describe() + " has more than " + std::to_string(cap) +
                              " atoms; use the Monte Carlo path");
    const std::size_t n = s.num_blocks();
    std::vector<Atom> atoms;
    atoms.reserve(*count);
    switch (s.kind()) {
    case Sampling::Kind::full: {
        BlockSet all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        atoms.push_back({std::move(all), 1.0});
        break;
    }
    case Sampling::Kind::serial:
        for (std::size_t i = 0; i < n; ++i)
            atoms.push_back({{i}, s.serial_probabilities()[static_cast<Eigen::Index>(i)]});
        break;
    case Sampling::Kind::tau_nice: {
        const double prob = 1.0 / static_cast<double>(*count);
        for (auto& c : combinations(0, n, s.tau())) atoms.push_back({std::move(c), prob});
        break;
    }
    case Sampling::Kind::distributed: {
        const std::size_t size = n / s.groups();
        std::vector<std::vector<BlockSet>> per_group;
        for (std::size_t g = 0; g < s.groups(); ++g) per_group.push_back(combinations(g * size, size, s.tau()));
        const double prob = 1.0 / static_cast<double>(*count);
        std::vector<std::size_t> idx(s.groups(), 0);
        while (true) {
            BlockSet u;
            for (std::size_t g = 0; g < s.groups(); ++g)
                u.insert(u.end(), per_group[g][idx[g]].begin(), per_group[g][idx[g]].end());
            atoms.push_back({std::move(u), prob});
            std::size_t g = s.groups();
            while (g > 0) {
                --g;
                if (++idx[g] < per_group[g].size()) break;
                idx[g] = 0;
                if (g == 0) return atoms;
            }
        }
    }
    case Sampling::Kind::explicit_atoms: atoms = s.atoms(); break;
    }
    return atoms;
}

Matrix pairwise_inclusion_matrix(const Sampling& s, std::size_t cap) {
    const auto n = static_cast<Eigen::Index>(s.num_blocks());
    Matrix P = Matrix::Zero(n, n);
    for (const auto& a : enumerate_atoms(s, cap))
        for (std::size_t i : a.blocks)
            for (std::size_t j : a.blocks)
                P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += a.probability;
    return P;
}

}  // namespace alpha
