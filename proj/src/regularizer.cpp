#include "alpha/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alpha/error.hpp"

namespace alpha {

Regularizer::Regularizer(Kind kind, PartitionPtr partition, Vector lambda)
    : kind_(kind), partition_(std::move(partition)), lambda_(std::move(lambda)) {
    if (static_cast<std::size_t>(lambda_.size()) != partition_->num_blocks())
        throw ConfigError("lambda needs one entry per block");
    for (Eigen::Index i = 0; i < lambda_.size(); ++i)
        if (!(lambda_[i] >= 0.0) || !std::isfinite(lambda_[i])) throw ConfigError("lambda must be finite and >= 0");
}

Regularizer Regularizer::zero(PartitionPtr partition) {
    const auto n = static_cast<Eigen::Index>(partition->num_blocks());
    return Regularizer(Kind::zero, std::move(partition), Vector::Zero(n));
}

Regularizer Regularizer::l1(PartitionPtr partition, Vector lambda) {
    if (!partition->all_scalar()) throw ConfigError("l1 regularizer requires scalar blocks");
    return Regularizer(Kind::l1, std::move(partition), std::move(lambda));
}

Regularizer Regularizer::l1(PartitionPtr partition, double lambda) {
    const auto n = static_cast<Eigen::Index>(partition->num_blocks());
    return l1(std::move(partition), Vector::Constant(n, lambda));
}

Regularizer Regularizer::sq_l2(PartitionPtr partition, Vector lambda) {
    return Regularizer(Kind::sq_l2, std::move(partition), std::move(lambda));
}

Regularizer Regularizer::sq_l2(PartitionPtr partition, double lambda) {
    const auto n = static_cast<Eigen::Index>(partition->num_blocks());
    return sq_l2(std::move(partition), Vector::Constant(n, lambda));
}

Regularizer Regularizer::box(PartitionPtr partition, double lo, double hi) {
    if (!(lo <= hi)) throw ConfigError("box requires lo <= hi");
    const auto n = static_cast<Eigen::Index>(partition->num_blocks());
    Regularizer r(Kind::box, std::move(partition), Vector::Zero(n));
    r.lo_ = lo;
    r.hi_ = hi;
    return r;
}

void Regularizer::check_metric(const BlockMetric& metric) const {
    if (!(metric.partition() == *partition_)) throw ConfigError("regularizer and metric partitions differ");
    switch (kind_) {
        case Kind::zero:
            return;
        case Kind::l1:
            if (!metric.is_identity()) throw ConfigError("l1 regularizer requires the identity metric");
            return;
        case Kind::sq_l2:
            if (!metric.is_identity()) throw ConfigError("sq_l2 regularizer requires the identity metric");
            return;
        case Kind::box:
            if (!metric.is_diagonal()) throw ConfigError("box regularizer requires a diagonal metric");
            return;
    }
}

double Regularizer::block_value(std::size_t i, const Eigen::Ref<const Vector>& xi) const {
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::l1:
            return lambda(i) * xi.cwiseAbs().sum();
        case Kind::sq_l2:
            return 0.5 * lambda(i) * xi.squaredNorm();
        case Kind::box: {
            // Convex combinations of feasible points may leave the box by a few ulps.
            const double slack = kBoxSlack * std::max(1.0, std::max(std::abs(lo_), std::abs(hi_)));
            for (Eigen::Index c = 0; c < xi.size(); ++c)
                if (xi[c] < lo_ - slack || xi[c] > hi_ + slack) return std::numeric_limits<double>::infinity();
            return 0.0;
        }
    }
    return 0.0;
}

double Regularizer::value(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != partition_->dim()) throw std::invalid_argument("regularizer: length mismatch");
    if (kind_ == Kind::zero) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < partition_->num_blocks(); ++i)
        s += block_value(i, x.segment(static_cast<Eigen::Index>(partition_->offset(i)),
                                      static_cast<Eigen::Index>(partition_->size(i))));
    return s;
}

bool Regularizer::in_domain(const Vector& x) const { return std::isfinite(value(x)); }

void Regularizer::prox_step(std::size_t i, const Eigen::Ref<const Vector>& g, const Eigen::Ref<const Vector>& z,
                            const ProxScale& scale, const BlockMetric& metric, Eigen::Ref<Vector> out) const {
    const double step = scale.step();
    switch (kind_) {
        case Kind::zero:
        case Kind::box: {
            if (metric.kind(i) == BlockMetric::Kind::identity) {
                out = z - step * g;
            } else {
                Vector d(g.size());
                metric.solve_block(i, g, d);
                out = z - step * d;
            }
            if (kind_ == Kind::box) out = out.cwiseMax(lo_).cwiseMin(hi_);
            return;
        }
        case Kind::l1: {
            const double u = z[0] - step * g[0];
            const double t = lambda(i) * step;
            out[0] = u > t ? u - t : (u < -t ? u + t : 0.0);
            return;
        }
        case Kind::sq_l2: {
            const double tau = scale.tau();
            out = (tau * z - g) / (tau + lambda(i));
            return;
        }
    }
}

Vector Regularizer::prox_step(std::size_t i, const Vector& g, const Vector& z, double tau,
                              const BlockMetric& metric) const {
    if (!(tau > 0.0)) throw std::invalid_argument("prox_step: tau must be positive");
    Vector out(z.size());
    prox_step(i, g, z, ProxScale{1.0, tau, 1.0}, metric, out);
    return out;
}

Vector initial_point(const Regularizer& reg) {
    Vector x = Vector::Zero(static_cast<Eigen::Index>(reg.partition().dim()));
    if (reg.kind() == Regularizer::Kind::box) x = x.cwiseMax(reg.lo()).cwiseMin(reg.hi());
    return x;
}

}  // namespace alpha
