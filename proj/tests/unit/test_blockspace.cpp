#include <doctest.h>

#include "alpha/blockspace.hpp"
#include "support/generators.hpp"

using namespace alpha;

namespace {

PartitionPtr sizes(std::vector<std::size_t> s) { return std::make_shared<const BlockPartition>(std::move(s)); }

BlockVector vec(PartitionPtr p, std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double d : v) x[k++] = d;
    return BlockVector(std::move(p), x);
}

BlockMetric random_metric(gen::Gen& g, PartitionPtr part) {
    switch (g.index(3)) {
        case 0:
            return BlockMetric::identity(part);
        case 1:
            return BlockMetric::diagonal(part, g.positive_vector(part->dim(), 0.2, 3.0));
        default: {
            std::vector<Matrix> blocks;
            for (std::size_t i = 0; i < part->num_blocks(); ++i) blocks.push_back(gen::spd(g, part->size(i)));
            return BlockMetric::dense(part, blocks);
        }
    }
}

}  // namespace

TEST_CASE("partition offsets and sizes") {
    const BlockPartition p({2, 1, 3});
    CHECK(p.num_blocks() == 3);
    CHECK(p.dim() == 6);
    CHECK(p.offset(0) == 0);
    CHECK(p.offset(1) == 2);
    CHECK(p.offset(2) == 3);
    CHECK(p.block_of(4) == 2);
    CHECK_THROWS(BlockPartition({2, 0}));
    CHECK_THROWS(BlockPartition(std::vector<std::size_t>{}));
}

TEST_CASE("block_norm_sq") {
    const auto p = sizes({2});
    CHECK(block_norm_sq(vec(p, {3, 4}), 0, BlockMetric::identity(p)) == doctest::Approx(25.0));
    CHECK(block_norm_sq(vec(p, {0, 0}), 0, BlockMetric::identity(p)) == 0.0);
    Vector d(2);
    d << 2, 1;
    CHECK(block_norm_sq(vec(p, {1, 1}), 0, BlockMetric::diagonal(p, d)) == doctest::Approx(3.0));
    CHECK_THROWS(block_norm_sq(vec(p, {1, 1}), 1, BlockMetric::identity(p)));
}

TEST_CASE("weighted_norm_sq") {
    const auto p = BlockPartition::scalar(2);
    Vector w(2);
    w << 2, 3;
    CHECK(weighted_norm_sq(vec(p, {1, 1}), Weights(w), BlockMetric::identity(p)) == doctest::Approx(5.0));
    CHECK(weighted_norm_sq(vec(p, {1, 0}), Weights::ones(2), BlockMetric::identity(p)) == doctest::Approx(1.0));
    CHECK_THROWS(weighted_norm_sq(vec(p, {1, 1}), Weights::ones(3), BlockMetric::identity(p)));
}

TEST_CASE("weighted_inner") {
    const auto p = BlockPartition::scalar(2);
    Vector w(2);
    w << 2, 3;
    CHECK(weighted_inner(vec(p, {1, 2}), vec(p, {1, 1}), Weights(w)) == doctest::Approx(8.0));
    CHECK(weighted_inner(vec(p, {1, 0}), vec(p, {0, 1}), Weights::ones(2)) == 0.0);
    CHECK_THROWS(weighted_inner(vec(p, {1, 0}), vec(BlockPartition::scalar(3), {0, 1, 0}), Weights::ones(2)));
}

TEST_CASE("restrict_to") {
    const auto p = BlockPartition::scalar(3);
    const auto h = vec(p, {1, 2, 3});
    CHECK(restrict_to(h, {0, 2}).values() == vec(p, {1, 0, 3}).values());
    CHECK(restrict_to(h, {}).values() == Vector::Zero(3));
    CHECK(restrict_to(h, {0, 1, 2}).values() == h.values());
}

TEST_CASE("scale_blocks") {
    const auto p = sizes({2, 1});
    Vector v(2);
    v << 2, 5;
    CHECK(scale_blocks(Weights(v), vec(p, {1, 1, 1})).values() == vec(p, {2, 2, 5}).values());
    CHECK(scale_blocks(Weights::ones(2), vec(p, {1, 7, 1})).values() == vec(p, {1, 7, 1}).values());
}

TEST_CASE("metric apply and solve") {
    const auto p = BlockPartition::scalar(1);
    Vector d(1);
    d << 2;
    const auto m = BlockMetric::diagonal(p, d);
    CHECK(metric_apply(m, vec(p, {4})).values()[0] == doctest::Approx(8.0));
    CHECK(metric_solve(m, vec(p, {4})).values()[0] == doctest::Approx(2.0));

    const auto p2 = sizes({2});
    Matrix B(2, 2);
    B << 2, 1, 1, 3;
    const auto dm = BlockMetric::dense(p2, {B});
    const auto x = vec(p2, {0.7, -1.3});
    const auto back = metric_solve(dm, metric_apply(dm, x));
    CHECK((back.values() - x.values()).norm() <= 1e-12 * x.values().norm());

    Matrix bad(2, 2);
    bad << 1, 2, 2, 1;
    CHECK_THROWS(BlockMetric::dense(p2, {bad}));
    CHECK_THROWS(BlockMetric::diagonal(p, Vector::Zero(1)));
}

TEST_CASE("weights reject nonpositive entries") {
    CHECK_THROWS(Weights(Vector::Zero(2)));
    Vector w(2);
    w << 1, -1;
    CHECK_THROWS(Weights{w});
}

TEST_CASE("property: parallelogram expansion") {
    gen::for_all(11, 200, [](gen::Gen& g, int c) {
        CAPTURE(c);
        const auto part = sizes(g.block_sizes(g.between(1, 5), 3));
        const auto m = random_metric(g, part);
        const BlockVector x(part, g.normal_vector(part->dim()));
        const BlockVector y(part, g.normal_vector(part->dim()));
        const Weights w(g.positive_vector(part->num_blocks()));
        const BlockVector s(part, x.values() + y.values());
        const double lhs = weighted_norm_sq(s, w, m);
        const double rhs =
            weighted_norm_sq(x, w, m) + 2.0 * weighted_inner(metric_apply(m, x), y, w) + weighted_norm_sq(y, w, m);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    });
}

TEST_CASE("property: weighted norm is the weighted sum of block norms and is positive") {
    gen::for_all(12, 200, [](gen::Gen& g, int c) {
        CAPTURE(c);
        const auto part = sizes(g.block_sizes(g.between(1, 6), 3));
        const auto m = random_metric(g, part);
        const BlockVector x(part, g.normal_vector(part->dim()));
        const Weights w(g.positive_vector(part->num_blocks()));
        double s = 0.0;
        for (std::size_t i = 0; i < part->num_blocks(); ++i) s += w[i] * block_norm_sq(x, i, m);
        CHECK(weighted_norm_sq(x, w, m) == doctest::Approx(s).epsilon(1e-12));
        CHECK(weighted_norm_sq(x, w, m) > 0.0);
    });
}

TEST_CASE("property: restriction is idempotent and additive over disjoint sets") {
    gen::for_all(13, 200, [](gen::Gen& g, int c) {
        CAPTURE(c);
        const std::size_t n = g.between(1, 8);
        const auto part = sizes(g.block_sizes(n, 2));
        const BlockVector h(part, g.normal_vector(part->dim()));
        BlockSet s1, s2, both;
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = g.index(3);
            if (r == 0) s1.push_back(i);
            if (r == 1) s2.push_back(i);
            if (r < 2) both.push_back(i);
        }
        CHECK(restrict_to(restrict_to(h, s1), s1).values() == restrict_to(h, s1).values());
        CHECK((restrict_to(h, s1).values() + restrict_to(h, s2).values()) == restrict_to(h, both).values());
        const BlockVector h2(part, g.normal_vector(part->dim()));
        const BlockVector sum(part, 2.0 * h.values() + h2.values());
        const Vector lin = 2.0 * restrict_to(h, s1).values() + restrict_to(h2, s1).values();
        CHECK((restrict_to(sum, s1).values() - lin).norm() <= 1e-14 * std::max(1.0, lin.norm()));
    });
}

TEST_CASE("property: dense metric round trip") {
    gen::for_all(14, 100, [](gen::Gen& g, int c) {
        CAPTURE(c);
        const auto part = sizes(g.block_sizes(g.between(1, 4), 4));
        std::vector<Matrix> blocks;
        for (std::size_t i = 0; i < part->num_blocks(); ++i) blocks.push_back(gen::spd(g, part->size(i)));
        const auto m = BlockMetric::dense(part, blocks);
        const BlockVector x(part, g.normal_vector(part->dim()));
        const auto back = metric_solve(m, metric_apply(m, x));
        CHECK((back.values() - x.values()).norm() <= 1e-12 * std::max(1.0, x.values().norm()));
    });
}
