#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "alpha/data_io.hpp"
#include "alpha/error.hpp"
#include "alpha/trace_io.hpp"
#include "support/generators.hpp"

using namespace alpha;

namespace {

std::size_t error_line(const std::string& text, Dataset (*reader)(std::istream&)) {
    std::istringstream in(text);
    try {
        reader(in);
    } catch (const DataError& e) {
        return e.line();
    }
    return static_cast<std::size_t>(-1);
}

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "alpha_test_io";
    std::filesystem::create_directories(dir);
    return dir;
}

void write_text(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("coordinate list") {
    std::istringstream in("# comment\n% also a comment\n2 3 3\n1 1 1.5\n2 2 -2\n\n1 3 4e-1\n");
    const Dataset d = read_coo(in);
    CHECK(d.rows == 2);
    CHECK(d.cols == 3);
    REQUIRE(d.entries.size() == 3);
    CHECK(d.entries[2].row == 0);
    CHECK(d.entries[2].col == 2);
    CHECK(d.entries[2].value == 0.4);
    CHECK_NOTHROW(d.check_no_zero_columns());
    const Matrix A = d.matrix(BlockPartition::scalar(3))->to_dense();
    CHECK(A(0, 0) == 1.5);
    CHECK(A(1, 1) == -2.0);
    CHECK(A(1, 0) == 0.0);
}

TEST_CASE("coordinate list errors carry line numbers") {
    CHECK(error_line("2 2 1\n1 1 x\n", read_coo) == 2);
    CHECK(error_line("2 2 2\n1 1 1\n# c\n3 1 1\n", read_coo) == 4);
    CHECK(error_line("2 2 1\n1 1\n", read_coo) == 2);
    CHECK(error_line("2 2\n", read_coo) == 1);
    CHECK(error_line("0 2 0\n", read_coo) == 1);
    CHECK(error_line("2 2 1\n1 1 nan\n", read_coo) == 2);
    CHECK(error_line("2 2 1\n1 0 1\n", read_coo) == 2);
    std::istringstream missing("# nothing\n");
    CHECK_THROWS_AS(read_coo(missing), DataError);
    std::istringstream count("2 2 3\n1 1 1\n");
    CHECK_THROWS_WITH_AS(read_coo(count), doctest::Contains("announces 3"), DataError);
}

TEST_CASE("zero columns are rejected") {
    std::istringstream in("2 3 2\n1 1 1\n2 3 1\n");
    const Dataset d = read_coo(in);
    CHECK_THROWS_WITH_AS(d.check_no_zero_columns(), doctest::Contains("column 2"), DataError);
    std::istringstream explicit_zero("1 1 1\n1 1 0\n");
    CHECK_THROWS_AS(read_coo(explicit_zero).check_no_zero_columns(), DataError);
}

TEST_CASE("targets") {
    std::istringstream in("1\n# skip\n-2.5\n\n3e2\n");
    const Vector t = read_targets(in);
    REQUIRE(t.size() == 3);
    CHECK(t[1] == -2.5);
    CHECK(t[2] == 300.0);
    std::istringstream bad("1\n2 3\n");
    try {
        read_targets(bad);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("libsvm") {
    std::istringstream in("+1 1:0.5 3:2\n-1 2:1\n");
    const Dataset d = read_libsvm(in);
    CHECK(d.rows == 2);
    CHECK(d.cols == 3);
    CHECK(d.targets[0] == 1.0);
    CHECK(d.targets[1] == -1.0);
    CHECK(d.entries.size() == 3);
    CHECK(error_line("1 1:0.5\n1 0:1\n", read_libsvm) == 2);
    CHECK(error_line("1 1:0.5\n1 2\n", read_libsvm) == 2);
    CHECK(error_line("1 1:abc\n", read_libsvm) == 1);
}

TEST_CASE("column normalization and partitions") {
    std::istringstream in("2 2 3\n1 1 3\n2 1 4\n2 2 -2\n");
    Dataset d = read_coo(in);
    d.normalize_columns();
    const Matrix A = d.matrix(BlockPartition::scalar(2))->to_dense();
    CHECK(A.col(0).norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(A(1, 1) == -1.0);

    const auto p = make_partition(7, 3);
    CHECK(p->num_blocks() == 3);
    CHECK(p->size(2) == 1);
    CHECK_THROWS_AS(make_partition(7, 0), ConfigError);
    CHECK_THROWS_AS(d.matrix(BlockPartition::scalar(3)), DataError);
}

TEST_CASE("load_dataset picks the format and checks target counts") {
    const auto dir = scratch_dir();
    write_text(dir / "a.coo", "2 2 2\n1 1 1\n2 2 1\n");
    write_text(dir / "a.b", "1\n2\n");
    write_text(dir / "short.b", "1\n");
    write_text(dir / "bad.b", "1\noops\n");
    write_text(dir / "a.svm", "1 1:1\n-1 2:1\n");

    const Dataset coo = load_dataset((dir / "a.coo").string(), (dir / "a.b").string());
    CHECK(coo.targets.size() == 2);
    const Dataset svm = load_dataset((dir / "a.svm").string(), "");
    CHECK(svm.targets[1] == -1.0);

    CHECK_THROWS_AS(load_dataset((dir / "a.coo").string(), ""), DataError);
    CHECK_THROWS_AS(load_dataset((dir / "a.svm").string(), (dir / "a.b").string()), DataError);
    CHECK_THROWS_AS(load_dataset((dir / "a.coo").string(), (dir / "short.b").string()), DataError);
    CHECK_THROWS_AS(load_dataset((dir / "missing.coo").string(), (dir / "a.b").string()), DataError);
    try {
        load_dataset((dir / "a.coo").string(), (dir / "bad.b").string());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("bad.b") != std::string::npos);
    }
}

TEST_CASE("property: coordinate list round trip") {
    gen::for_all(91, 50, [](gen::Gen& g, int c) {
        CAPTURE(c);
        Dataset d;
        d.rows = g.between(1, 20);
        d.cols = g.between(1, 20);
        d.entries = gen::sparse_triplets(g, d.rows, d.cols, 0.3);
        std::stringstream buf;
        write_coo(buf, d);
        const Dataset back = read_coo(buf);
        CHECK(back.rows == d.rows);
        CHECK(back.cols == d.cols);
        REQUIRE(back.entries.size() == d.entries.size());
        for (std::size_t k = 0; k < d.entries.size(); ++k) {
            CHECK(back.entries[k].row == d.entries[k].row);
            CHECK(back.entries[k].col == d.entries[k].col);
            CHECK(back.entries[k].value == d.entries[k].value);
        }
        const Vector v = g.normal_vector(d.rows);
        std::stringstream vb;
        write_vector(vb, v);
        CHECK(read_targets(vb) == v);
    });
}

TEST_CASE("property: trace round trip") {
    gen::for_all(92, 30, [](gen::Gen& g, int c) {
        CAPTURE(c);
        Trace t;
        const std::size_t rows = g.between(1, 40);
        for (std::size_t k = 1; k <= rows; ++k) {
            TraceRow r;
            r.k = k * 3;
            r.f = g.normal();
            r.psi = g.coin(0.2) ? std::nan("") : std::abs(g.normal());
            r.F = r.f + r.psi;
            r.theta = g.uniform(0.0, 1.0);
            r.touched_nnz = g.index(1u << 30);
            r.wall_ns = static_cast<std::int64_t>(g.index(1u << 30));
            t.push_back(r);
        }
        TraceBounds b;
        for (std::size_t i = 0; i < t.size(); ++i) {
            b.nonacc.push_back(g.uniform(0.0, 10.0));
            b.acc.push_back(g.uniform(0.0, 10.0));
        }
        const bool with_bounds = c % 2;
        std::stringstream buf;
        write_trace(buf, t, with_bounds ? &b : nullptr);
        const auto header = buf.str().substr(0, buf.str().find('\n'));
        CHECK(header == (with_bounds ? "k,F,f,psi,theta,touched_nnz,wall_ns,bound_nonacc,bound_acc"
                                     : "k,F,f,psi,theta,touched_nnz,wall_ns"));
        const ParsedTrace back = read_trace(buf);
        REQUIRE(back.rows.size() == t.size());
        auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(back.rows[i].k == t[i].k);
            CHECK(same(back.rows[i].F, t[i].F));
            CHECK(back.rows[i].f == t[i].f);
            CHECK(same(back.rows[i].psi, t[i].psi));
            CHECK(back.rows[i].theta == t[i].theta);
            CHECK(back.rows[i].touched_nnz == t[i].touched_nnz);
            CHECK(back.rows[i].wall_ns == t[i].wall_ns);
        }
        CHECK(back.bounds.has_value() == with_bounds);
        if (with_bounds) {
            CHECK(back.bounds->nonacc == b.nonacc);
            CHECK(back.bounds->acc == b.acc);
        }
    });
}

TEST_CASE("malformed traces") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_trace(empty), DataError);
    std::istringstream header("a,b,c\n");
    CHECK_THROWS_AS(read_trace(header), DataError);
    std::istringstream cols("k,F,f,psi,theta,touched_nnz,wall_ns\n1,2,3\n");
    CHECK_THROWS_AS(read_trace(cols), DataError);
    std::istringstream number("k,F,f,psi,theta,touched_nnz,wall_ns\n1,2,3,x,0.5,1,1\n");
    CHECK_THROWS_AS(read_trace(number), DataError);
    Trace t(2);
    TraceBounds b;
    b.nonacc = {1.0};
    b.acc = {1.0};
    std::ostringstream out;
    CHECK_THROWS_AS(write_trace(out, t, &b), std::invalid_argument);
}
