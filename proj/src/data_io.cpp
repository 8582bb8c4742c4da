#include "alpha/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "alpha/error.hpp"

namespace alpha {

namespace {

bool skippable(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#' || line[pos] == '%';
}

double parse_real(const std::string& tok, std::size_t line) {
    // strtod rather than from_chars: the latter has no floating-point support in older libstdc++.
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v))
        throw DataError("line " + std::to_string(line) + ": bad number '" + tok + "'", line);
    return v;
}

std::size_t parse_index(const std::string& tok, std::size_t line) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw DataError("line " + std::to_string(line) + ": bad index '" + tok + "'", line);
    return v;
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

}  // namespace

void Dataset::normalize_columns() {
    std::vector<double> norms(cols, 0.0);
    for (const auto& t : entries) norms[t.col] += t.value * t.value;
    for (auto& t : entries)
        if (norms[t.col] > 0.0) t.value /= std::sqrt(norms[t.col]);
}

void Dataset::check_no_zero_columns() const {
    std::vector<bool> seen(cols, false);
    for (const auto& t : entries)
        if (t.value != 0.0) seen[t.col] = true;
    for (std::size_t c = 0; c < cols; ++c)
        if (!seen[c]) throw DataError("column " + std::to_string(c + 1) + " is all zero");
}

std::shared_ptr<const BlockSparseMatrix> Dataset::matrix(PartitionPtr partition) const {
    if (partition->dim() != cols)
        throw DataError("partition covers " + std::to_string(partition->dim()) + " columns, data has " +
                        std::to_string(cols));
    return std::make_shared<const BlockSparseMatrix>(rows, std::move(partition), entries);
}

Dataset read_coo(std::istream& in) {
    Dataset d;
    std::string line;
    std::size_t lineno = 0;
    std::size_t expected = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        const auto tok = tokens(line);
        if (!header) {
            if (tok.size() != 3) throw DataError("line " + std::to_string(lineno) + ": expected header 'm N nnz'", lineno);
            d.rows = parse_index(tok[0], lineno);
            d.cols = parse_index(tok[1], lineno);
            expected = parse_index(tok[2], lineno);
            if (d.rows == 0 || d.cols == 0) throw DataError("line " + std::to_string(lineno) + ": empty matrix", lineno);
            d.entries.reserve(expected);
            header = true;
            continue;
        }
        if (tok.size() != 3) throw DataError("line " + std::to_string(lineno) + ": expected 'row col value'", lineno);
        const std::size_t r = parse_index(tok[0], lineno);
        const std::size_t c = parse_index(tok[1], lineno);
        if (r < 1 || r > d.rows || c < 1 || c > d.cols)
            throw DataError("line " + std::to_string(lineno) + ": index out of range", lineno);
        d.entries.push_back({r - 1, c - 1, parse_real(tok[2], lineno)});
    }
    if (!header) throw DataError("missing header line");
    if (d.entries.size() != expected)
        throw DataError("header announces " + std::to_string(expected) + " entries, found " +
                            std::to_string(d.entries.size()),
                        lineno);
    return d;
}

Vector read_targets(std::istream& in) {
    std::vector<double> vals;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        const auto tok = tokens(line);
        if (tok.size() != 1) throw DataError("line " + std::to_string(lineno) + ": expected one value", lineno);
        vals.push_back(parse_real(tok[0], lineno));
    }
    return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Dataset read_libsvm(std::istream& in) {
    Dataset d;
    std::vector<double> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        const auto tok = tokens(line);
        labels.push_back(parse_real(tok[0], lineno));
        const std::size_t row = labels.size() - 1;
        for (std::size_t k = 1; k < tok.size(); ++k) {
            const auto colon = tok[k].find(':');
            if (colon == std::string::npos)
                throw DataError("line " + std::to_string(lineno) + ": expected idx:val, got '" + tok[k] + "'", lineno);
            const std::size_t c = parse_index(tok[k].substr(0, colon), lineno);
            if (c < 1) throw DataError("line " + std::to_string(lineno) + ": feature indices are 1-based", lineno);
            d.entries.push_back({row, c - 1, parse_real(tok[k].substr(colon + 1), lineno)});
            d.cols = std::max(d.cols, c);
        }
    }
    if (labels.empty()) throw DataError("no data rows");
    d.rows = labels.size();
    d.targets = Eigen::Map<const Vector>(labels.data(), static_cast<Eigen::Index>(labels.size()));
    return d;
}

Dataset load_dataset(const std::string& data_path, const std::string& targets_path) {
    std::ifstream f(data_path);
    if (!f) throw DataError("cannot open " + data_path);
    std::string line;
    bool libsvm = false;
    while (std::getline(f, line)) {
        if (skippable(line)) continue;
        libsvm = line.find(':') != std::string::npos;
        break;
    }
    f.clear();
    f.seekg(0);

    auto prefixed = [](const std::string& path, const DataError& e) { return DataError(path + ": " + e.what(), e.line()); };
    Dataset d;
    try {
        d = libsvm ? read_libsvm(f) : read_coo(f);
    } catch (const DataError& e) {
        throw prefixed(data_path, e);
    }
    if (libsvm) {
        if (!targets_path.empty()) throw DataError("labels are inline in " + data_path + "; drop --targets");
        return d;
    }
    if (targets_path.empty()) throw DataError("coordinate-list data needs --targets");
    std::ifstream t(targets_path);
    if (!t) throw DataError("cannot open " + targets_path);
    try {
        d.targets = read_targets(t);
    } catch (const DataError& e) {
        throw prefixed(targets_path, e);
    }
    if (static_cast<std::size_t>(d.targets.size()) != d.rows)
        throw DataError(targets_path + ": " + std::to_string(d.targets.size()) + " targets for " +
                        std::to_string(d.rows) + " rows");
    return d;
}

void write_coo(std::ostream& out, const Dataset& d) {
    out << d.rows << ' ' << d.cols << ' ' << d.entries.size() << '\n';
    out.precision(17);
    for (const auto& t : d.entries) out << t.row + 1 << ' ' << t.col + 1 << ' ' << t.value << '\n';
}

void write_vector(std::ostream& out, const Vector& v) {
    out.precision(17);
    for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i] << '\n';
}

PartitionPtr make_partition(std::size_t cols, std::size_t block_size) {
    if (block_size == 0) throw ConfigError("block size must be positive");
    std::vector<std::size_t> sizes;
    for (std::size_t c = 0; c < cols; c += block_size) sizes.push_back(std::min(block_size, cols - c));
    return std::make_shared<const BlockPartition>(std::move(sizes));
}

}  // namespace alpha
