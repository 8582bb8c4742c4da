#include "alpha/trace_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include "alpha/error.hpp"

namespace alpha {

namespace {

constexpr const char* kHeader = "k,F,f,psi,theta,touched_nnz,wall_ns";
constexpr const char* kBoundHeader = ",bound_nonacc,bound_acc";

std::string real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void write_trace(std::ostream& out, const Trace& trace, const TraceBounds* bounds) {
    if (bounds && (bounds->nonacc.size() != trace.size() || bounds->acc.size() != trace.size()))
        throw std::invalid_argument("bound columns must match the trace length");
    out << kHeader << (bounds ? kBoundHeader : "") << '\n';
    for (std::size_t r = 0; r < trace.size(); ++r) {
        const auto& row = trace[r];
        out << row.k << ',' << real(row.F) << ',' << real(row.f) << ',' << real(row.psi) << ',' << real(row.theta)
            << ',' << row.touched_nnz << ',' << row.wall_ns;
        if (bounds) out << ',' << real(bounds->nonacc[r]) << ',' << real(bounds->acc[r]);
        out << '\n';
    }
}

ParsedTrace read_trace(std::istream& in) {
    ParsedTrace parsed;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty trace");
    bool with_bounds = false;
    if (line == std::string(kHeader) + kBoundHeader)
        with_bounds = true;
    else if (line != kHeader)
        throw DataError("unexpected trace header '" + line + "'", 1);
    if (with_bounds) parsed.bounds.emplace();

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != (with_bounds ? 9u : 7u))
            throw DataError("line " + std::to_string(lineno) + ": wrong column count", lineno);
        auto num = [&](std::size_t c) {
            char* end = nullptr;
            const double v = std::strtod(cells[c].c_str(), &end);
            if (end == cells[c].c_str() || *end != '\0')
                throw DataError("line " + std::to_string(lineno) + ": bad number '" + cells[c] + "'", lineno);
            return v;
        };
        auto integer = [&](std::size_t c) {
            char* end = nullptr;
            const long long v = std::strtoll(cells[c].c_str(), &end, 10);
            if (end == cells[c].c_str() || *end != '\0')
                throw DataError("line " + std::to_string(lineno) + ": bad integer '" + cells[c] + "'", lineno);
            return v;
        };
        TraceRow row;
        row.k = static_cast<std::size_t>(integer(0));
        row.F = num(1);
        row.f = num(2);
        row.psi = num(3);
        row.theta = num(4);
        row.touched_nnz = static_cast<std::uint64_t>(integer(5));
        row.wall_ns = integer(6);
        parsed.rows.push_back(row);
        if (with_bounds) {
            parsed.bounds->nonacc.push_back(num(7));
            parsed.bounds->acc.push_back(num(8));
        }
    }
    return parsed;
}

}  // namespace alpha
