#pragma once

#include <istream>
#include <ostream>
#include <vector>

#include "alpha/solver.hpp"

namespace alpha {

/// Optional per-row theorem bounds, written as `bound_nonacc,bound_acc`.
struct TraceBounds {
    std::vector<double> nonacc;
    std::vector<double> acc;
};

/// Header `k,F,f,psi,theta,touched_nnz,wall_ns`; reals printed with 17 significant digits.
void write_trace(std::ostream& out, const Trace& trace, const TraceBounds* bounds = nullptr);

struct ParsedTrace {
    Trace rows;
    std::optional<TraceBounds> bounds;
};

/// Inverse of write_trace. Throws DataError on malformed input.
ParsedTrace read_trace(std::istream& in);

}  // namespace alpha
