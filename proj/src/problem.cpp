#include "lse/problem.hpp"

#include <string>

#include "lse/error.hpp"

namespace lse {

void LseProblem::validate() const
{
    auto shape = [](const SparseMatrix& m) {
        return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
    };
    if (A.cols() != C.cols())
        throw DimensionError("A is " + shape(A) + " but C is " + shape(C) + "; column counts must agree");
    if (b.size() != A.rows())
        throw DimensionError("b has length " + std::to_string(b.size()) + " but A has " + std::to_string(A.rows()) +
                             " rows");
    if (d.size() != C.rows())
        throw DimensionError("d has length " + std::to_string(d.size()) + " but C has " + std::to_string(C.rows()) +
                             " rows");
    if (!all_finite(b) || !all_finite(d) || !all_finite(A.values()) || !all_finite(C.values()))
        throw InputError("problem data contains non-finite values");
}

}  // namespace lse
