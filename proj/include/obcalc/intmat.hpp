#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace obcalc {

// Exact integer type used for all matrix arithmetic.  Smith reduction can
// blow entries up well past 64 bits even on small inputs, so everything in
// this module is arbitrary precision.
using Int = boost::multiprecision::cpp_int;

// Dense row-major integer matrix.  A 0xN or Nx0 matrix is legal and shows up
// constantly as the boundary map in and out of an empty chain group.
class IntegerMatrix {
public:
    IntegerMatrix() = default;
    IntegerMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static IntegerMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Int& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Int& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool operator==(const IntegerMatrix& o) const = default;

    IntegerMatrix operator*(const IntegerMatrix& o) const;

    bool is_square() const { return rows_ == cols_; }
    bool is_identity() const;
    bool is_zero() const;

    // Exact determinant via Bareiss fraction-free elimination.
    Int determinant() const;

    std::string to_string() const;  // "[[1,2],[3,4]]"

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Int> a_;
};

// u * a * v = d with d diagonal, every diagonal entry non-negative,
// d(0,0) | d(1,1) | ... and det(u) = det(v) = +-1.
struct SmithResult {
    IntegerMatrix d, u, v;
};

SmithResult smith_normal_form(const IntegerMatrix& a);

// The nonzero diagonal of the Smith form, in divisibility order.
std::vector<Int> invariant_factors(const IntegerMatrix& a);

std::size_t matrix_rank(const IntegerMatrix& a);

}  // namespace obcalc
