#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fatpipe/ilp.hpp"

namespace fatpipe {

/// Minimize x^T Q x + offset over x in {0,1}^n.
///
/// Q is kept upper-triangular: coef(i, i) is the linear term of bit i and
/// coef(i, j), i < j, the full coefficient of x_i x_j.
class QuboProblem {
public:
    explicit QuboProblem(std::size_t n = 0);

    std::size_t size() const { return n_; }
    double offset() const { return offset_; }
    void add_offset(double v) { offset_ += v; }

    /// Adds v to the coefficient of x_i x_j (order of i, j irrelevant).
    void add(std::size_t i, std::size_t j, double v);
    double coef(std::size_t i, std::size_t j) const;

    double energy(std::span<const std::uint8_t> bits) const;

    /// Sparse triple dump:
    ///   # fatpipe-qubo 1
    ///   # variables <n>
    ///   # offset <offset>
    ///   # entries <m>
    ///   i j value        (0-based, i <= j, one line per nonzero)
    void write(std::ostream& os) const;
    static QuboProblem read(std::istream& is);

private:
    std::size_t n_ = 0;
    double offset_ = 0.0;
    std::vector<double> q_;  // n * n row-major, only i <= j used
};

struct EncodedBit {
    std::size_t bit = 0;
    double weight = 0.0;
};

struct VariableEncoding {
    /// Per ILP variable: value = base + sum(weight * bit).
    std::vector<double> base;
    std::vector<std::vector<EncodedBit>> vars;
    /// Per ILP constraint: slack bits in constraint units; empty for equalities
    /// and for rows dropped as always satisfied.
    std::vector<std::vector<EncodedBit>> slacks;
    /// Row divisor used when forming the penalty, per constraint (0 = dropped).
    std::vector<double> row_unit;
    std::size_t bit_count = 0;
    double penalty = 0.0;
};

struct QuboOptions {
    /// Penalty weight; <= 0 selects 1 + sum(|c| * (upper - lower)) over the objective.
    double penalty = 0.0;
    /// Resolution of continuous variables; <= 0 selects (upper - lower) / 256.
    /// Snapped to a multiple of 1 / coefficient_scale.
    double resolution = 0.0;
};

struct QuboModel {
    QuboProblem qubo;
    VariableEncoding encoding;
};

/// Penalty encoding: objective on the diagonal, each row sum(a v) (<= or =) b
/// becomes P * ((sum(a v) + s - b) / g)^2 with coefficients on the problem's
/// fixed-point grid and g their gcd. Integers use a capped binary expansion,
/// <= rows an integer slack with ceil(log2(range + 1)) bits.
/// Throws EncodingError for unbounded variables or a non-positive penalty.
QuboModel ilp_to_qubo(const IlpProblem& problem, const QuboOptions& options = {});

/// Weights of a capped binary expansion covering exactly 0..range.
std::vector<double> capped_binary_weights(long range);

struct DecodeResult {
    Assignment assignment;
    std::vector<ConstraintViolation> violations;
    std::vector<double> slack;  // decoded slack per constraint, in original units
    bool feasible() const { return violations.empty(); }
};

DecodeResult decode(const IlpProblem& problem, const VariableEncoding& encoding,
                    std::span<const std::uint8_t> bits);

/// Re-derives every continuous variable from the decoded integers: it takes
/// the cheapest value within its bounds that satisfies all of its rows, then
/// violations and objective are recomputed. Integers are left untouched.
DecodeResult settle_continuous(const IlpProblem& problem, DecodeResult result);

/// Bits representing an assignment; values must lie on the encoding grid.
/// Slack bits are set to the implied slack when representable.
std::vector<std::uint8_t> encode(const IlpProblem& problem, const VariableEncoding& encoding,
                                 std::span<const double> values);

}  // namespace fatpipe
