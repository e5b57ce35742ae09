#include "fatpipe/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#include "fatpipe/errors.hpp"

namespace fatpipe {

QuboProblem::QuboProblem(std::size_t n) : n_(n), q_(n * n, 0.0) {}

void QuboProblem::add(std::size_t i, std::size_t j, double v)
{
    if (i > j) std::swap(i, j);
    q_[i * n_ + j] += v;
}

double QuboProblem::coef(std::size_t i, std::size_t j) const
{
    if (i > j) std::swap(i, j);
    return q_[i * n_ + j];
}

double QuboProblem::energy(std::span<const std::uint8_t> bits) const
{
    double e = offset_;
    for (std::size_t i = 0; i < n_; ++i) {
        if (!bits[i]) continue;
        const double* row = &q_[i * n_];
        for (std::size_t j = i; j < n_; ++j)
            if (bits[j]) e += row[j];
    }
    return e;
}

void QuboProblem::write(std::ostream& os) const
{
    std::size_t m = 0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j)
            if (q_[i * n_ + j] != 0.0) ++m;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", offset_);
    os << "# fatpipe-qubo 1\n# variables " << n_ << "\n# offset " << buf << "\n# entries " << m << '\n';
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i; j < n_; ++j) {
            const double v = q_[i * n_ + j];
            if (v == 0.0) continue;
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << i << ' ' << j << ' ' << buf << '\n';
        }
    }
}

QuboProblem QuboProblem::read(std::istream& is)
{
    std::string line;
    std::size_t n = 0;
    double offset = 0.0;
    bool have_n = false;
    std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        if (line[0] == '#') {
            std::string hash, key;
            ss >> hash >> key;
            if (key == "variables") {
                ss >> n;
                have_n = true;
            } else if (key == "offset") {
                ss >> offset;
            }
            continue;
        }
        std::size_t i = 0, j = 0;
        double v = 0.0;
        if (!(ss >> i >> j >> v)) throw EncodingError("qubo: malformed line '" + line + "'");
        entries.emplace_back(i, j, v);
    }
    if (!have_n) throw EncodingError("qubo: missing variables header");
    QuboProblem q(n);
    q.add_offset(offset);
    for (const auto& [i, j, v] : entries) {
        if (i >= n || j >= n) throw EncodingError("qubo: index out of range");
        q.add(i, j, v);
    }
    return q;
}

std::vector<double> capped_binary_weights(long range)
{
    std::vector<double> w;
    if (range <= 0) return w;
    long covered = 0;
    long next = 1;
    while (covered + next < range) {
        w.push_back(static_cast<double>(next));
        covered += next;
        next *= 2;
    }
    w.push_back(static_cast<double>(range - covered));
    return w;
}

namespace {

using Int = long long;

Int gcd_abs(Int a, Int b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

// Digits of value v (0..range) in the capped expansion produced above.
std::vector<std::uint8_t> capped_digits(long v, const std::vector<double>& weights)
{
    std::vector<std::uint8_t> bits(weights.size(), 0);
    if (weights.empty()) return bits;
    const std::size_t k = weights.size();
    const long plain = (1L << (k - 1)) - 1;  // reach of the power-of-two part
    if (v > plain) {
        bits[k - 1] = 1;
        v -= static_cast<long>(weights[k - 1]);
    }
    for (std::size_t b = 0; b + 1 < k; ++b) bits[b] = static_cast<std::uint8_t>((v >> b) & 1L);
    return bits;
}

struct RowForm {
    std::vector<std::pair<std::size_t, Int>> bits;  // merged, nonzero
    Int constant = 0;
    Int unit = 1;     // gcd divisor
    double multiplier = 1.0;
    // Rows with a continuous variable: its smallest step in row units, and the
    // largest coefficient of any other bit.
    Int cont_step = 0;
    Int other_max = 0;
};

}  // namespace

QuboModel ilp_to_qubo(const IlpProblem& problem, const QuboOptions& options)
{
    problem.validate();
    const auto& vars = problem.variables();
    const double scale = problem.coefficient_scale();

    QuboModel model;
    VariableEncoding& enc = model.encoding;
    enc.base.resize(vars.size());
    enc.vars.resize(vars.size());

    std::size_t next_bit = 0;
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const Variable& v = vars[j];
        if (!std::isfinite(v.lower) || !std::isfinite(v.upper))
            throw EncodingError("qubo: variable " + v.name + " is unbounded");
        std::vector<double> weights;
        double base = v.lower;
        if (v.kind == VarKind::binary) {
            weights = {1.0};
            base = 0.0;
        } else if (v.kind == VarKind::integer) {
            weights = capped_binary_weights(std::lround(v.upper - v.lower));
        } else {
            double r = options.resolution > 0.0 ? options.resolution : (v.upper - v.lower) / 256.0;
            const double grid = std::max(1.0, std::round(r * scale));
            r = grid / scale;
            base = std::ceil(v.lower * scale - 1e-9) / scale;
            const long steps = static_cast<long>(std::floor((v.upper - base) / r + 1e-9));
            weights = capped_binary_weights(std::max(0L, steps));
            for (double& w : weights) w *= r;
        }
        enc.base[j] = base;
        for (double w : weights) enc.vars[j].push_back({next_bit++, w});
    }

    // Rows in integer form before slack.
    const auto& cons = problem.constraints();
    std::vector<RowForm> rows(cons.size());
    for (std::size_t i = 0; i < cons.size(); ++i) {
        const auto& c = cons[i];
        bool has_cont = false;
        for (const auto& t : c.terms) has_cont = has_cont || vars[t.var].kind == VarKind::continuous;
        RowForm& row = rows[i];
        row.multiplier = has_cont ? scale : 1.0;
        std::vector<Int> bit_coef(next_bit, 0);
        long double constant = -std::llround(c.rhs * scale) * static_cast<long double>(row.multiplier);
        for (const auto& t : c.terms) {
            const long double a = static_cast<long double>(std::llround(t.coef * scale));
            constant += a * static_cast<long double>(enc.base[t.var]) * row.multiplier;
            for (const auto& eb : enc.vars[t.var])
                bit_coef[eb.bit] += std::llround(a * static_cast<long double>(eb.weight) * row.multiplier);
        }
        row.constant = std::llround(constant);
        Int g = row.constant;
        for (std::size_t b = 0; b < next_bit; ++b) {
            if (bit_coef[b] == 0) continue;
            row.bits.push_back({b, bit_coef[b]});
            g = gcd_abs(g, bit_coef[b]);
        }
        row.unit = g == 0 ? 1 : g;
        for (auto& [b, a] : row.bits) a /= row.unit;
        row.constant /= row.unit;
        for (const auto& t : c.terms) {
            for (const auto& eb : enc.vars[t.var]) {
                const Int a = std::abs(bit_coef[eb.bit]) / row.unit;
                if (vars[t.var].kind != VarKind::continuous)
                    row.other_max = std::max(row.other_max, a);
                else if (a > 0 && (row.cont_step == 0 || a < row.cont_step))
                    row.cont_step = a;
            }
        }
    }

    // Slack bits.
    enc.slacks.resize(cons.size());
    enc.row_unit.assign(cons.size(), 0.0);
    std::vector<bool> active(cons.size(), true);
    for (std::size_t i = 0; i < cons.size(); ++i) {
        RowForm& row = rows[i];
        Int lo = row.constant, hi = row.constant;
        for (const auto& [b, a] : row.bits) (a < 0 ? lo : hi) += a;
        enc.row_unit[i] = static_cast<double>(row.unit) / (scale * row.multiplier);
        if (cons[i].sense == Sense::equal) continue;
        if (hi <= 0) {
            active[i] = false;  // satisfied by every encodable state
            enc.row_unit[i] = 0.0;
            continue;
        }
        if (lo > 0) continue;  // never satisfiable; penalty only
        // Slack of a row with a continuous variable only needs a fraction of its
        // step; see the row scaling below.
        const Int su = std::max<Int>(1, row.cont_step / 4);
        for (double w : capped_binary_weights(static_cast<long>((-lo + su - 1) / su)))
            enc.slacks[i].push_back({next_bit++, w * static_cast<double>(su)});
    }
    enc.bit_count = next_bit;

    // Penalty weight.
    double penalty = options.penalty;
    if (penalty <= 0.0) {
        std::vector<double> c(vars.size(), 0.0);
        for (const auto& t : problem.objective()) c[t.var] += t.coef;
        penalty = 1.0;
        for (std::size_t j = 0; j < vars.size(); ++j) penalty += std::fabs(c[j]) * (vars[j].upper - vars[j].lower);
    }
    if (!(penalty > 0.0)) throw EncodingError("qubo: penalty must be positive");
    enc.penalty = penalty;

    // A row holding a continuous variable is measured in units of its largest
    // other coefficient, so moving one choice bit costs about P instead of
    // P * (steps moved)^2, which freezes the annealer long before the objective
    // matters. Such rows become soft at the scale of a few continuous steps;
    // settle_continuous restores them exactly after decoding.
    std::vector<double> norm(cons.size(), 1.0);
    for (std::size_t i = 0; i < cons.size(); ++i)
        if (rows[i].cont_step > 0) norm[i] = static_cast<double>(std::max(rows[i].cont_step, rows[i].other_max));

    QuboProblem& q = model.qubo;
    q = QuboProblem(next_bit);
    for (const auto& t : problem.objective()) {
        q.add_offset(t.coef * enc.base[t.var]);
        for (const auto& eb : enc.vars[t.var]) q.add(eb.bit, eb.bit, t.coef * eb.weight);
    }
    for (std::size_t i = 0; i < cons.size(); ++i) {
        if (!active[i]) continue;
        std::vector<std::pair<std::size_t, double>> terms;
        const double n = norm[i];
        for (const auto& [b, a] : rows[i].bits) terms.push_back({b, static_cast<double>(a) / n});
        for (const auto& eb : enc.slacks[i]) terms.push_back({eb.bit, eb.weight / n});
        const double beta = static_cast<double>(rows[i].constant) / n;
        // P * (sum(alpha x) + beta)^2 with x^2 = x.
        q.add_offset(penalty * beta * beta);
        for (std::size_t k = 0; k < terms.size(); ++k) {
            const auto [bk, ak] = terms[k];
            q.add(bk, bk, penalty * (ak * ak + 2.0 * beta * ak));
            for (std::size_t l = k + 1; l < terms.size(); ++l) q.add(bk, terms[l].first, penalty * 2.0 * ak * terms[l].second);
        }
    }
    return model;
}

DecodeResult decode(const IlpProblem& problem, const VariableEncoding& encoding, std::span<const std::uint8_t> bits)
{
    if (bits.size() != encoding.bit_count) throw EncodingError("qubo: bit vector length mismatch");
    DecodeResult r;
    r.assignment.values.resize(encoding.vars.size());
    for (std::size_t j = 0; j < encoding.vars.size(); ++j) {
        double v = encoding.base[j];
        for (const auto& eb : encoding.vars[j])
            if (bits[eb.bit]) v += eb.weight;
        r.assignment.values[j] = v;
    }
    r.assignment.objective = problem.evaluate_objective(r.assignment.values);
    r.violations = problem.violations(r.assignment.values, 1e-9);
    r.slack.assign(encoding.slacks.size(), 0.0);
    for (std::size_t i = 0; i < encoding.slacks.size(); ++i) {
        double s = 0.0;
        for (const auto& eb : encoding.slacks[i])
            if (bits[eb.bit]) s += eb.weight;
        r.slack[i] = s * encoding.row_unit[i];
    }
    return r;
}

DecodeResult settle_continuous(const IlpProblem& problem, DecodeResult result)
{
    auto& x = result.assignment.values;
    const auto& vars = problem.variables();
    std::vector<double> cost(vars.size(), 0.0);
    for (const auto& t : problem.objective()) cost[t.var] += t.coef;
    for (std::size_t j = 0; j < vars.size(); ++j) {
        if (vars[j].kind != VarKind::continuous) continue;
        double lo = vars[j].lower, hi = vars[j].upper;
        for (const auto& c : problem.constraints()) {
            double a = 0.0, rest = 0.0;
            for (const auto& t : c.terms) {
                if (t.var == j) a += t.coef;
                else rest += t.coef * x[t.var];
            }
            if (a == 0.0) continue;
            const double v = (c.rhs - rest) / a;
            if (c.sense == Sense::equal) {
                lo = std::max(lo, v);
                hi = std::min(hi, v);
            } else if (a > 0.0) {
                hi = std::min(hi, v);
            } else {
                lo = std::max(lo, v);
            }
        }
        if (lo <= hi) x[j] = cost[j] >= 0.0 ? lo : hi;
    }
    result.assignment.objective = problem.evaluate_objective(x);
    result.violations = problem.violations(x, 1e-9);
    return result;
}

std::vector<std::uint8_t> encode(const IlpProblem& problem, const VariableEncoding& encoding,
                                 std::span<const double> values)
{
    std::vector<std::uint8_t> bits(encoding.bit_count, 0);
    for (std::size_t j = 0; j < encoding.vars.size(); ++j) {
        const auto& eb = encoding.vars[j];
        if (eb.empty()) continue;
        // Unit step is the smallest weight.
        const double unit = eb.front().weight;
        const long steps = std::lround((values[j] - encoding.base[j]) / unit);
        std::vector<double> weights;
        for (const auto& e : eb) weights.push_back(std::round(e.weight / unit));
        const auto digits = capped_digits(steps, weights);
        for (std::size_t k = 0; k < eb.size(); ++k) bits[eb[k].bit] = digits[k];
    }
    for (std::size_t i = 0; i < encoding.slacks.size(); ++i) {
        const auto& sl = encoding.slacks[i];
        if (sl.empty() || encoding.row_unit[i] == 0.0) continue;
        const auto& c = problem.constraints()[i];
        const double act = problem.activity(c, values);
        const double unit = sl.front().weight;
        const long s = std::lround((c.rhs - act) / encoding.row_unit[i] / unit);
        long range = 0;
        std::vector<double> weights;
        for (const auto& e : sl) {
            range += std::lround(e.weight / unit);
            weights.push_back(std::round(e.weight / unit));
        }
        if (s < 0 || s > range) continue;
        const auto digits = capped_digits(s, weights);
        for (std::size_t k = 0; k < sl.size(); ++k) bits[sl[k].bit] = digits[k];
    }
    return bits;
}

}  // namespace fatpipe
