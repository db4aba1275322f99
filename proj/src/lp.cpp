#include "elliptope/lp.hpp"

#include <cmath>

#include "elliptope/errors.hpp"

namespace elliptope::conic {

namespace {

struct NormalizedRow {
    std::vector<double> a; // a^T x <= rhs
    double rhs;
    int source;  // index into inequalities, or equalities when is_eq
    bool is_eq;
    double sign; // +1: as given, -1: flipped
};

} // namespace

LpFeasibility lp_feasible(const std::vector<Inequality>& inequalities,
                          const std::vector<Equality>& equalities, int dim,
                          const Settings& settings) {
    if (inequalities.empty() && equalities.empty())
        throw UsageError("lp_feasible: at least one constraint is required");
    if (dim < 1) throw UsageError("lp_feasible: dimension must be positive");

    std::vector<NormalizedRow> rows;
    for (size_t i = 0; i < inequalities.size(); ++i) {
        const auto& q = inequalities[i];
        if (int(q.a.size()) != dim) throw UsageError("lp_feasible: inequality dimension mismatch");
        NormalizedRow r{q.a, q.rhs, int(i), false, 1.0};
        if (q.sense == Sense::ge) {
            for (double& v : r.a) v = -v;
            r.rhs = -r.rhs;
            r.sign = -1.0;
        }
        rows.push_back(std::move(r));
    }
    for (size_t i = 0; i < equalities.size(); ++i) {
        const auto& q = equalities[i];
        if (int(q.a.size()) != dim) throw UsageError("lp_feasible: equality dimension mismatch");
        rows.push_back({q.a, q.rhs, int(i), true, 1.0});
        NormalizedRow r{q.a, q.rhs, int(i), true, -1.0};
        for (double& v : r.a) v = -v;
        r.rhs = -r.rhs;
        rows.push_back(std::move(r));
    }

    // Conic embedding (see header): one 1x1 block per row plus the s-floor
    // block; constraints are the k stationarity rows and one normalization.
    const int mrows = int(rows.size());
    ConicProblem p;
    p.cone.sizes.assign(mrows + 1, 1);
    p.c = BlockSym::zeros(p.cone);
    for (int j = 0; j < mrows; ++j) p.c.blocks[j](0, 0) = rows[j].rhs;
    p.c.blocks[mrows](0, 0) = 1.0;

    for (int coord = 0; coord < dim; ++coord) {
        Constraint c;
        for (int j = 0; j < mrows; ++j)
            if (rows[j].a[coord] != 0.0) c.entries.push_back({j, 0, 0, rows[j].a[coord]});
        p.rows.push_back(std::move(c));
        p.b.push_back(0.0);
    }
    {
        Constraint c;
        for (int j = 0; j <= mrows; ++j) c.entries.push_back({j, 0, 0, 1.0});
        p.rows.push_back(std::move(c));
        p.b.push_back(1.0);
    }

    const ConicSolution sol = solve(p, settings);

    LpFeasibility out;
    if (sol.status != SolveStatus::optimal) {
        out.certain = false;
        out.feasible = false;
        return out;
    }

    const double s_opt = -sol.primal_obj; // max(-s) = -s*
    out.margin = std::fabs(s_opt);

    auto extract_witness = [&]() {
        out.witness.assign(sol.y.begin(), sol.y.begin() + dim);
    };
    auto witness_violation = [&]() {
        double worst = 0.0;
        for (const auto& r : rows) {
            double ax = 0.0;
            for (int c = 0; c < dim; ++c) ax += r.a[c] * out.witness[c];
            worst = std::max(worst, ax - r.rhs);
        }
        return worst;
    };

    if (s_opt <= 1e-9) {
        out.feasible = true;
        extract_witness();
        if (witness_violation() > 1e-8) out.certain = false;
        return out;
    }
    if (s_opt <= 1e-7) {
        // gray zone: trust a clean witness if the optimizer found one
        out.feasible = true;
        extract_witness();
        out.certain = false;
        if (witness_violation() <= 1e-8) out.certain = true;
        return out;
    }

    // Farkas certificate from the primal block variables.
    std::vector<double> z(mrows);
    for (int j = 0; j < mrows; ++j) z[j] = std::max(0.0, sol.x.blocks[j](0, 0));
    // validate: ||sum z_j a_j|| small, sum z_j rhs_j < 0
    std::vector<double> comb(dim, 0.0);
    double crhs = 0.0;
    double z1 = 0.0;
    for (int j = 0; j < mrows; ++j) {
        for (int c = 0; c < dim; ++c) comb[c] += z[j] * rows[j].a[c];
        crhs += z[j] * rows[j].rhs;
        z1 += z[j];
    }
    out.feasible = false;
    if (z1 <= 0.0 || numerics::norm2(comb) > 1e-7 * std::max(1.0, z1) || crhs >= 0.0) {
        out.certain = false;
        return out;
    }
    out.ineq_multipliers.assign(inequalities.size(), 0.0);
    out.eq_multipliers.assign(equalities.size(), 0.0);
    for (int j = 0; j < mrows; ++j) {
        const auto& r = rows[j];
        if (r.is_eq)
            out.eq_multipliers[r.source] += r.sign * z[j];
        else
            out.ineq_multipliers[r.source] += z[j]; // ge rows were flipped with their rhs
    }
    return out;
}

} // namespace elliptope::conic
