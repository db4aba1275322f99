#pragma once

#include <vector>

#include "elliptope/conic.hpp"

namespace elliptope::conic {

enum class Sense { le, ge };

struct Inequality {
    std::vector<double> a;
    Sense sense = Sense::le;
    double rhs = 0.0;
};

struct Equality {
    std::vector<double> a;
    double rhs = 0.0;
};

struct LpFeasibility {
    bool feasible = false;
    /// False when the classification sits inside the numerical gray zone.
    bool certain = true;
    std::vector<double> witness;          ///< when feasible
    std::vector<double> ineq_multipliers; ///< Farkas: >= 0, one per inequality
    std::vector<double> eq_multipliers;   ///< Farkas: signed, one per equality
    double margin = 0.0;                  ///< |s*| of the phase-I value
};

/// Feasibility of { x : a_i^T x (<=|>=) rhs_i, e_j^T x = f_j }, decided with
/// the same interior-point solver on an all-1x1-blocks cone profile. The
/// query is embedded as the conic dual of
///   min c^T z  s.t.  sum_i z_i a_i = 0,  sum_i z_i + z_0 = 1,  z >= 0,
/// whose optimal value is -s*: feasible iff s* <= 0, with a Farkas certificate
/// (sum z_i a_i = 0, sum z_i rhs_i < 0) read off the primal block otherwise.
LpFeasibility lp_feasible(const std::vector<Inequality>& inequalities,
                          const std::vector<Equality>& equalities, int dim,
                          const Settings& settings = {});

} // namespace elliptope::conic
