#include "elliptope/reports.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "elliptope/csv.hpp"
#include "elliptope/errors.hpp"

namespace elliptope::harness {

using nlohmann::json;
using numerics::SymMatrix;

namespace {

int rank_at(const SymMatrix& m, double rank_tol) {
    const auto eig = numerics::eig_sym(m);
    double maxabs = 0.0;
    for (double v : eig.values) maxabs = std::max(maxabs, std::fabs(v));
    if (maxabs == 0.0) return 0;
    int r = 0;
    for (double v : eig.values)
        if (std::fabs(v) > rank_tol * maxabs) ++r;
    return r;
}

} // namespace

json decomposition_report(const decompose::DecompositionResult& r, double rank_tol,
                          bool partitioned) {
    json out;
    out["status"] = conic::to_string(r.status);
    out["trace_L"] = r.trace_l;
    // L comes out of an interior-point solve, so eigenvalues below its
    // accuracy are zero regardless of the requested rank cutoff
    out["rank_L"] = rank_at(r.l, std::max(rank_tol, 1e-7));
    if (partitioned)
        out["D"] = numerics::to_csv(r.b);
    else
        out["D"] = numerics::to_csv_row(r.d_diag());
    out["L"] = numerics::to_csv(r.l);
    out["Y"] = numerics::to_csv(r.y);
    out["complementarity_residual"] = r.complementarity;
    out["certificate_margin"] = r.certificate_margin;
    out["boundary"] = r.boundary_flag;
    return out;
}

json realizability_report(const faces::RealizabilityReport& r) {
    json out;
    out["verdict"] = faces::to_string(r.verdict);
    out["method"] = faces::to_string(r.method);
    out["margin"] = r.margin;
    if (r.correlation) {
        out["certificate"] = {{"kind", "correlation"}, {"Y", numerics::to_csv(r.correlation->y)}};
    } else if (r.failure) {
        out["certificate"] = {{"kind", "failure"}, {"D", numerics::to_csv(r.failure->d)}};
    } else {
        out["certificate"] = nullptr;
    }
    return out;
}

json fit_report(const ellipsoid::FitResult& r) {
    json out;
    out["status"] = ellipsoid::to_string(r.status);
    out["margin"] = r.margin;
    if (r.m) out["M"] = numerics::to_csv(*r.m);
    if (!r.d.empty()) out["d"] = numerics::to_csv_row(r.d);
    if (r.dual_block) out["D_block"] = numerics::to_csv(*r.dual_block);
    return out;
}

json montecarlo_report(const MonteCarloReport& r, const ExperimentConfig& cfg) {
    json out;
    out["n"] = cfg.n;
    out["r"] = cfg.r;
    out["epsilon"] = cfg.epsilon;
    out["seed"] = cfg.seed;
    out["trials"] = r.trials;
    out["count_mu_below_half"] = r.count_mu_below_half;
    out["observed_fraction"] = r.observed_fraction;
    out["c_bar"] = r.c_bar;
    out["c_tilde"] = r.c_tilde;
    if (r.bound_valid)
        out["analytic_lower_bound"] = r.analytic_lower_bound;
    else
        out["analytic_lower_bound"] = nullptr;
    out["wall_time_s"] = r.wall_time_s;
    if (r.sdp_checked > 0) {
        out["sdp_checked"] = r.sdp_checked;
        out["sdp_realizable"] = r.sdp_realizable;
        out["sdp_consistent"] = r.sdp_consistent;
    }
    return out;
}

numerics::Partition parse_partition_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw UsageError(std::string("partition: invalid JSON: ") + e.what());
    }
    if (!j.contains("n") || !j.contains("blocks"))
        throw UsageError("partition: expected fields \"n\" and \"blocks\"");
    const int n = j.at("n").get<int>();
    std::vector<std::vector<int>> blocks;
    for (const auto& blk : j.at("blocks")) {
        std::vector<int> b;
        for (const auto& idx : blk) {
            const int one_based = idx.get<int>();
            if (one_based < 1 || one_based > n)
                throw UsageError("partition: index " + std::to_string(one_based) +
                                 " out of range 1.." + std::to_string(n));
            b.push_back(one_based - 1);
        }
        blocks.push_back(std::move(b));
    }
    return numerics::Partition(n, std::move(blocks));
}

numerics::Partition read_partition_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_partition_json(ss.str());
}

std::string grid_csv(const std::vector<ellipsoid::GridRow>& rows) {
    std::string out = "x,y,in_R,in_Rprime,fitted\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%d,%d\n", r.x, r.y, int(r.in_r),
                      int(r.in_rprime), int(r.fitted));
        out += buf;
    }
    return out;
}

} // namespace elliptope::harness
