#include "elliptope/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>

#include "elliptope/csv.hpp"
#include "elliptope/decompose.hpp"
#include "elliptope/ellipsoid.hpp"
#include "elliptope/errors.hpp"
#include "elliptope/montecarlo.hpp"
#include "elliptope/realizability.hpp"
#include "elliptope/reports.hpp"

namespace elliptope::harness {

using numerics::Mat;
using numerics::Partition;
using numerics::Subspace;

namespace {

conic::Settings settings_from_env() {
    conic::Settings s;
    if (const char* tol = std::getenv("ELLIPTOPE_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(tol, &end);
        if (end == tol || !(v > 0.0 && v < 1.0))
            throw UsageError("ELLIPTOPE_TOL must be a number in (0, 1)");
        s.tol_feas = v;
        s.tol_gap = v;
    }
    return s;
}

std::vector<double> read_vector_csv(const std::string& path) {
    const Mat m = numerics::read_csv_matrix_file(path);
    if (m.rows() != 1 && m.cols() != 1)
        throw UsageError("expected a single row or column of values in " + path);
    return m.rows() == 1 ? m.row(0) : m.col(0);
}

Subspace read_basis(const std::string& path) {
    const Subspace u = Subspace::span_of(numerics::read_csv_matrix_file(path));
    if (u.dim() == 0) throw UsageError("basis file spans only the zero subspace: " + path);
    return u;
}

int run_decompose(const std::string& input, const std::string& partition_file, bool as_json,
                  std::ostream& out) {
    const numerics::SymMatrix x = numerics::read_csv_sym_file(input);
    const conic::Settings settings = settings_from_env();
    decompose::DecompositionResult res;
    bool partitioned = false;
    if (!partition_file.empty()) {
        const Partition p = read_partition_file(partition_file);
        partitioned = !p.is_singletons();
        res = decompose::bmtfa(x, p, settings);
    } else {
        res = decompose::mtfa(x, settings);
    }
    if (as_json) {
        out << decomposition_report(res, 1e-9, partitioned).dump(2) << "\n";
    } else {
        out << "status: " << conic::to_string(res.status) << "\n";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", res.trace_l);
        out << "trace_L: " << buf << "\n";
        std::snprintf(buf, sizeof(buf), "%.3e", res.complementarity);
        out << "complementarity: " << buf << "\n";
        out << (partitioned ? "B:\n" : "D (diagonal):\n");
        out << (partitioned ? numerics::to_csv(res.b) : numerics::to_csv_row(res.d_diag()));
        out << "L:\n" << numerics::to_csv(res.l);
        out << "Y:\n" << numerics::to_csv(res.y);
    }
    return res.certified ? 0 : 2;
}

int run_realizable(const std::string& basis, const std::string& partition_file, bool as_json,
                   std::ostream& out) {
    const Subspace u = read_basis(basis);
    std::optional<Partition> p;
    if (!partition_file.empty()) p = read_partition_file(partition_file);
    faces::RealizabilityOptions opts;
    opts.solver = settings_from_env();
    const faces::RealizabilityReport rep = faces::realizability_certificate(u, p, opts);
    if (as_json) {
        out << realizability_report(rep).dump(2) << "\n";
    } else {
        out << "verdict: " << faces::to_string(rep.verdict) << "\n";
        out << "method: " << faces::to_string(rep.method) << "\n";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g", rep.margin);
        out << "margin: " << buf << "\n";
        if (rep.correlation) out << "Y:\n" << numerics::to_csv(rep.correlation->y);
        if (rep.failure) out << "D:\n" << numerics::to_csv(rep.failure->d);
    }
    return rep.verdict == faces::Verdict::boundary_uncertain ? 2 : 0;
}

int run_fit(const std::string& points_file, const std::string& partition_file,
            const std::vector<double>& grid, const std::string& base_file, bool as_json,
            std::ostream& out) {
    const conic::Settings settings = settings_from_env();
    if (!grid.empty()) {
        std::optional<Mat> base;
        if (!base_file.empty()) base = numerics::read_csv_matrix_file(base_file);
        const auto rows =
            ellipsoid::region_grid(grid[0], grid[1], grid[2], grid[3], grid[4], base, settings);
        out << grid_csv(rows);
        return 0;
    }
    const ellipsoid::PointSet pts(numerics::read_csv_matrix_file(points_file));
    ellipsoid::FitResult res;
    if (!partition_file.empty()) {
        const Partition p = read_partition_file(partition_file);
        res = ellipsoid::fit_blocks(pts, p, settings);
    } else {
        res = ellipsoid::fit(pts, settings);
    }
    if (as_json) {
        out << fit_report(res).dump(2) << "\n";
    } else {
        out << "status: " << ellipsoid::to_string(res.status) << "\n";
        if (res.m) out << "M:\n" << numerics::to_csv(*res.m);
        if (!res.d.empty()) out << "d:\n" << numerics::to_csv_row(res.d);
        if (res.dual_block) out << "D_block:\n" << numerics::to_csv(*res.dual_block);
    }
    switch (res.status) {
        case ellipsoid::FitStatus::fitted: return 0;
        case ellipsoid::FitStatus::infeasible: return 3;
        case ellipsoid::FitStatus::boundary_uncertain: return 2;
    }
    return 2;
}

int run_coherence(const std::string& basis, const std::string& partition_file, std::ostream& out) {
    const Subspace u = read_basis(basis);
    double mu;
    if (!partition_file.empty())
        mu = faces::p_coherence(u, read_partition_file(partition_file));
    else
        mu = faces::coherence(u);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", mu);
    out << buf << "\n";
    return 0;
}

int run_balance(const std::string& vector_file, const std::string& partition_file, bool strict,
                std::ostream& out) {
    const std::vector<double> u = read_vector_csv(vector_file);
    bool balanced;
    if (!partition_file.empty())
        balanced = faces::is_p_balanced(u, read_partition_file(partition_file), strict);
    else
        balanced = faces::is_balanced(u, strict);
    out << (balanced ? "balanced" : "not-balanced") << "\n";
    return 0;
}

int run_montecarlo(ExperimentConfig cfg, bool as_json, std::ostream& out, std::ostream& err) {
    if (cfg.trials >= 1000 || cfg.verify_sdp)
        cfg.progress = [&err](int done, int total) {
            err << "montecarlo: " << done << "/" << total << " trials\n";
        };
    const MonteCarloReport rep = montecarlo_coherence(cfg);
    if (as_json) {
        out << montecarlo_report(rep, cfg).dump(2) << "\n";
    } else {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "trials: %d\nmu_below_half: %d\nobserved_fraction: %.6f\n",
                      rep.trials, rep.count_mu_below_half, rep.observed_fraction);
        out << buf;
        if (rep.bound_valid) {
            std::snprintf(buf, sizeof(buf), "analytic_lower_bound: %.6f (c_bar %.4f, c_tilde %.6f)\n",
                          rep.analytic_lower_bound, rep.c_bar, rep.c_tilde);
            out << buf;
        }
        if (rep.sdp_checked > 0) {
            std::snprintf(buf, sizeof(buf), "sdp_checked: %d realizable: %d consistent: %d\n",
                          rep.sdp_checked, rep.sdp_realizable, rep.sdp_consistent);
            out << buf;
        }
    }
    return 0;
}

} // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"minimum-trace factor analysis, elliptope faces and ellipsoid fitting"};
    app.require_subcommand(1);

    std::string input, basis, vector_file, points_file, partition_file, base_file;
    bool as_json = false;
    bool strict = false;
    std::vector<double> grid;
    ExperimentConfig cfg;
    std::uint64_t seed = 0;

    auto* dec = app.add_subcommand("decompose", "split X into diagonal/block-diagonal plus PSD");
    dec->add_option("--input", input, "symmetric matrix CSV")->required();
    dec->add_option("--partition", partition_file, "partition JSON (block variant)");
    dec->add_flag("--json", as_json, "machine-readable report");

    auto* rea = app.add_subcommand("realizable", "face-of-the-elliptope test for span(basis)");
    rea->add_option("--basis", basis, "matrix CSV whose columns span the subspace")->required();
    rea->add_option("--partition", partition_file, "partition JSON (block elliptope)");
    rea->add_flag("--json", as_json, "machine-readable report");

    auto* fit = app.add_subcommand("fit-ellipsoid", "centered ellipsoid through given points");
    fit->add_option("--points", points_file, "k x n CSV of column points");
    fit->add_option("--partition", partition_file, "partition JSON (block variant)");
    fit->add_option("--grid", grid, "xmin xmax ymin ymax step region scan")->expected(5);
    fit->add_option("--base", base_file, "2x2 CSV of base points for --grid");
    fit->add_flag("--json", as_json, "machine-readable report");

    auto* coh = app.add_subcommand("coherence", "coherence of span(basis)");
    coh->add_option("--basis", basis, "matrix CSV whose columns span the subspace")->required();
    coh->add_option("--partition", partition_file, "partition JSON (block coherence)");

    auto* bal = app.add_subcommand("balance", "balance test for a vector");
    bal->add_option("--vector", vector_file, "CSV row or column")->required();
    bal->add_option("--partition", partition_file, "partition JSON (block balance)");
    bal->add_flag("--strict", strict, "require strict inequalities");

    auto* mc = app.add_subcommand("montecarlo", "coherence threshold experiment on random subspaces");
    mc->add_option("--n", cfg.n, "ambient dimension")->required();
    mc->add_option("--r", cfg.r, "subspace dimension")->required();
    mc->add_option("--trials", cfg.trials, "number of trials")->required();
    mc->add_option("--seed", seed, "RNG seed");
    mc->add_option("--epsilon", cfg.epsilon, "bound parameter in (0, 1/2)");
    mc->add_flag("--verify-sdp", cfg.verify_sdp, "also run the SDP on a capped subsample");
    mc->add_option("--verify-cap", cfg.verify_cap, "subsample size for --verify-sdp");
    mc->add_flag("--json", as_json, "machine-readable report");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (dec->parsed()) return run_decompose(input, partition_file, as_json, out);
        if (rea->parsed()) return run_realizable(basis, partition_file, as_json, out);
        if (fit->parsed()) {
            if (points_file.empty() && grid.empty())
                throw UsageError("fit-ellipsoid: either --points or --grid is required");
            return run_fit(points_file, partition_file, grid, base_file, as_json, out);
        }
        if (coh->parsed()) return run_coherence(basis, partition_file, out);
        if (bal->parsed()) return run_balance(vector_file, partition_file, strict, out);
        if (mc->parsed()) {
            cfg.seed = seed;
            return run_montecarlo(cfg, as_json, out, err);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const DegenerateInputError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

} // namespace elliptope::harness
