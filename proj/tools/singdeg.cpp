// singdeg: classify variance profiles, fit exponents, compute densities and
// run Monte Carlo sweeps.
//
// Exit codes: 0 ok, 1 other failure (including a scaling tolerance miss),
// 2 parse error, 3 zero row, 4 structure violation, 5 solver non-convergence.

#include "singdeg/dyson.hpp"
#include "singdeg/error.hpp"
#include "singdeg/montecarlo.hpp"
#include "singdeg/report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

using namespace singdeg;

namespace {

int exitCode(ErrorCode code) {
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::NotSymmetric:
    case ErrorCode::NegativeEntry:
        return 2;
    case ErrorCode::ZeroRow:
        return 3;
    case ErrorCode::StructureViolation:
        return 4;
    case ErrorCode::NonConvergence:
        return 5;
    default:
        return 1;
    }
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void printClassifyText(const Json& doc) {
    std::cout << "support_class " << doc["support_class"].get<std::string>() << '\n';
    if (doc["kappa"].is_string()) {
        std::cout << "kappa " << doc["kappa"].get<std::string>() << '\n';
        const auto& d = doc["decomposition"];
        std::cout << "sizes " << d["sizes"].dump() << "\npermutation " << d["permutation"].dump() << '\n';
        return;
    }
    std::cout << "L " << doc["L"] << "\nM " << doc["M"] << "\nblock_dims " << doc["block_dims"].dump()
              << "\npermutation " << doc["permutation"].dump() << "\nmask\n";
    for (const auto& row : doc["mask"]) {
        for (const auto& x : row) std::cout << x;
        std::cout << '\n';
    }
    std::cout << "relation_edges " << doc["relation_edges"].dump() << "\nlongest_chain "
              << doc["longest_chain"]["length"] << ' ' << doc["longest_chain"]["witness"].dump() << "\nsigma "
              << doc["sigma"].get<std::string>() << "\nQ " << doc["Q"] << "\nf";
    for (const auto& x : doc["f"]) std::cout << ' ' << x.get<std::string>();
    std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Singularity degree of self-consistent densities for block variance profiles"};
    app.require_subcommand(1);

    std::string path;
    std::string out = "json";
    auto* classify = app.add_subcommand("classify", "support class, normal form, exponents");
    classify->add_option("profile", path, "CSV or JSON profile")->required();
    classify->add_option("--out", out, "json or text")->check(CLI::IsMember({"json", "text"}));

    double etaMin = 1e-10, etaMax = 1e-2, tolerance = 0.05;
    int perDecade = 4;
    std::string format = "text";
    auto* scaling = app.add_subcommand("scaling", "predicted against fitted block exponents");
    scaling->add_option("profile", path)->required();
    scaling->add_option("--eta-min", etaMin);
    scaling->add_option("--eta-max", etaMax);
    scaling->add_option("--per-decade", perDecade);
    scaling->add_option("--tolerance", tolerance);
    scaling->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));

    double tauMin = -2.5, tauMax = 2.5, epsilon = 1e-6;
    int points = 201;
    auto* density = app.add_subcommand("density", "density of states on a uniform grid, CSV tau,rho");
    density->add_option("profile", path)->required();
    density->add_option("--tau-min", tauMin);
    density->add_option("--tau-max", tauMax);
    density->add_option("--points", points)->check(CLI::PositiveNumber);
    density->add_option("--epsilon", epsilon);

    std::vector<Index> sizes{32, 64, 128, 256, 512};
    int trials = 200, threads = 0;
    std::uint64_t seed = 1;
    bool real = false;
    auto* simulate = app.add_subcommand("simulate", "least singular value sweep, CSV plus fitted slope");
    simulate->add_option("profile", path)->required();
    simulate->add_option("--sizes", sizes)->delimiter(',');
    simulate->add_option("--trials", trials);
    simulate->add_option("--seed", seed);
    simulate->add_option("--threads", threads);
    simulate->add_flag("--real", real, "real symmetric entries");

    bool all = false, withMc = false;
    double limitEta = 1e-12;
    int limitOrder = 1;
    auto* report = app.add_subcommand("report", "full JSON document");
    report->add_option("profile", path)->required();
    report->add_flag("--all", all, "include every section, the Monte Carlo sweep too");
    report->add_flag("--with-mc", withMc);
    report->add_option("--eta-min", etaMin);
    report->add_option("--eta-max", etaMax);
    report->add_option("--per-decade", perDecade);
    report->add_option("--limit-eta", limitEta, "smallest eta for the limit weights");
    report->add_option("--limit-order", limitOrder);
    report->add_option("--sizes", sizes)->delimiter(',');
    report->add_option("--trials", trials);
    report->add_option("--seed", seed);
    report->add_option("--threads", threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const auto S = readProfile(path);

        if (classify->parsed()) {
            const auto doc = classifyDocument(S);
            if (out == "json")
                std::cout << canonicalDump(doc);
            else
                printClassifyText(doc);
            return 0;
        }

        if (scaling->parsed()) {
            const auto fit = empiricalExponents(S, etaMin, etaMax, perDecade);
            bool ok = true;
            const char sep = format == "csv" ? ',' : ' ';
            std::cout << "block" << sep << "f_pred" << sep << "slope_fit" << sep << "abs_err\n";
            for (std::size_t b = 0; b < fit.fittedSlopes.size(); ++b) {
                const double err = std::abs(fit.deviation[b]);
                ok = ok && err <= tolerance;
                std::cout << b + 1 << sep << toString(fit.predicted[b]) << sep << fmt(fit.fittedSlopes[b]) << sep
                          << fmt(err) << '\n';
            }
            if (!ok) std::cerr << "abs_err above tolerance " << tolerance << '\n';
            return ok ? 0 : 1;
        }

        if (density->parsed()) {
            std::vector<double> tau(static_cast<std::size_t>(points));
            for (int i = 0; i < points; ++i)
                tau[static_cast<std::size_t>(i)] = points == 1 ? tauMin : tauMin + (tauMax - tauMin) * i / (points - 1);
            const auto curve = densityProfile(S, tau, epsilon);
            std::cout << "tau,rho\n";
            for (std::size_t i = 0; i < tau.size(); ++i) std::cout << fmt(curve.tau[i]) << ',' << fmt(curve.rho[i]) << '\n';
            return 0;
        }

        if (simulate->parsed()) {
            EnsembleConfig cfg{S, sizes, trials, seed, real ? EntryType::RealGaussian : EntryType::ComplexGaussian};
            const auto rep = runSweep(cfg, threads);
            writeSweepCsv(std::cout, rep);
            std::cout << "# fitted_slope " << fmt(rep.fittedSlope) << " intercept " << fmt(rep.intercept)
                      << " residual " << fmt(rep.fitResidual) << '\n';
            return 0;
        }

        ReportOptions opt;
        opt.etaMin = etaMin;
        opt.etaMax = etaMax;
        opt.perDecade = perDecade;
        opt.limitEtaMin = limitEta;
        opt.limitOrder = limitOrder;
        opt.withMc = all || withMc;
        opt.sizes = sizes;
        opt.trials = trials;
        opt.seed = seed;
        opt.threads = threads;
        std::cout << canonicalDump(fullReport(S, opt));
        return 0;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exitCode(e.code());
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
}
