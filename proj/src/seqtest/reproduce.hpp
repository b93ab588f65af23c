#pragma once

#include <array>
#include <string>
#include <vector>

#include "seqtest/design.hpp"
#include "seqtest/models.hpp"
#include "seqtest/renewal.hpp"

namespace seqtest {

// The numerical study's exponential suite, theta = (0.5, 1, 2).
ModelSuite study_suite();

// One cell of the parameter-table comparison: formula-derived value next to
// the printed one. expected_mismatch marks cells whose printed values are
// documented as inconsistent with the formulas (see published.hpp).
struct CellComparison {
    double theta = 0;
    std::string quantity;  // "I", "kappa", "gamma", "q1", "q0"
    double computed = 0;
    double printed = 0;
    bool matches = false;
    bool expected_mismatch = false;
};

std::vector<CellComparison> reproduce_table_constants();

// One alpha row of the operating-characteristics table. Ratios are
// importance-sampling estimates of P_0(d = 1)/alpha; ESS columns are direct
// Monte Carlo per alternative. printed_* are NaN when the reference table
// has no such cell; pred_m is the corrected ESS approximation for the
// mixture test under the row's own design.
struct EssRow {
    double alpha = 0;
    double ratio_m = 0, ratio_m_se = 0;
    double ratio_n = 0, ratio_n_se = 0;
    double printed_ratio_m = 0, printed_ratio_n = 0;
    std::array<double, 3> ess_m{}, ess_m_se{}, ess_n{}, ess_n_se{};
    std::array<double, 3> printed_ess_m{}, printed_ess_n{};
    std::array<double, 3> pred_m{};
};

struct EssTableOptions {
    std::vector<double> alphas{1e-2, 1e-3, 1e-4, 1e-5};
    long is_reps = 100000;  // importance-sampling replications per ratio
    long ess_reps = 10000;  // direct replications per ESS cell
    uint64_t seed = 20130301;
    WeightSource source = WeightSource::Published;
    int threads = 1;
    bool skip_ratios = false;  // ESS-only runs
    bool skip_ess = false;     // ratio-only runs
};

std::vector<EssRow> reproduce_table_ess(const EssTableOptions& opt);

// Long-format plotting datum.
struct FigurePoint {
    double x = 0;
    std::string series;
    double value = 0;
};

// Performance-loss curves: K = 10 channels, the first half pinned at
// theta = 4, the second half swept over a 40-point grid in [0.5, 8];
// J_1 (strong group) and J_K (weak group) per prior kind at alpha = 1e-4.
// Asymptotic quantities only — no simulation.
std::vector<FigurePoint> reproduce_figure_loss(Family family);

struct FigureEssOptions {
    std::vector<double> alphas{1e-2, 1e-3, 1e-4, 1e-5};
    long reps = 10000;
    uint64_t seed = 99;
    int threads = 1;
};

// ESS-versus-alpha curves on the study suite with formula weights:
// simulated mixture and weighted-max points, the corrected approximation
// (dashed reference), and the one-channel SPRT baseline (solid reference),
// one series per alternative.
std::vector<FigurePoint> reproduce_figure_ess(const FigureEssOptions& opt);

}  // namespace seqtest
