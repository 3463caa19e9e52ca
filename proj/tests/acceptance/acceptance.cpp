// Acceptance suite: twelve numbered checks over the full pipeline, each with
// its own oracle and pinned tolerances. Prints one PASS/FAIL line per check;
// --only N runs a single one. Exit code 0 iff every executed check passed.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "leafspec/diagnostics.hpp"
#include "leafspec/ensemble/auc.hpp"
#include "leafspec/ensemble/oof.hpp"
#include "leafspec/evaluation.hpp"
#include "leafspec/io.hpp"
#include "leafspec/learners/logreg.hpp"
#include "leafspec/learners/svm.hpp"
#include "leafspec/phenology.hpp"
#include "leafspec/pipeline.hpp"
#include "leafspec/preprocess.hpp"
#include "leafspec/runconfig.hpp"
#include "leafspec/synthgen.hpp"

namespace {

using namespace leafspec;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// ---- 1: Savitzky-Golay ------------------------------------------------------

bool c01_savgol(std::string& detail) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(9001);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    PreprocessConfig cfg;  // window 7, order 2

    double max_err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 50 + rng() % 151;
        const double start = 380.0 + 40.0 * unit(rng);
        const double a = 5e-4 * unit(rng);
        const double b = 0.05 * unit(rng);
        const double c = 0.5 + 0.3 * unit(rng);
        Spectrum s;
        s.reflectance.resize(n);
        const double mid = static_cast<double>(n) / 2.0;
        for (std::size_t i = 0; i < n; ++i) {
            s.grid.nm.push_back(start + static_cast<double>(i));  // 1 nm steps
            const double t = static_cast<double>(i) - mid;
            s.reflectance[i] = a * t * t + b * t + c;
        }
        const Spectrum out = savgol_smooth(s, cfg);
        for (std::size_t i = 0; i < n; ++i)
            max_err = std::max(max_err, std::abs(out.reflectance[i] - s.reflectance[i]));
    }

    // Central weights against the pinned vector and an SVD least-squares oracle.
    const Matrix w = savgol_weights(7, 2);
    const double pinned[7] = {-2.0 / 21.0, 3.0 / 21.0, 6.0 / 21.0, 7.0 / 21.0,
                              6.0 / 21.0,  3.0 / 21.0, -2.0 / 21.0};
    double w_err = 0.0;
    Eigen::MatrixXd vand(7, 3);
    for (int i = 0; i < 7; ++i) {
        const double t = i - 3.0;
        vand(i, 0) = 1.0;
        vand(i, 1) = t;
        vand(i, 2) = t * t;
    }
    for (int j = 0; j < 7; ++j) {
        w_err = std::max(w_err, std::abs(w(3, static_cast<std::size_t>(j)) - pinned[j]));
        Eigen::VectorXd e = Eigen::VectorXd::Zero(7);
        e(j) = 1.0;
        const Eigen::VectorXd beta =
            vand.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(e);
        w_err = std::max(w_err, std::abs(w(3, static_cast<std::size_t>(j)) - beta(0)));
    }

    const double elapsed = seconds_since(t0);
    detail = "max quadratic error " + fmt("%.2e", max_err) + ", weight error " +
             fmt("%.2e", w_err) + ", " + fmt("%.2f", elapsed) + " s";
    return max_err < 1e-12 && w_err < 1e-12 && elapsed < 1.0;
}

// ---- 2: AUC vs brute force --------------------------------------------------

bool c02_auc(std::string& detail) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(9002);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 199;
        std::vector<int> labels(n);
        std::vector<double> probs(n);
        while (true) {
            int pos = 0;
            for (std::size_t i = 0; i < n; ++i) {
                labels[i] = static_cast<int>(rng() % 2);
                pos += labels[i];
            }
            if (pos > 0 && pos < static_cast<int>(n)) break;
        }
        const bool coarse = trial % 2 == 0;  // force ties on half the trials
        for (std::size_t i = 0; i < n; ++i)
            probs[i] = coarse ? static_cast<double>(rng() % 11) / 10.0 : unit(rng);

        long long wins = 0, ties = 0, n_pos = 0, n_neg = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] != 1) continue;
            ++n_pos;
            for (std::size_t j = 0; j < n; ++j) {
                if (labels[j] != 0) continue;
                if (probs[i] > probs[j])
                    ++wins;
                else if (probs[i] == probs[j])
                    ++ties;
            }
        }
        n_neg = static_cast<long long>(n) - n_pos;
        const double brute = (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
                             (static_cast<double>(n_pos) * static_cast<double>(n_neg));
        if (auc_score(probs, labels) != brute) ++mismatches;
    }

    const double elapsed = seconds_since(t0);
    detail = std::to_string(mismatches) + " mismatches in 200 sets, " + fmt("%.2f", elapsed) + " s";
    return mismatches == 0 && elapsed < 5.0;
}

// ---- 3: OOF leakage ---------------------------------------------------------

bool c03_oof_leakage(std::string& detail) {
    std::vector<LearnerSpec> pool(3);
    pool[0].family = Family::decision_tree;
    pool[0].tree_max_depth = 3;
    pool[1].family = Family::gaussian_nb;
    pool[2].family = Family::knn;
    pool[2].knn_k = 3;

    int bad_trials = 0;
    for (std::uint64_t seed = 301; seed <= 320; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const std::size_t half = 12 + rng() % 9;
        const std::size_t n = 2 * half;
        LabeledDataset data;
        data.x = Matrix(n, 3);
        data.y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            data.y[i] = i < half ? 1 : 0;
            for (std::size_t f = 0; f < 3; ++f)
                data.x(i, f) = gauss(rng) + (f == 0 ? 0.5 * data.y[i] : 0.0);
        }

        const int k = 4;
        const std::vector<int> fold_of = make_stratified_folds(data.y, k, seed);
        const OofMatrix base = compute_oof_with_folds(pool, data, fold_of, 1);

        bool trial_ok = true;
        for (int f = 0; f < k && trial_ok; ++f) {
            LabeledDataset flipped = data;
            for (std::size_t i = 0; i < n; ++i)
                if (fold_of[i] == f) flipped.y[i] = 1 - flipped.y[i];
            const OofMatrix redo = compute_oof_with_folds(pool, flipped, fold_of, 1);
            for (std::size_t i = 0; i < n && trial_ok; ++i) {
                if (fold_of[i] != f) continue;
                for (std::size_t m = 0; m < pool.size(); ++m)
                    if (base.p(i, m) != redo.p(i, m)) trial_ok = false;
            }
        }
        if (!trial_ok) ++bad_trials;
    }

    detail = std::to_string(bad_trials) + " of 20 trials leaked";
    return bad_trials == 0;
}

// ---- 4: SMO KKT -------------------------------------------------------------

struct KktSummary {
    double violation = 0.0;
    double alpha_y = 0.0;
    double box = 0.0;
};

KktSummary kkt_check(const Matrix& x, const std::vector<int>& y_pm, double c, double gamma,
                     const SmoSolution& sol) {
    KktSummary out;
    const std::size_t n = x.rows;
    double sum_ay = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_ay += sol.alpha[i] * y_pm[i];
        out.box = std::max({out.box, -sol.alpha[i], sol.alpha[i] - c});
        double f = sol.b;
        for (std::size_t j = 0; j < n; ++j) {
            double ss = 0.0;
            for (std::size_t d = 0; d < x.cols; ++d) {
                const double diff = x(i, d) - x(j, d);
                ss += diff * diff;
            }
            f += sol.alpha[j] * y_pm[j] * std::exp(-gamma * ss);
        }
        const double yf = y_pm[i] * f;
        double v;
        if (sol.alpha[i] < 1e-9)
            v = std::max(0.0, 1.0 - yf);
        else if (sol.alpha[i] > c - 1e-9)
            v = std::max(0.0, yf - 1.0);
        else
            v = std::abs(yf - 1.0);
        out.violation = std::max(out.violation, v);
    }
    out.alpha_y = std::abs(sum_ay);
    return out;
}

bool c04_smo_kkt(std::string& detail) {
    std::mt19937_64 rng(9004);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double c_grid[4] = {0.5, 1.0, 5.0, 10.0};
    const double tol = 1e-3;

    int failures = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n_pos = 5 + rng() % 25;
        const std::size_t n_neg = 5 + rng() % 25;
        const std::size_t d = 1 + rng() % 5;
        const std::size_t n = n_pos + n_neg;
        const double gap = trial % 2 == 0 ? 1.5 + (rng() % 100) / 100.0
                                          : 0.1 + 0.4 * (rng() % 100) / 100.0;
        const double c = c_grid[rng() % 4];

        Matrix x(n, d);
        std::vector<int> y_pm(n);
        for (std::size_t i = 0; i < n; ++i) {
            y_pm[i] = i < n_pos ? 1 : -1;
            for (std::size_t f = 0; f < d; ++f)
                x(i, f) = gauss(rng) + (f == 0 ? y_pm[i] * gap / 2.0 : 0.0);
        }

        const double gamma = 1.0 / static_cast<double>(d);
        const Matrix k = rbf_kernel_matrix(x, gamma);
        const SmoSolution sol = solve_smo(k, y_pm, c, tol, 5);
        const KktSummary s = kkt_check(x, y_pm, c, gamma, sol);
        worst = std::max(worst, s.violation);
        if (sol.warning || s.violation > tol || s.alpha_y > 1e-6 || s.box > 1e-12) ++failures;
    }

    detail = std::to_string(failures) + " of 25 instances violated, worst " + fmt("%.2e", worst);
    return failures == 0;
}

// ---- 5: logistic regression Newton checks -----------------------------------

bool c05_logreg(std::string& out) {
    std::mt19937_64 rng(9005);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    LearnerSpec spec;
    spec.family = Family::logreg;

    int grad_fail = 0, fd_fail = 0;
    double worst_grad = 0.0, worst_rel = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 30 + rng() % 51;
        const std::size_t d = 2 + rng() % 5;
        LabeledDataset data;
        data.x = Matrix(n, d);
        data.y.resize(n);
        std::vector<double> w_true(d);
        for (std::size_t f = 0; f < d; ++f) w_true[f] = gauss(rng);
        for (std::size_t i = 0; i < n; ++i) {
            double z = 0.3 * gauss(rng);
            for (std::size_t f = 0; f < d; ++f) {
                data.x(i, f) = gauss(rng);
                z += w_true[f] * data.x(i, f);
            }
            data.y[i] = unit(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
        }

        const LogRegModel m = fit_logreg_model(spec, data);
        const double gnorm = detail::logreg_gradient(data.x, data.y, m.weights, m.intercept,
                                                     spec.logreg_l2)
                                 .norm();
        worst_grad = std::max(worst_grad, gnorm);
        if (!(m.converged && gnorm < 1e-8)) ++grad_fail;

        // Analytic Newton machinery against central finite differences at a
        // random non-optimal point.
        std::vector<double> w0(d);
        for (std::size_t f = 0; f < d; ++f) w0[f] = 0.5 * gauss(rng);
        const double b0 = 0.5 * gauss(rng);
        const auto di = static_cast<Eigen::Index>(d);

        const Eigen::VectorXd g =
            detail::logreg_gradient(data.x, data.y, w0, b0, spec.logreg_l2);
        Eigen::VectorXd g_fd(di + 1);
        const double h = 1e-6;
        for (Eigen::Index j = 0; j <= di; ++j) {
            std::vector<double> wp = w0, wm = w0;
            double bp = b0, bm = b0;
            if (j < di) {
                wp[static_cast<std::size_t>(j)] += h;
                wm[static_cast<std::size_t>(j)] -= h;
            } else {
                bp += h;
                bm -= h;
            }
            g_fd(j) = (detail::logreg_loss(data.x, data.y, wp, bp, spec.logreg_l2) -
                       detail::logreg_loss(data.x, data.y, wm, bm, spec.logreg_l2)) /
                      (2.0 * h);
        }

        Eigen::MatrixXd h_fd(di + 1, di + 1);
        const double h2 = 1e-5;
        for (Eigen::Index j = 0; j <= di; ++j) {
            std::vector<double> wp = w0, wm = w0;
            double bp = b0, bm = b0;
            if (j < di) {
                wp[static_cast<std::size_t>(j)] += h2;
                wm[static_cast<std::size_t>(j)] -= h2;
            } else {
                bp += h2;
                bm -= h2;
            }
            h_fd.col(j) = (detail::logreg_gradient(data.x, data.y, wp, bp, spec.logreg_l2) -
                           detail::logreg_gradient(data.x, data.y, wm, bm, spec.logreg_l2)) /
                          (2.0 * h2);
        }
        const Eigen::MatrixXd h_an = detail::logreg_hessian(data.x, w0, b0, spec.logreg_l2);
        const Eigen::VectorXd step_an = h_an.ldlt().solve(g);
        const Eigen::VectorXd step_fd = h_fd.ldlt().solve(g_fd);

        const double rel_g = (g - g_fd).norm() / std::max(1.0, g.norm());
        const double rel_s = (step_an - step_fd).norm() / std::max(1.0, step_an.norm());
        worst_rel = std::max({worst_rel, rel_g, rel_s});
        if (rel_g >= 1e-4 || rel_s >= 1e-4) ++fd_fail;
    }

    out = "worst gradient norm " + fmt("%.2e", worst_grad) + ", worst FD rel error " +
             fmt("%.2e", worst_rel);
    return grad_fail == 0 && fd_fail == 0;
}

// ---- 6: benchmark accuracy and runtime ---------------------------------------

bool c06_benchmark(std::string& detail) {
    const auto t0 = Clock::now();
    SynthConfig sc;  // early preset, delta 0.05, noise 0.01: per-band effect size 5
    sc.seed = 42;
    const SpectralDataset raw = generate(sc);

    RunConfig rc;
    rc.seed = 42;
    rc.threads = 1;
    const TrainResult result = train_pipeline(raw, rc);
    const MetricsReport test = evaluate_bundle(result.bundle, raw, "test", 1);
    const MetricsReport val = evaluate_bundle(result.bundle, raw, "validation", 1);
    const double elapsed = seconds_since(t0);

    const double best_oof =
        *std::max_element(result.pool_oof_auc.begin(), result.pool_oof_auc.end());
    const double test_auc = test.auc.value_or(-1.0);
    const double val_auc = val.auc.value_or(-1.0);

    detail = "test acc " + fmt("%.4f", test.accuracy) + ", test auc " + fmt("%.4f", test_auc) +
             ", val auc " + fmt("%.4f", val_auc) + ", best oof auc " + fmt("%.4f", best_oof) +
             ", " + fmt("%.1f", elapsed) + " s";
    return test.accuracy >= 0.85 && test_auc >= 0.90 && val_auc >= best_oof - 0.05 &&
           elapsed < 120.0;
}

// ---- 7: null contrast stays at chance ----------------------------------------

// Leakage inflates the mean accuracy across seeds, so the 0.5 +- 0.12 window
// is checked on the mean: a single 38-sample test split has binomial sd
// ~0.08, so per-seed excursions past the window are expected for an honest
// chance-level model. A seed may also end with every candidate under the
// selection floor; declining to fit a model on pure noise is the pipeline's
// documented behavior, so such seeds are reported and excluded from the
// mean, and any other error fails the criterion.
bool c07_null(std::string& detail) {
    double sum = 0.0;
    int completed = 0;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SynthConfig sc;
        sc.delta = 0.0;
        sc.seed = seed;
        RunConfig rc;
        rc.seed = seed;
        rc.threads = 8;
        if (!per_seed.empty()) per_seed += " ";
        try {
            const TrainResult result = train_pipeline(generate(sc), rc);
            const double acc = evaluate_bundle(result.bundle, generate(sc), "test", 8).accuracy;
            sum += acc;
            ++completed;
            per_seed += fmt("%.3f", acc);
        } catch (const Error& e) {
            const std::string what = e.what();
            if (what.find("no model above floor") == std::string::npos) {
                detail = "seed " + std::to_string(seed) + " failed: " + what;
                return false;
            }
            per_seed += "none";  // every candidate at or under the AUC floor
        }
    }
    if (completed < 5) {
        detail = "only " + std::to_string(completed) + " of 10 seeds produced a model";
        return false;
    }
    const double mean = sum / static_cast<double>(completed);
    detail = "accuracies " + per_seed + ", mean " + fmt("%.3f", mean) + " over " +
             std::to_string(completed) + " models";
    return mean >= 0.38 && mean <= 0.62;
}

// ---- 8: importance localizes the water bands ----------------------------------

bool c08_importance(std::string& detail) {
    SynthConfig sc;
    sc.seed = 42;
    const SpectralDataset raw = generate(sc);
    RunConfig rc;
    rc.seed = 42;
    rc.threads = 8;
    const TrainResult result = train_pipeline(raw, rc);
    const ImportanceProfile prof = importance_bundle(result.bundle, raw, 10, 8);

    std::vector<ImportanceEntry> ranked = prof.entries;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const ImportanceEntry& a, const ImportanceEntry& b) {
                         return a.importance_mean > b.importance_mean;
                     });
    int localized = 0;
    std::string top;
    for (std::size_t i = 0; i < 5 && i < ranked.size(); ++i) {
        const double nm = ranked[i].representative_nm;
        if (std::abs(nm - 1450.0) <= 60.0 || std::abs(nm - 1940.0) <= 60.0) ++localized;
        if (!top.empty()) top += " ";
        top += fmt("%.0f", nm) + "nm:" + fmt("%.4f", ranked[i].importance_mean);
    }
    detail = std::to_string(localized) + " of top 5 within 60 nm of a dip center; top5 " + top;
    return localized == 5;
}

// ---- 9: RMD sign flips between stages -----------------------------------------

bool c09_rmd(std::string& detail) {
    const DetectorLayout layout = DetectorLayout::standard();
    const PreprocessConfig cfg;

    auto rmd_at_dips = [&](StagePreset preset) {
        SynthConfig sc;
        sc.preset = preset;
        sc.seed = 4242;
        const SpectralDataset processed = preprocess_rows(generate(sc), layout, cfg, 1);
        const std::vector<double> rmd = relative_mean_difference(class_mean_profile(processed));
        auto nearest = [&](double nm) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < processed.grid.nm.size(); ++i)
                if (std::abs(processed.grid.nm[i] - nm) < std::abs(processed.grid.nm[best] - nm))
                    best = i;
            return rmd[best];
        };
        return std::pair<double, double>(nearest(1450.0), nearest(1940.0));
    };

    const auto early = rmd_at_dips(StagePreset::early);
    const auto late = rmd_at_dips(StagePreset::late);
    detail = "1450 nm early " + fmt("%+.4f", early.first) + " late " + fmt("%+.4f", late.first) +
             "; 1940 nm early " + fmt("%+.4f", early.second) + " late " +
             fmt("%+.4f", late.second);
    return early.first * late.first < 0.0 && early.second * late.second < 0.0;
}

// ---- 10: determinism through the CLI -------------------------------------------

int run_cmd(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

bool c10_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path dir =
        fs::temp_directory_path() / ("leafspec_acc10_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string cli = LEAFSPEC_CLI_PATH;
    const std::string spectra = (dir / "spectra.csv").string();
    auto at = [&](const char* name) { return (dir / name).string(); };

    bool ok = true;
    auto step = [&](const std::string& args) {
        if (!ok) return;
        const std::string log = at("step_err.txt");
        if (run_cmd("'" + cli + "' " + args + " 2>'" + log + "' >/dev/null") != 0) {
            ok = false;
            detail = "command failed: " + args + ": " + read_file(log);
        }
    };

    step("synth --seed 42 --out " + spectra);
    step("train --seed 42 --threads 1 --in " + spectra + " --out " + at("model_a.json"));
    step("evaluate --model " + at("model_a.json") + " --threads 1 --in " + spectra + " --out " +
         at("metrics_a.json"));
    step("train --seed 42 --threads 1 --in " + spectra + " --out " + at("model_b.json"));
    step("evaluate --model " + at("model_b.json") + " --threads 1 --in " + spectra + " --out " +
         at("metrics_b.json"));
    step("train --seed 42 --threads 8 --in " + spectra + " --out " + at("model_t8.json"));
    step("evaluate --model " + at("model_t8.json") + " --threads 8 --in " + spectra + " --out " +
         at("metrics_t8.json"));

    if (ok) {
        const std::string model_a = read_file(at("model_a.json"));
        const bool rerun_model = read_file(at("model_b.json")) == model_a;
        const bool rerun_metrics = read_file(at("metrics_b.json")) == read_file(at("metrics_a.json"));
        const bool threads_model = read_file(at("model_t8.json")) == model_a;
        const bool threads_metrics =
            read_file(at("metrics_t8.json")) == read_file(at("metrics_a.json"));
        detail = std::string("rerun model ") + (rerun_model ? "identical" : "DIFFERS") +
                 ", rerun metrics " + (rerun_metrics ? "identical" : "DIFFERS") +
                 ", threads 1 vs 8 model " + (threads_model ? "identical" : "DIFFERS") +
                 ", metrics " + (threads_metrics ? "identical" : "DIFFERS");
        ok = rerun_model && rerun_metrics && threads_model && threads_metrics;
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    return ok;
}

// ---- 11: GDD accumulation and staging fixtures ----------------------------------

bool c11_gdd(std::string& detail) {
    std::vector<TemperatureRecord> recs(5);
    recs[0].date = "2024-05-01";
    recs[0].has_min_max = true;
    recs[0].t_min = 12.0;
    recs[0].t_max = 26.0;  // mean 19 -> +9
    recs[1].date = "2024-05-02";
    recs[1].has_mean = true;
    recs[1].t_mean = 18.0;  // +8
    recs[2].date = "2024-05-03";
    recs[2].has_min_max = true;
    recs[2].t_min = 5.0;
    recs[2].t_max = 9.0;  // mean 7, below base -> 0
    recs[3].date = "2024-05-04";
    recs[3].has_min_max = true;
    recs[3].t_min = 28.0;
    recs[3].t_max = 34.0;  // mean 31 -> +21
    recs[4].date = "2024-05-05";
    recs[4].has_mean = true;
    recs[4].t_mean = 9.5;  // below base -> 0

    const double total = compute_gdd(recs, GddConfig{});
    const bool gdd_ok = total == 38.0;

    GddConfig raw_cfg;
    raw_cfg.clamp_negative = false;
    const bool raw_ok = compute_gdd(recs, raw_cfg) == 38.0 - 3.0 - 0.5;

    const StageTable table = StageTable::standard();
    const bool stages_ok = stage_of(585.0, table) == "vegetative" &&
                           stage_of(897.0, table) == "flowering" &&
                           stage_of(1216.0, table) == "fruit development" &&
                           stage_of(1568.0, table) == "ripening" &&
                           stage_of(584.0, table) == "pre-vegetative";

    detail = "gdd " + fmt("%.1f", total) + " (want 38.0), stages " +
             (stages_ok ? "all match" : "MISMATCH");
    return gdd_ok && raw_ok && stages_ok;
}

// ---- 12: band merge partitions and compresses ------------------------------------

bool c12_band_merge(std::string& detail) {
    // Exact-duplicate rule at threshold 1.0.
    std::mt19937_64 rng(9012);
    std::uniform_real_distribution<double> unit(0.1, 0.9);
    SpectralDataset small;
    small.grid.nm = {400.0, 401.0, 402.0, 403.0, 404.0};
    small.samples = Matrix(8, 5);
    for (std::size_t r = 0; r < 8; ++r) {
        const double a = unit(rng), b = unit(rng);
        small.samples(r, 0) = a;
        small.samples(r, 1) = a;                 // exact duplicate: merges
        small.samples(r, 2) = a + 1e-6 * unit(rng);  // near-duplicate: kept apart
        small.samples(r, 3) = b;
        small.samples(r, 4) = b;                 // exact duplicate: merges
    }
    small.labels.assign(8, 0);
    small.sample_ids.assign(8, "s");
    small.plant_ids.assign(8, "p");
    small.stage_gdd.assign(8, 585.0);

    PreprocessConfig strict;
    strict.corr_threshold = 1.0;
    const BandGroupMap dup_map = fit_band_groups(small, strict);
    const bool dup_ok = dup_map.reduced_band_count == 3 &&
                        dup_map.groups[0].members_nm == std::vector<double>{400.0, 401.0} &&
                        dup_map.groups[1].members_nm == std::vector<double>{402.0} &&
                        dup_map.groups[2].members_nm == std::vector<double>{403.0, 404.0};

    // Default pipeline compression on the benchmark corpus.
    SynthConfig sc;
    sc.seed = 42;
    const PreprocessConfig cfg;
    const SpectralDataset processed =
        preprocess_rows(generate(sc), DetectorLayout::standard(), cfg, 1);
    const BandGroupMap map = fit_band_groups(processed, cfg);
    const bool compress_ok =
        static_cast<double>(map.reduced_band_count) < 0.15 * static_cast<double>(processed.n_bands());

    // Groups partition the processed grid in order.
    std::vector<double> flattened;
    bool reps_ok = true;
    for (const auto& g : map.groups) {
        double sum = 0.0;
        for (double nm : g.members_nm) {
            flattened.push_back(nm);
            sum += nm;
        }
        if (g.representative_nm != sum / static_cast<double>(g.members_nm.size())) reps_ok = false;
    }
    bool partition_ok = flattened == processed.grid.nm && reps_ok;
    try {
        map.validate();
    } catch (const Error&) {
        partition_ok = false;
    }

    detail = "duplicate-only merge " + std::string(dup_ok ? "ok" : "WRONG") + "; reduced " +
             std::to_string(map.reduced_band_count) + " of " +
             std::to_string(processed.n_bands()) + " bands; partition " +
             (partition_ok ? "exact" : "BROKEN");
    return dup_ok && compress_ok && partition_ok;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[i + 1]);
            ++i;
        } else {
            std::fprintf(stderr, "usage: acceptance [--only N]\n");
            return 2;
        }
    }

    struct Criterion {
        int num;
        const char* name;
        bool (*fn)(std::string&);
    };
    const Criterion criteria[] = {
        {1, "savgol reproduces quadratics", c01_savgol},
        {2, "auc matches brute-force pair counting", c02_auc},
        {3, "oof rows immune to own-fold label flips", c03_oof_leakage},
        {4, "smo satisfies kkt within tolerance", c04_smo_kkt},
        {5, "logreg newton gradient checks", c05_logreg},
        {6, "benchmark accuracy and runtime", c06_benchmark},
        {7, "null contrast stays at chance", c07_null},
        {8, "importance localizes the water bands", c08_importance},
        {9, "rmd sign flips between stages", c09_rmd},
        {10, "same seed same bytes, thread invariant", c10_determinism},
        {11, "gdd accumulation and staging fixtures", c11_gdd},
        {12, "band merge partitions and compresses", c12_band_merge},
    };

    bool all_pass = true;
    for (const Criterion& c : criteria) {
        if (only != 0 && only != c.num) continue;
        std::string detail;
        bool pass = false;
        try {
            pass = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%2d] %s  %s (%s)\n", c.num, pass ? "PASS" : "FAIL", c.name,
                    detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
