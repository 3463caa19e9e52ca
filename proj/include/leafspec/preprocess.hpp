#pragma once

// Preprocessing chain: detector-edge trimming, 1 nm linear resampling,
// Savitzky-Golay smoothing, correlation-based band merging, and standard
// scaling. Order of application is trim -> resample -> smooth -> merge ->
// scale. Every stage is a pure function; identical input and config give
// bit-identical output regardless of thread count.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/spectral_types.hpp"

namespace leafspec {

struct TrimResult {
    Spectrum spectrum;
    std::vector<std::string> warnings;  // junctions outside the grid range
};

// Removes bands outside the analysis range, and at each interior junction
// the last `trim_bands` native bands at/before it plus the first
// `trim_bands` after it. A junction not interior to the grid range is a
// recorded no-op.
inline TrimResult trim_detector_edges(const Spectrum& s, const DetectorLayout& layout,
                                      const PreprocessConfig& cfg) {
    s.validate();
    layout.validate();
    cfg.validate();
    const std::size_t n = s.grid.size();
    std::vector<char> drop(n, 0);

    for (std::size_t i = 0; i < n; ++i) {
        const double w = s.grid.nm[i];
        if (w < cfg.analysis_low_nm || w > cfg.analysis_high_nm) drop[i] = 1;
    }

    TrimResult out;
    for (double j : layout.junctions()) {
        if (j <= s.grid.nm.front() || j >= s.grid.nm.back()) {
            out.warnings.push_back("junction " + std::to_string(j) + " nm outside grid; skipped");
            continue;
        }
        // First index strictly past the junction.
        std::size_t split = 0;
        while (split < n && s.grid.nm[split] <= j) ++split;
        for (int k = 0; k < cfg.trim_bands; ++k) {
            if (split >= static_cast<std::size_t>(k) + 1) drop[split - 1 - static_cast<std::size_t>(k)] = 1;
            if (split + static_cast<std::size_t>(k) < n) drop[split + static_cast<std::size_t>(k)] = 1;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (drop[i]) continue;
        out.spectrum.grid.nm.push_back(s.grid.nm[i]);
        out.spectrum.reflectance.push_back(s.reflectance[i]);
    }
    require(!out.spectrum.grid.nm.empty(), "preprocess", "over-trimmed: no bands remain");
    return out;
}

// Target grid for resampling: steps of target_resolution_nm from
// ceil(grid min) while inside both the native range and the analysis range.
inline std::vector<double> resample_target_grid(const WavelengthGrid& native,
                                                const PreprocessConfig& cfg) {
    const double lo = std::max(std::ceil(native.nm.front()), cfg.analysis_low_nm);
    const double hi = std::min(std::floor(native.nm.back()), cfg.analysis_high_nm);
    std::vector<double> out;
    for (double w = lo; w <= hi + 1e-9; w += cfg.target_resolution_nm) out.push_back(w);
    return out;
}

// Linear interpolation onto the uniform target grid; never extrapolates.
inline Spectrum resample_uniform(const Spectrum& s, const PreprocessConfig& cfg) {
    cfg.validate();
    require(s.grid.size() >= 2, "preprocess", "resample needs at least 2 native bands");
    Spectrum out;
    out.grid.nm = resample_target_grid(s.grid, cfg);
    require(!out.grid.nm.empty(), "preprocess", "resample target grid is empty");
    out.reflectance.resize(out.grid.size());

    std::size_t hi = 1;
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        const double w = out.grid.nm[i];
        while (hi + 1 < s.grid.size() && s.grid.nm[hi] < w) ++hi;
        const double w0 = s.grid.nm[hi - 1], w1 = s.grid.nm[hi];
        const double v0 = s.reflectance[hi - 1], v1 = s.reflectance[hi];
        if (w == w0) {
            out.reflectance[i] = v0;
        } else if (w == w1) {
            out.reflectance[i] = v1;
        } else {
            out.reflectance[i] = v0 + (v1 - v0) * ((w - w0) / (w1 - w0));
        }
    }
    return out;
}

// Savitzky-Golay weights: row p of the matrix maps a full window of values
// to the least-squares polynomial of degree `order` evaluated at window
// position p. Offsets are centered so interior smoothing uses row h.
inline Matrix savgol_weights(int window, int order) {
    const int m = window;
    const int p = order + 1;
    Eigen::MatrixXd a(m, p);
    const double center = (m - 1) / 2.0;
    for (int i = 0; i < m; ++i) {
        double t = 1.0;
        for (int j = 0; j < p; ++j) {
            a(i, j) = t;
            t *= (static_cast<double>(i) - center);
        }
    }
    // Projection onto the polynomial space: A (A^T A)^-1 A^T.
    Eigen::MatrixXd proj = a * (a.transpose() * a).ldlt().solve(a.transpose());
    Matrix w(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) w(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = proj(i, j);
    return w;
}

// Quadratic-by-default smoothing on a uniform grid. Interior points use the
// centered window; the first and last half-windows evaluate the polynomial
// fitted to the nearest full window at their off-center positions, which
// preserves exact reproduction of polynomials up to `sg_order` everywhere.
inline Spectrum savgol_smooth(const Spectrum& s, const PreprocessConfig& cfg) {
    cfg.validate();
    const std::size_t n = s.grid.size();
    const int m = cfg.sg_window;
    require(static_cast<std::size_t>(m) <= n, "preprocess",
            "sg_window exceeds band count");
    const double step = s.grid.nm[1] - s.grid.nm[0];
    for (std::size_t i = 1; i < n; ++i)
        require(std::abs((s.grid.nm[i] - s.grid.nm[i - 1]) - step) < 1e-6, "preprocess",
                "savgol requires a uniform grid");

    const Matrix w = savgol_weights(m, cfg.sg_order);
    const int h = (m - 1) / 2;
    Spectrum out;
    out.grid = s.grid;
    out.reflectance.resize(n);

    auto apply = [&](std::size_t window_start, int row, std::size_t out_idx) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j)
            acc += w(static_cast<std::size_t>(row), static_cast<std::size_t>(j)) *
                   s.reflectance[window_start + static_cast<std::size_t>(j)];
        out.reflectance[out_idx] = acc;
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (i < static_cast<std::size_t>(h)) {
            apply(0, static_cast<int>(i), i);
        } else if (i >= n - static_cast<std::size_t>(h)) {
            apply(n - static_cast<std::size_t>(m), static_cast<int>(i - (n - static_cast<std::size_t>(m))), i);
        } else {
            apply(i - static_cast<std::size_t>(h), h, i);
        }
    }
    return out;
}

struct PearsonResult {
    double r = 0.0;
    bool degenerate = false;  // zero variance in either argument
};

// Pearson product-moment correlation. Exactly equal inputs return 1.0;
// a zero-variance argument yields r = 0 with the degenerate flag so callers
// can continue past dead bands.
inline PearsonResult pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size(), "preprocess", "pearson_r length mismatch");
    require(x.size() >= 2, "preprocess", "pearson_r needs at least 2 points");
    const auto constant = [](const std::vector<double>& v) {
        for (double e : v)
            if (e != v.front()) return false;
        return true;
    };
    // Exact cases first: the accumulated mean of a constant column rounds,
    // so its sum of squares need not hit zero and rounding noise would leak
    // into r.
    if (constant(x) || constant(y)) return {0.0, true};
    if (x == y) return {1.0, false};
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return {0.0, true};
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    return {r, false};
}

struct MergeResult {
    SpectralDataset dataset;
    BandGroupMap map;
};

inline bool columns_equal(const Matrix& m, std::size_t a, std::size_t b) {
    for (std::size_t r = 0; r < m.rows; ++r)
        if (m(r, a) != m(r, b)) return false;
    return true;
}

// Seed-anchored single pass: a group starts at the leftmost unassigned band;
// the next adjacent band joins iff its correlation with the seed column
// exceeds the threshold. At threshold >= 1 only exact duplicate columns
// merge (strict > alone would merge nothing and rounding could merge
// near-duplicates). Output features are arithmetic means of member columns.
inline BandGroupMap fit_band_groups(const SpectralDataset& ds, const PreprocessConfig& cfg) {
    cfg.validate();
    require(ds.n_samples() >= 2, "preprocess", "correlation undefined: need >= 2 samples");
    const std::size_t nb = ds.n_bands();
    BandGroupMap map;
    map.original_band_count = nb;

    std::size_t seed = 0;
    while (seed < nb) {
        BandGroup g;
        g.members_nm.push_back(ds.grid.nm[seed]);
        const std::vector<double> seed_col = ds.samples.column(seed);
        std::size_t next = seed + 1;
        for (; next < nb; ++next) {
            bool join;
            if (cfg.corr_threshold >= 1.0) {
                join = columns_equal(ds.samples, seed, next);
            } else {
                join = pearson_r(seed_col, ds.samples.column(next)).r > cfg.corr_threshold;
            }
            if (!join) break;
            g.members_nm.push_back(ds.grid.nm[next]);
        }
        double sum = 0.0;
        for (double w : g.members_nm) sum += w;
        g.representative_nm = sum / static_cast<double>(g.members_nm.size());
        map.groups.push_back(std::move(g));
        seed = next;
    }
    map.reduced_band_count = map.groups.size();
    map.validate();
    return map;
}

// Applies a fitted band map to any dataset on the same post-smoothing grid.
inline SpectralDataset apply_band_groups(const SpectralDataset& ds, const BandGroupMap& map) {
    map.validate();
    require(ds.n_bands() == map.original_band_count, "preprocess",
            "grid incompatibility: dataset width != band map original count");
    std::size_t idx = 0;
    for (const auto& g : map.groups)
        for (double w : g.members_nm) {
            require(ds.grid.nm[idx] == w, "preprocess",
                    "grid incompatibility: wavelength mismatch at band " + std::to_string(idx));
            ++idx;
        }

    SpectralDataset out;
    out.labels = ds.labels;
    out.sample_ids = ds.sample_ids;
    out.plant_ids = ds.plant_ids;
    out.stage_gdd = ds.stage_gdd;
    out.grid.nm.reserve(map.groups.size());
    for (const auto& g : map.groups) out.grid.nm.push_back(g.representative_nm);
    out.samples = Matrix(ds.n_samples(), map.groups.size());

    for (std::size_t r = 0; r < ds.n_samples(); ++r) {
        std::size_t base = 0;
        for (std::size_t gi = 0; gi < map.groups.size(); ++gi) {
            const std::size_t k = map.groups[gi].members_nm.size();
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) acc += ds.samples(r, base + j);
            out.samples(r, gi) = acc / static_cast<double>(k);
            base += k;
        }
    }
    return out;
}

inline MergeResult merge_correlated_bands(const SpectralDataset& ds, const PreprocessConfig& cfg) {
    BandGroupMap map = fit_band_groups(ds, cfg);
    MergeResult out{apply_band_groups(ds, map), std::move(map)};
    return out;
}

// Population-SD standardization fitted on training rows only.
inline StandardScaler fit_scaler(const Matrix& train) {
    StandardScaler sc;
    sc.mean.resize(train.cols);
    sc.sd.resize(train.cols);
    const auto n = static_cast<double>(train.rows);
    require(train.rows > 0, "preprocess", "cannot fit scaler on empty data");
    for (std::size_t c = 0; c < train.cols; ++c) {
        double m = 0.0;
        for (std::size_t r = 0; r < train.rows; ++r) m += train(r, c);
        m /= n;
        double ss = 0.0;
        for (std::size_t r = 0; r < train.rows; ++r) {
            const double d = train(r, c) - m;
            ss += d * d;
        }
        sc.mean[c] = m;
        sc.sd[c] = std::sqrt(ss / n);
    }
    return sc;
}

inline Matrix apply_scaler(const StandardScaler& sc, const Matrix& x) {
    require(sc.size() == x.cols, "preprocess",
            "scaler feature count mismatch: scaler " + std::to_string(sc.size()) +
                ", data " + std::to_string(x.cols));
    Matrix out(x.rows, x.cols);
    for (std::size_t c = 0; c < x.cols; ++c) {
        const double m = sc.mean[c], s = sc.sd[c];
        for (std::size_t r = 0; r < x.rows; ++r)
            out(r, c) = (s == 0.0) ? 0.0 : (x(r, c) - m) / s;
    }
    return out;
}

// Full per-spectrum chain up to the merge step, applied row-wise.
inline SpectralDataset preprocess_rows(const SpectralDataset& raw, const DetectorLayout& layout,
                                       const PreprocessConfig& cfg, unsigned threads = 1) {
    require(raw.n_samples() > 0, "preprocess", "empty dataset");
    SpectralDataset out;
    out.labels = raw.labels;
    out.sample_ids = raw.sample_ids;
    out.plant_ids = raw.plant_ids;
    out.stage_gdd = raw.stage_gdd;

    const Spectrum first =
        savgol_smooth(resample_uniform(trim_detector_edges(raw.spectrum(0), layout, cfg).spectrum, cfg), cfg);
    out.grid = first.grid;
    out.samples = Matrix(raw.n_samples(), first.grid.size());
    for (std::size_t c = 0; c < first.grid.size(); ++c) out.samples(0, c) = first.reflectance[c];

    parallel_for(raw.n_samples() - 1, threads, [&](std::size_t i) {
        const std::size_t r = i + 1;
        const Spectrum s =
            savgol_smooth(resample_uniform(trim_detector_edges(raw.spectrum(r), layout, cfg).spectrum, cfg), cfg);
        require(s.grid.nm == out.grid.nm, "preprocess", "rows disagree on processed grid");
        for (std::size_t c = 0; c < s.grid.size(); ++c) out.samples(r, c) = s.reflectance[c];
    });
    return out;
}

}  // namespace leafspec
