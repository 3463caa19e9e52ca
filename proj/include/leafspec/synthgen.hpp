#pragma once

// Synthetic leaf spectra on the native multi-resolution detector grid: a
// canonical vegetation baseline with Gaussian water-absorption dips whose
// depth differs between classes, plus per-leaf noise and junction-band
// artifacts.
//
// Noise model. Each leaf draws one Gaussian offset (SD = noise_sd) applied
// to every band, from a stream keyed by (class, plant, leaf); a leaf-level
// offset is what gives neighboring bands the near-unit correlation that the
// band-merging stage exists to exploit. Junction artifacts draw i.i.d. per
// affected band (SD = junction_sd) from a stream keyed by (plant, leaf)
// only; those streams are shared between classes so that delta = 0 with
// noise_sd = 0 yields bitwise-identical classes. Junction bands sit inside
// the trim zone, so post-preprocessing features carry no shared randomness
// across classes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/spectral_types.hpp"

namespace leafspec {

enum class StagePreset { early, late };

struct SynthConfig {
    int n_plants_per_class = 49;
    int leaves_per_plant = 2;
    StagePreset preset = StagePreset::early;
    double dip_center_1_nm = 1450.0;
    double dip_center_2_nm = 1940.0;
    double dip_sigma_nm = 40.0;
    double base_depth = 0.25;
    double delta = 0.05;      // class depth difference; early: infected shallower
    double noise_sd = 0.01;   // per-leaf offset SD
    double junction_sd = 0.05;
    DetectorLayout layout = DetectorLayout::standard();
    std::uint64_t seed = 0;

    double stage_gdd() const { return preset == StagePreset::early ? 585.0 : 1568.0; }

    // Dip depth per class. The class contrast reverses between presets:
    // early infection dries leaves (shallower water dips), late-stage
    // canopies flip the contrast.
    double depth_infected() const {
        return preset == StagePreset::early ? base_depth - delta / 2.0
                                            : base_depth + delta / 2.0;
    }
    double depth_non_infected() const {
        return preset == StagePreset::early ? base_depth + delta / 2.0
                                            : base_depth - delta / 2.0;
    }

    void validate() const {
        require(n_plants_per_class >= 2, "synth config", "need at least 2 plants per class");
        require(leaves_per_plant >= 1, "synth config", "need at least 1 leaf per plant");
        require(dip_sigma_nm > 0, "synth config", "dip_sigma_nm must be positive");
        require(noise_sd >= 0 && junction_sd >= 0, "synth config",
                "noise SDs must be non-negative");
        require(delta >= 0, "synth config", "delta must be non-negative");
        layout.validate();
    }
};

namespace detail {

inline double baseline_vis(double nm) {
    struct Point {
        double nm, r;
    };
    static constexpr Point pts[] = {{300.0, 0.07}, {400.0, 0.08}, {550.0, 0.15}, {670.0, 0.05}};
    if (nm <= pts[0].nm) return pts[0].r;
    for (std::size_t i = 1; i < std::size(pts); ++i) {
        if (nm <= pts[i].nm) {
            const double t = (nm - pts[i - 1].nm) / (pts[i].nm - pts[i - 1].nm);
            return pts[i - 1].r + t * (pts[i].r - pts[i - 1].r);
        }
    }
    return pts[std::size(pts) - 1].r;
}

inline double baseline_nir(double nm) {
    if (nm <= 1300.0) return 0.50;
    return 0.50 - 0.35 * (nm - 1300.0) / 1200.0;  // 0.15 at 2500 nm
}

}  // namespace detail

// Noise-free reflectance at one wavelength for a given dip depth: visible
// shape blended into the NIR plateau across the red edge, minus Gaussian
// water dips.
inline double baseline_reflectance(const SynthConfig& cfg, double nm, double depth) {
    const double s = 1.0 / (1.0 + std::exp(-(nm - 725.0) / 12.0));
    const double body = (1.0 - s) * detail::baseline_vis(nm) + s * detail::baseline_nir(nm);
    const double d1 = (nm - cfg.dip_center_1_nm) / cfg.dip_sigma_nm;
    const double d2 = (nm - cfg.dip_center_2_nm) / cfg.dip_sigma_nm;
    return body - depth * (std::exp(-0.5 * d1 * d1) + std::exp(-0.5 * d2 * d2));
}

struct EffectSize {
    double value = 0.0;
    bool infinite = false;  // nonzero class contrast with zero noise
};

// Per-band signal-to-noise at the dip centers: class mean difference there
// is exactly delta.
inline EffectSize effect_size(const SynthConfig& cfg) {
    cfg.validate();
    if (cfg.delta == 0.0) return {0.0, false};
    if (cfg.noise_sd == 0.0) return {0.0, true};
    return {cfg.delta / cfg.noise_sd, false};
}

namespace detail {

// Native band indices within the trim zone of each interior junction: the
// last `half` bands at or below the junction and the first `half` above.
inline std::vector<std::size_t> junction_band_indices(const WavelengthGrid& grid,
                                                      const DetectorLayout& layout,
                                                      std::size_t half) {
    std::vector<std::size_t> out;
    for (double j : layout.junctions()) {
        std::size_t split = 0;
        while (split < grid.size() && grid.nm[split] <= j) ++split;
        const std::size_t lo = split >= half ? split - half : 0;
        const std::size_t hi = std::min(grid.size(), split + half);
        for (std::size_t i = lo; i < hi; ++i) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

inline SpectralDataset generate(const SynthConfig& cfg) {
    cfg.validate();
    const WavelengthGrid grid = cfg.layout.native_grid();

    // Reject parameters before drawing anything: the noise-free curve must
    // stay strictly inside (0, 1) for both class depths.
    for (double depth : {cfg.depth_infected(), cfg.depth_non_infected()}) {
        for (double nm : grid.nm) {
            const double r = baseline_reflectance(cfg, nm, depth);
            require(r > 0.0 && r < 1.0, "synth config",
                    "reflectance out of (0, 1) at " + std::to_string(nm) + " nm");
        }
    }

    const std::vector<std::size_t> junction_bands = detail::junction_band_indices(
        grid, cfg.layout, static_cast<std::size_t>(cfg.layout.junction_trim_bands));

    const std::size_t per_class =
        static_cast<std::size_t>(cfg.n_plants_per_class) *
        static_cast<std::size_t>(cfg.leaves_per_plant);
    SpectralDataset ds;
    ds.grid = grid;
    ds.samples = Matrix(2 * per_class, grid.size());
    ds.labels.reserve(2 * per_class);
    ds.sample_ids.reserve(2 * per_class);
    ds.plant_ids.reserve(2 * per_class);
    ds.stage_gdd.assign(2 * per_class, cfg.stage_gdd());

    // Output order: infected plants first (plant id then leaf index), then
    // non-infected, matching lexicographic (plant_id, leaf) order.
    std::size_t row = 0;
    for (int label : {kLabelInfected, kLabelNonInfected}) {
        const double depth = label == kLabelInfected ? cfg.depth_infected()
                                                     : cfg.depth_non_infected();
        const char* prefix = label == kLabelInfected ? "inf" : "non";
        for (int plant = 0; plant < cfg.n_plants_per_class; ++plant) {
            char pid[16];
            std::snprintf(pid, sizeof pid, "%s%03d", prefix, plant + 1);
            for (int leaf = 0; leaf < cfg.leaves_per_plant; ++leaf, ++row) {
                const std::uint64_t leaf_slot =
                    (static_cast<std::uint64_t>(plant) * cfg.leaves_per_plant + leaf);
                Rng offset_rng(derive_seed(
                    cfg.seed, (static_cast<std::uint64_t>(label) * cfg.n_plants_per_class *
                               cfg.leaves_per_plant) +
                                  leaf_slot));
                Rng junction_rng(derive_seed(cfg.seed, 0x100000000ull + leaf_slot));
                const double offset = cfg.noise_sd * offset_rng.normal();

                double* x = ds.samples.row(row);
                for (std::size_t b = 0; b < grid.size(); ++b)
                    x[b] = baseline_reflectance(cfg, grid.nm[b], depth) + offset;
                for (std::size_t b : junction_bands)
                    x[b] += cfg.junction_sd * junction_rng.normal();
                for (std::size_t b = 0; b < grid.size(); ++b)
                    x[b] = std::clamp(x[b], 0.0, kReflectanceMax);

                ds.labels.push_back(label);
                ds.plant_ids.push_back(pid);
                ds.sample_ids.push_back(std::string(pid) + "_" + std::to_string(leaf + 1));
            }
        }
    }
    ds.validate();
    return ds;
}

}  // namespace leafspec
