#pragma once

// Spectral value types: wavelength grids, single spectra, labeled datasets,
// detector layout, and the preprocessing configuration shared by the
// pipeline stages.

#include <cstdint>
#include <string>
#include <vector>

#include "leafspec/core.hpp"

namespace leafspec {

constexpr int kLabelNonInfected = 0;
constexpr int kLabelInfected = 1;

// Strictly increasing wavelengths in nm, all within [300, 2600].
struct WavelengthGrid {
    std::vector<double> nm;

    std::size_t size() const { return nm.size(); }

    void validate() const {
        for (std::size_t i = 0; i < nm.size(); ++i) {
            require(std::isfinite(nm[i]), "grid", "non-finite wavelength");
            require(nm[i] >= 300.0 && nm[i] <= 2600.0, "grid",
                    "wavelength " + std::to_string(nm[i]) + " outside [300, 2600]");
            if (i > 0)
                require(nm[i] > nm[i - 1], "grid", "wavelengths not strictly increasing");
        }
    }
};

// Reflectance is a white-reference ratio; values slightly above 1 are legal.
constexpr double kReflectanceMax = 1.5;

struct Spectrum {
    WavelengthGrid grid;
    std::vector<double> reflectance;

    void validate() const {
        grid.validate();
        require(grid.size() == reflectance.size(), "spectrum",
                "grid/reflectance length mismatch");
        for (double v : reflectance) {
            require(std::isfinite(v), "spectrum", "non-finite reflectance");
            require(v >= 0.0 && v <= kReflectanceMax, "spectrum",
                    "reflectance " + std::to_string(v) + " outside [0, 1.5]");
        }
    }
};

// Row-aligned sample collection on a common grid.
struct SpectralDataset {
    WavelengthGrid grid;
    Matrix samples;                         // n_samples x n_bands
    std::vector<int> labels;                // 0 = non_infected, 1 = infected
    std::vector<std::string> sample_ids;
    std::vector<std::string> plant_ids;
    std::vector<double> stage_gdd;          // accumulated GDD per sample

    std::size_t n_samples() const { return samples.rows; }
    std::size_t n_bands() const { return samples.cols; }

    Spectrum spectrum(std::size_t row) const {
        Spectrum s;
        s.grid = grid;
        s.reflectance.assign(samples.row(row), samples.row(row) + samples.cols);
        return s;
    }

    SpectralDataset subset(const std::vector<std::size_t>& rows) const {
        SpectralDataset out;
        out.grid = grid;
        out.samples = Matrix(rows.size(), samples.cols);
        out.labels.reserve(rows.size());
        out.sample_ids.reserve(rows.size());
        out.plant_ids.reserve(rows.size());
        out.stage_gdd.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::size_t r = rows[i];
            for (std::size_t c = 0; c < samples.cols; ++c) out.samples(i, c) = samples(r, c);
            out.labels.push_back(labels[r]);
            out.sample_ids.push_back(sample_ids[r]);
            out.plant_ids.push_back(plant_ids[r]);
            out.stage_gdd.push_back(stage_gdd[r]);
        }
        return out;
    }

    void validate() const {
        grid.validate();
        require(samples.cols == grid.size(), "dataset", "matrix width != grid size");
        require(samples.rows == labels.size() && samples.rows == plant_ids.size() &&
                    samples.rows == sample_ids.size() && samples.rows == stage_gdd.size(),
                "dataset", "row-aligned field lengths differ");
        for (int l : labels)
            require(l == kLabelNonInfected || l == kLabelInfected, "dataset",
                    "label must be 0 or 1");
        for (std::size_t r = 0; r < samples.rows; ++r)
            for (std::size_t c = 0; c < samples.cols; ++c) {
                const double v = samples(r, c);
                require(std::isfinite(v) && v >= 0.0 && v <= kReflectanceMax, "dataset",
                        "reflectance out of range at row " + std::to_string(r));
            }
    }

    // Canonical content hash; used to tie fitted models back to their input.
    std::string fingerprint() const {
        Fnv1a h;
        h.add(grid.nm);
        h.add(static_cast<std::uint64_t>(samples.rows));
        for (std::size_t r = 0; r < samples.rows; ++r) {
            h.add(sample_ids[r]);
            h.add(plant_ids[r]);
            h.add(labels[r]);
            h.add(stage_gdd[r]);
            for (std::size_t c = 0; c < samples.cols; ++c) h.add(samples(r, c));
        }
        return h.hex();
    }
};

// Spectrometer segments: [start, end] nm at a nominal bandwidth each.
// Junctions are the boundaries between consecutive segments.
struct DetectorSegment {
    double start_nm;
    double end_nm;
    double bandwidth_nm;
};

struct DetectorLayout {
    std::vector<DetectorSegment> segments;
    int junction_trim_bands = 5;

    static DetectorLayout standard() {
        return DetectorLayout{{{350.0, 1000.0, 1.5}, {1000.0, 1890.0, 3.8}, {1890.0, 2500.0, 2.5}}, 5};
    }

    std::vector<double> junctions() const {
        std::vector<double> j;
        for (std::size_t i = 0; i + 1 < segments.size(); ++i) j.push_back(segments[i].end_nm);
        return j;
    }

    void validate() const {
        require(!segments.empty(), "layout", "no detector segments");
        require(junction_trim_bands >= 0, "layout", "negative trim count");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            require(segments[i].start_nm < segments[i].end_nm, "layout", "segment start >= end");
            require(segments[i].bandwidth_nm > 0, "layout", "non-positive bandwidth");
            if (i > 0)
                require(segments[i].start_nm == segments[i - 1].end_nm, "layout",
                        "segments not contiguous");
        }
    }

    // The native grid: the first segment is anchored at its upper junction
    // and descends by its bandwidth; later segments ascend from their lower
    // junction, excluding the junction itself (it belongs to the preceding
    // segment). The standard layout therefore contains 400.0 and 1000.0
    // exactly, and the 1890 junction falls between native bands.
    WavelengthGrid native_grid() const {
        validate();
        WavelengthGrid g;
        {
            const auto& s = segments.front();
            const auto steps = static_cast<long>((s.end_nm - s.start_nm) / s.bandwidth_nm + 1e-9);
            for (long k = steps; k >= 0; --k) {
                const double w = s.end_nm - s.bandwidth_nm * static_cast<double>(k);
                if (w > s.start_nm + 1e-9) g.nm.push_back(w);
            }
        }
        for (std::size_t i = 1; i < segments.size(); ++i) {
            const auto& s = segments[i];
            const auto steps = static_cast<long>((s.end_nm - s.start_nm) / s.bandwidth_nm + 1e-9);
            for (long k = 1; k <= steps; ++k)
                g.nm.push_back(s.start_nm + s.bandwidth_nm * static_cast<double>(k));
        }
        g.validate();
        return g;
    }
};

struct PreprocessConfig {
    double analysis_low_nm = 400.0;
    double analysis_high_nm = 2500.0;
    int trim_bands = 5;
    double target_resolution_nm = 1.0;
    int sg_order = 2;
    int sg_window = 7;
    double corr_threshold = 0.99;

    void validate() const {
        require(analysis_low_nm < analysis_high_nm, "config", "analysis range low >= high");
        require(trim_bands >= 0, "config", "trim_bands negative");
        require(target_resolution_nm > 0, "config", "target_resolution_nm must be positive");
        require(sg_window % 2 == 1 && sg_window > sg_order, "config",
                "sg_window must be odd and exceed sg_order");
        require(sg_order >= 0, "config", "sg_order negative");
        require(corr_threshold > 0.0 && corr_threshold <= 1.0, "config",
                "corr_threshold must lie in (0, 1]");
    }
};

// Audit trail of the band merge: contiguous groups partition the
// post-smoothing band set; each group is represented by its mean wavelength.
struct BandGroup {
    std::vector<double> members_nm;
    double representative_nm;
};

struct BandGroupMap {
    std::vector<BandGroup> groups;
    std::size_t original_band_count = 0;
    std::size_t reduced_band_count = 0;

    void validate() const {
        require(reduced_band_count == groups.size(), "band_map",
                "reduced_band_count != group count");
        std::size_t members = 0;
        double prev = -1.0;
        for (const auto& g : groups) {
            require(!g.members_nm.empty(), "band_map", "empty group");
            for (double w : g.members_nm) {
                require(w > prev, "band_map", "groups overlap or are unordered");
                prev = w;
            }
            members += g.members_nm.size();
        }
        require(members == original_band_count, "band_map",
                "groups do not partition the original bands");
    }
};

// Per-feature standardization parameters; population-SD convention.
// sd == 0 marks a degenerate feature whose scaled output is defined as 0.
struct StandardScaler {
    std::vector<double> mean;
    std::vector<double> sd;

    std::size_t size() const { return mean.size(); }
};

struct ClassMeanProfile {
    std::vector<double> grid_nm;   // post-merge representative wavelengths
    std::vector<double> mu_non;
    std::vector<double> mu_inf;
};

}  // namespace leafspec
