#pragma once

// File formats: spectra and temperature CSV, band map / scaler / selection /
// metrics / model JSON, importance CSV. Every writer goes through an atomic
// temp-file-plus-rename so a failed run never leaves a partial output.
// Doubles print with shortest round-trip precision in CSV; nlohmann does the
// same for JSON, and its object keys serialize alphabetically, so equal
// structures produce byte-identical files.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "leafspec/core.hpp"
#include "leafspec/ensemble/select.hpp"
#include "leafspec/ensemble/split.hpp"
#include "leafspec/ensemble/stack.hpp"
#include "leafspec/evaluation.hpp"
#include "leafspec/phenology.hpp"
#include "leafspec/spectral_types.hpp"

namespace leafspec {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    require(res.ec == std::errc(), "io", "double formatting failed");
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    require(res.ec == std::errc() && res.ptr == s.data() + s.size(), where,
            "not a number: '" + std::string(s) + "'");
    return v;
}

inline void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), "io", "cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        require(out.good(), "io", "write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    require(!ec, "io", "rename failed: " + path + " (" + ec.message() + ")");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "io", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    require(!in.bad(), "io", "read failed: " + path);
    return ss.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline std::vector<std::string> read_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

}  // namespace detail

// ---- spectra CSV ----------------------------------------------------------

inline std::string spectra_to_csv(const SpectralDataset& ds) {
    std::ostringstream out;
    out << "sample_id,plant_id,label,stage_gdd";
    for (double nm : ds.grid.nm) out << ",wl_" << format_double(nm);
    out << '\n';
    for (std::size_t r = 0; r < ds.n_samples(); ++r) {
        out << ds.sample_ids[r] << ',' << ds.plant_ids[r] << ',' << ds.labels[r] << ','
            << format_double(ds.stage_gdd[r]);
        const double* row = ds.samples.row(r);
        for (std::size_t c = 0; c < ds.n_bands(); ++c) out << ',' << format_double(row[c]);
        out << '\n';
    }
    return out.str();
}

inline SpectralDataset spectra_from_csv(const std::string& text) {
    const std::vector<std::string> lines = detail::read_lines(text);
    require(!lines.empty(), "spectra csv", "empty file");
    const std::vector<std::string> header = detail::split_csv_line(lines[0]);
    require(header.size() >= 5, "spectra csv", "header needs at least one wl_ column");
    const char* fixed[4] = {"sample_id", "plant_id", "label", "stage_gdd"};
    for (int i = 0; i < 4; ++i)
        require(header[static_cast<std::size_t>(i)] == fixed[i], "spectra csv",
                "header column " + std::to_string(i + 1) + " must be " + fixed[i]);

    SpectralDataset ds;
    for (std::size_t c = 4; c < header.size(); ++c) {
        const std::string& h = header[c];
        require(h.rfind("wl_", 0) == 0, "spectra csv",
                "band column '" + h + "' must start with wl_");
        ds.grid.nm.push_back(parse_double(std::string_view(h).substr(3), "spectra csv"));
    }
    ds.grid.validate();

    const std::size_t nb = ds.grid.size();
    const std::size_t rows = lines.size() - 1;
    ds.samples = Matrix(rows, nb);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string where = "malformed CSV row " + std::to_string(r + 2);
        const std::vector<std::string> cells = detail::split_csv_line(lines[r + 1]);
        require(cells.size() == header.size(), where,
                "expected " + std::to_string(header.size()) + " cells, got " +
                    std::to_string(cells.size()));
        require(!cells[0].empty(), where, "empty sample_id");
        ds.sample_ids.push_back(cells[0]);
        ds.plant_ids.push_back(cells[1]);
        require(cells[2] == "0" || cells[2] == "1", where,
                "label must be 0 or 1, got '" + cells[2] + "'");
        ds.labels.push_back(cells[2] == "1" ? 1 : 0);
        ds.stage_gdd.push_back(parse_double(cells[3], where));
        for (std::size_t c = 0; c < nb; ++c)
            ds.samples(r, c) = parse_double(cells[4 + c], where);
    }
    ds.validate();
    return ds;
}

inline void save_spectra_csv(const std::string& path, const SpectralDataset& ds) {
    write_file_atomic(path, spectra_to_csv(ds));
}

inline SpectralDataset load_spectra_csv(const std::string& path) {
    return spectra_from_csv(read_file(path));
}

// ---- temperature CSV ------------------------------------------------------

inline std::vector<TemperatureRecord> temperature_from_csv(const std::string& text) {
    const std::vector<std::string> lines = detail::read_lines(text);
    require(!lines.empty(), "temperature csv", "empty file");
    const std::vector<std::string> header = detail::split_csv_line(lines[0]);
    require(header.size() >= 3 && header[0] == "date" && header[1] == "t_min" &&
                header[2] == "t_max",
            "temperature csv", "header must start date,t_min,t_max");
    const bool has_mean_col = header.size() >= 4 && header[3] == "t_mean";
    require(header.size() <= (has_mean_col ? 4u : 3u), "temperature csv",
            "unexpected extra columns");

    std::vector<TemperatureRecord> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const std::string where = "malformed CSV row " + std::to_string(r + 1);
        const std::vector<std::string> cells = detail::split_csv_line(lines[r]);
        require(cells.size() == header.size(), where,
                "expected " + std::to_string(header.size()) + " cells, got " +
                    std::to_string(cells.size()));
        TemperatureRecord rec;
        rec.date = cells[0];
        require(!rec.date.empty(), where, "empty date");
        const bool min_given = !cells[1].empty();
        const bool max_given = !cells[2].empty();
        require(min_given == max_given, where, "t_min and t_max must come together");
        if (min_given) {
            rec.has_min_max = true;
            rec.t_min = parse_double(cells[1], where);
            rec.t_max = parse_double(cells[2], where);
        }
        if (has_mean_col && !cells[3].empty()) {
            rec.has_mean = true;
            rec.t_mean = parse_double(cells[3], where);
        }
        require(rec.has_mean || rec.has_min_max, where, "no temperature data");
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<TemperatureRecord> load_temperature_csv(const std::string& path) {
    return temperature_from_csv(read_file(path));
}

// ---- band map / scaler JSON ------------------------------------------------

inline nlohmann::json band_group_map_to_json(const BandGroupMap& map) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : map.groups)
        groups.push_back(nlohmann::json{{"members_nm", g.members_nm},
                                        {"representative_nm", g.representative_nm}});
    return nlohmann::json{{"original_band_count", map.original_band_count},
                          {"reduced_band_count", map.reduced_band_count},
                          {"groups", std::move(groups)}};
}

inline BandGroupMap band_group_map_from_json(const nlohmann::json& j) {
    BandGroupMap map;
    map.original_band_count = j.at("original_band_count").get<std::size_t>();
    map.reduced_band_count = j.at("reduced_band_count").get<std::size_t>();
    for (const auto& g : j.at("groups")) {
        BandGroup bg;
        bg.members_nm = g.at("members_nm").get<std::vector<double>>();
        bg.representative_nm = g.at("representative_nm").get<double>();
        map.groups.push_back(std::move(bg));
    }
    map.validate();
    return map;
}

inline nlohmann::json scaler_to_json(const StandardScaler& sc) {
    return nlohmann::json{{"mean", sc.mean}, {"sd", sc.sd}};
}

inline StandardScaler scaler_from_json(const nlohmann::json& j) {
    StandardScaler sc;
    sc.mean = j.at("mean").get<std::vector<double>>();
    sc.sd = j.at("sd").get<std::vector<double>>();
    require(sc.mean.size() == sc.sd.size(), "malformed model file", "scaler mean/sd mismatch");
    return sc;
}

// ---- selection report JSON --------------------------------------------------

inline nlohmann::json selection_report_to_json(const SelectionReport& rep) {
    nlohmann::json corr = nlohmann::json::array();
    for (std::size_t r = 0; r < rep.correlation.rows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < rep.correlation.cols; ++c)
            row.push_back(rep.correlation(r, c));
        corr.push_back(std::move(row));
    }
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& d : rep.trace)
        trace.push_back(nlohmann::json{{"model", d.model},
                                       {"auc", d.auc},
                                       {"accepted", d.accepted},
                                       {"reason", d.reason}});
    return nlohmann::json{{"model_names", rep.model_names},
                          {"auc", rep.auc},
                          {"correlation", std::move(corr)},
                          {"selected", rep.selected},
                          {"trace", std::move(trace)}};
}

// ---- metrics JSON -----------------------------------------------------------

inline nlohmann::json metrics_to_json(const MetricsReport& m, double stage_gdd,
                                      const std::string& split) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    return nlohmann::json{{"stage_gdd", stage_gdd},
                          {"split", split},
                          {"confusion",
                           {{"tp", m.cm.tp}, {"fp", m.cm.fp}, {"tn", m.cm.tn}, {"fn", m.cm.fn}}},
                          {"accuracy", m.accuracy},
                          {"recall_infected", opt(m.recall_infected)},
                          {"specificity", opt(m.specificity)},
                          {"precision", opt(m.precision)},
                          {"f1", opt(m.f1)},
                          {"auc", opt(m.auc)},
                          {"threshold", m.threshold}};
}

// ---- importance CSV ---------------------------------------------------------

inline std::string importance_to_csv(const ImportanceProfile& prof) {
    std::ostringstream out;
    out << "representative_nm,importance_mean,importance_sd\n";
    for (const auto& e : prof.entries)
        out << format_double(e.representative_nm) << ',' << format_double(e.importance_mean)
            << ',' << format_double(e.importance_sd) << '\n';
    return out.str();
}

// ---- RMD CSV ----------------------------------------------------------------

inline std::string rmd_to_csv(const std::vector<double>& grid_nm,
                              const std::vector<double>& rmd) {
    require(grid_nm.size() == rmd.size(), "io", "rmd length mismatch");
    std::ostringstream out;
    out << "wavelength_nm,rmd\n";
    for (std::size_t i = 0; i < rmd.size(); ++i)
        out << format_double(grid_nm[i]) << ',' << format_double(rmd[i]) << '\n';
    return out.str();
}

}  // namespace leafspec
