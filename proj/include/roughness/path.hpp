#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "roughness/numeric.hpp"

namespace roughness {

// Hard cap on grid refinement for in-memory paths (2^26 + 1 doubles ~ 0.5 GB).
inline constexpr int kMaxPathLevel = 26;

// A function sampled on the dyadic grid {j * 2^-level : j = 0..2^level}.
// Index j corresponds to time j * 2^-level; times are derived, never stored.
// Instances are treated as immutable after construction.
struct SampledPath {
    int level = 0;
    std::vector<double> values;
    std::string label;

    SampledPath(int level_, std::vector<double> values_, std::string label_ = {})
        : level(level_), values(std::move(values_)), label(std::move(label_)) {
        if (level < 0 || level > kMaxPathLevel)
            throw std::invalid_argument("SampledPath: level out of range: " + std::to_string(level));
        if (static_cast<std::int64_t>(values.size()) != pow2i(level) + 1)
            throw std::invalid_argument("SampledPath: need 2^level + 1 values, got " +
                                        std::to_string(values.size()));
        for (double v : values)
            if (!std::isfinite(v))
                throw std::invalid_argument("SampledPath: non-finite sample value");
    }

    std::int64_t last_index() const { return pow2i(level); }

    double time_at(std::int64_t j) const { return std::ldexp(static_cast<double>(j), -level); }
};

// Index (m, k) of a Faber-Schauder basis function; m = -1 is the linear ramp.
struct DyadicIndex {
    int generation;
    std::int64_t position;

    DyadicIndex(int generation_, std::int64_t position_)
        : generation(generation_), position(position_) {
        if (generation < -1)
            throw std::invalid_argument("DyadicIndex: generation must be >= -1");
        const std::int64_t bound = generation <= 0 ? 1 : pow2i(generation);
        if (position < 0 || position >= bound)
            throw std::invalid_argument("DyadicIndex: position out of range");
    }
};

// Subsample onto the coarser grid T_coarser. Endpoints are copied verbatim.
inline SampledPath restrict_to(const SampledPath& path, int coarser_level) {
    if (coarser_level < 0 || coarser_level > path.level)
        throw std::out_of_range("restrict_to: level " + std::to_string(coarser_level) +
                                " not in [0, " + std::to_string(path.level) + "]");
    if (coarser_level == path.level) return path;
    const std::int64_t stride = pow2i(path.level - coarser_level);
    std::vector<double> out(static_cast<std::size_t>(pow2i(coarser_level)) + 1);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = path.values[static_cast<std::size_t>(j * stride)];
    return SampledPath(coarser_level, std::move(out), path.label);
}

inline void write_path_csv(const SampledPath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("write_path_csv: cannot open " + file);
    out << "t,value\n";
    char buf[64];
    for (std::int64_t j = 0; j <= path.last_index(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", path.time_at(j),
                      path.values[static_cast<std::size_t>(j)]);
        out << buf << '\n';
    }
    if (!out) throw std::runtime_error("write_path_csv: write failed for " + file);
}

// Accepts an optional "t,value" header, then one row per grid point in
// increasing t. Rows may carry either "t,value" or a bare value. The row
// count must be 2^N + 1 for some N, and explicit times must match the dyadic
// grid to within 1e-12.
inline SampledPath read_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("read_path_csv: cannot open " + file);

    std::vector<double> times, values;
    bool has_times = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string first, second;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            first = line;
        } else {
            first = line.substr(0, comma);
            second = line.substr(comma + 1);
        }
        char* end = nullptr;
        const double a = std::strtod(first.c_str(), &end);
        if (end == first.c_str()) {
            if (lineno == 1) continue;  // header line
            throw std::runtime_error("read_path_csv: bad row " + std::to_string(lineno) +
                                     " in " + file);
        }
        if (!second.empty()) {
            char* end2 = nullptr;
            const double b = std::strtod(second.c_str(), &end2);
            if (end2 == second.c_str())
                throw std::runtime_error("read_path_csv: bad value in row " +
                                         std::to_string(lineno) + " of " + file);
            if (!values.empty() && !has_times)
                throw std::runtime_error("read_path_csv: mixed row formats in " + file);
            has_times = true;
            times.push_back(a);
            values.push_back(b);
        } else {
            if (has_times)
                throw std::runtime_error("read_path_csv: mixed row formats in " + file);
            values.push_back(a);
        }
    }
    if (values.size() < 2)
        throw std::runtime_error("read_path_csv: too few rows in " + file);

    const std::size_t count = values.size();
    int level = 0;
    while (level <= kMaxPathLevel && static_cast<std::size_t>(pow2i(level)) + 1 < count) ++level;
    if (static_cast<std::size_t>(pow2i(level)) + 1 != count)
        throw std::runtime_error("read_path_csv: row count " + std::to_string(count) +
                                 " is not 2^N + 1 for any N (" + file + ")");
    if (has_times) {
        for (std::size_t j = 0; j < count; ++j) {
            const double expected = std::ldexp(static_cast<double>(j), -level);
            if (std::fabs(times[j] - expected) > 1e-12)
                throw std::runtime_error("read_path_csv: time at row " + std::to_string(j) +
                                         " does not sit on the dyadic grid (" + file + ")");
        }
    }
    return SampledPath(level, std::move(values), file);
}

}  // namespace roughness
