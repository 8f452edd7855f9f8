#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fitcrf/sensorproc.hpp"
#include "fitcrf/types.hpp"

namespace fitcrf::featurize {

inline constexpr std::size_t kFeatureCount = 68;
inline constexpr const char* kLayoutVersion = "fitcrf-68/v1";

enum class Stat : int { mean, min, max, stddev, p25, p50, p75, slope };

std::string to_string(Stat s);
Stat stat_from_string(const std::string& s);

struct LayoutEntry {
    std::string name;
    std::string channel;  // empty for scalar covariates
    std::optional<Stat> stat;
};

struct FeatureLayout {
    std::string version;
    std::vector<LayoutEntry> entries;

    /// The pinned 68-entry layout: 8 statistics for each minute-level channel
    /// (accel, hr, hrv, enmo, met), 7 for the daily sedentary / MVPA counts
    /// and 6 for daily VPA (degenerate short-series statistics dropped), six
    /// scalar covariates, and the two cyclical month coordinates.
    static const FeatureLayout& canonical();

    std::size_t index_of(const std::string& name) const;  // throws DataError
};

struct FeatureVector {
    std::string id;
    std::string layout_version;
    std::vector<double> values;
    double label_current = 0;
    std::optional<double> label_future;
};

struct ChannelStats {
    double mean = 0, min = 0, max = 0, stddev = 0, p25 = 0, p50 = 0, p75 = 0, slope = 0;

    double get(Stat s) const;
};

/// Eight summary statistics of a (possibly gapped) series: mean, min, max,
/// population std, linearly interpolated 25/50/75 percentiles, and the OLS
/// slope against the given sample positions. Needs at least two samples.
ChannelStats summarize_channel(std::span<const double> values, std::span<const double> positions);
ChannelStats summarize_channel(std::span<const double> values);  // positions 0..n-1

/// Cyclical month-of-year encoding: (sin, cos) of 2*pi*month/12, so December
/// and January sit one month apart on the circle.
std::pair<double, double> cyclical_month(int month);

FeatureVector build_feature_vector(const Participant& p, const sensorproc::CleanWeek& week,
                                   const FeatureLayout& layout = FeatureLayout::canonical());

Eigen::MatrixXd to_matrix(const std::vector<FeatureVector>& rows);
Eigen::VectorXd labels_current(const std::vector<FeatureVector>& rows);
Eigen::VectorXd labels_future(const std::vector<FeatureVector>& rows);  // throws if any absent
Eigen::VectorXd labels_delta(const std::vector<FeatureVector>& rows);   // current - future

// features CSV: id,label_current,label_future,f000..f067 (+ sidecar layout file)
void write_features_csv(const std::filesystem::path& path, const std::vector<FeatureVector>& rows);
std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path,
                                             const std::string& layout_version = kLayoutVersion);

void write_layout_json(const std::filesystem::path& path, const FeatureLayout& layout);
FeatureLayout read_layout_json(const std::filesystem::path& path);

}  // namespace fitcrf::featurize
