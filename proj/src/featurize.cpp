#include "fitcrf/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "fitcrf/csv.hpp"
#include "fitcrf/error.hpp"

namespace fitcrf::featurize {

using nlohmann::ordered_json;

std::string to_string(Stat s) {
    switch (s) {
        case Stat::mean: return "mean";
        case Stat::min: return "min";
        case Stat::max: return "max";
        case Stat::stddev: return "std";
        case Stat::p25: return "p25";
        case Stat::p50: return "p50";
        case Stat::p75: return "p75";
        case Stat::slope: return "slope";
    }
    throw DataError("bad stat");
}

Stat stat_from_string(const std::string& s) {
    if (s == "mean") return Stat::mean;
    if (s == "min") return Stat::min;
    if (s == "max") return Stat::max;
    if (s == "std") return Stat::stddev;
    if (s == "p25") return Stat::p25;
    if (s == "p50") return Stat::p50;
    if (s == "p75") return Stat::p75;
    if (s == "slope") return Stat::slope;
    throw DataError("unknown stat: '" + s + "'");
}

double ChannelStats::get(Stat s) const {
    switch (s) {
        case Stat::mean: return mean;
        case Stat::min: return min;
        case Stat::max: return max;
        case Stat::stddev: return stddev;
        case Stat::p25: return p25;
        case Stat::p50: return p50;
        case Stat::p75: return p75;
        case Stat::slope: return slope;
    }
    throw DataError("bad stat");
}

namespace {

const std::vector<Stat> kFullStats = {Stat::mean, Stat::min, Stat::max, Stat::stddev,
                                      Stat::p25,  Stat::p50, Stat::p75, Stat::slope};
// Short daily-count series: min is degenerate for all three channels, and
// p25 additionally for daily VPA (typically several zero-VPA days per week).
const std::vector<Stat> kDailyStats = {Stat::mean, Stat::max, Stat::stddev, Stat::p25,
                                       Stat::p50,  Stat::p75, Stat::slope};
const std::vector<Stat> kDailyVpaStats = {Stat::mean, Stat::max, Stat::stddev,
                                          Stat::p50,  Stat::p75, Stat::slope};

FeatureLayout build_canonical() {
    FeatureLayout layout;
    layout.version = kLayoutVersion;
    auto add_channel = [&](const std::string& channel, const std::vector<Stat>& stats) {
        for (Stat s : stats) {
            layout.entries.push_back({channel + "_" + to_string(s), channel, s});
        }
    };
    add_channel("accel", kFullStats);
    add_channel("hr", kFullStats);
    add_channel("hrv", kFullStats);
    add_channel("enmo", kFullStats);
    add_channel("met", kFullStats);
    add_channel("daily_sedentary", kDailyStats);
    add_channel("daily_mvpa", kDailyStats);
    add_channel("daily_vpa", kDailyVpaStats);
    for (const char* name : {"age", "sex", "weight", "height", "bmi", "rhr"}) {
        layout.entries.push_back({name, "", std::nullopt});
    }
    layout.entries.push_back({"month_sin", "", std::nullopt});
    layout.entries.push_back({"month_cos", "", std::nullopt});
    if (layout.entries.size() != kFeatureCount) {
        throw Error("canonical layout does not have 68 entries");
    }
    return layout;
}

}  // namespace

const FeatureLayout& FeatureLayout::canonical() {
    static const FeatureLayout layout = build_canonical();
    return layout;
}

std::size_t FeatureLayout::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].name == name) return i;
    }
    throw DataError("no feature named '" + name + "' in layout " + version);
}

namespace {

/// Percentile by linear interpolation between closest ranks on a sorted copy.
double percentile_sorted(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return (1.0 - frac) * sorted[lo] + frac * sorted[lo + 1];
}

}  // namespace

ChannelStats summarize_channel(std::span<const double> values, std::span<const double> positions) {
    const std::size_t n = values.size();
    if (n < 2) throw DataError("summarize_channel needs at least 2 samples");
    if (positions.size() != n) throw DataError("values/positions size mismatch");

    ChannelStats st;
    double sum = 0;
    st.min = values[0];
    st.max = values[0];
    for (double v : values) {
        if (!std::isfinite(v)) throw DataError("non-finite value in channel");
        sum += v;
        st.min = std::min(st.min, v);
        st.max = std::max(st.max, v);
    }
    st.mean = sum / static_cast<double>(n);

    double ss = 0;
    for (double v : values) ss += (v - st.mean) * (v - st.mean);
    st.stddev = std::sqrt(ss / static_cast<double>(n));  // population std

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    st.p25 = percentile_sorted(sorted, 0.25);
    st.p50 = percentile_sorted(sorted, 0.50);
    st.p75 = percentile_sorted(sorted, 0.75);

    double xmean = 0;
    for (double x : positions) xmean += x;
    xmean /= static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (positions[i] - xmean) * (values[i] - st.mean);
        sxx += (positions[i] - xmean) * (positions[i] - xmean);
    }
    st.slope = sxx > 0 ? sxy / sxx : 0.0;
    return st;
}

ChannelStats summarize_channel(std::span<const double> values) {
    std::vector<double> positions(values.size());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<double>(i);
    return summarize_channel(values, positions);
}

std::pair<double, double> cyclical_month(int month) {
    if (month < 1 || month > 12) throw DataError("month out of range: " + std::to_string(month));
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(month) / 12.0;
    return {std::sin(angle), std::cos(angle)};
}

namespace {

struct MaskedChannel {
    std::vector<double> values;
    std::vector<double> positions;
};

MaskedChannel masked(const std::vector<double>& series, const std::vector<std::uint8_t>& wear) {
    MaskedChannel ch;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!wear[i]) continue;
        ch.values.push_back(series[i]);
        ch.positions.push_back(static_cast<double>(i));
    }
    return ch;
}

std::vector<double> positions_0n(std::size_t n) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(i);
    return p;
}

}  // namespace

FeatureVector build_feature_vector(const Participant& p, const sensorproc::CleanWeek& week,
                                   const FeatureLayout& layout) {
    if (!sensorproc::eligible(week)) {
        throw DataError(p.id + ": week has less than 72 hours of wear time");
    }
    for (double cov : {p.age_years, p.weight_kg, p.height_m, p.bmi, p.rhr_bpm}) {
        if (!std::isfinite(cov)) throw DataError(p.id + ": missing covariate");
    }

    const std::size_t n = week.samples.size();
    std::vector<double> accel(n), hrv(n);
    for (std::size_t i = 0; i < n; ++i) {
        accel[i] = week.samples[i].accel_mg;
        hrv[i] = week.samples[i].hrv_ms;
    }
    const auto daily = sensorproc::daily_intensity_minutes(week);
    const auto day_pos = positions_0n(daily.sedentary.size());

    struct Entry {
        MaskedChannel ch;
        ChannelStats st;
    };
    auto stats_of = [&](const MaskedChannel& ch) {
        if (ch.values.size() < 2) {
            throw DataError(p.id + ": fewer than 2 wear samples in a channel");
        }
        return summarize_channel(ch.values, ch.positions);
    };

    const ChannelStats accel_st = stats_of(masked(accel, week.wear));
    const ChannelStats hr_st = stats_of(masked(week.hr_filtered, week.wear));
    const ChannelStats hrv_st = stats_of(masked(hrv, week.wear));
    const ChannelStats enmo_st = stats_of(masked(week.enmo, week.wear));
    const ChannelStats met_st = stats_of(masked(week.met, week.wear));
    const ChannelStats sed_st = summarize_channel(daily.sedentary, day_pos);
    const ChannelStats mvpa_st = summarize_channel(daily.mvpa, day_pos);
    const ChannelStats vpa_st = summarize_channel(daily.vpa, day_pos);

    const auto [month_sin, month_cos] = cyclical_month(week.start_month);

    FeatureVector fv;
    fv.id = p.id;
    fv.layout_version = layout.version;
    fv.values.reserve(layout.entries.size());
    fv.label_current = p.vo2max_current;
    fv.label_future = p.vo2max_future;

    for (const auto& entry : layout.entries) {
        double v = 0;
        if (entry.stat) {
            const ChannelStats* st = nullptr;
            if (entry.channel == "accel") st = &accel_st;
            else if (entry.channel == "hr") st = &hr_st;
            else if (entry.channel == "hrv") st = &hrv_st;
            else if (entry.channel == "enmo") st = &enmo_st;
            else if (entry.channel == "met") st = &met_st;
            else if (entry.channel == "daily_sedentary") st = &sed_st;
            else if (entry.channel == "daily_mvpa") st = &mvpa_st;
            else if (entry.channel == "daily_vpa") st = &vpa_st;
            else throw DataError("layout references unknown channel: " + entry.channel);
            v = st->get(*entry.stat);
        } else if (entry.name == "age") v = p.age_years;
        else if (entry.name == "sex") v = p.sex == Sex::male ? 1.0 : 0.0;
        else if (entry.name == "weight") v = p.weight_kg;
        else if (entry.name == "height") v = p.height_m;
        else if (entry.name == "bmi") v = p.bmi;
        else if (entry.name == "rhr") v = p.rhr_bpm;
        else if (entry.name == "month_sin") v = month_sin;
        else if (entry.name == "month_cos") v = month_cos;
        else throw DataError("layout references unknown covariate: " + entry.name);
        if (!std::isfinite(v)) throw DataError(p.id + ": non-finite feature " + entry.name);
        fv.values.push_back(v);
    }
    return fv;
}

Eigen::MatrixXd to_matrix(const std::vector<FeatureVector>& rows) {
    if (rows.empty()) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd m(rows.size(), rows[0].values.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].values.size() != static_cast<std::size_t>(m.cols())) {
            throw DataError(rows[i].id + ": inconsistent feature vector length");
        }
        for (std::size_t j = 0; j < rows[i].values.size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
        }
    }
    return m;
}

Eigen::VectorXd labels_current(const std::vector<FeatureVector>& rows) {
    Eigen::VectorXd y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) y[static_cast<Eigen::Index>(i)] = rows[i].label_current;
    return y;
}

Eigen::VectorXd labels_future(const std::vector<FeatureVector>& rows) {
    Eigen::VectorXd y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].label_future) throw DataError(rows[i].id + ": missing future label");
        y[static_cast<Eigen::Index>(i)] = *rows[i].label_future;
    }
    return y;
}

Eigen::VectorXd labels_delta(const std::vector<FeatureVector>& rows) {
    return labels_current(rows) - labels_future(rows);
}

void write_features_csv(const std::filesystem::path& path, const std::vector<FeatureVector>& rows) {
    CsvWriter w(path);
    w.field("id").field("label_current").field("label_future");
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "f%03zu", i);
        w.field(buf);
    }
    w.end_row();
    for (const auto& fv : rows) {
        if (fv.values.size() != kFeatureCount) {
            throw DataError(fv.id + ": feature vector length != 68");
        }
        w.field(fv.id).field(fv.label_current);
        w.field(fv.label_future ? format_double(*fv.label_future) : std::string());
        for (double v : fv.values) w.field(v);
        w.end_row();
    }
}

std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path,
                                             const std::string& layout_version) {
    const CsvTable t = read_csv(path);
    if (t.header.size() != 3 + kFeatureCount) throw IoError(path.string() + ": bad features header");
    std::vector<FeatureVector> rows;
    rows.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        FeatureVector fv;
        fv.id = r[0];
        fv.layout_version = layout_version;
        fv.label_current = parse_double(r[1]);
        if (!r[2].empty()) fv.label_future = parse_double(r[2]);
        fv.values.reserve(kFeatureCount);
        for (std::size_t i = 0; i < kFeatureCount; ++i) fv.values.push_back(parse_double(r[3 + i]));
        rows.push_back(std::move(fv));
    }
    return rows;
}

void write_layout_json(const std::filesystem::path& path, const FeatureLayout& layout) {
    ordered_json j;
    j["layout_version"] = layout.version;
    j["features"] = ordered_json::array();
    for (std::size_t i = 0; i < layout.entries.size(); ++i) {
        const auto& e = layout.entries[i];
        ordered_json f;
        f["index"] = i;
        f["name"] = e.name;
        f["channel"] = e.channel;
        f["stat"] = e.stat ? to_string(*e.stat) : "";
        j["features"].push_back(f);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write layout file: " + path.string());
    out << j.dump(2) << '\n';
}

FeatureLayout read_layout_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read layout file: " + path.string());
    ordered_json j;
    in >> j;
    FeatureLayout layout;
    layout.version = j.at("layout_version").get<std::string>();
    for (const auto& f : j.at("features")) {
        LayoutEntry e;
        e.name = f.at("name").get<std::string>();
        e.channel = f.at("channel").get<std::string>();
        const std::string stat = f.at("stat").get<std::string>();
        if (!stat.empty()) e.stat = stat_from_string(stat);
        layout.entries.push_back(std::move(e));
    }
    return layout;
}

}  // namespace fitcrf::featurize
