#include "fitcrf/sensorproc.hpp"

#include <algorithm>
#include <cmath>

#include "fitcrf/csv.hpp"
#include "fitcrf/error.hpp"

namespace fitcrf::sensorproc {

namespace {

constexpr double kMetPerIntensity = 1.0 / 71.0;  // 1 MET = 71 J/min/kg
constexpr int kNonwearRunMinutes = 90;           // runs strictly longer are non-wear
constexpr double kNonPhysiologicalHr = 30.0;
constexpr double kHrClampLo = 30.0, kHrClampHi = 220.0;
constexpr double kSpikeDelta = 40.0;  // isolated single-minute HR spikes

}  // namespace

std::string to_string(IntensityClass c) {
    switch (c) {
        case IntensityClass::sedentary: return "sedentary";
        case IntensityClass::light: return "light";
        case IntensityClass::moderate_vigorous: return "moderate_vigorous";
        case IntensityClass::vigorous: return "vigorous";
    }
    throw DataError("bad intensity class");
}

IntensityClass intensity_from_string(const std::string& s) {
    if (s == "sedentary") return IntensityClass::sedentary;
    if (s == "light") return IntensityClass::light;
    if (s == "moderate_vigorous") return IntensityClass::moderate_vigorous;
    if (s == "vigorous") return IntensityClass::vigorous;
    throw DataError("unknown intensity class: '" + s + "'");
}

std::vector<std::uint8_t> detect_nonwear(const SensorWeek& week) {
    const auto& s = week.samples;
    std::vector<std::uint8_t> wear(s.size(), 1);
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i].accel_mg != 0.0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && s[j].accel_mg == 0.0) ++j;
        const std::size_t run = j - i;
        if (run > kNonwearRunMinutes) {
            bool all_low = true;
            bool flat = true;
            for (std::size_t k = i; k < j; ++k) {
                if (s[k].hr_bpm >= kNonPhysiologicalHr) all_low = false;
                if (s[k].hr_bpm != s[i].hr_bpm) flat = false;
            }
            if (all_low || flat) {
                std::fill(wear.begin() + static_cast<long>(i), wear.begin() + static_cast<long>(j), 0);
            }
        }
        i = j;
    }
    return wear;
}

double accel_to_intensity(double accel_mg, const CalibrationConfig& calib) {
    if (accel_mg < 0) throw DataError("negative acceleration");
    return accel_mg * calib.intensity_per_mg;
}

double intensity_to_met(double j_per_min_kg) {
    if (j_per_min_kg < 0) throw DataError("negative movement intensity");
    return j_per_min_kg * kMetPerIntensity;
}

double accel_to_met(double accel_mg, const CalibrationConfig& calib) {
    return intensity_to_met(accel_to_intensity(accel_mg, calib));
}

IntensityClass classify_intensity(double met) {
    if (met <= 1.5) return IntensityClass::sedentary;
    if (met < 3.0) return IntensityClass::light;
    if (met <= 6.0) return IntensityClass::moderate_vigorous;
    return IntensityClass::vigorous;
}

IntensityClass classify_accel_profile(double accel_mg, const CalibrationConfig& calib) {
    if (accel_mg < calib.accel_sedentary_below) return IntensityClass::sedentary;
    if (accel_mg >= calib.accel_vigorous_from) return IntensityClass::vigorous;
    return IntensityClass::moderate_vigorous;
}

std::optional<double> derive_hrv(std::span<const double> ibis_ms) {
    if (ibis_ms.size() < 4) return std::nullopt;
    std::vector<double> sorted(ibis_ms.begin(), ibis_ms.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted[sorted.size() - 2] - sorted[1];
}

double derive_enmo(double accel_mg) {
    if (accel_mg < 0) throw DataError("negative acceleration");
    return accel_mg / 0.0060321 + 0.057;
}

namespace {

/// Clamp HR into the physiological band, then smooth isolated single-minute
/// spikes that jump more than 40 bpm away from both neighbours.
std::vector<double> filter_hr(const std::vector<MinuteSample>& samples) {
    std::vector<double> hr(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        hr[i] = std::clamp(samples[i].hr_bpm, kHrClampLo, kHrClampHi);
    }
    for (std::size_t i = 1; i + 1 < hr.size(); ++i) {
        const double dl = hr[i] - hr[i - 1];
        const double dr = hr[i] - hr[i + 1];
        if (std::abs(dl) > kSpikeDelta && std::abs(dr) > kSpikeDelta && dl * dr > 0) {
            hr[i] = 0.5 * (hr[i - 1] + hr[i + 1]);
        }
    }
    return hr;
}

}  // namespace

CleanWeek clean_week(const SensorWeek& week, const CalibrationConfig& calib) {
    week.validate();
    CleanWeek cw;
    cw.participant_id = week.participant_id;
    cw.start_month = week.start_month;
    cw.samples = week.samples;
    cw.wear = detect_nonwear(week);
    cw.hr_filtered = filter_hr(week.samples);
    const std::size_t n = week.samples.size();
    cw.met.resize(n);
    cw.enmo.resize(n);
    cw.intensity.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double accel = week.samples[i].accel_mg;
        cw.met[i] = accel_to_met(accel, calib);
        cw.enmo[i] = derive_enmo(accel);
        cw.intensity[i] = calib.profile == ClassifyProfile::met_thresholds
                              ? classify_intensity(cw.met[i])
                              : classify_accel_profile(accel, calib);
    }
    return cw;
}

std::size_t CleanWeek::wear_minutes() const {
    std::size_t n = 0;
    for (auto w : wear) n += w;
    return n;
}

bool eligible(const CleanWeek& week) { return week.wear_minutes() >= 72 * 60; }

DailyIntensity daily_intensity_minutes(const CleanWeek& week) {
    const std::size_t n = week.samples.size();
    const std::size_t days = (n + SensorWeek::kMinutesPerDay - 1) / SensorWeek::kMinutesPerDay;
    DailyIntensity d;
    d.sedentary.assign(days, 0.0);
    d.mvpa.assign(days, 0.0);
    d.vpa.assign(days, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!week.wear[i]) continue;
        const std::size_t day = i / SensorWeek::kMinutesPerDay;
        switch (week.intensity[i]) {
            case IntensityClass::sedentary:
                d.sedentary[day] += 1;
                break;
            case IntensityClass::light:
                break;
            case IntensityClass::moderate_vigorous:
                d.mvpa[day] += 1;
                break;
            case IntensityClass::vigorous:
                // vigorous minutes count toward the MVPA total as well
                d.mvpa[day] += 1;
                d.vpa[day] += 1;
                break;
        }
    }
    auto avg = [&](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    d.sedentary_daily_avg = avg(d.sedentary);
    d.mvpa_daily_avg = avg(d.mvpa);
    d.vpa_daily_avg = avg(d.vpa);
    return d;
}

void write_clean_csv(const std::filesystem::path& path, const CleanWeek& week) {
    CsvWriter w(path);
    w.field("minute_index").field("hr_bpm").field("accel_mg").field("hrv_ms");
    w.field("wear").field("met").field("enmo").field("intensity_class").end_row();
    for (std::size_t i = 0; i < week.samples.size(); ++i) {
        const auto& s = week.samples[i];
        w.field(i).field(s.hr_bpm).field(s.accel_mg).field(s.hrv_ms);
        w.field(static_cast<long long>(week.wear[i])).field(week.met[i]).field(week.enmo[i]);
        w.field(to_string(week.intensity[i]));
        w.end_row();
    }
}

CleanWeek read_clean_csv(const std::filesystem::path& path, const std::string& participant_id,
                         int start_month) {
    const CsvTable t = read_csv(path);
    const std::size_t c_hr = t.column("hr_bpm"), c_acc = t.column("accel_mg"),
                      c_hrv = t.column("hrv_ms"), c_wear = t.column("wear"),
                      c_met = t.column("met"), c_enmo = t.column("enmo"),
                      c_cls = t.column("intensity_class");
    CleanWeek cw;
    cw.participant_id = participant_id;
    cw.start_month = start_month;
    for (const auto& r : t.rows) {
        MinuteSample s;
        s.hr_bpm = parse_double(r[c_hr]);
        s.accel_mg = parse_double(r[c_acc]);
        s.hrv_ms = parse_double(r[c_hrv]);
        cw.samples.push_back(s);
        cw.wear.push_back(static_cast<std::uint8_t>(parse_int(r[c_wear])));
        cw.met.push_back(parse_double(r[c_met]));
        cw.enmo.push_back(parse_double(r[c_enmo]));
        cw.intensity.push_back(intensity_from_string(r[c_cls]));
    }
    // hr_filtered is a derived channel; recompute so loaded weeks behave
    // identically to freshly cleaned ones.
    cw.hr_filtered = filter_hr(cw.samples);
    return cw;
}

CalibrationConfig calibration_from_config(const Config& cfg) {
    CalibrationConfig c;
    c.intensity_per_mg = cfg.get_double("calibration.intensity_per_mg", c.intensity_per_mg);
    const std::string profile = cfg.get_string("calibration.profile", "met_thresholds");
    if (profile == "met_thresholds") {
        c.profile = ClassifyProfile::met_thresholds;
    } else if (profile == "accel_thresholds") {
        c.profile = ClassifyProfile::accel_thresholds;
    } else {
        throw ConfigError("unknown calibration.profile: " + profile);
    }
    c.accel_sedentary_below = cfg.get_double("calibration.accel_sedentary_below", c.accel_sedentary_below);
    c.accel_vigorous_from = cfg.get_double("calibration.accel_vigorous_from", c.accel_vigorous_from);
    return c;
}

}  // namespace fitcrf::sensorproc
