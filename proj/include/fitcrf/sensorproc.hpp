#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "fitcrf/config.hpp"
#include "fitcrf/types.hpp"

namespace fitcrf::sensorproc {

enum class IntensityClass : int { sedentary = 0, light = 1, moderate_vigorous = 2, vigorous = 3 };

std::string to_string(IntensityClass c);
IntensityClass intensity_from_string(const std::string& s);

/// Classification profile. The MET-threshold profile is normative; the
/// accelerometer-threshold profile is kept as an alternate configuration.
enum class ClassifyProfile : int { met_thresholds = 0, accel_thresholds = 1 };

struct CalibrationConfig {
    /// Linear accel -> movement intensity calibration, J/min/kg per milli-g.
    /// Chosen so that a brisk-walk accel level lands in the 3-6 MET band.
    double intensity_per_mg = 1.0;
    ClassifyProfile profile = ClassifyProfile::met_thresholds;
    // Alternate profile thresholds, applied to raw accel values.
    double accel_sedentary_below = 1.0;
    double accel_vigorous_from = 4.15;
};

struct CleanWeek {
    std::string participant_id;
    int start_month = 1;
    std::vector<MinuteSample> samples;        // original channels
    std::vector<std::uint8_t> wear;           // 1 = worn
    std::vector<double> hr_filtered;          // clamped / despiked HR
    std::vector<double> met;
    std::vector<double> enmo;
    std::vector<IntensityClass> intensity;

    std::size_t wear_minutes() const;
};

/// Wear mask: marks as non-wear every maximal run of more than 90 consecutive
/// zero-accel minutes whose HR is non-physiological over the whole run
/// (every minute below 30 bpm, or a flat constant value).
std::vector<std::uint8_t> detect_nonwear(const SensorWeek& week);

/// Full per-week derivation: non-wear mask, HR noise filter, MET / ENMO /
/// intensity channels.
CleanWeek clean_week(const SensorWeek& week, const CalibrationConfig& calib = {});

/// Analysis eligibility: at least 72 hours of wear time.
bool eligible(const CleanWeek& week);

double accel_to_intensity(double accel_mg, const CalibrationConfig& calib = {});
double intensity_to_met(double j_per_min_kg);  // 1 MET = 71 J/min/kg
double accel_to_met(double accel_mg, const CalibrationConfig& calib = {});

IntensityClass classify_intensity(double met);
IntensityClass classify_accel_profile(double accel_mg, const CalibrationConfig& calib);

/// Per-minute HRV: second-longest minus second-shortest inter-beat interval.
/// Fewer than 4 intervals yields a missing value.
std::optional<double> derive_hrv(std::span<const double> ibis_ms);

double derive_enmo(double accel_mg);

struct DailyIntensity {
    std::vector<double> sedentary;  // wear-minute counts per calendar day
    std::vector<double> mvpa;       // moderate_vigorous + vigorous minutes
    std::vector<double> vpa;
    double sedentary_daily_avg = 0;
    double mvpa_daily_avg = 0;
    double vpa_daily_avg = 0;
};

DailyIntensity daily_intensity_minutes(const CleanWeek& week);

// Clean-week CSV: sensor columns plus wear,met,enmo,intensity_class.
void write_clean_csv(const std::filesystem::path& path, const CleanWeek& week);
CleanWeek read_clean_csv(const std::filesystem::path& path, const std::string& participant_id,
                         int start_month);

CalibrationConfig calibration_from_config(const Config& cfg);

}  // namespace fitcrf::sensorproc
