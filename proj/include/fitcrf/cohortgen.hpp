#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fitcrf/config.hpp"
#include "fitcrf/types.hpp"

namespace fitcrf::cohortgen {

struct FieldStats {
    double mean = 0;
    double sd = 0;
};

/// Per-sex population marginals. Defaults reproduce the Fenland I baseline
/// sample characteristics row for row.
struct SexSpec {
    std::size_t count = 0;
    FieldStats age_years;
    FieldStats height_m;
    FieldStats weight_kg;  // informational; weight is derived as bmi * height^2
    FieldStats bmi;
    FieldStats mvpa_min_per_day;
    FieldStats vpa_min_per_day;
    FieldStats rhr_bpm;
    FieldStats vo2max;
};

struct PopulationSpec {
    SexSpec male;
    SexSpec female;
    std::uint64_t seed = 0;

    static PopulationSpec defaults();  // Fenland I table, full-scale counts
    void validate() const;             // throws ConfigError
};

/// Coefficients of the documented ground-truth VO2max link. This function is
/// the pipeline's oracle: every fitted model is ultimately judged against
/// labels produced by it. Linear in age/BMI/RHR/activity (each centered at
/// the per-sex population means) plus an activity x RHR interaction and
/// Gaussian noise, truncated to a plausible range by resampling the noise.
struct TruthCoefficients {
    double intercept_male = 41.95;
    double intercept_female = 37.44;
    double per_year = -0.10;
    double per_bmi = -0.25;
    double per_bpm = -0.22;
    double per_activity_min = 0.10;  // activity = mvpa + vpa, min/day
    double activity_rhr_cross = -0.004;
    double noise_sd = 2.9;
    double vo2max_lo = 15.0;
    double vo2max_hi = 70.0;

    // Centering constants; defaults equal PopulationSpec::defaults() means.
    double center_age_male = 47.70, center_age_female = 47.66;
    double center_bmi_male = 27.16, center_bmi_female = 26.17;
    double center_rhr_male = 61.48, center_rhr_female = 64.46;
    double center_activity_male = 39.14, center_activity_female = 37.71;

    /// Noise-free part of the link, exposed for tests and documentation.
    double expected_vo2max(Sex sex, double age, double bmi, double rhr, double activity_min) const;
};

/// Sensor-week simulator constants (all in the units of the output CSV).
struct SimulatorConfig {
    double sleep_hours = 7.0;
    double mean_bout_minutes = 20.0;
    double rest_accel_mean = 30.0, rest_accel_sd = 25.0, rest_accel_cap = 200.0;
    double moderate_accel_mean = 290.0, moderate_accel_sd = 50.0;
    double moderate_accel_lo = 215.0, moderate_accel_hi = 420.0;
    double vigorous_accel_mean = 520.0, vigorous_accel_sd = 60.0;
    double vigorous_accel_lo = 430.0, vigorous_accel_hi = 700.0;
    double sleep_accel_mean = 3.0, sleep_accel_sd = 2.0;
    double hr_noise_sd = 2.5;
    double hr_wake_offset = 5.0;   // awake resting HR sits above the combined RHR
    double hr_sleep_offset = -2.0;
    // HR response to movement: slope = hr_gain_base * (vo2max_ref / vo2max).
    // Fitter participants show a flatter HR response at the same intensity.
    double hr_gain_base = 0.11;  // bpm per milli-g
    double vo2max_ref = 40.0;
    // Inter-beat-interval dispersion per minute; scaled with fitness.
    double ibi_rest_sd_ms = 25.0, ibi_active_sd_ms = 8.0;
    int ibi_per_minute = 6;
    double nonwear_probability = 0.10;
    int nonwear_min_minutes = 95, nonwear_max_minutes = 240;
    double nonwear_hr = 22.0;  // non-physiological (< 30 bpm) and flat
};

/// Follow-up drift. Activity drifts with a regression-to-the-mean pullback
/// (so baseline behaviour carries signal about future change), RHR follows
/// activity, and the fitness delta is driven by those drifts alone.
struct DriftSpec {
    double years_gap = 7.0;
    double mvpa_pullback = 0.45;    // per unit deviation from mvpa_center
    double mvpa_center = 35.0;      // min/day
    double mvpa_drift_sd = 9.0;
    double mvpa_trend = 0.0;        // symmetric delta distribution by default
    double rhr_per_mvpa = -0.12;    // bpm per min/day of realized activity change
    double rhr_drift_sd = 1.5;
    double vo2_noise_sd = 1.0;

    static DriftSpec none();  // all drivers zero: identity drift (age still advances)
};

std::vector<Participant> generate_cohort(const PopulationSpec& spec,
                                         const TruthCoefficients& truth = {});

/// Movement trace (accel, milli-g per minute) driven by the participant's
/// latent activity level. Split out so tests can overlay two physiologies on
/// one identical trace.
std::vector<double> simulate_activity_trace(const Participant& p, std::uint64_t seed,
                                            const SimulatorConfig& sim = {});

/// HR / HRV overlay on a given movement trace; pure in (participant, trace, seed).
SensorWeek overlay_physiology(const Participant& p, const std::vector<double>& accel_trace,
                              std::uint64_t seed, const SimulatorConfig& sim = {});

SensorWeek generate_sensor_week(const Participant& p, std::uint64_t seed,
                                const SimulatorConfig& sim = {});

Participant generate_future_snapshot(const Participant& p, const DriftSpec& drift,
                                     std::uint64_t seed, const TruthCoefficients& truth = {});

// Cohort CSV: id,cohort,sex,age,height_m,weight_kg,bmi,rhr_bpm,month,vo2max_current,vo2max_future
void write_cohort_csv(const std::filesystem::path& path, const std::vector<Participant>& cohort);
std::vector<Participant> read_cohort_csv(const std::filesystem::path& path);

// Sensor CSV: minute_index,hr_bpm,accel_mg,hrv_ms
void write_sensor_csv(const std::filesystem::path& path, const SensorWeek& week);
SensorWeek read_sensor_csv(const std::filesystem::path& path, const std::string& participant_id,
                           int start_month);

// Config-file bindings (population.*, truth.*, sim.*, drift.* keys).
PopulationSpec population_from_config(const Config& cfg);
TruthCoefficients truth_from_config(const Config& cfg);
SimulatorConfig simulator_from_config(const Config& cfg);
DriftSpec drift_from_config(const Config& cfg);

}  // namespace fitcrf::cohortgen
