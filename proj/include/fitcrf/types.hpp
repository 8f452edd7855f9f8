#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fitcrf {

enum class Sex : int { female = 0, male = 1 };

enum class CohortTag : int { FI = 0, FII = 1 };

std::string to_string(Sex s);
std::string to_string(CohortTag c);
Sex sex_from_string(const std::string& s);
CohortTag cohort_from_string(const std::string& s);

struct Participant {
    std::string id;
    CohortTag cohort = CohortTag::FI;
    Sex sex = Sex::female;
    double age_years = 0;
    double height_m = 0;
    double weight_kg = 0;
    double bmi = 0;  // weight / height^2
    double rhr_bpm = 0;
    int month = 1;  // 1..12, month of the measurement week
    double vo2max_current = 0;
    std::optional<double> vo2max_future;  // present for longitudinal participants

    // Latent behavioural state used by the sensor-week simulator. Not part of
    // the cohort CSV schema; negative means unknown (e.g. loaded from CSV).
    double mvpa_min_per_day = -1;
    double vpa_min_per_day = -1;

    bool has_latent_activity() const { return mvpa_min_per_day >= 0 && vpa_min_per_day >= 0; }

    void validate() const;  // throws DataError on invariant violation
};

struct MinuteSample {
    double hr_bpm = 0;
    double accel_mg = 0;
    double hrv_ms = 0;
};

/// One participant-week of minute-resolution sensor data. Samples are stored
/// in time order at a fixed 60-second spacing; the minute index is implicit.
struct SensorWeek {
    std::string participant_id;
    int start_month = 1;
    std::vector<MinuteSample> samples;

    static constexpr int kMinutesPerDay = 1440;
    static constexpr int kDays = 6;
    static constexpr int kMinutes = kMinutesPerDay * kDays;  // 8640

    void validate() const;
};

}  // namespace fitcrf
