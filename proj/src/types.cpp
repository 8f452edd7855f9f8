#include "fitcrf/types.hpp"

#include <cmath>

#include "fitcrf/error.hpp"

namespace fitcrf {

std::string to_string(Sex s) { return s == Sex::male ? "male" : "female"; }

std::string to_string(CohortTag c) { return c == CohortTag::FI ? "FI" : "FII"; }

Sex sex_from_string(const std::string& s) {
    if (s == "male") return Sex::male;
    if (s == "female") return Sex::female;
    throw DataError("unknown sex: '" + s + "'");
}

CohortTag cohort_from_string(const std::string& s) {
    if (s == "FI") return CohortTag::FI;
    if (s == "FII") return CohortTag::FII;
    throw DataError("unknown cohort tag: '" + s + "'");
}

void Participant::validate() const {
    if (id.empty()) throw DataError("participant id is empty");
    if (month < 1 || month > 12) throw DataError(id + ": month out of range");
    if (!(height_m > 0) || !(weight_kg > 0)) throw DataError(id + ": non-positive anthropometrics");
    const double expected_bmi = weight_kg / (height_m * height_m);
    if (std::abs(bmi - expected_bmi) > 1e-6 * std::max(1.0, std::abs(expected_bmi))) {
        throw DataError(id + ": bmi inconsistent with weight/height^2");
    }
    if (!(vo2max_current > 0)) throw DataError(id + ": vo2max_current must be positive");
    if (vo2max_future && !(*vo2max_future > 0)) {
        throw DataError(id + ": vo2max_future must be positive");
    }
    if (!(rhr_bpm > 0)) throw DataError(id + ": rhr must be positive");
}

void SensorWeek::validate() const {
    if (participant_id.empty()) throw DataError("sensor week without participant id");
    if (start_month < 1 || start_month > 12) throw DataError(participant_id + ": bad start month");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.hr_bpm) || !std::isfinite(s.accel_mg) || !std::isfinite(s.hrv_ms) ||
            s.hr_bpm < 0 || s.accel_mg < 0 || s.hrv_ms < 0) {
            throw DataError(participant_id + ": bad sample at minute " + std::to_string(i));
        }
    }
}

}  // namespace fitcrf
