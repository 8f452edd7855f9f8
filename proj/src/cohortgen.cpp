#include "fitcrf/cohortgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fitcrf/csv.hpp"
#include "fitcrf/error.hpp"
#include "fitcrf/parallel.hpp"
#include "fitcrf/rng.hpp"
#include "fitcrf/sensorproc.hpp"

namespace fitcrf::cohortgen {

PopulationSpec PopulationSpec::defaults() {
    PopulationSpec s;
    s.male.count = 5229;
    s.male.age_years = {47.70, 7.57};
    s.male.height_m = {1.78, 0.07};
    s.male.weight_kg = {85.85, 13.83};
    s.male.bmi = {27.16, 3.97};
    s.male.mvpa_min_per_day = {35.87, 22.35};
    s.male.vpa_min_per_day = {3.27, 8.57};
    s.male.rhr_bpm = {61.48, 8.68};
    s.male.vo2max = {41.95, 4.61};

    s.female.count = 5830;
    s.female.age_years = {47.66, 7.36};
    s.female.height_m = {1.64, 0.06};
    s.female.weight_kg = {70.54, 13.92};
    s.female.bmi = {26.17, 4.97};
    s.female.mvpa_min_per_day = {34.40, 22.59};
    s.female.vpa_min_per_day = {3.31, 15.67};
    s.female.rhr_bpm = {64.46, 8.28};
    s.female.vo2max = {37.44, 4.73};
    return s;
}

namespace {

void validate_sex_spec(const SexSpec& s, const char* label) {
    if (s.count == 0) throw ConfigError(std::string(label) + ": cohort size must be positive");
    const FieldStats* fields[] = {&s.age_years, &s.height_m,        &s.weight_kg,
                                  &s.bmi,       &s.mvpa_min_per_day, &s.vpa_min_per_day,
                                  &s.rhr_bpm,   &s.vo2max};
    for (const FieldStats* f : fields) {
        if (!(f->sd > 0)) throw ConfigError(std::string(label) + ": field std must be positive");
        if (!std::isfinite(f->mean)) throw ConfigError(std::string(label) + ": non-finite mean");
    }
}

}  // namespace

void PopulationSpec::validate() const {
    validate_sex_spec(male, "male");
    validate_sex_spec(female, "female");
}

double TruthCoefficients::expected_vo2max(Sex sex, double age, double bmi, double rhr,
                                          double activity_min) const {
    const bool m = sex == Sex::male;
    const double c_age = m ? center_age_male : center_age_female;
    const double c_bmi = m ? center_bmi_male : center_bmi_female;
    const double c_rhr = m ? center_rhr_male : center_rhr_female;
    const double c_act = m ? center_activity_male : center_activity_female;
    return (m ? intercept_male : intercept_female) + per_year * (age - c_age) +
           per_bmi * (bmi - c_bmi) + per_bpm * (rhr - c_rhr) +
           per_activity_min * (activity_min - c_act) +
           activity_rhr_cross * (activity_min - c_act) * (rhr - c_rhr);
}

namespace {

constexpr double kActivityCap = 600.0;  // min/day

/// Gamma draw matched to (mean, sd); exact in expectation and nonnegative.
double draw_activity_gamma(Rng& rng, const FieldStats& f) {
    if (f.mean <= 0) return 0.0;
    const double shape = (f.mean / f.sd) * (f.mean / f.sd);
    const double scale = f.sd * f.sd / f.mean;
    return std::min(rng.gamma(shape, scale), kActivityCap);
}

/// Zero-inflated exponential matched to (mean, sd). Needed because VPA has a
/// point mass at zero and sd far above the mean.
double draw_activity_zero_inflated(Rng& rng, const FieldStats& f) {
    if (f.mean <= 0) return 0.0;
    const double ratio2 = (f.sd / f.mean) * (f.sd / f.mean);
    const double q = std::min(1.0, 2.0 / (ratio2 + 1.0));
    const double active = rng.uniform() < q ? 1.0 : 0.0;
    if (active == 0.0) return 0.0;
    return std::min(rng.exponential(f.mean / q), kActivityCap);
}

Participant draw_participant(std::uint64_t participant_seed, std::size_t index, Sex sex,
                             const SexSpec& s, const TruthCoefficients& truth) {
    Rng rng(participant_seed);
    Participant p;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "P%06zu", index);
    p.id = idbuf;
    p.cohort = CohortTag::FI;
    p.sex = sex;
    p.month = rng.uniform_int(1, 12);
    p.age_years = normal_in(rng, s.age_years.mean, s.age_years.sd, 18.0, 80.0);
    p.height_m = normal_in(rng, s.height_m.mean, s.height_m.sd, 1.30, 2.20);
    p.bmi = normal_in(rng, s.bmi.mean, s.bmi.sd, 15.0, 60.0);
    p.weight_kg = p.bmi * p.height_m * p.height_m;
    p.rhr_bpm = normal_in(rng, s.rhr_bpm.mean, s.rhr_bpm.sd, 35.0, 110.0);
    p.mvpa_min_per_day = draw_activity_gamma(rng, s.mvpa_min_per_day);
    p.vpa_min_per_day = draw_activity_zero_inflated(rng, s.vpa_min_per_day);

    const double activity = p.mvpa_min_per_day + p.vpa_min_per_day;
    const double base = truth.expected_vo2max(sex, p.age_years, p.bmi, p.rhr_bpm, activity);
    double vo2 = base + rng.normal(0.0, truth.noise_sd);
    for (int i = 0; i < 1000 && (vo2 < truth.vo2max_lo || vo2 > truth.vo2max_hi); ++i) {
        vo2 = base + rng.normal(0.0, truth.noise_sd);
    }
    p.vo2max_current = std::clamp(vo2, truth.vo2max_lo, truth.vo2max_hi);
    return p;
}

}  // namespace

std::vector<Participant> generate_cohort(const PopulationSpec& spec,
                                         const TruthCoefficients& truth) {
    spec.validate();
    const std::size_t n = spec.male.count + spec.female.count;
    std::vector<Participant> cohort(n);
    parallel_for(n, [&](std::size_t i) {
        const bool is_male = i < spec.male.count;
        cohort[i] = draw_participant(mix_seed(spec.seed, i), i, is_male ? Sex::male : Sex::female,
                                     is_male ? spec.male : spec.female, truth);
    });
    return cohort;
}

std::vector<double> simulate_activity_trace(const Participant& p, std::uint64_t seed,
                                            const SimulatorConfig& sim) {
    if (!p.has_latent_activity()) {
        throw DataError(p.id + ": latent activity level required to simulate a sensor week");
    }
    Rng rng(seed);
    const int sleep_minutes = static_cast<int>(sim.sleep_hours * 60.0);
    const int wake_minutes = SensorWeek::kMinutesPerDay - sleep_minutes;
    const double target = std::clamp(p.mvpa_min_per_day + p.vpa_min_per_day, 0.0, kActivityCap);
    const double active_fraction = target / wake_minutes;
    const double p_exit = 1.0 / sim.mean_bout_minutes;
    const double p_enter =
        active_fraction > 0 ? active_fraction * p_exit / (1.0 - active_fraction) : 0.0;
    const double vigorous_share =
        target > 0 ? std::clamp(p.vpa_min_per_day / target, 0.0, 1.0) : 0.0;

    std::vector<double> accel(SensorWeek::kMinutes, 0.0);
    for (int day = 0; day < SensorWeek::kDays; ++day) {
        bool active = false;
        bool vigorous = false;
        for (int m = 0; m < SensorWeek::kMinutesPerDay; ++m) {
            const std::size_t idx = static_cast<std::size_t>(day) * SensorWeek::kMinutesPerDay + m;
            if (m < sleep_minutes) {
                accel[idx] = std::max(0.0, rng.normal(sim.sleep_accel_mean, sim.sleep_accel_sd));
                continue;
            }
            if (active) {
                if (rng.bernoulli(p_exit)) active = false;
            } else if (p_enter > 0 && rng.bernoulli(p_enter)) {
                active = true;
                vigorous = rng.bernoulli(vigorous_share);
            }
            if (!active) {
                accel[idx] = std::clamp(rng.normal(sim.rest_accel_mean, sim.rest_accel_sd), 0.0,
                                        sim.rest_accel_cap);
            } else if (vigorous) {
                accel[idx] = std::clamp(rng.normal(sim.vigorous_accel_mean, sim.vigorous_accel_sd),
                                        sim.vigorous_accel_lo, sim.vigorous_accel_hi);
            } else {
                accel[idx] = std::clamp(rng.normal(sim.moderate_accel_mean, sim.moderate_accel_sd),
                                        sim.moderate_accel_lo, sim.moderate_accel_hi);
            }
        }
    }
    return accel;
}

SensorWeek overlay_physiology(const Participant& p, const std::vector<double>& accel_trace,
                              std::uint64_t seed, const SimulatorConfig& sim) {
    if (accel_trace.size() != SensorWeek::kMinutes) {
        throw DataError("activity trace must cover " + std::to_string(SensorWeek::kMinutes) +
                        " minutes");
    }
    if (!(p.vo2max_current > 0)) throw DataError(p.id + ": vo2max required for HR simulation");
    Rng rng(seed);
    const int sleep_minutes = static_cast<int>(sim.sleep_hours * 60.0);
    const double hr_slope = sim.hr_gain_base * (sim.vo2max_ref / p.vo2max_current);
    const double ibi_fitness_scale = std::sqrt(p.vo2max_current / sim.vo2max_ref);

    SensorWeek week;
    week.participant_id = p.id;
    week.start_month = p.month;
    week.samples.resize(SensorWeek::kMinutes);
    std::vector<double> ibis(static_cast<std::size_t>(sim.ibi_per_minute));
    for (int i = 0; i < SensorWeek::kMinutes; ++i) {
        const bool sleeping = (i % SensorWeek::kMinutesPerDay) < sleep_minutes;
        const double accel = accel_trace[static_cast<std::size_t>(i)];
        const double base = p.rhr_bpm + (sleeping ? sim.hr_sleep_offset : sim.hr_wake_offset);
        const double hr =
            std::clamp(base + hr_slope * accel + rng.normal(0.0, sim.hr_noise_sd), 35.0, 210.0);
        const double mean_rr = 60000.0 / hr;
        const bool active = accel >= sim.moderate_accel_lo;
        const double ibi_sd = (active ? sim.ibi_active_sd_ms : sim.ibi_rest_sd_ms) * ibi_fitness_scale;
        for (auto& x : ibis) x = std::max(200.0, rng.normal(mean_rr, ibi_sd));
        const auto hrv = sensorproc::derive_hrv(ibis);
        auto& s = week.samples[static_cast<std::size_t>(i)];
        s.accel_mg = accel;
        s.hr_bpm = hr;
        s.hrv_ms = hrv ? *hrv : 0.0;
    }
    return week;
}

SensorWeek generate_sensor_week(const Participant& p, std::uint64_t seed,
                                const SimulatorConfig& sim) {
    const auto trace = simulate_activity_trace(p, mix_seed(seed, 1), sim);
    SensorWeek week = overlay_physiology(p, trace, mix_seed(seed, 2), sim);
    Rng rng(mix_seed(seed, 3));
    if (rng.bernoulli(sim.nonwear_probability)) {
        const int len = rng.uniform_int(sim.nonwear_min_minutes, sim.nonwear_max_minutes);
        const int start = static_cast<int>(rng.below(SensorWeek::kMinutes - len + 1));
        for (int i = start; i < start + len; ++i) {
            auto& s = week.samples[static_cast<std::size_t>(i)];
            s.accel_mg = 0.0;
            s.hr_bpm = sim.nonwear_hr;
            s.hrv_ms = 0.0;
        }
    }
    return week;
}

Participant generate_future_snapshot(const Participant& p, const DriftSpec& drift,
                                     std::uint64_t seed, const TruthCoefficients& truth) {
    if (!(p.vo2max_current > 0)) throw DataError(p.id + ": vo2max_current required");
    if (!p.has_latent_activity()) throw DataError(p.id + ": latent activity required for drift");
    Rng rng(seed);

    const double mvpa = p.mvpa_min_per_day;
    const double delta_mvpa = drift.mvpa_trend - drift.mvpa_pullback * (mvpa - drift.mvpa_center) +
                              rng.normal(0.0, drift.mvpa_drift_sd);
    const double mvpa_future = std::clamp(mvpa + delta_mvpa, 0.0, kActivityCap);
    const double realized_dmvpa = mvpa_future - mvpa;
    const double vpa_future =
        mvpa > 0 ? std::clamp(p.vpa_min_per_day * (mvpa_future / mvpa), 0.0, kActivityCap)
                 : p.vpa_min_per_day;
    const double delta_activity = (mvpa_future + vpa_future) - (mvpa + p.vpa_min_per_day);

    const double delta_rhr_draw =
        drift.rhr_per_mvpa * realized_dmvpa + rng.normal(0.0, drift.rhr_drift_sd);
    const double rhr_future = std::clamp(p.rhr_bpm + delta_rhr_draw, 35.0, 110.0);
    const double realized_drhr = rhr_future - p.rhr_bpm;

    const double delta_vo2 = truth.per_activity_min * delta_activity +
                             truth.per_bpm * realized_drhr + rng.normal(0.0, drift.vo2_noise_sd);

    Participant f = p;
    f.cohort = CohortTag::FII;
    f.age_years = p.age_years + drift.years_gap;
    f.month = rng.uniform_int(1, 12);
    f.rhr_bpm = rhr_future;
    f.mvpa_min_per_day = mvpa_future;
    f.vpa_min_per_day = vpa_future;
    f.vo2max_current = std::clamp(p.vo2max_current + delta_vo2, truth.vo2max_lo, truth.vo2max_hi);
    f.vo2max_future.reset();
    return f;
}

DriftSpec DriftSpec::none() {
    DriftSpec d;
    d.mvpa_pullback = 0.0;
    d.mvpa_drift_sd = 0.0;
    d.mvpa_trend = 0.0;
    d.rhr_per_mvpa = 0.0;
    d.rhr_drift_sd = 0.0;
    d.vo2_noise_sd = 0.0;
    return d;
}

void write_cohort_csv(const std::filesystem::path& path, const std::vector<Participant>& cohort) {
    CsvWriter w(path);
    w.field("id").field("cohort").field("sex").field("age").field("height_m").field("weight_kg");
    w.field("bmi").field("rhr_bpm").field("month").field("vo2max_current").field("vo2max_future");
    w.end_row();
    for (const auto& p : cohort) {
        w.field(p.id).field(to_string(p.cohort)).field(to_string(p.sex));
        w.field(p.age_years).field(p.height_m).field(p.weight_kg).field(p.bmi).field(p.rhr_bpm);
        w.field(p.month).field(p.vo2max_current);
        w.field(p.vo2max_future ? format_double(*p.vo2max_future) : std::string());
        w.end_row();
    }
}

std::vector<Participant> read_cohort_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c_id = t.column("id"), c_cohort = t.column("cohort"), c_sex = t.column("sex");
    const std::size_t c_age = t.column("age"), c_h = t.column("height_m"), c_w = t.column("weight_kg");
    const std::size_t c_bmi = t.column("bmi"), c_rhr = t.column("rhr_bpm"), c_month = t.column("month");
    const std::size_t c_cur = t.column("vo2max_current"), c_fut = t.column("vo2max_future");
    std::vector<Participant> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        Participant p;
        p.id = r[c_id];
        p.cohort = cohort_from_string(r[c_cohort]);
        p.sex = sex_from_string(r[c_sex]);
        p.age_years = parse_double(r[c_age]);
        p.height_m = parse_double(r[c_h]);
        p.weight_kg = parse_double(r[c_w]);
        p.bmi = parse_double(r[c_bmi]);
        p.rhr_bpm = parse_double(r[c_rhr]);
        p.month = static_cast<int>(parse_int(r[c_month]));
        p.vo2max_current = parse_double(r[c_cur]);
        if (!r[c_fut].empty()) p.vo2max_future = parse_double(r[c_fut]);
        p.validate();
        out.push_back(std::move(p));
    }
    return out;
}

void write_sensor_csv(const std::filesystem::path& path, const SensorWeek& week) {
    CsvWriter w(path);
    w.field("minute_index").field("hr_bpm").field("accel_mg").field("hrv_ms").end_row();
    for (std::size_t i = 0; i < week.samples.size(); ++i) {
        const auto& s = week.samples[i];
        w.field(i).field(s.hr_bpm).field(s.accel_mg).field(s.hrv_ms).end_row();
    }
}

SensorWeek read_sensor_csv(const std::filesystem::path& path, const std::string& participant_id,
                           int start_month) {
    const CsvTable t = read_csv(path);
    const std::size_t c_idx = t.column("minute_index"), c_hr = t.column("hr_bpm");
    const std::size_t c_acc = t.column("accel_mg"), c_hrv = t.column("hrv_ms");
    SensorWeek week;
    week.participant_id = participant_id;
    week.start_month = start_month;
    week.samples.reserve(t.rows.size());
    long long expect = 0;
    for (const auto& r : t.rows) {
        if (parse_int(r[c_idx]) != expect++) {
            throw DataError(path.string() + ": minute_index must increase by 1 per row");
        }
        MinuteSample s;
        s.hr_bpm = parse_double(r[c_hr]);
        s.accel_mg = parse_double(r[c_acc]);
        s.hrv_ms = parse_double(r[c_hrv]);
        week.samples.push_back(s);
    }
    week.validate();
    return week;
}

namespace {

FieldStats stats_from_config(const Config& cfg, const std::string& prefix, FieldStats fallback) {
    return {cfg.get_double(prefix + ".mean", fallback.mean),
            cfg.get_double(prefix + ".sd", fallback.sd)};
}

SexSpec sex_from_config(const Config& cfg, const std::string& prefix, SexSpec s) {
    s.count = static_cast<std::size_t>(cfg.get_int(prefix + ".count", static_cast<long long>(s.count)));
    s.age_years = stats_from_config(cfg, prefix + ".age", s.age_years);
    s.height_m = stats_from_config(cfg, prefix + ".height", s.height_m);
    s.weight_kg = stats_from_config(cfg, prefix + ".weight", s.weight_kg);
    s.bmi = stats_from_config(cfg, prefix + ".bmi", s.bmi);
    s.mvpa_min_per_day = stats_from_config(cfg, prefix + ".mvpa", s.mvpa_min_per_day);
    s.vpa_min_per_day = stats_from_config(cfg, prefix + ".vpa", s.vpa_min_per_day);
    s.rhr_bpm = stats_from_config(cfg, prefix + ".rhr", s.rhr_bpm);
    s.vo2max = stats_from_config(cfg, prefix + ".vo2max", s.vo2max);
    return s;
}

}  // namespace

PopulationSpec population_from_config(const Config& cfg) {
    PopulationSpec s = PopulationSpec::defaults();
    s.male = sex_from_config(cfg, "population.male", s.male);
    s.female = sex_from_config(cfg, "population.female", s.female);
    return s;
}

TruthCoefficients truth_from_config(const Config& cfg) {
    TruthCoefficients t;
    t.intercept_male = cfg.get_double("truth.intercept_male", t.intercept_male);
    t.intercept_female = cfg.get_double("truth.intercept_female", t.intercept_female);
    t.per_year = cfg.get_double("truth.per_year", t.per_year);
    t.per_bmi = cfg.get_double("truth.per_bmi", t.per_bmi);
    t.per_bpm = cfg.get_double("truth.per_bpm", t.per_bpm);
    t.per_activity_min = cfg.get_double("truth.per_activity_min", t.per_activity_min);
    t.activity_rhr_cross = cfg.get_double("truth.activity_rhr_cross", t.activity_rhr_cross);
    t.noise_sd = cfg.get_double("truth.noise_sd", t.noise_sd);
    t.vo2max_lo = cfg.get_double("truth.vo2max_lo", t.vo2max_lo);
    t.vo2max_hi = cfg.get_double("truth.vo2max_hi", t.vo2max_hi);
    t.center_age_male = cfg.get_double("truth.center_age_male", t.center_age_male);
    t.center_age_female = cfg.get_double("truth.center_age_female", t.center_age_female);
    t.center_bmi_male = cfg.get_double("truth.center_bmi_male", t.center_bmi_male);
    t.center_bmi_female = cfg.get_double("truth.center_bmi_female", t.center_bmi_female);
    t.center_rhr_male = cfg.get_double("truth.center_rhr_male", t.center_rhr_male);
    t.center_rhr_female = cfg.get_double("truth.center_rhr_female", t.center_rhr_female);
    t.center_activity_male = cfg.get_double("truth.center_activity_male", t.center_activity_male);
    t.center_activity_female =
        cfg.get_double("truth.center_activity_female", t.center_activity_female);
    return t;
}

SimulatorConfig simulator_from_config(const Config& cfg) {
    SimulatorConfig s;
    s.sleep_hours = cfg.get_double("sim.sleep_hours", s.sleep_hours);
    s.mean_bout_minutes = cfg.get_double("sim.mean_bout_minutes", s.mean_bout_minutes);
    s.hr_gain_base = cfg.get_double("sim.hr_gain_base", s.hr_gain_base);
    s.vo2max_ref = cfg.get_double("sim.vo2max_ref", s.vo2max_ref);
    s.hr_noise_sd = cfg.get_double("sim.hr_noise_sd", s.hr_noise_sd);
    s.nonwear_probability = cfg.get_double("sim.nonwear_probability", s.nonwear_probability);
    s.nonwear_min_minutes =
        static_cast<int>(cfg.get_int("sim.nonwear_min_minutes", s.nonwear_min_minutes));
    s.nonwear_max_minutes =
        static_cast<int>(cfg.get_int("sim.nonwear_max_minutes", s.nonwear_max_minutes));
    return s;
}

DriftSpec drift_from_config(const Config& cfg) {
    DriftSpec d;
    d.years_gap = cfg.get_double("drift.years_gap", d.years_gap);
    d.mvpa_pullback = cfg.get_double("drift.mvpa_pullback", d.mvpa_pullback);
    d.mvpa_center = cfg.get_double("drift.mvpa_center", d.mvpa_center);
    d.mvpa_drift_sd = cfg.get_double("drift.mvpa_drift_sd", d.mvpa_drift_sd);
    d.mvpa_trend = cfg.get_double("drift.mvpa_trend", d.mvpa_trend);
    d.rhr_per_mvpa = cfg.get_double("drift.rhr_per_mvpa", d.rhr_per_mvpa);
    d.rhr_drift_sd = cfg.get_double("drift.rhr_drift_sd", d.rhr_drift_sd);
    d.vo2_noise_sd = cfg.get_double("drift.vo2_noise_sd", d.vo2_noise_sd);
    return d;
}

}  // namespace fitcrf::cohortgen
