#include "rainpipe/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "rainpipe/dataset.hpp"
#include "rainpipe/errors.hpp"
#include "rainpipe/rng.hpp"

namespace rainpipe::synth {

namespace {

constexpr std::array<const char*, 30> kStations = {
    "Northbrook",  "Eastmere",    "Silvercreek", "Dunhaven",   "Port Avery",
    "Wattleford",  "Kestrel Bay", "Marrowdale",  "Cloudcroft", "Tarrin",
    "Galeton",     "Brightwater", "Stonegate",   "Ferndale",   "Windarra",
    "Coopers Rise","Lakemoor",    "Halloran",    "Redgum Flat","Seabright",
    "Ironbark",    "Quarry Hill", "Milltown",    "Osprey Point","Greenvale",
    "Drybrook",    "Thornbury",   "Violet Town", "Westhaven",  "Yarrun"};

constexpr std::array<const char*, 16> kCompass = {"N",  "NNE", "NE", "ENE", "E",  "ESE",
                                                  "SE", "SSE", "S",  "SSW", "SW", "WSW",
                                                  "W",  "WNW", "NW", "NNW"};

// days-from-civil inverse (proleptic Gregorian), era arithmetic
Date civil_from_days(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

long days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

double round1(double v) { return std::round(v * 10.0) / 10.0; }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct DayState {
    std::size_t location = 0;
    long serial = 0; // day serial within the location block
    double wet = 0.0;
    double min_temp = 0.0, max_temp = 0.0, temp9 = 0.0, temp3 = 0.0;
    double evaporation = 0.0, sunshine = 0.0;
    double gust_speed = 0.0, wind9 = 0.0, wind3 = 0.0;
    double hum9 = 0.0, hum3 = 0.0;
    double press9 = 0.0, press3 = 0.0;
    double cloud9 = 0.0, cloud3 = 0.0;
    int gust_dir = 0, dir9 = 0, dir3 = 0;
};

} // namespace

void write_weather_csv(const std::filesystem::path& path, const WeatherSynthConfig& config) {
    const std::size_t n = config.n_rows;
    if (config.n_yes > n) throw ConfigError("synthetic weather: n_yes exceeds n_rows");
    const std::size_t n_loc = kStations.size();

    // contiguous day ranges per station, remainder spread over the front
    std::vector<std::size_t> block(n_loc, n / n_loc);
    for (std::size_t l = 0; l < n % n_loc; ++l) ++block[l];

    const long start_serial = days_from_civil(2008, 1, 1);

    // per-station climate personality
    Rng station_rng(mix_seed(config.seed, 1));
    std::vector<double> base_wet(n_loc), base_temp(n_loc);
    for (std::size_t l = 0; l < n_loc; ++l) {
        base_wet[l] = 0.32 + 0.28 * station_rng.uniform01();
        base_temp[l] = 10.0 + 14.0 * station_rng.uniform01();
    }

    // pass 1: latent weather for every row's day
    std::vector<DayState> days(n);
    Rng wx(mix_seed(config.seed, 2));
    std::size_t row = 0;
    for (std::size_t l = 0; l < n_loc; ++l) {
        double wet = base_wet[l];
        for (std::size_t t = 0; t < block[l]; ++t, ++row) {
            DayState& s = days[row];
            s.location = l;
            s.serial = start_serial + static_cast<long>(t);
            const Date date = civil_from_days(s.serial);
            // southern-hemisphere seasonality: cold, wetter mid-year
            const double season = std::cos(2.0 * M_PI * (date.month - 1) / 12.0);
            wet = clamp01(0.55 * wet + 0.45 * wx.uniform01() + 0.06 * season - 0.03 +
                          0.1 * (base_wet[l] - 0.46));
            s.wet = wet;

            const double warmth = base_temp[l] + 7.5 * season * -1.0 + 6.0 * (wx.uniform01() - 0.5);
            s.min_temp = round1(warmth - 4.0 - 3.0 * wx.uniform01());
            s.max_temp = round1(warmth + 6.0 + 5.0 * (1.0 - wet) + 3.0 * wx.uniform01());
            s.temp9 = round1(s.min_temp + (s.max_temp - s.min_temp) * (0.45 + 0.2 * wx.uniform01()));
            s.temp3 = round1(s.max_temp - 1.0 - 2.0 * wx.uniform01());

            // humidity is kept at full precision: it is the strongest numeric
            // signal, and coarse rounding would create many duplicate rows with
            // conflicting labels, which caps how well any model can fit the data
            s.hum3 = std::clamp(100.0 * (0.22 + 0.60 * wet + 0.16 * wx.uniform01()), 1.0, 100.0);
            s.hum9 = std::clamp(s.hum3 + 8.0 + 14.0 * (wx.uniform01() - 0.5), 1.0, 100.0);
            s.cloud3 = std::clamp(std::round(9.2 * wet + 2.0 * (wx.uniform01() - 0.5)), 0.0, 9.0);
            s.cloud9 = std::clamp(s.cloud3 + std::round(2.0 * (wx.uniform01() - 0.5)), 0.0, 9.0);
            s.sunshine = round1(std::clamp(12.5 * (1.0 - 0.8 * wet) - 1.5 * wx.uniform01(),
                                           0.0, 13.5));
            s.evaporation = round1(std::clamp(1.0 + 0.45 * (s.max_temp - 10.0) * (1.1 - wet) +
                                                  2.0 * wx.uniform01(),
                                              0.0, 60.0));
            s.press3 = round1(1013.0 - 11.0 * (wet - 0.5) + 5.0 * (wx.uniform01() - 0.5));
            s.press9 = round1(s.press3 + 1.4 + 2.0 * (wx.uniform01() - 0.5));
            s.gust_speed = std::round(22.0 + 40.0 * wet * wx.uniform01() + 14.0 * wx.uniform01());
            s.wind9 = std::round(s.gust_speed * (0.25 + 0.25 * wx.uniform01()));
            s.wind3 = std::round(s.gust_speed * (0.35 + 0.25 * wx.uniform01()));
            s.gust_dir = static_cast<int>(wx.bounded(16));
            s.dir9 = static_cast<int>(wx.bounded(16));
            s.dir3 = static_cast<int>(wx.bounded(16));
        }
    }

    // pass 2: rain-tomorrow score per row, from the same day's observables
    // plus irreducible noise; the top n_yes rows get the label
    Rng label_rng(mix_seed(config.seed, 3));
    std::vector<double> score(n);
    for (std::size_t i = 0; i < n; ++i) {
        const DayState& s = days[i];
        score[i] = 0.42 * (s.hum3 / 100.0) + 0.16 * (s.cloud3 / 9.0) +
                   0.12 * (1.0 - s.sunshine / 13.5) + 0.10 * clamp01((1016.0 - s.press3) / 14.0) +
                   0.20 * label_rng.uniform01();
    }
    std::vector<std::size_t> by_score(n);
    std::iota(by_score.begin(), by_score.end(), 0);
    std::sort(by_score.begin(), by_score.end(), [&](std::size_t a, std::size_t b) {
        return score[a] > score[b] || (score[a] == score[b] && a < b);
    });
    std::vector<std::uint8_t> rain_tomorrow(n, 0);
    for (std::size_t r = 0; r < config.n_yes; ++r) rain_tomorrow[by_score[r]] = 1;
    const double cutoff = config.n_yes > 0 && config.n_yes < n
                              ? score[by_score[config.n_yes - 1]]
                              : 1.0;

    // tomorrow's rain amount: clear of the 1.0 mm boundary on both sides
    std::vector<double> risk(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rain_tomorrow[i]) {
            risk[i] = round1(1.2 + 60.0 * std::max(0.0, score[i] - cutoff));
        } else {
            const double drizzle = score[i] - 0.82 * cutoff;
            risk[i] = drizzle > 0.0 ? round1(std::min(0.8, 4.0 * drizzle)) : 0.0;
        }
    }

    // today's rainfall chains from yesterday's risk within a station block
    std::vector<double> rainfall(n);
    std::vector<std::uint8_t> rain_today(n);
    row = 0;
    for (std::size_t l = 0; l < n_loc; ++l) {
        for (std::size_t t = 0; t < block[l]; ++t, ++row) {
            rainfall[row] = t == 0 ? (days[row].wet > 0.75 ? 2.2 : 0.0) : risk[row - 1];
            rain_today[row] = rainfall[row] > 1.0 ? 1 : 0;
        }
    }

    // assemble the typed table
    const auto schema = weather_schema();
    std::vector<ColumnData> cols(schema.size());
    for (std::size_t j = 0; j < schema.size(); ++j) {
        cols[j].missing.assign(n, 0);
    }
    auto& date_col = cols[0];
    date_col.dates.resize(n);
    auto& loc_col = cols[1];
    loc_col.cat_ids.resize(n);
    for (const char* name : kStations) loc_col.intern(name);

    auto numeric_col = [&](const char* name) -> std::vector<double>& {
        for (std::size_t j = 0; j < schema.size(); ++j) {
            if (schema[j].name == name) {
                cols[j].numeric.resize(n);
                return cols[j].numeric;
            }
        }
        throw DataError(std::string("synthetic weather: unknown column ") + name);
    };
    auto compass_col = [&](const char* name) -> std::vector<std::int32_t>& {
        for (std::size_t j = 0; j < schema.size(); ++j) {
            if (schema[j].name == name) {
                cols[j].cat_ids.resize(n);
                for (const char* dir : kCompass) cols[j].intern(dir);
                return cols[j].cat_ids;
            }
        }
        throw DataError(std::string("synthetic weather: unknown column ") + name);
    };

    auto& min_temp = numeric_col("MinTemp");
    auto& max_temp = numeric_col("MaxTemp");
    auto& rainfall_col = numeric_col("Rainfall");
    auto& evap = numeric_col("Evaporation");
    auto& sun = numeric_col("Sunshine");
    auto& gust_dir = compass_col("WindGustDir");
    auto& gust_speed = numeric_col("WindGustSpeed");
    auto& dir9 = compass_col("WindDir9am");
    auto& dir3 = compass_col("WindDir3pm");
    auto& wind9 = numeric_col("WindSpeed9am");
    auto& wind3 = numeric_col("WindSpeed3pm");
    auto& hum9 = numeric_col("Humidity9am");
    auto& hum3 = numeric_col("Humidity3pm");
    auto& press9 = numeric_col("Pressure9am");
    auto& press3 = numeric_col("Pressure3pm");
    auto& cloud9 = numeric_col("Cloud9am");
    auto& cloud3 = numeric_col("Cloud3pm");
    auto& temp9 = numeric_col("Temp9am");
    auto& temp3 = numeric_col("Temp3pm");
    auto& rain_today_col = cols[21].cat_ids;
    cols[21].intern("No");
    cols[21].intern("Yes");
    rain_today_col.resize(n);
    auto& risk_col = numeric_col("RISK_MM");
    auto& label_col = numeric_col("RainTomorrow");

    for (std::size_t i = 0; i < n; ++i) {
        const DayState& s = days[i];
        date_col.dates[i] = civil_from_days(s.serial);
        loc_col.cat_ids[i] = static_cast<std::int32_t>(s.location);
        min_temp[i] = s.min_temp;
        max_temp[i] = s.max_temp;
        rainfall_col[i] = rainfall[i];
        evap[i] = s.evaporation;
        sun[i] = s.sunshine;
        gust_dir[i] = s.gust_dir;
        gust_speed[i] = s.gust_speed;
        dir9[i] = s.dir9;
        dir3[i] = s.dir3;
        wind9[i] = s.wind9;
        wind3[i] = s.wind3;
        hum9[i] = s.hum9;
        hum3[i] = s.hum3;
        press9[i] = s.press9;
        press3[i] = s.press3;
        cloud9[i] = s.cloud9;
        cloud3[i] = s.cloud3;
        temp9[i] = s.temp9;
        temp3[i] = s.temp3;
        rain_today_col[i] = rain_today[i];
        risk_col[i] = risk[i];
        label_col[i] = rain_tomorrow[i];
    }

    // per-column missing rates, matching the public file's profile; the
    // label, the date, the station and the target-encoding column stay
    // complete, and RainToday goes missing exactly where Rainfall does
    const std::vector<std::pair<const char*, double>> missing_rates = {
        {"MinTemp", 0.004},      {"MaxTemp", 0.002},      {"Rainfall", 0.010},
        {"Evaporation", 0.48},   {"Sunshine", 0.43},      {"WindGustDir", 0.066},
        {"WindGustSpeed", 0.065},{"WindDir9am", 0.070},   {"WindDir3pm", 0.027},
        {"WindSpeed9am", 0.012}, {"WindSpeed3pm", 0.019}, {"Humidity9am", 0.012},
        {"Humidity3pm", 0.026},  {"Pressure9am", 0.099},  {"Pressure3pm", 0.098},
        {"Cloud9am", 0.38},      {"Cloud3pm", 0.40},      {"Temp9am", 0.006},
        {"Temp3pm", 0.019},
    };
    for (const auto& [name, rate] : missing_rates) {
        std::size_t j = 0;
        while (schema[j].name != name) ++j;
        Rng mask(mix_seed(config.seed, 1000 + j));
        for (std::size_t i = 0; i < n; ++i) {
            if (mask.uniform01() < rate) cols[j].missing[i] = 1;
        }
    }
    {
        const std::size_t rainfall_j = 4, today_j = 21;
        for (std::size_t i = 0; i < n; ++i) {
            cols[today_j].missing[i] = cols[rainfall_j].missing[i];
        }
    }

    write_csv(Table(schema, std::move(cols), n), path);
}

} // namespace rainpipe::synth
