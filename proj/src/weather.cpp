#include "greenflag/weather.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "greenflag/errors.hpp"
#include "greenflag/rng.hpp"

namespace greenflag {

namespace {

constexpr int kSimpsonIntervals = 256;  // 257 nodes

void require_finite_nonnegative(double value, const char* what) {
    if (!std::isfinite(value) || value < 0.0) {
        throw DomainError(fmt::format("{} must be finite and >= 0, got {}", what, value));
    }
}

void validate_record(const WeatherRecord& r) {
    require_finite_nonnegative(r.direct_solar_radiation, "direct solar radiation");
    require_finite_nonnegative(r.wind_speed, "wind speed");
    if (!std::isfinite(r.cloud_cover_oktas) || r.cloud_cover_oktas < 0.0 ||
        r.cloud_cover_oktas > 8.0) {
        throw DomainError(fmt::format("cloud cover must lie in [0, 8] oktas, got {}",
                                      r.cloud_cover_oktas));
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double(std::string_view text, std::size_t line, const char* column) {
    text = trim(text);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ParseError(line, fmt::format("bad number '{}' in column {}", text, column));
    }
    return value;
}

int parse_int(std::string_view text, std::size_t pos, std::size_t len) {
    if (pos + len > text.size()) throw DomainError("truncated timestamp");
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
    if (ec != std::errc{} || ptr != text.data() + pos + len) {
        throw DomainError(fmt::format("bad timestamp '{}'", text));
    }
    return value;
}

}  // namespace

void HarvestParams::validate() const {
    if (!(panel_area > 0.0) || !(air_density > 0.0) || !(sweep_area > 0.0) || !(horizon > 0.0)) {
        throw DomainError("harvest parameters must be strictly positive");
    }
    if (!(weibull_shape >= 1.0)) throw DomainError("weibull shape must be >= 1");
}

double HarvestSeries::solar_at(std::size_t worker, std::size_t iteration) const {
    return solar.at(worker * iterations + iteration);
}

double HarvestSeries::wind_at(std::size_t worker, std::size_t iteration) const {
    return wind.at(worker * iterations + iteration);
}

double HarvestSeries::total_at(std::size_t worker, std::size_t iteration) const {
    return solar_at(worker, iteration) + wind_at(worker, iteration);
}

double clearness_index(double cloud_cover_oktas) {
    if (!(cloud_cover_oktas >= 0.0 && cloud_cover_oktas <= 8.0)) {
        throw DomainError(fmt::format("cloud cover {} outside [0, 8] oktas", cloud_cover_oktas));
    }
    return 1.0 - 0.75 * std::pow(cloud_cover_oktas / 8.0, 3.4);
}

double solar_energy(const WeatherRecord& record, const HarvestParams& params) {
    validate_record(record);
    const double effective = clearness_index(record.cloud_cover_oktas) *
                             record.direct_solar_radiation;
    return effective * params.horizon * params.panel_area;
}

double instantaneous_wind_power(double wind_speed, const HarvestParams& params) {
    if (!(wind_speed >= 0.0)) {
        throw DomainError(fmt::format("wind speed {} must be >= 0", wind_speed));
    }
    return 0.5 * params.air_density * params.sweep_area * wind_speed * wind_speed * wind_speed;
}

double weibull_pdf(double v, double shape, double scale) {
    if (v < 0.0) return 0.0;
    const double x = v / scale;
    return (shape / scale) * std::pow(x, shape - 1.0) * std::exp(-std::pow(x, shape));
}

double wind_power_density(double v_start, double v_end, const HarvestParams& params) {
    if (!(v_start >= 0.0) || !(v_end >= 0.0)) {
        throw DomainError("wind speeds must be >= 0");
    }
    const double lo = std::min(v_start, v_end);
    const double hi = std::max(v_start, v_end);
    if (lo == hi) return instantaneous_wind_power(lo, params);

    const double shape = params.weibull_shape;
    const double scale = 0.5 * (lo + hi) / std::tgamma(1.0 + 1.0 / shape);
    const double h = (hi - lo) / kSimpsonIntervals;
    auto integrand = [&](double v) {
        return instantaneous_wind_power(v, params) * weibull_pdf(v, shape, scale);
    };

    double sum = integrand(lo) + integrand(hi);
    for (int i = 1; i < kSimpsonIntervals; ++i) {
        sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(lo + i * h);
    }
    return sum * h / 3.0;
}

double wind_energy(const WeatherRecord& record_start, const WeatherRecord& record_end,
                   const HarvestParams& params) {
    validate_record(record_start);
    validate_record(record_end);
    return wind_power_density(record_start.wind_speed, record_end.wind_speed, params) *
           params.horizon;
}

std::chrono::sys_seconds parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    text = trim(text);
    // YYYY-MM-DDTHH:MM[:SS][Z|+00:00]
    if (text.size() < 16 || text[4] != '-' || text[7] != '-' ||
        (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
        throw DomainError(fmt::format("bad timestamp '{}'", text));
    }
    const int y = parse_int(text, 0, 4);
    const int mo = parse_int(text, 5, 2);
    const int d = parse_int(text, 8, 2);
    const int hh = parse_int(text, 11, 2);
    const int mm = parse_int(text, 14, 2);
    int ss = 0;
    std::string_view rest = text.substr(16);
    if (!rest.empty() && rest.front() == ':') {
        ss = parse_int(text, 17, 2);
        rest = text.substr(19);
    }
    if (!(rest.empty() || rest == "Z" || rest == "+00:00")) {
        throw DomainError(fmt::format("timestamp '{}' is not UTC", text));
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
        throw DomainError(fmt::format("bad timestamp '{}'", text));
    }
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_iso8601(std::chrono::sys_seconds t) {
    return fmt::format("{:%Y-%m-%dT%H:%M:%S}Z", t);
}

std::vector<WeatherRecord> parse_weather_csv(std::istream& in) {
    std::vector<WeatherRecord> records;
    std::string line;
    if (!std::getline(in, line)) {
        spdlog::warn("weather file is empty");
        return records;
    }
    if (trim(line) != kWeatherCsvHeader) {
        throw ParseError(1, fmt::format("unexpected header '{}', expected '{}'", trim(line),
                                        kWeatherCsvHeader));
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) continue;

        std::array<std::string_view, 4> cells{};
        std::size_t start = 0;
        std::size_t n = 0;
        for (std::size_t i = 0; i <= row.size(); ++i) {
            if (i == row.size() || row[i] == ',') {
                if (n == cells.size()) {
                    throw ParseError(line_no, "expected 4 columns, got more");
                }
                cells[n++] = row.substr(start, i - start);
                start = i + 1;
            }
        }
        if (n != cells.size()) {
            throw ParseError(line_no, fmt::format("expected 4 columns, got {}", n));
        }

        WeatherRecord r;
        try {
            r.timestamp = parse_iso8601(cells[0]);
        } catch (const DomainError& e) {
            throw ParseError(line_no, e.what());
        }
        r.direct_solar_radiation = parse_double(cells[1], line_no, "direct_solar_radiation_wm2");
        r.cloud_cover_oktas = parse_double(cells[2], line_no, "total_cloud_cover_oktas");
        r.wind_speed = parse_double(cells[3], line_no, "wind_speed_ms");
        try {
            validate_record(r);
        } catch (const DomainError& e) {
            throw ParseError(line_no, e.what());
        }
        records.push_back(r);
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    return records;
}

std::vector<WeatherRecord> load_weather_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open weather file {}", path.string()));
    return parse_weather_csv(in);
}

void write_weather_csv(std::ostream& out, std::span<const WeatherRecord> records) {
    out << kWeatherCsvHeader << '\n';
    for (const auto& r : records) {
        out << fmt::format("{},{},{},{}\n", format_iso8601(r.timestamp), r.direct_solar_radiation,
                           r.cloud_cover_oktas, r.wind_speed);
    }
}

HarvestSeries build_harvest_series(std::span<const WeatherRecord> records, std::size_t workers,
                                   std::size_t iterations, const HarvestParams& params,
                                   std::uint64_t seed, std::span<const double> efficiency) {
    if (records.empty()) throw DomainError("no weather records to build a harvest series from");
    if (!efficiency.empty() && efficiency.size() != workers) {
        throw DomainError("one harvest efficiency factor per worker is required");
    }
    params.validate();

    const std::size_t n_records = records.size();
    auto rng = make_rng(seed, streams::weather);
    std::uniform_int_distribution<std::size_t> pick(0, n_records - 1);

    HarvestSeries series;
    series.workers = workers;
    series.iterations = iterations;
    series.offset = pick(rng);
    series.wrapped = series.offset + iterations >= n_records;
    if (series.wrapped && iterations > 0) {
        spdlog::warn("weather series of {} records wraps around for {} iterations from offset {}",
                     n_records, iterations, series.offset);
    }

    std::vector<double> solar(iterations);
    std::vector<double> wind(iterations);
    for (std::size_t n = 0; n < iterations; ++n) {
        const auto& start = records[(series.offset + n) % n_records];
        const auto& end = records[(series.offset + n + 1) % n_records];
        solar[n] = solar_energy(start, params);
        wind[n] = wind_energy(start, end, params);
    }

    series.solar.resize(workers * iterations);
    series.wind.resize(workers * iterations);
    for (std::size_t k = 0; k < workers; ++k) {
        const double factor = efficiency.empty() ? 1.0 : efficiency[k];
        for (std::size_t n = 0; n < iterations; ++n) {
            series.solar[k * iterations + n] = factor * solar[n];
            series.wind[k * iterations + n] = factor * wind[n];
        }
    }
    return series;
}

}  // namespace greenflag
