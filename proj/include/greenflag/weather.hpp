#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace greenflag {

struct WeatherRecord {
    std::chrono::sys_seconds timestamp{};
    double direct_solar_radiation = 0.0;  // W/m^2
    double cloud_cover_oktas = 0.0;       // [0, 8]
    double wind_speed = 0.0;              // m/s
};

struct HarvestParams {
    double panel_area = 0.03;     // m^2
    double air_density = 1.225;   // kg/m^3
    double sweep_area = 0.1;      // m^2
    double weibull_shape = 2.0;   // k >= 1
    double horizon = 20.0;        // s, the round deadline

    void validate() const;
};

/// Harvested energy per worker and global iteration, stored row-major
/// (worker-major). total = solar + wind elementwise.
struct HarvestSeries {
    std::size_t workers = 0;
    std::size_t iterations = 0;
    std::size_t offset = 0;   // index of the record used for iteration 0
    bool wrapped = false;     // the window ran past the end of the records
    std::vector<double> solar;
    std::vector<double> wind;

    double solar_at(std::size_t worker, std::size_t iteration) const;
    double wind_at(std::size_t worker, std::size_t iteration) const;
    double total_at(std::size_t worker, std::size_t iteration) const;
};

inline constexpr std::string_view kWeatherCsvHeader =
    "timestamp_utc,direct_solar_radiation_wm2,total_cloud_cover_oktas,wind_speed_ms";

/// 1 - 3/4 (N/8)^3.4. Throws DomainError outside [0, 8].
double clearness_index(double cloud_cover_oktas);

/// Effective radiation times deadline times panel area, in J.
double solar_energy(const WeatherRecord& record, const HarvestParams& params);

/// 0.5 rho S v^3, in W. Throws DomainError for v < 0.
double instantaneous_wind_power(double wind_speed, const HarvestParams& params);

/// Weibull-weighted power integrated between the two measured speeds.
///
/// The Weibull scale is fitted so that the distribution mean equals the mean
/// of the two endpoints: lambda = mean / Gamma(1 + 1/k). Endpoints are
/// order-normalized. Equal endpoints return P(v) (unit probability mass).
/// Integration is composite Simpson on 257 nodes.
double wind_power_density(double v_start, double v_end, const HarvestParams& params);

/// Weibull probability density with the given shape and scale.
double weibull_pdf(double v, double shape, double scale);

double wind_energy(const WeatherRecord& record_start, const WeatherRecord& record_end,
                   const HarvestParams& params);

/// Parses an ISO-8601 UTC timestamp such as 2020-01-01T13:00:00Z.
std::chrono::sys_seconds parse_iso8601(std::string_view text);
std::string format_iso8601(std::chrono::sys_seconds t);

/// Reads the weather CSV. The header must match kWeatherCsvHeader exactly.
/// Rows violating record invariants raise ParseError with the line number.
/// Records come back sorted by timestamp.
std::vector<WeatherRecord> parse_weather_csv(std::istream& in);
std::vector<WeatherRecord> load_weather_csv(const std::filesystem::path& path);

void write_weather_csv(std::ostream& out, std::span<const WeatherRecord> records);

/// Maps global iteration n to the record window (offset + n, offset + n + 1),
/// with the offset drawn from the seed. All workers share the record; each
/// worker's harvest is scaled by efficiency[worker] (1.0 when empty).
HarvestSeries build_harvest_series(std::span<const WeatherRecord> records, std::size_t workers,
                                   std::size_t iterations, const HarvestParams& params,
                                   std::uint64_t seed, std::span<const double> efficiency = {});

}  // namespace greenflag
