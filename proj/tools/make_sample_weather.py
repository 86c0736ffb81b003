"""Write a deterministic synthetic hourly weather year shaped like Athens 2020.

Direct solar radiation follows the solar elevation at 37.98 N with a seasonal
peak near 850 W/m^2, cloud cover is an AR(1) process clipped to [0, 8] oktas
and wind speed is a Weibull(k=2) draw with a mild diurnal swing.

    python3 tools/make_sample_weather.py data/athens_2020_synthetic.csv
"""

import argparse
import csv
import math
from datetime import datetime, timedelta, timezone

import numpy as np

LATITUDE = math.radians(37.98)
LONGITUDE_HOURS = 23.73 / 15.0


def solar_elevation(t: datetime) -> float:
    day = t.timetuple().tm_yday
    decl = math.radians(23.44) * math.sin(2 * math.pi * (284 + day) / 365.0)
    solar_time = t.hour + t.minute / 60.0 + LONGITUDE_HOURS
    hour_angle = math.radians(15.0 * (solar_time - 12.0))
    s = math.sin(LATITUDE) * math.sin(decl) + math.cos(LATITUDE) * math.cos(decl) * math.cos(hour_angle)
    return math.asin(max(-1.0, min(1.0, s)))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out")
    parser.add_argument("--seed", type=int, default=2020)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    start = datetime(2020, 1, 1, tzinfo=timezone.utc)
    hours = 366 * 24
    cloud = 3.0
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["timestamp_utc", "direct_solar_radiation_wm2", "total_cloud_cover_oktas", "wind_speed_ms"])
        for h in range(hours):
            t = start + timedelta(hours=h)
            day = t.timetuple().tm_yday
            # Wetter winters, clear summers.
            season = 0.5 * (1 + math.cos(2 * math.pi * (day - 15) / 366.0))
            cloud_mean = 1.0 + 3.5 * season
            cloud = cloud_mean + 0.85 * (cloud - cloud_mean) + rng.normal(0.0, 0.9)
            cloud = min(8.0, max(0.0, cloud))
            elev = solar_elevation(t)
            peak = 700.0 + 150.0 * (1 - season)
            radiation = peak * math.sin(elev) ** 1.2 if elev > 0 else 0.0
            radiation *= 1.0 - 0.6 * (cloud / 8.0) ** 2
            scale = 3.6 + 0.8 * season + 0.9 * math.sin(2 * math.pi * (t.hour - 9) / 24.0)
            wind = scale * rng.weibull(2.0)
            w.writerow([t.strftime("%Y-%m-%dT%H:%M:%SZ"), f"{radiation:.1f}", f"{cloud:.2f}", f"{wind:.3f}"])


if __name__ == "__main__":
    main()
