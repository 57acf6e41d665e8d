#!/usr/bin/env python3
"""Rebuild the vendored country snapshot at data/world_snapshot_2020-05-19.csv.

The upstream per-country file is not reachable from the build environment, so
the vendored copy is a reconstruction:

* Country features (continent, centroid coordinates, population, GDP per
  capita, hospital beds, doctors, median age, share over 65, mean temperature)
  are approximate public values for each country as reported around May 2020.
* Algeria's cumulative cases and deaths are the day-by-day official counts,
  dated the way the ECDC/OWID feed dated them (one day after announcement).
  Algeria has no test column upstream; the ingester synthesizes it.
* Every other country's daily series is a deterministic synthetic curve that
  starts on the country's first reported case and ends at its approximate
  official total on 2020-05-19. Test series start later than case series and
  are reported with gaps, the way the testing feed was at the time.

The long-format layout has one row per country-day and 15 columns. Gaps are
placed so that forward filling repairs 112 case cells, 112 death cells and
4102 test cells. Run from the repository root:

    python3 tools/build_snapshot.py
"""

import csv
import datetime as dt
import math
import random
from pathlib import Path

SNAPSHOT = dt.date(2020, 5, 19)
OUT = Path(__file__).resolve().parent.parent / "data" / "world_snapshot_2020-05-19.csv"

HEADER = [
    "country", "continent", "latitude", "longitude", "avg_temperature",
    "hospital_beds_per_1000", "doctors_per_1000", "gdp_per_capita",
    "population", "median_age", "share_over_65", "date",
    "cases", "deaths", "tests",
]

# name, continent, lat, lng, temp, beds, doctors, gdp, population, median_age,
# share_over_65, first-case date (MM-DD, 2020 unless year given),
# cases, deaths, tests on the snapshot date. None marks an unknown feature.
COUNTRIES = [
    # Europe
    ("Austria", "Europe", 47.516231, 14.550072, 6.4, 7.37, 5.17, 45436.69, 9006400, 44.4, 19.2, "02-26", 16242, 633, 383000),
    ("Belarus", "Europe", 53.709807, 27.953389, 7.0, 11.0, 5.19, 17167.97, 9449321, 40.3, 14.8, "02-29", 31508, 175, 510000),
    ("Belgium", "Europe", 50.503887, 4.469936, 10.5, 5.64, 3.07, 42658.58, 11589616, 41.8, 18.57, "02-04", 55559, 9080, 680000),
    ("Bulgaria", "Europe", 42.733883, 25.48583, 11.0, 7.45, 4.03, 18563.31, 6948445, 44.7, 20.8, "03-09", 2259, 112, 77000),
    ("Croatia", "Europe", 45.1, 15.2, 11.5, 5.54, 3.0, 22669.8, 4105268, 44.0, 19.72, "02-26", 2232, 96, 53000),
    ("Czechia", "Europe", 49.817492, 15.472962, 8.3, 6.63, 4.12, 32605.91, 10708982, 43.3, 19.03, "03-02", 8586, 302, 370000),
    ("Denmark", "Europe", 56.26392, 9.501785, -14.0, 2.5, 4.01, 46682.52, 5792203, 42.3, 19.68, "02-28", 11117, 551, 430000),
    ("Estonia", "Europe", 58.595272, 25.013607, 5.5, 4.69, 3.45, 29481.25, 1326539, 42.7, 19.45, "02-28", 1791, 64, 78000),
    ("Finland", "Europe", 61.92411, 25.748151, 2.0, 3.28, 3.81, 40585.72, 5540718, 42.8, 21.23, "02-16", 6399, 300, 160000),
    ("France", "Europe", 46.227638, 2.213749, 11.0, 5.98, 3.27, 38605.67, 65273512, 42.0, 19.72, "01-25", 143427, 28239, 1380000),
    ("Germany", "Europe", 51.165691, 10.451526, 9.0, 8.0, 4.25, 45229.25, 83783945, 46.6, 21.45, "01-28", 176007, 8090, 3150000),
    ("Greece", "Europe", 39.074208, 21.824312, 15.0, 4.21, 5.48, 24574.38, 10423056, 45.3, 20.4, "02-27", 2840, 165, 140000),
    ("Hungary", "Europe", 47.162494, 19.503304, 11.0, 7.02, 3.41, 26777.56, 9660350, 43.4, 18.58, "03-05", 3535, 462, 128000),
    ("Iceland", "Europe", 64.963051, -19.020835, 2.0, 2.91, 3.9, 46482.96, 341284, 37.3, 14.43, "02-29", 1802, 10, 57000),
    ("Ireland", "Europe", 53.41291, -8.24389, 10.0, 2.96, 3.31, 67335.29, 4937796, 38.7, 13.93, "03-01", 24112, 1547, 280000),
    ("Italy", "Europe", 41.87194, 12.56738, 13.5, 3.18, 3.98, 35220.08, 60461828, 47.9, 23.02, "01-31", 225886, 32007, 3100000),
    ("Latvia", "Europe", 56.879635, 24.603189, 6.5, 5.57, 3.19, 25063.85, 1886202, 43.9, 19.75, "03-03", 1012, 19, 92000),
    ("Lithuania", "Europe", 55.169438, 23.881275, 7.0, 6.56, 4.34, 29524.27, 2722291, 43.5, 19.0, "02-29", 1547, 59, 240000),
    ("Luxembourg", "Europe", 49.815273, 6.129583, 9.5, 4.51, 2.98, 94277.97, 625976, 39.7, 14.31, "03-01", 3958, 107, 81000),
    ("Netherlands", "Europe", 52.132633, 5.291266, 10.3, 3.32, 3.61, 48472.55, 17134873, 43.2, 18.78, "02-28", 44141, 5694, 290000),
    ("Norway", "Europe", 60.472024, 8.468946, 1.5, 3.6, 2.92, 64800.06, 5421242, 39.7, 16.82, "02-27", 8249, 232, 220000),
    ("Poland", "Europe", 51.919438, 19.145136, 8.5, 6.62, 2.38, 27216.45, 37846605, 41.8, 16.76, "03-05", 19268, 948, 640000),
    ("Portugal", "Europe", 39.399872, -8.224454, 15.5, 3.39, 5.12, 27936.9, 10196707, 46.2, 21.5, "03-03", 29432, 1231, 680000),
    ("Romania", "Europe", 45.943161, 24.96676, 9.5, 6.89, 2.98, 23313.2, 19237682, 43.0, 17.85, "02-27", 17191, 1120, 385000),
    ("Russia", "Europe", 61.52401, 105.318756, -5.0, 8.05, 4.01, 24765.95, 145934460, 39.6, 14.18, "03-02", 299941, 2837, 7350000),
    ("Serbia", "Europe", 44.016521, 21.005859, 11.0, 5.61, 3.11, 14048.88, 6804596, 41.2, 17.37, "03-07", 10699, 234, 175000),
    ("Slovakia", "Europe", 48.669026, 19.699024, 8.5, 5.82, 3.42, 30155.15, 5459643, 41.2, 15.07, "03-07", 1495, 28, 150000),
    ("Slovenia", "Europe", 46.151241, 14.995463, 10.3, 4.5, 3.09, 31400.84, 2078932, 44.5, 19.06, "03-05", 1467, 104, 73000),
    ("Spain", "Europe", 40.463667, -3.74922, 14.0, 2.97, 3.87, 34272.36, 46754783, 45.5, 19.44, "02-01", 231606, 27709, 3000000),
    ("Sweden", "Europe", 60.128161, 18.643501, 2.5, 2.22, 3.98, 46949.28, 10099270, 41.0, 19.99, "02-01", 30377, 3698, 180000),
    ("Switzerland", "Europe", 46.818188, 8.227512, 6.0, 4.53, 4.3, 57410.17, 8654618, 43.1, 18.44, "02-26", 30587, 1602, 370000),
    ("United Kingdom", "Europe", 55.378051, -3.435973, 9.5, 2.54, 2.81, 39753.24, 67886004, 40.8, 18.52, "01-31", 248818, 34796, 2680000),
    # Asia
    ("Bahrain", "Asia", 25.930414, 50.637772, 27.0, 2.0, 0.93, 43290.71, 1701583, 32.4, 2.37, "02-24", 7184, 12, 230000),
    ("Bangladesh", "Asia", 23.684994, 90.356331, 25.5, 0.8, 0.58, 3523.98, 164689383, 27.5, 5.1, "03-09", 25121, 370, 200000),
    ("China", "Asia", 35.86166, 104.195397, 7.5, 4.34, 1.98, 15308.71, 1386395000, 38.7, 10.64, "01-22", 84063, 4638, 2000000),
    ("India", "Asia", 20.593684, 78.96288, 24.4, 0.53, 0.86, 6426.67, 1380004385, 28.2, 5.99, "03-02", 101139, 3163, 2400000),
    ("Indonesia", "Asia", -0.789275, 113.921327, 26.0, 1.04, 0.38, 11188.74, 273523621, 29.3, 5.32, "03-03", 18010, 1191, 200000),
    ("Iran", "Asia", 32.427908, 53.688046, 18.0, 1.5, 1.58, 19082.62, 83992953, 32.4, 5.44, "02-20", 122492, 7057, 660000),
    ("Israel", "Asia", 31.046051, 34.851612, 20.0, 2.99, 4.62, 33132.32, 8655541, 30.6, 11.73, "02-22", 16659, 278, 480000),
    ("Japan", "Asia", 36.204824, 138.252924, 11.5, 13.05, 2.41, 39002.22, 126476458, 48.2, 28.0, "01-22", 16285, 744, 250000),
    ("Kazakhstan", "Asia", 48.019573, 66.923684, 6.0, 6.7, 3.25, 24055.59, 18776707, 30.6, 6.99, "03-14", 6440, 35, 480000),
    ("Malaysia", "Asia", 4.210484, 101.975766, 25.5, 1.9, 1.51, 26808.16, 32365998, 29.9, 6.29, "01-25", 6941, 113, 490000),
    ("Nepal", "Asia", 28.394857, 84.124008, 13.0, 0.3, 0.75, 2442.8, 29136808, 25.0, 5.81, "03-23", 375, 2, 80000),
    ("Pakistan", "Asia", 30.375321, 69.345116, 20.5, 0.6, 0.98, 5034.71, 220892331, 23.5, 4.5, "02-27", 42125, 903, 390000),
    ("Philippines", "Asia", 12.879721, 121.774017, 26.5, 1.0, 0.6, 7599.19, 109581085, 25.2, 4.8, "03-06", 12718, 831, 220000),
    ("Qatar", "Asia", 25.354826, 51.183884, 29.0, 1.2, 2.49, 116935.6, 2881060, 31.9, 1.0, "03-01", 33969, 15, 180000),
    ("Saudi Arabia", "Asia", 23.885942, 45.079162, 25.5, 2.7, 2.61, 49045.41, 34813867, 31.9, 3.3, "03-03", 57345, 320, 660000),
    ("Singapore", "Asia", 1.352083, 103.819836, 27.0, 2.4, 2.29, 85535.38, 5850343, 42.4, 12.92, "01-24", 28343, 22, 250000),
    ("South Korea", "Asia", 35.907757, 127.766922, 12.0, 12.27, 2.36, 35938.37, 51269183, 43.4, 13.91, "01-22", 11078, 263, 760000),
    ("Taiwan", "Asia", 23.69781, 120.960515, 22.0, None, None, None, 23816775, 42.2, None, "01-21", 440, 7, 68000),
    ("Thailand", "Asia", 15.870032, 100.992541, 26.5, 2.1, 0.81, 16277.67, 69799978, 40.1, 11.37, "01-22", 3031, 56, 290000),
    ("Turkey", "Asia", 38.963745, 35.243322, 11.5, 2.81, 1.85, 25129.34, 84339067, 31.6, 8.15, "03-11", 151615, 4199, 1600000),
    ("United Arab Emirates", "Asia", 23.424076, 53.847818, 27.5, 1.2, 2.53, 67293.48, 9890400, 34.0, 1.14, "01-29", 24190, 224, 1600000),
    # Africa
    ("Algeria", "Africa", 28.033886, 1.659626, 23.0, 1.9, 1.72, 13913.84, 43851043, 29.1, 6.21, "02-26", 7201, 555, None),
    ("Ethiopia", "Africa", 9.145, 40.489673, 22.5, 0.3, 0.02, 1729.93, 114963583, 19.8, 3.53, "03-14", 352, 5, 56000),
    ("Ghana", "Africa", 7.946527, -1.023194, 27.0, 0.9, 0.14, 4227.63, 31072945, 21.1, 3.39, "03-13", 5918, 31, 180000),
    ("Kenya", "Africa", -0.023559, 37.906193, 24.5, 1.4, 0.16, 2993.03, 53771300, 20.0, 2.69, "03-14", 912, 50, 41000),
    ("Morocco", "Africa", 31.791702, -7.09262, 17.5, 1.1, 0.73, 7485.01, 36910558, 29.6, 6.77, "03-03", 6952, 192, 110000),
    ("Nigeria", "Africa", 9.081999, 8.675277, 29.0, 0.5, 0.38, 5338.45, 206139587, 18.1, 2.75, "02-28", 6175, 191, 36000),
    ("Rwanda", "Africa", -1.940278, 29.873888, 20.5, None, 0.13, 1854.21, 12952209, 20.3, 2.97, "03-15", 308, 0, 52000),
    ("Senegal", "Africa", 14.497401, -14.452362, 29.0, 0.3, 0.07, 2470.58, 16743930, 18.7, 2.97, "03-03", 2480, 25, 35000),
    ("South Africa", "Africa", -30.559482, 22.937506, 18.0, 2.32, 0.91, 12294.88, 59308690, 27.3, 5.34, "03-06", 16433, 286, 510000),
    ("Tunisia", "Africa", 33.886917, 9.537499, 20.0, 2.3, 1.3, 10849.3, 11818618, 32.7, 8.0, "03-03", 1043, 45, 39000),
    ("Uganda", "Africa", 1.373333, 32.290275, 23.0, 0.5, 0.17, 1697.71, 45741000, 16.4, 2.17, "03-22", 260, 0, 80000),
    ("Zimbabwe", "Africa", -19.015438, 29.154857, 21.5, 1.7, 0.21, 1899.78, 14862927, 19.6, 2.82, "03-21", 46, 4, 35000),
    # North America
    ("Canada", "NorthAmerica", 56.130366, -106.346771, -5.0, 2.5, 2.61, 44017.59, 37742157, 41.4, 16.98, "01-26", 78072, 5842, 1400000),
    ("Costa Rica", "NorthAmerica", 9.748917, -83.753428, 25.0, 1.13, 1.15, 15525.0, 5094114, 33.6, 9.47, "03-07", 866, 10, 22000),
    ("Cuba", "NorthAmerica", 21.521757, -77.781167, 25.5, 5.2, 7.52, None, 11326616, 43.1, 14.74, "03-12", 1872, 79, 68000),
    ("El Salvador", "NorthAmerica", 13.794185, -88.89653, 25.0, 1.3, 1.57, 7292.46, 6486201, 27.6, 8.27, "03-19", 1413, 30, 64000),
    ("Mexico", "NorthAmerica", 23.634501, -102.552784, 21.0, 1.38, 2.38, 17336.47, 128932753, 29.3, 6.86, "02-29", 49219, 5177, 170000),
    ("Panama", "NorthAmerica", 8.537981, -80.782127, 25.5, 2.3, 1.57, 22267.04, 4314768, 29.7, 7.92, "03-10", 9449, 269, 50000),
    ("United States", "NorthAmerica", 37.09024, -95.712891, 9.0, 2.77, 2.61, 54225.45, 331002647, 38.3, 15.41, "01-21", 1508308, 90347, 12000000),
    # South America
    ("Argentina", "SouthAmerica", -38.416097, -63.616672, 14.5, 5.0, 3.99, 18933.91, 45195777, 31.9, 11.2, "03-04", 8068, 373, 110000),
    ("Bolivia", "SouthAmerica", -16.290154, -63.588653, 21.5, 1.1, 1.59, 6885.83, 11673029, 25.4, 6.7, "03-12", 4088, 169, 16000),
    ("Brazil", "SouthAmerica", -14.235004, -51.92528, 25.0, 2.2, 2.16, 14103.45, 212559409, 33.5, 8.55, "02-26", 254220, 16792, 740000),
    ("Chile", "SouthAmerica", -35.675147, -71.542969, 10.2, 2.11, 2.59, 22767.04, 19116209, 35.4, 11.09, "03-04", 46059, 478, 450000),
    ("Colombia", "SouthAmerica", 4.570868, -74.297333, 24.5, 1.71, 2.18, 13254.95, 50882884, 32.2, 7.65, "03-07", 16295, 592, 230000),
    ("Ecuador", "SouthAmerica", -1.831239, -78.183406, 21.5, 1.5, 2.04, 10581.94, 17643060, 28.1, 7.1, "03-01", 33182, 2736, 100000),
    ("Paraguay", "SouthAmerica", -23.442503, -58.443832, 24.2, 1.3, 1.35, 8827.01, 7132530, 26.5, 6.38, "03-08", 778, 11, 30000),
    ("Peru", "SouthAmerica", -9.189967, -75.015152, 19.5, 1.6, 1.28, 12236.71, 32971846, 29.1, 7.15, "03-07", 94933, 2789, 700000),
    ("Uruguay", "SouthAmerica", -32.522779, -55.765835, 17.5, 2.8, 5.08, 20551.41, 3473727, 35.6, 14.66, "03-14", 734, 20, 30000),
    # Oceania
    ("Australia", "Oceania", -25.274398, 133.775136, 21.5, 3.84, 3.68, 44648.71, 25499881, 37.9, 15.5, "01-25", 7060, 99, 1100000),
    ("New Zealand", "Oceania", -40.900557, 174.885971, 10.5, 2.61, 3.59, 36085.84, 4822233, 37.9, 15.32, "02-29", 1153, 21, 240000),
]

# Official cumulative counts for Algeria, one entry per day from 2020-02-26.
ALGERIA_CASES = [
    1, 1, 1, 1, 1, 1, 3, 5, 12, 12, 17, 17, 19, 20, 20, 20, 24, 26, 37, 48,
    54, 60, 74, 87, 90, 139, 201, 230, 264, 302, 367, 409, 454, 511, 584, 716,
    847, 986, 1171, 1251, 1320, 1423, 1468, 1572, 1666, 1761, 1825, 1914, 1983,
    2070, 2160, 2268, 2418, 2534, 2629, 2718, 2811, 2910, 3007, 3127, 3256,
    3382, 3517, 3649, 3848, 4006, 4154, 4295, 4474, 4648, 4838, 4997, 5182,
    5369, 5558, 5723, 5891, 6067, 6253, 6442, 6629, 6821, 7019, 7201,
]
ALGERIA_DEATHS = [
    0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 2, 3, 4,
    4, 4, 7, 9, 11, 15, 17, 17, 19, 21, 25, 26, 29, 31, 35, 44,
    58, 100, 118, 130, 152, 173, 193, 205, 235, 256, 275, 293, 313,
    326, 336, 348, 364, 367, 375, 384, 392, 402, 407, 415, 419,
    425, 432, 437, 444, 450, 453, 459, 463, 465, 474, 483, 488,
    494, 502, 507, 515, 522, 529, 536, 542, 545, 550, 555,
]

TARGET_ROWS = 7050
MISSING_CASE_CELLS = 112
MISSING_TEST_CELLS = 4102


def first_date(code):
    if len(code) == 10:
        return dt.date.fromisoformat(code)
    return dt.date.fromisoformat("2020-" + code)


def fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cumulative_curve(total, days, peak_frac, width_frac, rng, start=1):
    """Non-decreasing integer path from `start` to `total` over `days` days."""
    if days == 1:
        return [total]
    if total <= start:
        return [min(start, total)] * (days - 1) + [total]
    peak = peak_frac * days
    width = max(width_frac * days, 1.0)
    raw = []
    acc = 0.0
    for i in range(days):
        density = 1.0 / (1.0 + math.exp(-(i - peak) / width))
        acc += density * (0.85 + 0.3 * rng.random())
        raw.append(acc)
    lo, hi = raw[0], raw[-1]
    path = [start + (total - start) * (v - lo) / (hi - lo) for v in raw]
    out = []
    prev = start
    for v in path:
        iv = max(prev, int(round(v)))
        out.append(iv)
        prev = iv
    out[-1] = total
    for i in range(len(out) - 2, -1, -1):
        out[i] = min(out[i], out[i + 1])
    return out


def main():
    rng = random.Random(20200519)
    days = {c[0]: (SNAPSHOT - first_date(c[11])).days + 1 for c in COUNTRIES}
    total_rows = sum(days.values())
    assert total_rows == TARGET_ROWS, f"row count {total_rows} != {TARGET_ROWS}"
    assert len(ALGERIA_CASES) == days["Algeria"] == len(ALGERIA_DEATHS)

    series = {}
    for c in COUNTRIES:
        name, n = c[0], days[c[0]]
        cases_total, deaths_total, tests_total = c[12], c[13], c[14]
        if name == "Algeria":
            cases = list(ALGERIA_CASES)
            deaths = list(ALGERIA_DEATHS)
            tests = [None] * n
        else:
            peak = 0.55 + 0.3 * rng.random()
            cases = cumulative_curve(cases_total, n, peak, 0.08, rng)
            lag = min(n - 1, 7)
            deaths = [0] * lag + cumulative_curve(deaths_total, n - lag, peak, 0.09, rng, start=0)
            lead = int(n * (0.15 + 0.2 * rng.random()))
            tests = [None] * lead + cumulative_curve(
                tests_total, n - lead, 0.7, 0.25, rng, start=max(100, tests_total // 500)
            )
        series[name] = [cases, deaths, tests]

    # Days without any report: cases and deaths missing together.
    gap_countries = ["Belarus", "Bolivia", "Ghana", "Kazakhstan", "Nepal", "Peru", "Serbia", "Tunisia"]
    per_country = MISSING_CASE_CELLS // len(gap_countries)
    for name in gap_countries:
        cases, deaths, _ = series[name]
        n = len(cases)
        slots = rng.sample(range(5, n - 1), per_country)
        for i in slots:
            cases[i] = None
            deaths[i] = None

    # Test reporting gaps between the first and last report.
    candidates = []
    for name, (_, _, tests) in series.items():
        if name == "Algeria":
            continue
        first = next(i for i, v in enumerate(tests) if v is not None)
        candidates.extend((name, i) for i in range(first + 1, len(tests) - 1))
    rng.shuffle(candidates)
    for name, i in candidates[:MISSING_TEST_CELLS]:
        series[name][2][i] = None

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for c in COUNTRIES:
            name = c[0]
            start = first_date(c[11])
            cases, deaths, tests = series[name]
            for i in range(days[name]):
                day = start + dt.timedelta(days=i)
                writer.writerow(
                    [fmt(v) for v in c[:11]]
                    + [day.isoformat(), fmt(cases[i]), fmt(deaths[i]), fmt(tests[i])]
                )
    print(f"wrote {total_rows} rows for {len(COUNTRIES)} countries to {OUT}")


if __name__ == "__main__":
    main()
