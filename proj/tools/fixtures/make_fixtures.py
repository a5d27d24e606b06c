#!/usr/bin/env python3
"""Regenerates the bundled data fixtures under data/fixtures/.

The fixtures are synthetic. They are drawn from a fixed three-variable structural VAR
(production growth, real activity, log real oil price) with heavy-tailed shocks, and
laid out with the same calendar coverage and units conventions as the public series
they stand in for:

  original/   production growth, activity index, demeaned log real price,
              1973-02 .. 2007-12 (the "posted dataset" layout, already transformed)
  updated/    raw levels as the providers publish them: world crude production
              (kb/d), refiners' acquisition cost (USD/bbl), CPI, activity index,
              OECD+6 industrial production, quarterly real GDP, Kern County
              employment and unemployment rate (not seasonally adjusted)
  snapshots/  the updated raw series as EIA v2 / FRED JSON payloads

Run from the repository root:  python3 tools/fixtures/make_fixtures.py
"""

import json
import math
import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[2] / "data" / "fixtures"
SEED = 20250131

# Structural impact matrix (columns: supply, aggregate demand, oil-specific demand),
# written for a supply *increase*; identification flips it into a disruption.
B0INV = np.array([
    [0.0090, 0.0000, 0.000],
    [-0.40, 6.0000, 0.000],
    [-0.0075, 0.0120, 0.055],
])
A1 = np.array([
    [-0.12, 0.00002, 0.0030],
    [0.0, 0.95, 2.0],
    [0.0, 0.0011, 1.22],
])
A2 = np.array([
    [-0.05, 0.0, -0.0025],
    [0.0, 0.0, -1.8],
    [0.0, 0.0, -0.25],
])
ALPHA = np.array([0.0012, 0.0, 0.06])


def ym(index):
    return f"{index // 12:04d}-{index % 12 + 1:02d}"


def ym_index(year, month):
    return year * 12 + month - 1


def write_csv(path, start_index, values, quarterly=False):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write("date,value\n")
        for i, v in enumerate(values):
            if quarterly:
                q = start_index + i
                label = f"{q // 4:04d}-Q{q % 4 + 1}"
            else:
                label = ym(start_index + i)
            f.write(f"{label},{repr(float(v))}\n")


def simulate(rng, months, burn=240):
    companion = np.block([[A1, A2], [np.eye(3), np.zeros((3, 3))]])
    assert max(abs(np.linalg.eigvals(companion))) < 0.995
    n = months + burn
    shocks = rng.standard_t(6, size=(n, 3)) / math.sqrt(1.5)
    # Mild volatility clustering in the oil-specific demand shock.
    vol = np.ones(n)
    for t in range(1, n):
        vol[t] = math.sqrt(0.6 + 0.3 * vol[t - 1] ** 2 * min(shocks[t - 1, 2] ** 2, 6.0) / 1.0 + 0.1)
    shocks[:, 2] *= vol / np.sqrt(np.mean(vol ** 2))
    y = np.zeros((n, 3))
    mean = np.linalg.solve(np.eye(3) - A1 - A2, ALPHA)
    y[0] = y[1] = mean
    for t in range(2, n):
        y[t] = ALPHA + A1 @ y[t - 1] + A2 @ y[t - 2] + B0INV @ shocks[t]
    return y[burn:], shocks[burn:]


def fred_payload(series_id, start_index, values, quarterly=False, trailing_missing=0):
    obs = []
    for i, v in enumerate(values):
        if quarterly:
            q = start_index + i
            date = f"{q // 4:04d}-{(q % 4) * 3 + 1:02d}-01"
        else:
            date = ym(start_index + i) + "-01"
        obs.append({"realtime_start": "2025-02-28", "realtime_end": "2025-02-28", "date": date, "value": repr(float(v))})
    last = start_index + len(values)
    for k in range(trailing_missing):
        obs.append({"realtime_start": "2025-02-28", "realtime_end": "2025-02-28", "date": ym(last + k) + "-01", "value": "."})
    return {"realtime_start": "2025-02-28", "realtime_end": "2025-02-28", "units": "lin", "file_type": "json",
            "count": len(obs), "observations": obs, "series_id": series_id}


def eia_payload(start_index, values, units, trailing_null=0):
    rows = []
    for i, v in enumerate(values):
        rows.append({"period": ym(start_index + i), "value": repr(float(v)), "units": units})
    last = start_index + len(values)
    for k in range(trailing_null):
        rows.append({"period": ym(last + k), "value": None, "units": units})
    rows.reverse()  # the API's default sort is newest first
    return {"response": {"total": str(len(rows)), "dateFormat": "YYYY-MM", "frequency": "monthly", "data": rows},
            "request": {"command": "/v2/", "params": {}}, "apiVersion": "2.1.8"}


def main():
    rng = np.random.default_rng(SEED)
    first = ym_index(1973, 1)
    last = ym_index(2025, 1)
    months = last - first + 1
    y, eps = simulate(rng, months)
    dprod, rea, rpo_raw = y[:, 0], y[:, 1], y[:, 2]

    def sl(series, start, end):
        return series[start - first:end - first + 1]

    # --- original layout: already transformed, 1973-02 .. 2007-12 ---
    o_start, o_end = ym_index(1973, 2), ym_index(2007, 12)
    rea_orig = sl(rea, o_start, o_end).copy()
    # The published activity index was later revised; diverge from 2002 on.
    rev = ym_index(2002, 1)
    for i in range(len(rea_orig)):
        m = o_start + i
        if m >= rev:
            rea_orig[i] += 0.08 * (m - rev)
    rpo_orig = sl(rpo_raw, o_start, o_end) + math.log(12.0)
    rpo_orig = rpo_orig - rpo_orig.mean()
    write_csv(ROOT / "original" / "production_growth.csv", o_start, sl(dprod, o_start, o_end))
    write_csv(ROOT / "original" / "activity.csv", o_start, rea_orig)
    write_csv(ROOT / "original" / "real_price.csv", o_start, rpo_orig)

    # --- updated raw levels ---
    u_start = ym_index(1974, 1)
    growth = sl(dprod, u_start + 1, last)
    production = [55000.0]
    for g in growth:
        production.append(production[-1] * math.exp(g))
    cpi = [42.6]
    for t in range(first + 1, last + 1):
        drift = 0.0065 if t < ym_index(1983, 1) else 0.0024
        cpi.append(cpi[-1] * math.exp(drift + 0.0015 * rng.standard_normal()))
    cpi = np.array(cpi)
    nominal = np.exp(sl(rpo_raw, u_start, last) + math.log(12.0) + np.log(sl(cpi, u_start, last)) - math.log(cpi[0]))
    ip_growth = 0.0018 + 0.0009 * eps[:, 1] + 0.0025 * rng.standard_normal(months)
    ip = 60.0 * np.exp(np.cumsum(ip_growth))

    write_csv(ROOT / "updated" / "world_crude_production.csv", u_start, production)
    write_csv(ROOT / "updated" / "rac_imported_nominal.csv", u_start, nominal)
    write_csv(ROOT / "updated" / "cpiaucsl.csv", first, cpi)
    write_csv(ROOT / "updated" / "igrea.csv", first, rea)
    write_csv(ROOT / "updated" / "oecd6_industrial_production.csv", first, ip)

    # Quarterly real GDP, 1973Q1 .. 2024Q4, driven by quarterly-averaged shocks.
    q_first = 1973 * 4
    q_last = 2024 * 4 + 3
    nq = q_last - q_first + 1
    qshock = eps[: nq * 3].reshape(nq, 3, 3).mean(axis=1)
    gdp_growth = np.full(nq, 0.0065) + 0.0025 * rng.standard_normal(nq)
    for lag, w in enumerate([0.0010, 0.0012, 0.0009, 0.0006, 0.0003]):
        gdp_growth[lag:] += w * qshock[: nq - lag, 0]
        gdp_growth[lag:] += 0.8 * w * qshock[: nq - lag, 1]
        gdp_growth[lag:] -= 0.6 * w * qshock[: nq - lag, 2]
    gdp = 5800.0 * np.exp(np.cumsum(gdp_growth))
    write_csv(ROOT / "updated" / "gdpc1.csv", q_first, gdp, quarterly=True)

    # Kern County, 1990-01 .. 2025-01, with a month-of-year pattern.
    k_start = ym_index(1990, 1)
    kn = last - k_start + 1
    keps = eps[k_start - first:]
    season_emp = np.array([-0.012, -0.010, -0.006, -0.002, 0.001, 0.006, 0.008, 0.010, 0.009, 0.004, 0.000, -0.008])
    emp_growth = 0.0012 + 0.003 * rng.standard_normal(kn)
    for lag, w in enumerate([0.0006, 0.0005, 0.0004, 0.0003, 0.0002, 0.0001]):
        emp_growth[lag:] += w * keps[: kn - lag, 2] + 0.5 * w * keps[: kn - lag, 1]
    log_emp = math.log(210000.0) + np.cumsum(emp_growth)
    months_of_year = np.array([(k_start + i) % 12 for i in range(kn)])
    employment = np.exp(log_emp + season_emp[months_of_year])
    season_ur = np.array([1.1, 1.0, 0.7, 0.2, -0.2, 0.3, 0.4, 0.1, -0.5, -0.7, -0.4, 0.2])
    ur = np.zeros(kn)
    level = 11.0
    for i in range(kn):
        level = 11.0 + 0.97 * (level - 11.0) + 0.25 * rng.standard_normal() - 0.06 * keps[i, 1] - 0.04 * keps[i, 2]
        ur[i] = level
    unemployment = ur + season_ur[months_of_year]
    write_csv(ROOT / "updated" / "kern_employment_nsa.csv", k_start, employment)
    write_csv(ROOT / "updated" / "kern_unemployment_rate_nsa.csv", k_start, unemployment)

    # --- provider JSON snapshots of the updated pulls ---
    snap = ROOT / "snapshots"
    snap.mkdir(parents=True, exist_ok=True)
    dumps = {
        "eia_world_crude_production.json": eia_payload(u_start, production, "TBPD", trailing_null=1),
        "eia_rac_imported.json": eia_payload(u_start, nominal, "Dollars per Barrel", trailing_null=2),
        "fred_CPIAUCSL.json": fred_payload("CPIAUCSL", first, cpi),
        "fred_IGREA.json": fred_payload("IGREA", first, rea, trailing_missing=1),
        "fred_GDPC1.json": fred_payload("GDPC1", q_first, gdp, quarterly=True),
    }
    for name, payload in dumps.items():
        with open(snap / name, "w", newline="\n") as f:
            json.dump(payload, f, indent=1)
            f.write("\n")


if __name__ == "__main__":
    main()
