#!/usr/bin/env python3
"""Builds the 500-record GKG ingest fixture and its expected pass sets.

The expected sets come from a from-scratch reading of the selection rules
below, not from the C++ code:

  * word count: GCAM "wc" entry present and >= min_words
  * outlet: case-insensitive member of the allow-list
  * themes: at least min_theme_keywords theme entries starting with a prefix
  * focus: the country with strictly most location mentions is the domestic
    country; the paired mode also accepts the partner country, or an exact
    tie between exactly the two countries at the top
  * dating: local = UTC + offset; weekend -> following Monday unless that
    Monday is a holiday (dropped); holiday -> dropped; after the close ->
    next trading day; otherwise the same day

Usage: make_gkg_fixture.py <output-dir>
"""

import datetime as dt
import json
import random
import sys
from pathlib import Path

SEED = 7
N_RECORDS = 500
N_MALFORMED = 6
COLUMNS = 27
COL_ID, COL_DATE, COL_SOURCE, COL_THEMES, COL_LOCS, COL_GCAM = 0, 1, 3, 7, 9, 17

CONFIG = {
    "min_words": 100,
    "min_theme_keywords": 4,
    "theme_prefixes": ["ECON_", "WB_1104_MACROECONOMIC"],
    "outlets": ["Il Sole 24 Ore", "la Repubblica", "Ansa", "Milano Finanza", "El Pais", "Expansion"],
    "domestic": "IT",
    "partner": "ES",
    "timezone_offset_hours": 1,
    "market_open": "09:00",
    "market_close": "17:30",
    "holidays": ["2016-12-26", "2017-01-06", "2017-04-17", "2017-05-01"],
}

FIRST_DAY = dt.date(2016, 12, 19)
LAST_DAY = dt.date(2017, 5, 5)


def build_records(rng):
    outlets = CONFIG["outlets"] + ["Unlisted Daily", "Blog Roll"]
    themes_hit = ["ECON_BONDS", "ECON_DEBT", "ECON_STOCKMARKET", "WB_1104_MACROECONOMIC_VULNERABILITY", "ECON_TAXATION"]
    themes_miss = ["TAX_FNCACT", "LEADER", "EPU_POLICY", "WB_2433_CONFLICT"]
    location_patterns = [
        {"IT": 5, "DE": 1},
        {"IT": 3},
        {"ES": 4, "IT": 2},
        {"IT": 2, "ES": 2},
        {"IT": 2, "FR": 2},
        {"IT": 2, "ES": 2, "FR": 2},
        {"DE": 3, "IT": 1},
        {},
        {"ES": 1, "FR": 1, "IT": 3},
    ]
    days = (LAST_DAY - FIRST_DAY).days
    tricky_clock = [(8, 59, 59), (9, 0, 0), (17, 30, 0), (17, 30, 1), (23, 59, 59), (0, 0, 0)]

    records = []
    for i in range(N_RECORDS):
        day = FIRST_DAY + dt.timedelta(days=rng.randrange(days + 1))
        if rng.random() < 0.3:
            h, m, s = rng.choice(tricky_clock)
        else:
            h, m, s = rng.randrange(24), rng.randrange(60), rng.randrange(60)
        local = dt.datetime(day.year, day.month, day.day, h, m, s)
        utc = local - dt.timedelta(hours=CONFIG["timezone_offset_hours"])

        outlet = rng.choice(outlets)
        if rng.random() < 0.2:
            outlet = outlet.upper() if rng.random() < 0.5 else outlet.lower()

        n_hit = rng.choice([2, 3, 4, 4, 5, 6])
        themes = [rng.choice(themes_hit) for _ in range(n_hit)]
        themes += rng.sample(themes_miss, rng.randrange(3))
        rng.shuffle(themes)
        if rng.random() < 0.3:  # V2-style character offsets
            themes = [f"{t},{rng.randrange(1, 5000)}" for t in themes]

        locations = dict(rng.choice(location_patterns))

        wc_choice = rng.random()
        if wc_choice < 0.08:
            wc = None
        elif wc_choice < 0.16:
            wc = rng.choice([1, 50, 99])
        elif wc_choice < 0.22:
            wc = 100
        else:
            wc = rng.randrange(101, 1500)
        gcam = {}
        if wc is not None:
            gcam["wc"] = wc
            gcam["c9.1"] = rng.randrange(0, max(1, wc // 20))
        gcam["c6.4"] = rng.randrange(0, 30)
        records.append(
            {
                "id": f"fx-{i:04d}",
                "utc": utc,
                "outlet": outlet,
                "themes": themes,
                "locations": locations,
                "gcam": gcam,
                "score": rng.random() < 0.2,
            }
        )
    return records


def format_line(rec):
    cols = [""] * COLUMNS
    cols[COL_ID] = rec["id"]
    cols[COL_DATE] = rec["utc"].strftime("%Y%m%d%H%M%S")
    cols[COL_SOURCE] = rec["outlet"]
    cols[COL_THEMES] = ";".join(rec["themes"])
    blocks = []
    for country, count in rec["locations"].items():
        blocks += [f"1#Somewhere#{country}#XX##0#0#0"] * count
    cols[COL_LOCS] = ";".join(blocks)
    entries = [f"{k}:{v}" for k, v in sorted(rec["gcam"].items())]
    if rec["score"]:
        entries.append("v10.1:0.4375")  # float score dimension, ignored
    cols[COL_GCAM] = ",".join(entries)
    return "\t".join(cols)


# ---------------------------------------------------------------- oracle


def oracle(lines, paired):
    allow = {o.lower() for o in CONFIG["outlets"]}
    holidays = {dt.date.fromisoformat(d) for d in CONFIG["holidays"]}
    close_h, close_m = map(int, CONFIG["market_close"].split(":"))
    close = dt.time(close_h, close_m)

    def trading(d):
        return d.weekday() < 5 and d not in holidays

    def next_trading(d):
        d += dt.timedelta(days=1)
        while not trading(d):
            d += dt.timedelta(days=1)
        return d

    selected = []
    for line in lines:
        cols = line.split("\t")
        if len(cols) != COLUMNS:
            continue
        try:
            utc = dt.datetime.strptime(cols[COL_DATE], "%Y%m%d%H%M%S")
        except ValueError:
            continue

        wc = None
        for entry in filter(None, cols[COL_GCAM].split(",")):
            key, _, value = entry.rpartition(":")
            if key == "wc":
                wc = int(value)
        if wc is None or wc < CONFIG["min_words"]:
            continue
        if cols[COL_SOURCE].strip().lower() not in allow:
            continue
        themes = [t.split(",")[0] for t in cols[COL_THEMES].split(";") if t]
        hits = sum(1 for t in themes if any(t.startswith(p) for p in CONFIG["theme_prefixes"]))
        if hits < CONFIG["min_theme_keywords"]:
            continue

        counts = {}
        for block in filter(None, cols[COL_LOCS].split(";")):
            country = block.split("#")[2]
            counts[country] = counts.get(country, 0) + 1
        if not counts:
            continue
        top = max(counts.values())
        leaders = {c for c, n in counts.items() if n == top}
        home, partner = CONFIG["domestic"], CONFIG["partner"]
        if paired:
            ok = leaders in ({home}, {partner}, {home, partner})
        else:
            ok = leaders == {home}
        if not ok:
            continue

        local = utc + dt.timedelta(hours=CONFIG["timezone_offset_hours"])
        day = local.date()
        if day.weekday() >= 5:
            monday = day + dt.timedelta(days=7 - day.weekday())
            if monday in holidays:
                continue
            assigned = monday
        elif day in holidays:
            continue
        elif local.time() > close:
            assigned = next_trading(day)
        else:
            assigned = day
        selected.append((cols[COL_ID], assigned.isoformat()))
    return selected


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent)
    rng = random.Random(SEED)
    lines = [format_line(r) for r in build_records(rng)]
    bad = ["fx-bad-0\tnot-a-timestamp" + "\t" * (COLUMNS - 2), "only\tthree\tcolumns"]
    for k in range(N_MALFORMED):
        lines.insert(rng.randrange(len(lines)), bad[k % 2])
    (out / "gkg_fixture.tsv").write_text("\n".join(lines) + "\n")
    (out / "gkg_fixture_config.json").write_text(json.dumps(CONFIG, indent=2) + "\n")
    for name, paired in (("domestic", False), ("paired", True)):
        rows = oracle(lines, paired)
        text = "record_id,trading_date\n" + "".join(f"{i},{d}\n" for i, d in rows)
        (out / f"gkg_expected_{name}.csv").write_text(text)
        print(f"{name}: {len(rows)} selected")


if __name__ == "__main__":
    main()
