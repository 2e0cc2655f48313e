#!/usr/bin/env python3
"""Regenerates the synthetic fixture dataset under fixtures/."""

import json
import math
import pathlib

import numpy as np
from PIL import Image

ROOT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
OCEAN = ROOT / "ocean"

BOREHOLES = """\
B1,0,0,-30
B1,mud,0,5
B1,sand,5,12
B2,100,0,-32
B2,mud,0,7
B2,sand,7,15
B3,60,80,-31
B3,sand,0,10
"""


def write_json(path, doc):
    path.write_text(json.dumps(doc, indent=2) + "\n")


def write_field(name, header, values):
    fields = OCEAN / "fields"
    fields.mkdir(parents=True, exist_ok=True)
    write_json(fields / f"{name}.json", header)
    # x fastest, then y, then z
    np.ascontiguousarray(values, dtype="<f4").tofile(fields / f"{name}.bin")


def temperature():
    n = 21
    lon = np.linspace(0.0, 1.0, n)
    lat = np.linspace(0.0, 1.0, n)
    depth = np.linspace(0.0, 200.0, n)
    d, la, lo = np.meshgrid(depth, lat, lon, indexing="ij")

    # warm surface layer over cold deep water; the thermocline dips under a warm eddy
    eddy = np.exp(-((lo - 0.35) ** 2 + (la - 0.6) ** 2) / 0.05)
    centre = 70.0 + 40.0 * eddy + 10.0 * np.sin(2 * math.pi * lo) * np.cos(math.pi * la)
    t = 6.0 + 18.0 / (1.0 + np.exp((d - centre) / 12.0))

    sentinel = -9999.0
    seamount_top = 200.0 - 130.0 * np.exp(-((lo - 0.75) ** 2 + (la - 0.3) ** 2) / 0.02)
    t[d > seamount_top] = sentinel
    t[:, 10, 3] = sentinel  # failed CTD cast at lon 0.15, lat 0.5

    header = {
        "name": "temp",
        "dims": [n, n, n],
        "origin": [0.0, 0.0, 0.0],
        "spacing": [0.05, 0.05, 10.0],
        "unit": "degC",
        "sentinel": sentinel,
        "components": 1,
        "axes": ["lon", "lat", "depth"],
    }
    write_field("temp", header, t)


def current():
    nx, ny, nz = 11, 11, 7
    x = np.linspace(0.0, 200.0, nx)
    y = np.linspace(0.0, 200.0, ny)
    z = np.linspace(-60.0, 0.0, nz)
    zz, yy, xx = np.meshgrid(z, y, x, indexing="ij")
    u = 0.10 + 0.05 * np.sin(math.pi * yy / 200.0) * (1.0 + zz / 120.0)
    v = 0.05 * np.cos(math.pi * xx / 200.0)
    w = np.zeros_like(u)
    header = {
        "name": "current",
        "dims": [nx, ny, nz],
        "origin": [0.0, 0.0, -60.0],
        "spacing": [20.0, 20.0, 10.0],
        "unit": "m/s",
        "sentinel": None,
        "components": 3,
        "axes": ["x", "y", "z"],
    }
    write_field("current", header, np.stack([u, v, w], axis=-1))


def bathymetry():
    rng = np.random.default_rng(7)
    rows = []
    for gx in np.linspace(-10.0, 160.0, 10):
        for gy in np.linspace(-30.0, 110.0, 8):
            x = gx + rng.uniform(-4.0, 4.0)
            y = gy + rng.uniform(-4.0, 4.0)
            z = -30.0 - 0.02 * x + 1.5 * math.sin(x / 25.0) * math.cos(y / 30.0)
            rows.append(f"{x:.3f},{y:.3f},{z:.3f}")
    (OCEAN / "bathymetry.csv").write_text("\n".join(rows) + "\n")


def sonar():
    size = 64
    yy, xx = np.mgrid[0:size, 0:size]
    rng = np.random.default_rng(11)
    speckle = rng.normal(0.0, 18.0, (size, size))
    ridge = 90.0 * np.exp(-((xx - yy * 0.6 - 12) ** 2) / 60.0)
    grey = np.clip(110.0 + ridge + speckle, 0, 255).astype(np.uint8)
    rgba = np.dstack([grey, grey, (grey * 0.9).astype(np.uint8), np.full_like(grey, 255)])
    Image.fromarray(rgba, "RGBA").save(OCEAN / "sonar.png", optimize=False)
    write_json(OCEAN / "sonar.json", {"extent": [-10.0, -30.0, 160.0, 110.0]})


def main():
    OCEAN.mkdir(parents=True, exist_ok=True)
    (ROOT / "line_a.csv").write_text(BOREHOLES)
    (OCEAN / "boreholes.csv").write_text(BOREHOLES)
    write_json(OCEAN / "strata.json", {
        "strata": [
            {"id": "mud", "color": [0.45, 0.36, 0.25, 1.0]},
            {"id": "sand", "color": [0.87, 0.78, 0.52, 1.0]},
        ]
    })
    write_json(OCEAN / "survey_lines.json", {"lines": [{"id": "A", "boreholes": ["B1", "B2", "B3"]}]})
    write_json(OCEAN / "corrections.json", {
        "radius": 100.0,
        "observations": [{"stratum": "sand", "x": 50.0, "y": 20.0, "z": -36.0}],
    })
    write_json(OCEAN / "spill.json", {
        "source": [50.0, 40.0, -31.0],
        "emission_rate": 20.0,
        "max_particles": 500,
        "lifetime": 60.0,
        "buoyancy": 0.02,
        "diffusion": 0.05,
        "seed": 42,
        "dt": 0.5,
        "steps_per_frame": 4,
        "field": "current",
    })
    temperature()
    current()
    bathymetry()
    sonar()


if __name__ == "__main__":
    main()
