"""Quick check that the extension imports and the main entry points agree
with known values. Run after `maturin develop` in crates/py."""

import json
import math
import os
import tempfile

import flsm


def main():
    y = flsm.gen_arfima_increments("gaussian", -0.3, 1 << 16, seed=7)
    assert len(y) == 1 << 16 and y.kind == "synthetic"

    h = flsm.ave_hurst(y.values, max_scale=1000)
    assert abs((h.exponent - 0.5) - (-0.3)) < 0.05, h

    x = flsm.accumulate(y)
    lam = flsm.msd_exponent(x.values)
    assert abs(lam.exponent - 0.4) < 0.1, lam

    shuffled = flsm.shuffle_increments(y, 1)
    assert sorted(shuffled.values) == sorted(y.values)

    bounded = flsm.bound_series(shuffled, 5.0)
    assert max(abs(v) for v in bounded.values) <= 5.0

    w = flsm.fractional_weights(0.3, 4)
    assert math.isclose(w[0], 1.0) and math.isclose(w[1], 0.3)

    reverted = flsm.fractional_revert(shuffled, -0.3, 1000)
    assert len(reverted) == len(shuffled)

    d = flsm.burst_durations([0.0, 1.0, 2.0, -1.0, -2.0, 1.0, 0.5], 0.0)
    assert d["bursts"] or d["interbursts"]

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "y.csv")
        y.write_csv(path)
        back = flsm.Series.read_csv(path)
        assert back.values == y.values

    cfg = {
        "synthetic": [{
            "ticker": "SYN",
            "days": 2,
            "spec": {"noise": {"law": "gaussian", "sigma": 1.0},
                     "d": -0.3, "length": 1 << 16, "seed": 3},
        }],
        "estimators": {"max_scale": 1000},
    }
    report = json.loads(flsm.run_stock(json.dumps(cfg), "SYN"))
    assert report["ticker"] == "SYN"
    assert abs(report["d_av"]["value"] + 0.3) < 0.06, report["d_av"]

    try:
        flsm.gen_arfima("cauchy", 0.0, 10, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown law accepted")

    print("flsm smoke test passed")


if __name__ == "__main__":
    main()
