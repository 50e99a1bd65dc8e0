"""Exceptional-set sweep for both planes constants, with checkpoints.

    python scripts/sweep.py                       # delta in [3, 3e5]
    python scripts/sweep.py --delta-max 40000000 --workers 8 --out runs/ext

The second form is the optional long extension; it resumes from the
checkpoint files in --out if they exist.
"""

import argparse
import json
import os
from dataclasses import asdict, dataclass

from carletlab import planes


@dataclass
class SweepConfig:
    delta_min: int = 3
    delta_max: int = 300_000
    workers: int = 1
    out: str = "runs/sweep"
    checkpoint_every: int = 10_000


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    cfg = SweepConfig()
    for name, value in asdict(cfg).items():
        ap.add_argument("--" + name.replace("_", "-"), type=type(value), default=value)
    cfg = SweepConfig(**vars(ap.parse_args()))
    os.makedirs(cfg.out, exist_ok=True)
    expected = {
        planes.MAIN_CONSTANT: [d for d in planes.EXCEPTIONAL if cfg.delta_min <= d <= cfg.delta_max],
        planes.UNIFORM_CONSTANT: [],
    }
    summary = {"config": asdict(cfg), "runs": []}
    for constant, want in expected.items():
        tag = f"{constant.numerator}_{constant.denominator}"
        rep = planes.verify_range(cfg.delta_min, cfg.delta_max, constant,
                                  checkpoint=os.path.join(cfg.out, f"ckpt_{tag}.json"),
                                  workers=cfg.workers, checkpoint_every=cfg.checkpoint_every)
        row = rep.to_json() | {"matches_expected": rep.failures == want}
        summary["runs"].append(row)
        print(json.dumps(row))
    with open(os.path.join(cfg.out, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)


if __name__ == "__main__":
    main()
