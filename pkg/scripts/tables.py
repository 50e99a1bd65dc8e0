"""Write every reproducible table to one directory.

    python scripts/tables.py --out runs/tables
"""

import argparse
import json
import os
import warnings
from dataclasses import dataclass

from carletlab import asymptotic, carlet, gf2n, hypersurface, planes
from carletlab.exact import decimal_render


@dataclass
class TableConfig:
    out: str = "runs/tables"
    k_max: int = 99
    sumfree_n_max: int = 8


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=TableConfig.out)
    ap.add_argument("--k-max", type=int, default=TableConfig.k_max)
    ap.add_argument("--sumfree-n-max", type=int, default=TableConfig.sumfree_n_max)
    cfg = TableConfig(**vars(ap.parse_args()))
    os.makedirs(cfg.out, exist_ok=True)

    def write(name: str, text: str) -> None:
        with open(os.path.join(cfg.out, name), "w") as fh:
            fh.write(text)
        print("wrote", os.path.join(cfg.out, name))

    write("planes_exceptional.csv", planes.rows_to_csv(planes.exceptional_table()))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for policy in ("published", "best"):
            write(f"carlet_{policy}.csv", carlet.rows_to_csv(carlet.carlet_table(4, cfg.k_max, policy)))

    consts = {mode: decimal_render(d.g_minimal, 6, "ceil") for mode, d in hypersurface.published_derivations().items()}
    consts["delta2"] = decimal_render(hypersurface.delta2_constant()[1], 6, "ceil")
    lead = asymptotic.leading_coefficient(asymptotic.TAIL_START)
    consts["leading_coefficient_3e5"] = decimal_render(lead.hi, 8, "ceil")
    consts["limit_coefficient"] = decimal_render(asymptotic.limit_coefficient().hi, 8, "ceil")
    consts["carlet_asymptotic"] = decimal_render(carlet.asymptotic_constant().hi, 8, "ceil")
    write("constants.json", json.dumps(consts, indent=2) + "\n")

    sets = {n: sorted(k for k in range(1, n) if gf2n.is_sum_free(gf2n.FieldCtx(n), k).sum_free)
            for n in range(3, cfg.sumfree_n_max + 1)}
    write("sum_free_sets.json", json.dumps(sets, indent=2) + "\n")


if __name__ == "__main__":
    main()
