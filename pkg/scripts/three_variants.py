"""Train on enhancements-only, corrections-only and summed inputs of one change log.

Prints per-split R for the network and the OLS summary of days on counts for
each variant, and writes the usual artifacts under OUT/<variant>/.

    python scripts/three_variants.py [CSV] --out runs/variants
"""

import argparse
import re
import tempfile
from pathlib import Path

from maintlm import cli, synth
from maintlm.ingest import InputVariant


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", nargs="?", help="change log (default: a seeded synthetic one)")
    ap.add_argument("--out", default="runs/variants")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv = args.csv
    if csv is None:
        csv = out / "synthetic.csv"
        csv.write_text(cli.cmd_synth(synth.SynthSpec(seed=args.seed)))

    print(f"{'variant':8} {'train':>6} {'val':>6} {'test':>6} {'all':>6}  best  stop       OLS R   R2     SE")
    for variant in InputVariant:
        run_dir = out / variant.value
        cfg = cli.RunConfig(input_path=str(csv), variant=variant, split_seed=args.seed,
                            init_seed=args.seed, out_dir=str(run_dir))
        result = cli.cmd_train(cfg)
        rs = []
        for split in ("train", "val", "test", "all"):
            svg = (run_dir / f"regression_{split}.svg").read_text()
            rs.append(re.search(r">R = ([^<]+)<", svg).group(1))
        summary = cli.cmd_regress(str(csv), variant, str(run_dir))
        print(f"{variant.value:8} {rs[0]:>6} {rs[1]:>6} {rs[2]:>6} {rs[3]:>6}  "
              f"{result.best_epoch:4d}  {result.stop_reason.value:10} "
              f"{summary.r:5.3f} {summary.r2:5.3f} {summary.se_estimate:7.3f}")


if __name__ == "__main__":
    main()
