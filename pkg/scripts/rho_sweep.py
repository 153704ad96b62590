"""Monte-Carlo check of the synthetic generator and the trained network's R.

For each target population correlation, averages over seeds the sample
Pearson r of (X, Y) and the all-data R between network outputs and targets.

    python scripts/rho_sweep.py --seeds 100 --rho 0.5 0.65 0.8
"""

import argparse
import statistics

import numpy as np

from maintlm import cli, dataset, ingest, mlp, stats, synth


def network_r(text, seed):
    cfg = cli.RunConfig(input_path="-", split_seed=seed, init_seed=seed)
    records = ingest.parse_change_log(text)
    samples = ingest.build_samples(records, cfg.variant)
    files, result = cli.run_pipeline(cfg, text, "-")
    model, norm = mlp.loads_model(files[cli.MODEL_NAME])
    xs = np.array([s.x for s in samples])
    out = dataset.denormalize(mlp.predict(model, dataset.normalize(xs, norm.x_min, norm.x_max)),
                              norm.y_min, norm.y_max)
    return stats.pearson_r([s.y for s in samples], out), result.best_epoch


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--n", type=int, default=56)
    ap.add_argument("--rho", type=float, nargs="+", default=[0.5, 0.65, 0.8])
    args = ap.parse_args()

    print(f"{'rho':>5} {'sigma':>7} {'sample r':>9} {'net R':>7} {'sd':>6} {'best ep':>8}")
    for rho in args.rho:
        sigma = synth.noise_sigma_for_rho(rho, synth.DEFAULT_E_RANGE, synth.DEFAULT_F_RANGE,
                                          synth.DEFAULT_DAYS_PER_UNIT)
        sample_r, net_r, epochs = [], [], []
        for seed in range(args.seeds):
            spec = synth.SynthSpec(n=args.n, noise_sigma=sigma, seed=seed)
            text = cli.cmd_synth(spec)
            s = ingest.build_samples(ingest.parse_change_log(text), ingest.InputVariant.SUM)
            sample_r.append(stats.pearson_r([p.x for p in s], [p.y for p in s]))
            r, best = network_r(text, seed)
            net_r.append(r)
            epochs.append(best)
        print(f"{rho:5.2f} {sigma:7.3f} {statistics.fmean(sample_r):9.3f} "
              f"{statistics.fmean(net_r):7.3f} {statistics.stdev(net_r):6.3f} "
              f"{statistics.fmean(epochs):8.2f}")


if __name__ == "__main__":
    main()
