"""Run the stability sweep and summarize it.

    python3 scripts/run_sweep.py --seed 20240 --trials 200 --out results/sweep.csv

Set REEB_EDIT_THREADS to use several worker processes; the CSV does not
depend on it.
"""
import argparse
import csv
import io
import pathlib

from reebedit.experiments import RunConfig, rows_to_csv, sweep


def summarize(rows):
    n = len(rows)
    ratio = [r["d_upper"] / r["c2_norm"] for r in rows if r["c2_norm"] > 0]
    c0 = sum(r["d_upper"] <= r["c0_norm"] + 1e-6 for r in rows)
    print(f"trials                  {n}")
    print(f"global bound holds      {sum(r['global_pass'] for r in rows)}/{n}")
    print(f"lower bound sound       {sum(r['lower_pass'] for r in rows)}/{n}")
    print(f"upper / C2 norm         max {max(ratio):.4f}, mean {sum(ratio) / len(ratio):.4f}")
    print(f"upper <= C0 norm        {c0}/{n}")
    print(f"events per trial        {sum(r['events'] for r in rows) / n:.2f} "
          f"({sum(r['birth_death'] for r in rows)} birth/death, "
          f"{sum(r['value_swap'] for r in rows)} value swaps)")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=20240)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--degree-min", type=int, default=1)
    p.add_argument("--degree-max", type=int, default=4)
    p.add_argument("--out", default="results/sweep.csv")
    args = p.parse_args()
    config = RunConfig(seed=args.seed, trials=args.trials,
                       degree_range=(args.degree_min, args.degree_max))
    rows = sweep(config)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(rows_to_csv(rows, config))
    print(f"wrote {out}")
    summarize(rows)


if __name__ == "__main__":
    main()
