#!/usr/bin/env python3
"""Decoder sensitivity sweep over segment length and downsampling rate.

Builds a small raw-EEG cohort and reports per-user temporal-split AUC for
each (post-stimulus window, rate) combination.

    python scripts/decoder_sweep.py --sessions 20 --users 4 --seed 3
"""

import argparse
import sys
import tempfile
from pathlib import Path

from brainrf.cli import main as cli_main
from brainrf.dataio import save_bundle
from brainrf.generator import GeneratorConfig, generate_cohort


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sessions", type=int, default=20)
    ap.add_argument("--users", type=int, default=4)
    ap.add_argument("--queries", type=int, default=20)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--post-ms", default="500,1000,1500,2000")
    ap.add_argument("--rate", default="125,250,500")
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    if args.sessions % args.users:
        ap.error("--sessions must divide evenly among --users")
    config = GeneratorConfig(
        n_users=args.users,
        sessions_per_user=args.sessions // args.users,
        n_queries=args.queries,
        eeg_mode="raw",
    )
    bundle = generate_cohort(config, seed=args.seed)

    workdir = Path(args.out) if args.out else Path(tempfile.mkdtemp(prefix="brainrf_sweep_"))
    data = workdir / "data"
    save_bundle(bundle, data)
    return cli_main([
        "decode-eval", "--data", str(data), "--out", str(workdir / "decode"),
        "--post-ms", args.post_ms, "--rate", args.rate, "--seed", str(args.seed),
    ])


if __name__ == "__main__":
    sys.exit(main())
