#!/usr/bin/env python3
"""Full desk-scale experiment on one synthetic cohort.

Generates a cohort, decodes it once, then compares IRF/RRF with and without
the brain channel, the scenario-dependent weight policy, and the adaptive
per-scenario weight search, printing paired-test statistics for each
comparison.

    python scripts/run_cohort_experiment.py --sessions 200 --users 10 --seed 7
"""

import argparse
import sys
import time

from brainrf.adaptive import estimate_synthesis_params
from brainrf.combine import CombinationWeights
from brainrf.decoder import binarize_grade
from brainrf.generator import GeneratorConfig, generate_cohort
from brainrf.pipeline import (
    PipelineConfig,
    decode_bundle,
    paired_metric_test,
    run_adaptive_irf,
    run_irf,
    run_rrf,
)


def show(label, cmp):
    print(
        f"{label}: {cmp.mean_a:.4f} vs {cmp.mean_b:.4f} "
        f"(diff {cmp.mean_diff:+.4f}, t={cmp.t_stat:+.2f}, p={cmp.p_value:.2e}, n={cmp.n})"
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sessions", type=int, default=200)
    ap.add_argument("--users", type=int, default=10)
    ap.add_argument("--queries", type=int, default=40)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--skip-adaptive", action="store_true")
    args = ap.parse_args(argv)

    if args.sessions % args.users:
        ap.error("--sessions must divide evenly among --users")

    config = GeneratorConfig(
        n_users=args.users,
        sessions_per_user=args.sessions // args.users,
        n_queries=args.queries,
    )
    t0 = time.perf_counter()
    bundle = generate_cohort(config, seed=args.seed)
    print(f"cohort: {len(bundle.sessions)} sessions, {len(bundle.documents)} documents")

    decoded = decode_bundle(bundle, seed=args.seed)
    print(f"decoded in {time.perf_counter() - t0:.0f}s")

    irf_with = run_irf(bundle, PipelineConfig(weights=CombinationWeights(0.6, 0.2, 0.2)),
                       seed=args.seed, decoded=decoded)
    irf_without = run_irf(bundle, PipelineConfig(weights=CombinationWeights(0.0, 0.2, 0.2)),
                          seed=args.seed, decoded=decoded)
    show("IRF   brain+click+pseudo vs click+pseudo", paired_metric_test(irf_with, irf_without))

    scenario = run_irf(bundle, PipelineConfig(scenario_policy=True),
                       seed=args.seed, decoded=decoded)
    show("IRF   scenario policy vs fixed weights   ", paired_metric_test(scenario, irf_with))

    rrf_with = run_rrf(bundle, PipelineConfig(weights=CombinationWeights(1.0, 0.4, 0.0)),
                       seed=args.seed, decoded=decoded)
    rrf_without = run_rrf(bundle, PipelineConfig(weights=CombinationWeights(0.0, 0.4, 0.2)),
                          seed=args.seed, decoded=decoded)
    show("RRF   brain+click vs click+pseudo        ", paired_metric_test(rrf_with, rrf_without))

    if not args.skip_adaptive:
        samples = [
            (bool(binarize_grade(rec.snippet_grade)), rec.clicked,
             decoded.snippet[(s.session_id, pos)])
            for s in bundle.sessions
            for pos, rec in enumerate(s.records)
        ]
        params = estimate_synthesis_params(samples)
        adaptive = run_adaptive_irf(bundle, params, PipelineConfig(),
                                    seed=args.seed, decoded=decoded)
        show("IRF   adaptive weights vs fixed weights  ", paired_metric_test(adaptive, irf_with))

    print(f"total {time.perf_counter() - t0:.0f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
