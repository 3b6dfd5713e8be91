"""Command-line entry points.

Subcommands: ``synth`` (write a generated bundle), ``run-irf`` / ``run-rrf``
(fixed or scenario weights), ``run-adaptive`` (per-scenario weight search),
``decode-eval`` (decoder AUC with preprocessing sweeps). Every run writes a
TSV report plus a JSON summary embedding the resolved config, the seed, and a
config fingerprint; re-running with the same data and seed reproduces the
files byte for byte.

Exit codes: 0 success, 1 validation/usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .adaptive import SynthesisParams, estimate_synthesis_params
from .combine import CombinationWeights, WEIGHT_GRID
from .dataio import MANIFEST_FILE, bundle_counts, load_bundle, save_bundle
from .decoder import DecoderConfig, binarize_grade, train
from .eeg import extract_de, flatten_features, preprocess
from .expansion import ExpansionConfig
from .generator import GeneratorConfig, generate_cohort
from .metrics import auc
from .pipeline import (
    PipelineConfig,
    config_fingerprint,
    decode_bundle,
    run_adaptive_irf,
    run_irf,
    run_rrf,
)
from .types import BrainRFError, ValidationError

logger = logging.getLogger(__name__)

DATA_ENV_VAR = "BRAINRF_DATA"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; the contract is exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _parse_weights(text: str) -> CombinationWeights:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValidationError(f"--weights expects three comma-separated values, got {text!r}")
    return CombinationWeights(*(float(p) for p in parts))


def _parse_floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p != ""]


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(",") if p != "")


def _data_dir(args) -> Path:
    data = args.data or os.environ.get(DATA_ENV_VAR)
    if not data:
        raise ValidationError(
            f"no data directory: pass --data or set {DATA_ENV_VAR}"
        )
    return Path(data)


def _write_report(report, out_dir: Path, stem: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{stem}_report.tsv").write_text(report.to_tsv(), encoding="utf-8")
    summary = json.dumps(report.summary_dict(), sort_keys=True, indent=2)
    (out_dir / f"{stem}_summary.json").write_text(summary + "\n", encoding="utf-8")
    print(f"{stem}: {len(report.rows)} rows -> {out_dir / (stem + '_report.tsv')}")
    for name, value in sorted(report.aggregates.items()):
        print(f"  {name}: {value:.6f}")


def _pipeline_config(args, mode_has_expansion: bool = True) -> PipelineConfig:
    if getattr(args, "config", None):
        stored = json.loads(Path(args.config).read_text(encoding="utf-8"))
        cfg = stored.get("config", stored)
        weights = cfg.get("weights")
        expansion = cfg.get("expansion", {})
        decoder = cfg.get("decoder", {})
        return PipelineConfig(
            weights=None if weights in ("scenario", "adaptive", None)
            else CombinationWeights(*weights),
            scenario_policy=weights == "scenario",
            expansion=ExpansionConfig(
                k=expansion.get("k", 10), c=expansion.get("c", 0.1)
            ),
            cutoffs=tuple(cfg.get("cutoffs", (1, 3, 5, 10))),
            decoder=DecoderConfig(
                c=decoder.get("c", 1.0),
                gamma=decoder.get("gamma", "scale"),
                standardize=decoder.get("standardize", True),
                seed=decoder.get("seed", 0),
            ),
            retrain_every=cfg.get("retrain_every", 1),
            generalized_max_samples=cfg.get("generalized_max_samples", 1500),
        )
    weights = _parse_weights(args.weights) if args.weights else None
    return PipelineConfig(
        weights=weights,
        scenario_policy=args.scenario_weights,
        expansion=ExpansionConfig(k=args.k, c=args.c),
        cutoffs=_parse_ints(args.cutoffs),
        retrain_every=args.retrain_every,
        generalized_max_samples=args.generalized_max_samples,
    )


def _add_run_flags(p: _Parser):
    p.add_argument("--data", help=f"bundle directory (default ${DATA_ENV_VAR})")
    p.add_argument("--out", required=True, help="output directory for reports")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights", help="theta_bs,theta_c,theta_p (default per mode)")
    p.add_argument("--scenario-weights", action="store_true",
                   help="scenario-dependent weight policy instead of fixed weights")
    p.add_argument("--k", type=int, default=10, help="feedback documents")
    p.add_argument("--c", type=float, default=0.1, help="feedback/query trade-off")
    p.add_argument("--cutoffs", default="1,3,5,10", help="NDCG cutoffs")
    p.add_argument("--retrain-every", type=int, default=1)
    p.add_argument("--generalized-max-samples", type=int, default=1500)
    p.add_argument("--config", help="JSON config (or report summary) to rerun from")


def build_parser() -> _Parser:
    parser = _Parser(prog="brainrf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[], help="generate a synthetic bundle")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sessions", type=int, default=500,
                   help="total sessions; must divide evenly among users")
    p.add_argument("--users", type=int, default=20)
    p.add_argument("--queries", type=int, default=50)
    p.add_argument("--docs-per-query", type=int, default=30)
    p.add_argument("--eeg", choices=("features", "raw", "scores"), default="features")
    p.add_argument("--target-auc", type=float, default=0.69)
    p.add_argument("--clickbait-rate", type=float, default=0.218)
    p.add_argument("--examined-mean", type=float, default=10.9)

    for mode in ("run-irf", "run-rrf"):
        p = sub.add_parser(mode, help=f"evaluate {mode.split('-')[1].upper()}")
        _add_run_flags(p)

    p = sub.add_parser("run-adaptive", help="IRF with adaptive per-scenario weights")
    _add_run_flags(p)
    p.add_argument("--grid", default=",".join(str(g) for g in WEIGHT_GRID))
    p.add_argument("--n-synth", type=int, default=20)
    p.add_argument("--q-m", type=int, default=3,
                   help="clusters per query when documents carry no labels")
    p.add_argument("--estimate-params", action="store_true",
                   help="fit synthesis parameters from the bundle's own labels")
    p.add_argument("--p-click-rel", type=float, default=0.35)
    p.add_argument("--p-click-irrel", type=float, default=0.05)
    p.add_argument("--mu-rel", type=float, default=0.65)
    p.add_argument("--sigma-rel", type=float, default=0.15)
    p.add_argument("--mu-irrel", type=float, default=0.35)
    p.add_argument("--sigma-irrel", type=float, default=0.15)

    p = sub.add_parser("decode-eval", help="train/evaluate the brain decoder")
    p.add_argument("--data", help=f"bundle directory (default ${DATA_ENV_VAR})")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--post-ms", default="2000",
                   help="comma-separated post-stimulus window sweep (raw segments only)")
    p.add_argument("--rate", default="500",
                   help="comma-separated downsampling rate sweep (raw segments only)")
    p.add_argument("--train-frac", type=float, default=0.7)
    return parser


# ---------------------------------------------------------------- commands


def _cmd_synth(args) -> int:
    if args.sessions % args.users != 0:
        raise ValidationError(
            f"--sessions {args.sessions} must divide evenly among --users {args.users}"
        )
    config = GeneratorConfig(
        n_users=args.users,
        n_queries=args.queries,
        sessions_per_user=args.sessions // args.users,
        docs_per_query=args.docs_per_query,
        eeg_mode=args.eeg,
        target_auc=args.target_auc,
        clickbait_rate=args.clickbait_rate,
        examined_mean=args.examined_mean,
    )
    bundle = generate_cohort(config, args.seed)
    out = Path(args.out)
    save_bundle(bundle, out)
    manifest = {
        "seed": args.seed,
        "config": {
            "n_users": config.n_users,
            "n_queries": config.n_queries,
            "sessions_per_user": config.sessions_per_user,
            "docs_per_query": config.docs_per_query,
            "eeg_mode": config.eeg_mode,
            "target_auc": config.target_auc,
            "clickbait_rate": config.clickbait_rate,
            "examined_mean": config.examined_mean,
        },
        "counts": bundle_counts(bundle),
    }
    (out / MANIFEST_FILE).write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    print(f"synth: wrote {manifest['counts']['sessions']} sessions to {out}")
    return 0


def _cmd_run(args, mode: str) -> int:
    bundle = load_bundle(_data_dir(args))
    config = _pipeline_config(args)
    if mode == "irf":
        report = run_irf(bundle, config, seed=args.seed)
    else:
        report = run_rrf(bundle, config, seed=args.seed)
    _write_report(report, Path(args.out), mode)
    return 0


def _cmd_run_adaptive(args) -> int:
    bundle = load_bundle(_data_dir(args))
    config = _pipeline_config(args)
    if getattr(args, "config", None):
        stored = json.loads(Path(args.config).read_text(encoding="utf-8"))
        adaptive_cfg = stored.get("config", stored).get("adaptive")
        if adaptive_cfg:
            args.grid = ",".join(str(g) for g in adaptive_cfg["grid"])
            args.q_m = adaptive_cfg["q_m"]
            args.estimate_params = False
            synth = adaptive_cfg["synthesis"]
            for name in ("p_click_rel", "p_click_irrel", "mu_rel", "sigma_rel",
                         "mu_irrel", "sigma_irrel", "n_synth"):
                setattr(args, name, synth[name])
    if args.estimate_params:
        decoded = decode_bundle(
            bundle, config.decoder, args.seed,
            generalized_max_samples=config.generalized_max_samples,
            retrain_every=config.retrain_every,
        )
        samples = []
        for s in bundle.sessions:
            for pos, rec in enumerate(s.records):
                samples.append((
                    bool(binarize_grade(rec.snippet_grade)),
                    rec.clicked,
                    decoded.snippet[(s.session_id, pos)],
                ))
        params = estimate_synthesis_params(samples, n_synth=args.n_synth)
    else:
        decoded = None
        params = SynthesisParams(
            p_click_rel=args.p_click_rel,
            p_click_irrel=args.p_click_irrel,
            mu_rel=args.mu_rel,
            sigma_rel=args.sigma_rel,
            mu_irrel=args.mu_irrel,
            sigma_irrel=args.sigma_irrel,
            n_synth=args.n_synth,
        )
    report = run_adaptive_irf(
        bundle, params, config,
        grid=_parse_floats(args.grid),
        seed=args.seed,
        decoded=decoded,
        q_m=args.q_m,
    )
    _write_report(report, Path(args.out), "adaptive")
    return 0


def _cmd_decode_eval(args) -> int:
    bundle = load_bundle(_data_dir(args))
    post_sweep = _parse_floats(args.post_ms)
    rate_sweep = _parse_floats(args.rate)
    has_raw = any(
        rec.snippet_segment is not None
        for s in bundle.sessions for rec in s.records
    )
    non_default = post_sweep != [2000.0] or rate_sweep != [500.0]
    if non_default and not has_raw:
        raise ValidationError(
            "preprocessing sweeps need raw EEG segments; this bundle has none"
        )

    lines = ["post_ms\trate_hz\tusers\tmean_auc"]
    results = []
    for post_ms in post_sweep:
        for rate in rate_sweep:
            aucs = []
            for user, sess in sorted(bundle.sessions_by_user().items()):
                feats, labels = [], []
                for s in sess:
                    for rec in s.records:
                        for kind, grade in (
                            ("snippet", rec.snippet_grade),
                            ("landing", rec.landing_grade),
                        ):
                            if grade is None:
                                continue
                            segment = getattr(rec, f"{kind}_segment")
                            feature = getattr(rec, f"{kind}_feature")
                            if segment is not None:
                                feature = extract_de(preprocess(segment, post_ms, rate))
                            if feature is None:
                                continue
                            feats.append(flatten_features(feature))
                            labels.append(binarize_grade(grade))
                if not feats:
                    continue
                x = np.vstack(feats)
                y = np.asarray(labels)
                split = int(len(y) * args.train_frac)
                if len(set(y[:split].tolist())) < 2 or len(set(y[split:].tolist())) < 2:
                    continue
                model = train(x[:split], y[:split], DecoderConfig(seed=args.seed))
                aucs.append(auc(model.predict_proba(x[split:]), y[split:]))
            mean_auc = float(np.mean(aucs)) if aucs else float("nan")
            lines.append(f"{post_ms}\t{rate}\t{len(aucs)}\t{mean_auc!r}")
            results.append({
                "post_ms": post_ms, "rate_hz": rate,
                "users": len(aucs), "mean_auc": mean_auc,
            })
            print(f"decode-eval post_ms={post_ms} rate={rate}: AUC {mean_auc:.4f} ({len(aucs)} users)")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "decode_report.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    resolved = {
        "post_ms": post_sweep, "rate_hz": rate_sweep, "train_frac": args.train_frac,
    }
    summary = {
        "mode": "decode-eval",
        "seed": args.seed,
        "config": resolved,
        "fingerprint": config_fingerprint(resolved, args.seed),
        "results": results,
    }
    (out / "decode_summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "run-irf":
            return _cmd_run(args, "irf")
        if args.command == "run-rrf":
            return _cmd_run(args, "rrf")
        if args.command == "run-adaptive":
            return _cmd_run_adaptive(args)
        if args.command == "decode-eval":
            return _cmd_decode_eval(args)
        parser.error(f"unknown command {args.command!r}")
    except ValidationError as exc:
        logger.error("%s", exc)
        return 1
    except BrainRFError as exc:
        logger.error("runtime error: %s", exc)
        return 2
    except Exception as exc:  # unexpected runtime failure
        logger.error("runtime error: %s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
