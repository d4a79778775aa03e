"""Command-line driver: ``qa-volume run|list|describe``.

Exit codes: 0 success, 2 configuration error, 3 the run finished but some
result was undersampled or degenerate.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import subprocess
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .circuit import ConfigError
from .presets import PRESETS, Outcome, resolve

log = logging.getLogger("qa_volume")

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE = 0, 2, 3


def _run_chunk(args):
    name, cfg, jobs = args
    work = PRESETS[name].work
    return [work(cfg, pt, i) for pt, i in jobs]


def thread_count(flag: int | None) -> int:
    if flag is not None:
        n = flag
    elif os.environ.get("QA_VOLUME_THREADS"):
        try:
            n = int(os.environ["QA_VOLUME_THREADS"])
        except ValueError:
            raise ConfigError("QA_VOLUME_THREADS must be an integer") from None
    else:
        n = os.cpu_count() or 1
    if n < 1:
        raise ConfigError("thread count must be >= 1")
    return n


def execute(name: str, cfg: dict, threads: int = 1) -> Outcome:
    """Run every job of a resolved preset and reduce the results in job order."""
    pre = PRESETS[name]
    jobs = pre.jobs(cfg)
    if threads <= 1 or len(jobs) < 2:
        results = _run_chunk((name, cfg, jobs))
    else:
        size = max(1, len(jobs) // (4 * threads))
        chunks = [jobs[i:i + size] for i in range(0, len(jobs), size)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = [r for part in pool.map(_run_chunk, [(name, cfg, c) for c in chunks]) for r in part]
    return pre.reduce(cfg, list(zip(jobs, results)))


def git_describe() -> str:
    try:
        res = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True, text=True, timeout=10,
                             cwd=Path(__file__).resolve().parent)
        return res.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def write_outputs(out_dir: Path, name: str, cfg: dict, outcome: Outcome, wall: float) -> list[str]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for key, text in outcome.tables.items():
        (out_dir / f"{key}.csv").write_text(text)
        written.append(f"{key}.csv")
    for key, fit in outcome.fits.items():
        (out_dir / f"fit_{key}.json").write_text(fit.to_json() + "\n")
        written.append(f"fit_{key}.json")
    for key, doc in outcome.documents.items():
        (out_dir / f"{key}.json").write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
        written.append(f"{key}.json")
    manifest = {
        "preset": name,
        "config": cfg,
        "seed": cfg["seed"],
        "version": __version__,
        "git": git_describe(),
        "wall_time_s": round(wall, 3),
        "flags": outcome.flags,
        "outputs": written,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return written


def _overrides(ns) -> dict:
    ov = {}
    if ns.config:
        try:
            ov.update(json.loads(Path(ns.config).read_text()))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {ns.config}: {e}") from None
    for key in ("L", "p", "T", "samples", "seed", "boundary"):
        v = getattr(ns, key)
        if v is not None:
            ov[key] = v
    if ns.realizations is not None:
        ov["samples"] = ns.realizations
    return ov


def cmd_run(ns) -> int:
    name = ns.preset_opt or ns.preset
    if not name:
        raise ConfigError("no preset given")
    cfg = resolve(name, _overrides(ns))
    threads = thread_count(ns.threads)
    out_dir = Path(ns.out or Path("results") / name)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as e:
        raise ConfigError(f"output directory {out_dir} is not writable: {e}") from None
    log.info("running %s with %d worker(s)", name, threads)
    t0 = time.perf_counter()
    outcome = execute(name, cfg, threads)
    written = write_outputs(out_dir, name, cfg, outcome, time.perf_counter() - t0)
    for f, fit in outcome.fits.items():
        print(f"{f}: exponent {fit.exponent:.4f} +- {fit.stderr:.4f} over {list(fit.fit_range)}")
    for key, doc in outcome.documents.items():
        if key in ("report", "crossings", "crossover", "alpha"):
            print(f"{key}: {json.dumps(doc, sort_keys=True)}")
    print(f"wrote {len(written)} files to {out_dir}")
    for flag in outcome.flags:
        print(f"warning: {flag}", file=sys.stderr)
    return EXIT_DEGENERATE if outcome.flags else EXIT_OK


def cmd_list(ns) -> int:
    width = max(len(n) for n in PRESETS)
    for name, pre in PRESETS.items():
        print(f"{name:<{width}}  {pre.summary}")
    return EXIT_OK


def cmd_describe(ns) -> int:
    if ns.preset not in PRESETS:
        raise ConfigError(f"unknown preset {ns.preset!r}")
    pre = PRESETS[ns.preset]
    print(f"{pre.name}: {pre.summary}")
    print(f"  measures : {pre.anchor}")
    print(f"  reference: {pre.expected}")
    print(f"  engine   : {pre.engine}")
    print("  defaults :")
    for k, v in pre.defaults.items():
        print(f"    {k} = {v}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qa-volume", description="Hybrid QA Clifford circuit experiments")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset")
    run.add_argument("preset", nargs="?")
    run.add_argument("-e", "--preset", dest="preset_opt")
    run.add_argument("--L", type=int)
    run.add_argument("--p", type=float)
    run.add_argument("--T", type=int)
    run.add_argument("--samples", type=int)
    run.add_argument("--realizations", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--boundary", choices=["periodic", "open"])
    run.add_argument("--out")
    run.add_argument("--threads", type=int)
    run.add_argument("--config", help="JSON file of preset option overrides")
    run.set_defaults(func=cmd_run)

    ls = sub.add_parser("list", help="list presets")
    ls.set_defaults(func=cmd_list)

    de = sub.add_parser("describe", help="describe one preset")
    de.add_argument("preset")
    de.set_defaults(func=cmd_describe)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    try:
        return ns.func(ns)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
