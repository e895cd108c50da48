"""Command-line driver: ``sparse-fourier run`` and ``sparse-fourier bench``.

Signal files are line oriented::

    dim 1
    band 4096
    term 17 1.0 0.0        # frequency (D integers for D > 1), re, im
    noise 16 0.5 7         # count, l1 budget, seed
    oob 5000 0.01 0.0      # out-of-band tone (1-D only)
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .crt import in_band
from .measurement import MeasurementPlan
from .multidim import multidim_approximate
from .oracle import verify_bound
from .primes import (
    InfeasibleError,
    ParameterError,
    predicted_row_bound,
    rand_full_band_sample_bound,
    rand_identification_sample_bound,
    full_band_sample_bound,
    identification_sample_bound,
)
from .recovery import (
    Params,
    fourier_approximate_1,
    fourier_approximate_2,
    full_band_plan,
    tensor_plan,
)
from .sampling import TrigPolynomial, fast_multiply

ALGORITHMS = ("alg1", "alg2det", "alg2rand", "alg3det", "alg3rand", "multidim")

EXIT_OK, EXIT_BOUND, EXIT_USAGE = 0, 1, 2


class SpecError(ValueError):
    pass


@dataclass
class SignalSpec:
    dimension: int = 1
    bandwidth: int | None = None
    terms: dict = field(default_factory=dict)
    noise: tuple | None = None
    out_of_band: dict = field(default_factory=dict)

    @property
    def tail_l1(self) -> float:
        return float(sum(abs(c) for c in self.out_of_band.values()))


def _number(tok: str, lineno: int, kind=float):
    try:
        return kind(tok)
    except ValueError:
        raise SpecError(f"line {lineno}: cannot read {tok!r} as {kind.__name__}") from None


def parse_signal_spec(text: str) -> SignalSpec:
    spec = SignalSpec()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        if key == "dim":
            if len(args) != 1:
                raise SpecError(f"line {lineno}: 'dim' takes one integer")
            spec.dimension = _number(args[0], lineno, int)
            if spec.dimension < 1:
                raise SpecError(f"line {lineno}: dimension must be positive")
        elif key == "band":
            if len(args) != 1:
                raise SpecError(f"line {lineno}: 'band' takes one integer")
            spec.bandwidth = _number(args[0], lineno, int)
        elif key in ("term", "oob"):
            D = spec.dimension if key == "term" else 1
            if len(args) != D + 2:
                raise SpecError(f"line {lineno}: '{key}' needs {D} frequency value(s), re and im")
            freq = tuple(_number(a, lineno, int) for a in args[:D])
            coef = complex(_number(args[D], lineno), _number(args[D + 1], lineno))
            target = spec.terms if key == "term" else spec.out_of_band
            w = freq if D > 1 else freq[0]
            target[w] = target.get(w, 0j) + coef
        elif key == "noise":
            if len(args) != 3:
                raise SpecError(f"line {lineno}: 'noise' takes count, l1 budget and seed")
            spec.noise = (_number(args[0], lineno, int), _number(args[1], lineno), _number(args[2], lineno, int))
        else:
            raise SpecError(f"line {lineno}: unknown keyword {key!r}")
    _validate(spec)
    return spec


def _validate(spec: SignalSpec):
    if spec.bandwidth is None:
        return
    if spec.dimension == 1:
        bad = [w for w in spec.terms if not in_band(w, spec.bandwidth)]
        if bad:
            raise SpecError(f"term frequencies {bad[:3]} lie outside the band")
        inside = [w for w in spec.out_of_band if in_band(w, spec.bandwidth)]
        if inside:
            raise SpecError(f"oob frequencies {inside[:3]} lie inside the band")
    else:
        half = spec.bandwidth / 2
        bad = [w for w in spec.terms if any(abs(v) > half for v in w)]
        if bad:
            raise SpecError(f"lattice terms {bad[:3]} lie outside [-M/2, M/2]")
        if spec.out_of_band or spec.noise:
            raise SpecError("oob and noise lines are only supported in one dimension")


def build_signal(spec: SignalSpec) -> tuple[TrigPolynomial, dict]:
    """The oracle for ``spec`` plus the in-band reference coefficients."""
    if spec.dimension > 1:
        poly = TrigPolynomial(spec.terms, dimension=spec.dimension, declared_bandwidth=spec.bandwidth)
        return poly, dict(poly.terms)
    poly = TrigPolynomial(spec.terms, dimension=1, declared_bandwidth=spec.bandwidth)
    if spec.noise is not None:
        count, budget, seed = spec.noise
        poly = poly.with_noise(spec.bandwidth, count, budget, np.random.default_rng(seed))
    reference = dict(poly.terms)
    if spec.out_of_band:
        poly = poly.plus(spec.out_of_band)
    return poly, reference


def _random_spec(N: int, k: int, seed: int, dims: int) -> SignalSpec:
    rng = np.random.default_rng(seed)
    if dims == 1:
        poly = TrigPolynomial.random_sparse(N, k, rng)
        return SignalSpec(1, N, dict(poly.terms))
    half = N // 2
    terms = {}
    while len(terms) < k:
        w = tuple(int(v) for v in rng.integers(-half, half + 1, size=dims))
        terms[w] = complex(np.exp(1j * rng.uniform(0, 2 * math.pi)))
    return SignalSpec(dims, N, terms)


def _write_rows(path, header, rows):
    handle = sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if handle is not sys.stdout:
            handle.close()


def _alg1(poly, spec, plan: MeasurementPlan) -> tuple[list, dict]:
    """Fast multiply only; checks every entry against the aliasing identity."""
    spectra = fast_multiply(poly, plan)
    inside = {w: c for w, c in poly.terms.items() if in_band(w, spec.bandwidth)}
    worst, rows = 0.0, []
    for u in spectra.lengths:
        expect = np.zeros(u, dtype=complex)
        for w, c in inside.items():
            expect[w % u] += c
        worst = max(worst, float(np.max(np.abs(spectra[u] - expect))))
        rows.extend([u, h, repr(float(v.real)), repr(float(v.imag))] for h, v in enumerate(spectra[u]))
    tail = spec.tail_l1
    report = {
        "max_alias_deviation": worst,
        "tail_l1": tail,
        "satisfied": worst <= tail + 1e-9 * (1 + tail),
        "samples": spectra.sample_count,
        "sampling_seconds": spectra.sampling_seconds,
        "recovery_seconds": 0.0,
    }
    return rows, report


def run_pipeline(algorithm: str, spec: SignalSpec, k: int, epsilon_inv: int, *, c=None,
                 sigma: float = 0.9, seed: int | None = None, randomized: bool = False) -> tuple[list, list, dict]:
    """Execute one algorithm; returns (csv header, csv rows, report dict)."""
    if algorithm not in ALGORITHMS:
        raise SpecError(f"unknown algorithm {algorithm!r}")
    if spec.bandwidth is None:
        raise SpecError("bandwidth is not set (use a 'band' line or --n/--bandwidth)")
    poly, reference = build_signal(spec)
    report = {"algorithm": algorithm, "k": k, "epsilon_inv": epsilon_inv, "c": c, "sigma": sigma, "seed": seed,
              "dimension": spec.dimension, "bandwidth": spec.bandwidth}

    if algorithm == "multidim":
        if spec.dimension < 2:
            raise SpecError("multidim needs a signal with dim >= 2")
        result = multidim_approximate(poly, spec.bandwidth, k, epsilon_inv, randomized=randomized,
                                      sigma=sigma, seed=seed, c=c)
        err = verify_bound(result, reference, k, epsilon_inv, 0.0)
        header = [f"x{d + 1}" for d in range(spec.dimension)] + ["re", "im"]
        rows = [list(x) + [repr(v.real), repr(v.imag)] for x, v in sorted(result.entries.items())]
        stats = result.stats
        report.update(mode="randomized" if randomized else "deterministic", N_tilde=result.flat.N)
    else:
        if spec.dimension != 1:
            raise SpecError(f"{algorithm} needs a one-dimensional signal")
        params = Params(k, epsilon_inv, spec.bandwidth)
        randomized = algorithm.endswith("rand")
        if algorithm in ("alg1", "alg2det", "alg2rand"):
            plan = full_band_plan(params, randomized=randomized, c=c, sigma=sigma, seed=seed)
        else:
            plan = tensor_plan(params, randomized=randomized, c=c, sigma=sigma, seed=seed)
        report.update(s1=plan.s.s1, K=plan.s.K, draws=plan.weight, row_count=plan.row_count,
                      t=list(plan.t.values) if plan.t is not None else [])
        if algorithm == "alg1":
            rows, extra = _alg1(poly, spec, plan)
            report.update(extra)
            return ["u", "h", "re", "im"], rows, report
        run = fourier_approximate_1 if algorithm.startswith("alg2") else fourier_approximate_2
        result = run(poly, params, plan)
        err = verify_bound(result, reference, k, epsilon_inv, spec.tail_l1)
        header = ["omega", "re", "im"]
        rows = [[w, repr(v.real), repr(v.imag)] for w, v in sorted(result.entries.items())]
        stats = result.stats
    report.update(err.as_dict())
    report.update(samples=stats.samples, sampling_seconds=stats.sampling_seconds,
                  recovery_seconds=stats.recovery_seconds, frequencies_estimated=stats.frequencies_estimated)
    return header, rows, report


def _load_spec(args) -> SignalSpec:
    if args.signal:
        try:
            text = Path(args.signal).read_text(encoding="utf-8")
        except OSError as exc:
            raise SpecError(f"cannot read signal file: {exc}") from None
        spec = parse_signal_spec(text)
    else:
        N = args.bandwidth if args.dims > 1 else args.n
        if N is None:
            raise SpecError("give --signal, or --n (1-D) / --bandwidth (D > 1)")
        spec = _random_spec(N, args.k, 0 if args.seed is None else args.seed, args.dims)
    if args.n is not None and spec.dimension == 1:
        spec.bandwidth = args.n
    if args.bandwidth is not None and spec.dimension > 1:
        spec.bandwidth = args.bandwidth
    _validate(spec)
    return spec


def cmd_run(args) -> int:
    spec = _load_spec(args)
    header, rows, report = run_pipeline(args.algorithm, spec, args.k, args.epsilon_inv, c=args.c,
                                        sigma=args.sigma, seed=args.seed, randomized=args.randomized)
    _write_rows(args.out, header, rows)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    else:
        print(text, file=sys.stderr)
    return EXIT_OK if report["satisfied"] else EXIT_BOUND


def parse_bench_grid(text: str) -> list[tuple[int, int, int, str]]:
    """Lines of ``N k epsilon_inv algorithm``; ``#`` starts a comment."""
    grid = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise SpecError(f"line {lineno}: expected 'N k epsilon_inv algorithm'")
        N, k, e = (_number(p, lineno, int) for p in parts[:3])
        if parts[3] not in ALGORITHMS or parts[3] in ("alg1", "multidim"):
            raise SpecError(f"line {lineno}: bench supports alg2det, alg2rand, alg3det, alg3rand")
        grid.append((N, k, e, parts[3]))
    return grid


BENCH_HEADER = ["N", "k", "epsilon_inv", "algorithm", "samples", "sample_bound", "predicted_row_bound",
                "sampling_seconds", "recovery_seconds", "success"]


def sample_bound(algorithm: str, k: int, epsilon_inv: int, N: int, sigma: float, s1: int) -> float:
    """Closed-form evaluation-count bound for an algorithm id."""
    if algorithm == "alg2det":
        return full_band_sample_bound(k, epsilon_inv, N)
    if algorithm == "alg2rand":
        return rand_full_band_sample_bound(k, epsilon_inv, N, sigma)
    if algorithm == "alg3det":
        return identification_sample_bound(k, epsilon_inv, N)
    return rand_identification_sample_bound(k, epsilon_inv, N, sigma, s1)


def cmd_bench(args) -> int:
    if args.bench_grid:
        try:
            grid = parse_bench_grid(Path(args.bench_grid).read_text(encoding="utf-8"))
        except OSError as exc:
            raise SpecError(f"cannot read bench grid: {exc}") from None
    else:
        grid = [(N, args.k, args.epsilon_inv, args.algorithm) for N in (args.n_values or [])]
    rows = []
    seed = 0 if args.seed is None else args.seed
    for N, k, e, alg in grid:
        spec = _random_spec(N, k, seed, 1)
        _, _, rep = run_pipeline(alg, spec, k, e, c=args.c, sigma=args.sigma, seed=seed)
        c = args.c or (14 if alg.endswith("rand") else 4)
        bound = sample_bound(alg, k, e, N, args.sigma, rep["s1"])
        rows.append([N, k, e, alg, rep["samples"], f"{bound:.0f}", predicted_row_bound(k, e, N, c),
                     f"{rep['sampling_seconds']:.6f}", f"{rep['recovery_seconds']:.6f}", int(rep["satisfied"])])
    _write_rows(args.out, BENCH_HEADER, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparse-fourier", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--algorithm", choices=ALGORITHMS, default="alg3det")
        p.add_argument("--n", type=int, help="one-dimensional bandwidth N")
        p.add_argument("--k", type=int, default=4)
        p.add_argument("--epsilon-inv", type=int, default=2)
        p.add_argument("--c", type=int, default=None, help="override the row constant (4 or 14 by default)")
        p.add_argument("--sigma", type=float, default=0.9)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--dims", type=int, default=1)
        p.add_argument("--bandwidth", type=int, help="per-axis bandwidth M for D > 1")
        p.add_argument("--out", help="CSV output file (default stdout)")
        p.add_argument("--randomized", action="store_true", help="randomized plan for the multidim pipeline")

    run = sub.add_parser("run", help="recover one signal")
    common(run)
    run.add_argument("--signal", help="signal spec file")
    run.add_argument("--report", help="JSON report file (default stderr)")
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("bench", help="sweep a parameter grid")
    common(bench)
    bench.add_argument("--bench-grid", help="grid file: 'N k epsilon_inv algorithm' per line")
    bench.add_argument("--n-values", type=int, nargs="*", help="bandwidths to sweep when no grid file is given")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, ParameterError, InfeasibleError) as exc:
        print(f"sparse-fourier: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
