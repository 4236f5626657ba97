"""Command-line surface: reproducible CSV artifacts plus rendered figures.

Every run writes its fully resolved configuration as config.json next to its
outputs.  Floats are printed with 17 significant digits so doubles round-trip
and repeated runs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import analysis, diophantine, model, oracle
from .errors import ConfigError, JCBlochError

PROG = "jcbloch"


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _echo_config(args: argparse.Namespace, outdir: Path) -> None:
    resolved = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func",) and not callable(v)
    }
    outdir.joinpath("config.json").write_text(
        json.dumps(resolved, indent=2, sort_keys=True, default=str) + "\n", encoding="ascii"
    )


def _outdir(args: argparse.Namespace) -> Path:
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    _echo_config(args, out)
    return out


def _params(args: argparse.Namespace) -> model.ModelParams:
    try:
        return model.ModelParams(l=args.l, g=args.g, omega=args.omega, beta=args.beta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _series_config(args: argparse.Namespace) -> model.SeriesConfig:
    try:
        return model.SeriesConfig(tail_tolerance=args.tail_tol, max_terms=args.max_terms)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _beta_grid(args: argparse.Namespace) -> list[float]:
    if args.beta_count == 0:
        return []
    return analysis.log_beta_grid(args.beta_min, args.beta_max, args.beta_count)


def _add_model_flags(p: argparse.ArgumentParser, beta: float = 1.0) -> None:
    p.add_argument("--l", type=int, default=2, help="photon multiplicity")
    p.add_argument("--g", type=float, default=1.0, help="coupling strength")
    p.add_argument("--omega", type=float, default=1.0, help="photon angular frequency")
    p.add_argument("--beta", type=float, default=beta, help="inverse temperature (inf for T=0)")
    p.add_argument("--tail-tol", type=float, default=1e-12, help="series tail tolerance")
    p.add_argument("--max-terms", type=int, default=10_000, help="series term cap")


def _add_grid_flags(p: argparse.ArgumentParser, count: int = 100) -> None:
    p.add_argument("--beta-min", type=float, default=0.5)
    p.add_argument("--beta-max", type=float, default=5.0)
    p.add_argument("--beta-count", type=int, default=count, help="log-spaced grid size (0 = empty)")


def cmd_simulate(args: argparse.Namespace) -> int:
    out = _outdir(args)
    params = _params(args)
    cfg = _series_config(args)
    if args.continuous:
        t = np.linspace(0.0, args.t_max, args.points)
        l1, _, l3 = model.l_series(t, params, cfg)
        sx, sy, sz = l1, np.zeros_like(l1), l3
    else:
        plan = analysis.SamplingPlan(args.dt, args.n, args.s)
        t = plan.times()
        if not plan.pseudorandom_ok():
            print(f"note: step {plan.step:g} is outside the pseudorandom window", file=sys.stderr)
        l1, _, l3 = model.l_series(t, params, cfg)
        sx, sy, sz = l1, np.zeros_like(l1), l3
    _write_csv(
        out / "frames.csv",
        ("n", "t", "sx", "sy", "sz"),
        ((n, t[n], sx[n], sy[n], sz[n]) for n in range(len(t))),
    )
    if args.plot:
        from . import plotting

        label = f"l={params.l}, beta={params.beta:g}"
        plotting.save_cloud_figure(np.column_stack([sx, sz]), out / "trajectory.svg", title=label)
    print(f"wrote {len(t)} frames to {out / 'frames.csv'}")
    return 0


def cmd_scan(args: argparse.Namespace) -> int:
    out = _outdir(args)
    params = _params(args)
    cfg = _series_config(args)
    defaults = analysis.DEFAULT_SCHEDULES.get(args.l)
    eps0 = args.eps0 if args.eps0 is not None else (defaults and defaults[0])
    c0 = args.c0 if args.c0 is not None else (defaults and defaults[1])
    if eps0 is None or c0 is None:
        raise ConfigError(f"--eps0 and --c0 are required for l={args.l} (no built-in schedule)")
    sched = analysis.EpsilonSchedule(eps0, c0, args.n0)
    plan = analysis.SamplingPlan(args.dt, 0)
    grid = _beta_grid(args)
    hits = analysis.zero_scan(params, plan, sched, grid, cfg, jobs=args.jobs)
    _write_csv(out / "hits.csv", ("beta", "n", "t", "sx", "sz"), hits)
    if args.plot:
        from . import plotting

        plotting.save_scan_figure(
            [h.beta for h in hits], [h.sx for h in hits], out / "scan.svg", title=f"l={args.l}"
        )
    print(f"wrote {len(hits)} hits over {len(grid)} beta values to {out / 'hits.csv'}")
    return 0


def cmd_weyl(args: argparse.Namespace) -> int:
    out = _outdir(args)
    plan = analysis.SamplingPlan(args.dt, args.n, args.s)
    analysis.weyl_discrepancy(plan, args.m_max)  # raises DegenerateStep on resonance
    rows = []
    worst_gap = 0.0
    for m in range(1, args.m_max + 1):
        direct = analysis.weyl_sum_direct(plan, m)
        closed = analysis.weyl_sum_closed_form(plan, m)
        worst_gap = max(worst_gap, abs(direct - closed))
        rows.append((m, abs(direct)))
    _write_csv(out / "weyl.csv", ("m", "magnitude"), rows)
    print(
        f"max magnitude {max(r[1] for r in rows):.6e} over m<= {args.m_max}; "
        f"closed-form gap {worst_gap:.3e}"
    )
    return 0


def cmd_scale_check(args: argparse.Namespace) -> int:
    out = _outdir(args)
    params = _params(args)
    cfg = _series_config(args)
    metric = analysis.CloudMetricConfig(bins=args.bins, scale_threshold=args.threshold)
    plan = analysis.SamplingPlan(args.dt, args.n, args.s)
    result = analysis.scale_invariance_check(params, plan, cfg, metric, args.control_beta)
    rows = [
        ("scale_distance", result.distance, result.passed),
        ("control_distance", result.control_distance, result.control_separated),
        ("threshold", result.threshold, True),
    ]
    _write_csv(out / "distances.csv", ("name", "value", "pass"), rows)
    ok = result.passed and result.control_separated
    print(
        f"scale distance {result.distance:.4f} (threshold {result.threshold:g}), "
        f"control {result.control_distance:.4f}: {'ok' if ok else 'FAIL'}"
    )
    return 0 if ok else 1


def cmd_cf(args: argparse.Namespace) -> int:
    out = _outdir(args)
    cf = diophantine.expand_surd(args.m, args.k, args.count)
    convs = diophantine.convergents(cf)
    _write_csv(
        out / "cf.csv",
        ("index", "quotient", "p", "q"),
        ((i, cf.quotients[i], convs[i].p, convs[i].q) for i in range(len(cf.quotients))),
    )
    tail = ", ".join(str(a) for a in cf.quotients[1:])
    print(f"sqrt({args.m})/{args.k} = [{cf.quotients[0]}; {tail}]"
          + (" (terminates)" if cf.terminated else ""))
    return 0


def _candidate_spec(args: argparse.Namespace) -> diophantine.CandidateSpec:
    if args.k_range:
        ranges = []
        for spec in args.k_range:
            try:
                k, lo, hi = (int(part) for part in spec.split(":"))
            except ValueError as exc:
                raise ConfigError(f"--k-range expects K:LO:HI, got {spec!r}") from exc
            ranges.append((k, lo, hi))
        return diophantine.CandidateSpec(l=args.l, k_ranges=tuple(ranges), enumeration_cap=args.cap)
    spec = diophantine.default_candidate_spec(args.l)
    if args.cap != spec.enumeration_cap:
        spec = replace(spec, enumeration_cap=args.cap)
    return spec


def cmd_candidates(args: argparse.Namespace) -> int:
    out = _outdir(args)
    cset = diophantine.build_candidate_set(_candidate_spec(args))
    diophantine.save_candidate_set(cset, out / "candidates.txt")
    print(f"{len(cset)} candidates -> {out / 'candidates.txt'}")
    return 0


def cmd_filter(args: argparse.Namespace) -> int:
    out = _outdir(args)
    params = model.ModelParams(l=args.l, beta=args.beta)
    if args.candidates:
        cset = diophantine.load_candidate_set(args.candidates)
    else:
        cset = diophantine.build_candidate_set(_candidate_spec(args))
    fspec = diophantine.FilterSpec(
        beta=args.beta,
        epsilon=args.epsilon if args.epsilon is not None else diophantine.default_filter_spec(args.l).epsilon,
        time_divisor_squared=args.time_divisor_squared,
    )
    kept = diophantine.filter_candidates(cset, params, fspec)
    diophantine.save_candidate_set(kept, out / "mtilde.txt")
    bound = diophantine.sz_bound_after_filter(args.l, fspec)
    print(f"kept {len(kept)} of {len(cset)} candidates (|S_z| bound {bound:.4g}) -> {out / 'mtilde.txt'}")
    return 0


def cmd_curves(args: argparse.Namespace) -> int:
    out = _outdir(args)
    cfg = _series_config(args)
    if args.mtilde:
        kept = diophantine.load_candidate_set(args.mtilde)
    else:
        cset = diophantine.build_candidate_set(_candidate_spec(args))
        fspec = diophantine.FilterSpec(
            beta=args.filter_beta,
            epsilon=args.epsilon if args.epsilon is not None else diophantine.default_filter_spec(args.l).epsilon,
            time_divisor_squared=args.time_divisor_squared,
        )
        kept = diophantine.filter_candidates(cset, model.ModelParams(l=args.l, beta=args.filter_beta), fspec)
    grid = [model.ModelParams(l=args.l, beta=beta) for beta in _beta_grid(args)]
    rows = diophantine.blue_curves(kept, grid, cfg, args.time_divisor_squared)
    _write_csv(out / "curves.csv", ("beta", "q", "sx"), rows)
    if args.plot:
        from . import plotting

        plotting.save_curves_figure(rows, out / "curves.svg", title=f"l={args.l}")
    print(f"wrote {len(rows)} curve points for {len(kept)} candidates to {out / 'curves.csv'}")
    return 0


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _parse_ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def cmd_oracle_verify(args: argparse.Namespace) -> int:
    out = _outdir(args)
    cfg = _series_config(args)
    rows = []
    all_ok = True
    for l in _parse_ints(args.l_values):
        for beta in _parse_floats(args.beta_values):
            params = model.ModelParams(l=l, g=args.g, omega=args.omega, beta=beta)
            trunc = oracle.truncation_for(params, args.weight_tol)
            worst = 0.0
            for t in _parse_floats(args.t_values):
                expect = oracle.evolve_and_trace(params, trunc, t, args.weight_tol)
                got = model.bloch_propagate(model.BlochVector(1.0, 0.0, 0.0), t, params, cfg)
                worst = max(
                    worst,
                    abs(expect.sx - got.sx),
                    abs(expect.sy - got.sy),
                    abs(expect.sz - got.sz),
                )
            ok = worst <= args.tol
            all_ok &= ok
            rows.append((f"oracle_l{l}_beta{beta:g}", worst, args.tol, ok))
    _write_csv(out / "report.csv", ("check", "value", "threshold", "pass"), rows)
    print(f"oracle agreement: worst {max(r[1] for r in rows):.3e} "
          f"({'all pass' if all_ok else 'FAILURES'})")
    return 0 if all_ok else 1


def _verify_rows(args: argparse.Namespace) -> list[tuple[str, float, float, bool]]:
    cfg = _series_config(args)
    rows: list[tuple[str, float, float, bool]] = []

    golden = {
        (3, 12): (3691, 2131), (3, 13): (5042, 2911), (3, 14): (13775, 7953),
        (2, 12): (47321, 33461), (2, 13): (114243, 80782), (2, 14): (275807, 195025),
    }
    bad = 0
    for (m, idx), expect in golden.items():
        convs = diophantine.convergents(diophantine.expand_surd(m, 1, idx))
        bad += convs[idx] != expect
    rows.append(("continued_fraction_goldens", float(bad), 0.0, bad == 0))

    d_vals = [model.eigen_d(n, model.ModelParams(l=2)) for n in range(3)]
    d_ok = d_vals == [2.0, 6.0, 12.0]
    rows.append(("ladder_eigenvalue_goldens", 0.0 if d_ok else 1.0, 0.0, d_ok))

    params = _params(args)
    trunc = oracle.truncation_for(params, args.weight_tol)
    worst = 0.0
    for t in (0.5, 1.0, 5.0, 20.0, 40.0):
        expect = oracle.evolve_and_trace(params, trunc, t, args.weight_tol)
        got = model.bloch_propagate(model.BlochVector(1.0, 0.0, 0.0), t, params, cfg)
        worst = max(worst, abs(expect.sx - got.sx), abs(expect.sy - got.sy), abs(expect.sz - got.sz))
    rows.append(("oracle_agreement", worst, 1e-8, worst <= 1e-8))

    plan = analysis.SamplingPlan(args.dt, min(args.n, 100_000))
    gap = 0.0
    for m in range(1, 9):
        gap = max(gap, abs(analysis.weyl_sum_direct(plan, m) - analysis.weyl_sum_closed_form(plan, m)))
    rows.append(("weyl_closed_form_gap", gap, 1e-12, gap <= 1e-12))

    form_gap = 0.0
    for t in np.linspace(0.0, 40.0, 81):
        form_gap = max(form_gap, abs(model.l3_cosine_form(float(t), replace(params, g=1.0, omega=1.0), cfg)
                                     - model.l_coefficients(float(t), replace(params, g=1.0, omega=1.0), cfg).l3))
    rows.append(("l3_form_equivalence", form_gap, 2.0 * cfg.tail_tolerance, form_gap <= 2.0 * cfg.tail_tolerance))

    metric = analysis.CloudMetricConfig(bins=args.bins)
    plan = analysis.SamplingPlan(args.dt, args.n, args.s)
    res = analysis.scale_invariance_check(params, plan, cfg, metric, args.control_beta)
    rows.append(("scale_distance", res.distance, res.threshold, res.passed))
    rows.append(("scale_control_distance", res.control_distance, res.threshold, res.control_separated))

    cloud = analysis.sample_cloud(params, analysis.SamplingPlan(args.dt, args.n), cfg)
    asym = analysis.reflection_asymmetry(cloud, metric.bins)
    if params.l == 3:
        rows.append(("reflection_asymmetry", asym, metric.symmetry_threshold, asym > metric.symmetry_threshold))
    else:
        rows.append(("reflection_asymmetry", asym, metric.symmetry_threshold, asym < metric.symmetry_threshold))
    return rows


def cmd_verify(args: argparse.Namespace) -> int:
    out = _outdir(args)
    rows = _verify_rows(args)
    _write_csv(out / "report.csv", ("check", "value", "threshold", "pass"), rows)
    all_ok = all(r[3] for r in rows)
    for name, value, threshold, ok in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<28} value={value:.6g} threshold={threshold:g}")
    return 0 if all_ok else 1


def build_parser() -> tuple[argparse.ArgumentParser, argparse._SubParsersAction]:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Thermal multiphoton Jaynes-Cummings Bloch dynamics and Diophantine time prediction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def new_command(name: str, func, help_text: str, outdir: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None, help="JSON file of flag defaults")
        p.add_argument("--outdir", type=str, default=outdir, help="output directory")
        p.set_defaults(func=func)
        return p

    p = new_command("simulate", cmd_simulate, "sample a Bloch trajectory", "jcbloch-out/simulate")
    _add_model_flags(p)
    p.add_argument("--dt", type=float, default=4.0)
    p.add_argument("--n", type=int, default=400_000, help="number of steps (frames = n+1)")
    p.add_argument("--s", type=float, default=None, help="optional step scale factor")
    p.add_argument("--continuous", action="store_true", help="dense curve instead of discrete cloud")
    p.add_argument("--t-max", type=float, default=40.0, help="continuous-mode end time")
    p.add_argument("--points", type=int, default=4001, help="continuous-mode sample count")
    p.add_argument("--plot", action="store_true", help="also render trajectory.svg")

    p = new_command("scan", cmd_scan, "near-zero S_z scan over temperatures", "jcbloch-out/scan")
    _add_model_flags(p, beta=2.0)
    p.add_argument("--dt", type=float, default=4.0)
    _add_grid_flags(p)
    p.add_argument("--eps0", type=float, default=None, help="threshold at beta >= 2 (default per l)")
    p.add_argument("--c0", type=float, default=None, help="threshold growth rate (default per l)")
    p.add_argument("--n0", type=int, default=1_000_000, help="base sample count")
    p.add_argument("--jobs", type=int, default=1, help="worker threads over the beta grid")
    p.add_argument("--plot", action="store_true", help="also render scan.svg")

    p = new_command("weyl", cmd_weyl, "equidistribution exponential sums", "jcbloch-out/weyl")
    p.add_argument("--dt", type=float, default=4.0)
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--m-max", type=int, default=8)

    p = new_command("scale-check", cmd_scale_check, "cloud scale-invariance test", "jcbloch-out/scale-check")
    _add_model_flags(p)
    p.add_argument("--dt", type=float, default=4.0)
    p.add_argument("--n", type=int, default=400_000)
    p.add_argument("--s", type=float, default=1.2)
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--threshold", type=float, default=analysis.CloudMetricConfig().scale_threshold)
    p.add_argument("--control-beta", type=float, default=None, help="control temperature (default 2*beta)")

    p = new_command("cf", cmd_cf, "continued fraction of sqrt(m)/k", "jcbloch-out/cf")
    p.add_argument("--m", type=int, required=True, help="radicand")
    p.add_argument("--k", type=int, default=1, help="divisor")
    p.add_argument("--count", type=int, default=20, help="quotients after the integer part")

    p = new_command("candidates", cmd_candidates, "build the candidate denominator set", "jcbloch-out/candidates")
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--cap", type=int, default=2000, help="enumeration cap when sqrt(l+1) is an integer")
    p.add_argument("--k-range", action="append", default=None, metavar="K:LO:HI",
                   help="override convergent index window (repeatable)")

    p = new_command("filter", cmd_filter, "keep candidates passing the near-zero test", "jcbloch-out/filter")
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--epsilon", type=float, default=None, help="|S_z| target (default per l)")
    p.add_argument("--time-divisor-squared", type=int, default=1)
    p.add_argument("--candidates", type=str, default=None, help="load candidates from file instead of building")
    p.add_argument("--cap", type=int, default=2000)
    p.add_argument("--k-range", action="append", default=None, metavar="K:LO:HI")

    p = new_command("curves", cmd_curves, "S_x curves at the filtered times", "jcbloch-out/curves")
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--filter-beta", type=float, default=2.0, help="temperature used by the membership filter")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--time-divisor-squared", type=int, default=1)
    p.add_argument("--mtilde", type=str, default=None, help="load filtered set from file")
    p.add_argument("--cap", type=int, default=2000)
    p.add_argument("--k-range", action="append", default=None, metavar="K:LO:HI")
    _add_grid_flags(p, count=40)
    p.add_argument("--tail-tol", type=float, default=1e-12)
    p.add_argument("--max-terms", type=int, default=10_000)
    p.add_argument("--plot", action="store_true", help="also render curves.svg")

    p = new_command("oracle-verify", cmd_oracle_verify, "closed form vs dense Fock evolution", "jcbloch-out/oracle-verify")
    p.add_argument("--l-values", type=str, default="1,2,3,4")
    p.add_argument("--beta-values", type=str, default="0.5,1,2,5")
    p.add_argument("--t-values", type=str, default="0.5,1,5,20,40")
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--weight-tol", type=float, default=1e-12)
    p.add_argument("--tail-tol", type=float, default=1e-12)
    p.add_argument("--max-terms", type=int, default=10_000)

    p = new_command("verify", cmd_verify, "composite checks with a machine-readable report", "jcbloch-out/verify")
    _add_model_flags(p)
    p.add_argument("--dt", type=float, default=4.0)
    p.add_argument("--n", type=int, default=400_000)
    p.add_argument("--s", type=float, default=1.2)
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--control-beta", type=float, default=None)
    p.add_argument("--weight-tol", type=float, default=1e-12)

    return parser, sub


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
            if not isinstance(data, dict):
                raise ConfigError(f"config file {args.config} must hold a JSON object")
            chosen = sub.choices[args.command]
            valid = {action.dest for action in chosen._actions}
            unknown = sorted(set(data) - valid)
            if unknown:
                raise ConfigError(f"unknown config keys for '{args.command}': {', '.join(unknown)}")
            chosen.set_defaults(**data)
            args = parser.parse_args(argv)  # flags still override file values
        return args.func(args)
    except JCBlochError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
