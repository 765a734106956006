"""Command-line interface: reproducible CSV/JSON artifacts for every experiment.

Subcommands: spectrum, amplitudes, fidelity, perturb, transfer-time, scan,
verify.  Every run writes a CSV (or JSON) data file starting with a comment
header naming the resolved chain spec and the tool version, plus a JSON
run-manifest with the full configuration and wall time.  Exit codes: 0 on
success, 1 on validation errors, 2 when the verification suite fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .amplitudes import channel_occupation, propagator, two_particle
from .chain import ChainSpec, build_single_particle
from .fidelity import (
    average_fidelity_approx,
    average_fidelity_exact,
    haar_average_mc,
    worst_case_fidelity,
)
from .perturbation import (
    perturbative_energies,
    rabi_frequencies,
    transfer_time_estimate,
)
from .protocol import find_transfer_time, scan as run_scan
from .sector_oracle import (
    SectorBasis,
    TwoQubitState,
    build_sector_hamiltonians,
    evolve,
    reduced_receiver_state,
)
from .spectral import classify_chain, diagonalize, localization_profile, localized_indices


class CliError(Exception):
    """Validation problem that should terminate with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _parse_list(text, cast=float):
    parts = [p for chunk in str(text).split(",") for p in chunk.split()]
    return [cast(p) for p in parts if p]


def _load_config(path):
    """Flat key = value config file; '#' starts a comment, lists are
    comma- or space-separated."""
    values = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise CliError(
                        f"{path}:{lineno}: expected 'key = value', got {line!r}"
                    )
                key, val = (part.strip() for part in line.split("=", 1))
                values[key.replace("-", "_")] = val
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}")
    return values


def _resolve_spec(args) -> ChainSpec:
    cfg = _load_config(args.config) if getattr(args, "config", None) else {}
    allowed = {"N", "h", "couplings", "fields", "senders", "receivers", "barriers"}
    for key in cfg:
        if key not in allowed:
            raise CliError(f"unknown config key {key!r}")

    def pick(name, flag_value):
        return flag_value if flag_value is not None else cfg.get(name)

    N = pick("N", args.N)
    h = pick("h", args.h)
    if N is None:
        raise CliError("chain length N is required (flag --N or config key N)")
    kwargs = {"N": int(N), "h": float(h) if h is not None else 0.0}
    for name, cast in (
        ("couplings", float),
        ("fields", float),
        ("senders", int),
        ("receivers", int),
        ("barriers", int),
    ):
        raw = pick(name, getattr(args, name, None))
        if raw is not None:
            kwargs[name] = tuple(_parse_list(raw, cast))
    try:
        return ChainSpec(**kwargs)
    except (ValueError, TypeError) as exc:
        raise CliError(f"invalid chain spec: {exc}")


def _spec_dict(spec: ChainSpec) -> dict:
    return {
        "N": spec.N,
        "h": spec.h,
        "couplings": list(spec.couplings),
        "fields": list(spec.fields),
        "senders": list(spec.senders),
        "receivers": list(spec.receivers),
        "barriers": list(spec.barriers),
    }


def _fmt(x):
    if isinstance(x, float):
        if np.isnan(x):
            return "nan"
        return format(x, ".12g")
    return str(x)


def _output_path(args, default_name: str) -> str:
    if args.output:
        return args.output
    outdir = os.environ.get("XXCHAIN_OUTPUT_DIR", ".")
    return os.path.join(outdir, default_name)


def _write_result(args, spec, columns, rows, diagnostics=None, t0=None):
    """Write the data file (CSV or JSON) and its JSON run-manifest."""
    path = _output_path(args, f"{args.subcommand.replace('-', '_')}.csv")
    header_lines = [
        f"# xxchain {__version__} :: {args.subcommand}",
        f"# spec: N={spec.N} h={_fmt(spec.h)} senders={spec.senders} "
        f"receivers={spec.receivers} barriers={spec.barriers}",
    ]
    if args.format == "json":
        if not path.endswith(".json"):
            path = os.path.splitext(path)[0] + ".json"
        payload = {
            "tool": "xxchain",
            "version": __version__,
            "subcommand": args.subcommand,
            "spec": _spec_dict(spec),
            "columns": columns,
            "rows": [[None if isinstance(v, float) and np.isnan(v) else v for v in r] for r in rows],
            "diagnostics": diagnostics or {},
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, default=str)
            fh.write("\n")
    else:
        with open(path, "w") as fh:
            for line in header_lines:
                fh.write(line + "\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    manifest = {
        "tool": "xxchain",
        "version": __version__,
        "subcommand": args.subcommand,
        "spec": _spec_dict(spec),
        "options": {
            k: v
            for k, v in vars(args).items()
            if k not in ("func", "subcommand") and v is not None
        },
        "output": path,
        "wall_time_s": time.perf_counter() - t0 if t0 is not None else None,
        "diagnostics": diagnostics or {},
    }
    with open(path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)
        fh.write("\n")
    print(f"wrote {path}")
    return path


def _time_grid(args):
    if args.t is not None:
        return np.array([args.t])
    if args.steps < 1:
        raise CliError("--steps must be >= 1")
    return np.linspace(args.t0, args.t1, args.steps)


# ---------------------------------------------------------------- subcommands


def _cmd_spectrum(args):
    t0 = time.perf_counter()
    spec = _resolve_spec(args)
    sd = diagonalize(build_single_particle(spec))
    if args.sites:
        sites = _parse_list(args.sites, int)
    else:
        s1, s2 = spec.senders
        r1, r2 = spec.receivers
        sites = [s1, s2, r1, r2]
    weight = localization_profile(sd, sites)
    if args.full:
        sites = list(range(1, spec.N + 1))
    columns = ["k", "eps_k", "edge_weight"] + [f"a_k_{s}" for s in sites]
    rows = []
    for k in range(spec.N):
        row = [k + 1, float(sd.eigenvalues[k]), float(weight[k])]
        row += [float(sd.eigenvectors[k, s - 1]) for s in sites]
        rows.append(row)
    diag = {
        "regime": classify_chain(spec.N),
        "localized_indices": list(localized_indices(spec.N)),
    }
    _write_result(args, spec, columns, rows, diag, t0)
    return 0


def _cmd_amplitudes(args):
    t0 = time.perf_counter()
    spec = _resolve_spec(args)
    sd = diagonalize(build_single_particle(spec))
    s1, s2 = spec.senders
    r1, r2 = spec.receivers
    f_entries = [tuple(_parse_list(s, int)) for s in (args.f or [])]
    g_entries = [tuple(_parse_list(s, int)) for s in (args.g or [])]
    if not f_entries and not g_entries:
        f_entries = [(s1, r1), (s1, r2), (s2, r1), (s2, r2)]
        g_entries = [(s1, s2, r1, r2)]
    for e in f_entries:
        if len(e) != 2:
            raise CliError(f"--f expects 'n,m', got {e}")
    for e in g_entries:
        if len(e) != 4:
            raise CliError(f"--g expects 'n,m,r,s', got {e}")
    ts = _time_grid(args)
    columns = ["t"]
    for n, m in f_entries:
        columns += [f"re_f_{n}_{m}", f"im_f_{n}_{m}"]
    for n, m, r, s in g_entries:
        columns += [f"re_g_{n}{m}_{r}{s}", f"im_g_{n}{m}_{r}{s}"]
    columns.append("channel_occupation")
    rows = []
    for t in ts:
        amp = propagator(sd, float(t))
        row = [float(t)]
        for n, m in f_entries:
            z = amp.entry(n, m)
            row += [z.real, z.imag]
        for n, m, r, s in g_entries:
            z = two_particle(amp, n, m, r, s)
            row += [z.real, z.imag]
        row.append(channel_occupation(amp, spec))
        rows.append(row)
    _write_result(args, spec, columns, rows, None, t0)
    return 0


def _cmd_fidelity(args):
    t0 = time.perf_counter()
    spec = _resolve_spec(args)
    if (args.mc_samples or args.worst_case) and args.seed is None:
        raise CliError("--seed is required with --mc-samples or --worst-case")
    sd = diagonalize(build_single_particle(spec))
    if args.t_star:
        res = find_transfer_time(spec, sd)
        ts = np.array([res.t_star])
    else:
        ts = _time_grid(args)
    s1, s2 = spec.senders
    r1, r2 = spec.receivers
    columns = ["t", "F_exact", "F_approx", "F_mc_mean", "F_mc_stderr", "F_min"]
    rows = []
    for t in ts:
        t = float(t)
        bd = average_fidelity_exact(spec, t, sd, args.receiver_order)
        amp = propagator(sd, t)
        try:
            fa = average_fidelity_approx(
                amp.entry(s1, r1), amp.entry(s1, r2), amp.entry(s2, r1)
            )
        except ValueError:
            fa = float("nan")
        mc_mean = mc_err = fmin = float("nan")
        if args.mc_samples:
            mc_mean, mc_err = haar_average_mc(
                spec, t, args.mc_samples, args.seed, sd, args.receiver_order
            )
        if args.worst_case:
            _, fmin = worst_case_fidelity(
                spec, t, seed=args.seed, sd=sd, receiver_order=args.receiver_order
            )
        rows.append([t, bd.value, fa, mc_mean, mc_err, fmin])
    _write_result(args, spec, columns, rows, None, t0)
    return 0


def _cmd_perturb(args):
    t0 = time.perf_counter()
    spec = _resolve_spec(args)
    if classify_chain(spec.N) == "quasi-rabi":
        raise CliError(
            f"N = {spec.N} is quasi-Rabi (N = 3n - 1); perturbative quadruplet "
            "energies apply to the Rabi regime only"
        )
    sd = diagonalize(build_single_particle(spec))
    ps = perturbative_energies(spec.N, spec.h)
    idx = localized_indices(spec.N)
    exact = [float(sd.eigenvalues[k - 1]) for k in idx]
    pert = sorted(ps.lambdas.values())
    columns = ["k", "eps_exact", "lambda_perturbative", "rel_error"]
    rows = []
    for k, e, lam in zip(idx, exact, pert):
        rows.append([k, e, lam, abs(lam - e) / max(abs(e), 1e-300)])
    freqs = rabi_frequencies(exact)
    diag = {
        "cubic_roots": list(ps.roots),
        "omega0_plus": freqs.omega0_plus,
        "omega0_minus": freqs.omega0_minus,
        "omega1_plus": freqs.omega1_plus,
        "omega1_minus": freqs.omega1_minus,
        "t1_closed_form": transfer_time_estimate(spec.N, spec.h) if spec.h > 0 else None,
        "t1_from_spectrum": float(np.pi / (2.0 * freqs.omega1_minus))
        if freqs.omega1_minus > 0
        else None,
    }
    _write_result(args, spec, columns, rows, diag, t0)
    return 0


def _cmd_transfer_time(args):
    t0 = time.perf_counter()
    spec = _resolve_spec(args)
    sd = diagonalize(build_single_particle(spec))
    res = find_transfer_time(spec, sd)
    amp = propagator(sd, res.t_star)
    s1, s2 = spec.senders
    r1, r2 = spec.receivers
    try:
        fa = average_fidelity_approx(
            amp.entry(s1, r1), amp.entry(s1, r2), amp.entry(s2, r1)
        )
    except ValueError:
        fa = float("nan")
    regime = classify_chain(spec.N)
    t1 = (
        transfer_time_estimate(spec.N, spec.h)
        if regime == "rabi" and spec.h > 0
        else float("nan")
    )
    columns = [
        "N", "h", "regime", "t_star", "F_exact", "F_approx",
        "t1_estimate", "window_lo", "window_hi",
    ]
    rows = [[
        spec.N, spec.h, regime, res.t_star, res.fidelity, fa,
        t1, res.search_window[0], res.search_window[1],
    ]]
    diag = {
        "t_seed": res.t_seed,
        "candidate": res.candidate,
        "candidate_fidelity": res.candidate_fidelity,
    }
    _write_result(args, spec, columns, rows, diag, t0)
    return 0


def _cmd_scan(args):
    t0 = time.perf_counter()
    spec = _resolve_spec(args)
    values = _parse_list(args.values, float if args.axis == "h" else int)
    records = run_scan(spec, args.axis, values)
    columns = [
        "N", "h", "regime", "t_star", "F_exact", "F_approx",
        "t1_estimate", "window_lo", "window_hi", "error",
    ]
    rows = [
        [
            r.N, r.h, r.regime, r.t_star, r.F_exact, r.F_approx,
            r.t1_estimate, r.search_window[0], r.search_window[1], r.error,
        ]
        for r in records
    ]
    _write_result(args, spec, columns, rows, None, t0)
    return 0


def _cmd_verify(args):
    t0 = time.perf_counter()
    spec = _resolve_spec(args)
    seed = args.seed if args.seed is not None else 0
    rng = np.random.default_rng(seed)
    N = spec.N
    if N > 16:
        raise CliError(f"verify caps N at 16 (two-excitation oracle cost), got {N}")
    sd = diagonalize(build_single_particle(spec))
    H1, H2 = build_sector_hamiltonians(spec)
    basis = SectorBasis(N)
    checks = []

    w1, v1 = np.linalg.eigh(H1)
    w2, v2 = np.linalg.eigh(H2)
    times = rng.uniform(0.0, 30.0, size=10)

    # one-excitation propagator vs dense sector evolution
    worst = 0.0
    for t in times:
        U = (v1 * np.exp(-1j * w1 * t)) @ v1.conj().T
        amp = propagator(sd, t)
        worst = max(worst, float(np.max(np.abs(U - amp.f))))
    checks.append(("propagator_vs_dense", worst, 1e-10))

    # two-excitation determinant vs dense sector evolution, all ordered pairs
    worst = 0.0
    src = basis.pair_index[spec.senders]
    for t in times:
        U2 = (v2 * np.exp(-1j * w2 * t)) @ v2.conj().T
        amp = propagator(sd, t)
        for i, (r, s) in enumerate(basis.pairs):
            g = two_particle(amp, spec.senders[0], spec.senders[1], r, s)
            worst = max(worst, abs(g - U2[i, src]))
    checks.append(("two_particle_vs_dense", worst, 1e-10))

    # free-fermion pairing of the two-excitation spectrum
    eps = sd.eigenvalues
    sums = np.sort(np.array([eps[i] + eps[j] for i in range(N) for j in range(i + 1, N)]))
    checks.append(("h2_pairwise_sums", float(np.max(np.abs(np.sort(w2) - sums))), 1e-9))

    # reduced receiver state: trace, hermiticity, positivity
    worst = 0.0
    for _ in range(5):
        z = rng.normal(size=4) + 1j * rng.normal(size=4)
        state = TwoQubitState.from_vector(z)
        es = evolve(spec, state, float(rng.uniform(0, 30)))
        rho = reduced_receiver_state(spec, es)
        worst = max(worst, abs(np.trace(rho).real - 1.0))
        worst = max(worst, float(np.max(np.abs(rho - rho.conj().T))))
        worst = max(worst, max(0.0, -float(np.min(np.linalg.eigvalsh(rho)))))
    checks.append(("reduced_state_properties", worst, 1e-10))

    # closed-form average fidelity vs Monte-Carlo Haar sampling
    worst = 0.0
    for t in times[:3]:
        bd = average_fidelity_exact(spec, float(t), sd)
        mean, err = haar_average_mc(spec, float(t), 20000, seed, sd)
        worst = max(worst, abs(mean - bd.value) / max(err, 1e-300) / 3.0)
    checks.append(("fidelity_vs_mc_3sigma", worst, 1.0))

    columns = ["check", "worst_residual", "tolerance", "status"]
    rows = []
    failed = False
    for name, residual, tol in checks:
        ok = residual <= tol
        failed = failed or not ok
        rows.append([name, float(residual), float(tol), "PASS" if ok else "FAIL"])
        print(f"{name}: worst residual {residual:.3e} (tol {tol:.0e}) "
              f"{'PASS' if ok else 'FAIL'}")
    _write_result(args, spec, columns, rows, {"seed": seed}, t0)
    return 2 if failed else 0


# -------------------------------------------------------------------- parser


def _add_spec_options(p):
    p.add_argument("--N", type=int, help="chain length (>= 6)")
    p.add_argument("--h", type=float, help="barrier field strength")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--couplings", help="N-1 bond couplings, comma separated")
    p.add_argument("--fields", help="N on-site fields, comma separated")
    p.add_argument("--senders", help="sender pair, e.g. 1,2")
    p.add_argument("--receivers", help="receiver pair, e.g. 45,46")
    p.add_argument("--barriers", help="barrier pair, e.g. 3,44")


def _add_output_options(p):
    p.add_argument("-o", "--output", help="output file (default: <subcommand>.csv "
                   "in $XXCHAIN_OUTPUT_DIR or the working directory)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--receiver-order", dest="receiver_order", choices=("12", "21"),
                   default="12", help="receiver qubit assignment: '12' puts qubit 1 "
                   "on the first receiver site, '21' mirrors it")


def _add_time_options(p):
    p.add_argument("--t", type=float, help="single evaluation time")
    p.add_argument("--t0", type=float, default=0.0, help="grid start time")
    p.add_argument("--t1", type=float, default=10.0, help="grid end time")
    p.add_argument("--steps", type=int, default=101, help="grid point count")


def build_parser() -> _Parser:
    parser = _Parser(prog="xxchain", description=__doc__)
    parser.add_argument("--version", action="version", version=f"xxchain {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues and eigenvector weights")
    p.add_argument("--sites", help="sites for the localization columns, e.g. 1,2,45,46")
    p.add_argument("--full", action="store_true", help="dump the full eigenvector matrix")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("amplitudes", help="transfer amplitude time series")
    _add_time_options(p)
    p.add_argument("--f", action="append", help="single-particle entry 'n,m' (repeatable)")
    p.add_argument("--g", action="append", help="two-particle entry 'n,m,r,s' (repeatable)")
    p.set_defaults(func=_cmd_amplitudes)

    p = sub.add_parser("fidelity", help="average / Monte-Carlo / worst-case fidelity")
    _add_time_options(p)
    p.add_argument("--t-star", dest="t_star", action="store_true",
                   help="evaluate at the optimal readout time")
    p.add_argument("--mc-samples", dest="mc_samples", type=int,
                   help="Monte-Carlo Haar sample count")
    p.add_argument("--seed", type=int, help="RNG seed (required for MC / worst case)")
    p.add_argument("--worst-case", dest="worst_case", action="store_true",
                   help="also minimize over input states")
    p.set_defaults(func=_cmd_fidelity)

    p = sub.add_parser("perturb", help="perturbative quadruplet vs exact spectrum")
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("transfer-time", help="optimal readout time search")
    p.set_defaults(func=_cmd_transfer_time)

    p = sub.add_parser("scan", help="sweep h or N, one row per point")
    p.add_argument("--axis", choices=("h", "N"), required=True)
    p.add_argument("--values", required=True, help="comma-separated sweep values")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("verify", help="fast path vs brute-force sector oracle")
    p.add_argument("--seed", type=int, help="RNG seed for the random checks")
    p.set_defaults(func=_cmd_verify)

    for p in sub.choices.values():
        _add_spec_options(p)
        _add_output_options(p)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
