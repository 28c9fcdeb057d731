"""Command-line front end: spectra, three-way verification, figure data, wavefunctions, ledger."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import ledger as ledger_mod
from . import nu_core, spectral_oracle
from .ledger import LedgerEntry
from .potential_catalog import (
    FamilyParams,
    FormulaDomainError,
    InadmissibleParameters,
    NonNormalizable,
    PtpParams,
    ScpParams,
    StpParams,
    closed_form_spectrum,
    nu_spectrum,
    nu_wavefunction,
    oracle_spectrum,
    params_from_cli,
    potential,
)
from .susy_core import UNIT_PRESETS, BrokenSusy, SpectrumResult, Units, hierarchy_spectrum

UNITS_ENV = "SUSY_NU_UNITS"
DEFAULT_UNITS = "hbar2-eq-2m"
FAMILIES = ("stp", "scp", "ptp")
FAMILY_DEFAULTS = {"stp": {"A": 2.0}, "scp": {"A": 2.0}, "ptp": {"a": -2.0, "b": 2.0}}
FIGURE_SAMPLES = 512
WAVEFUNCTION_N_MAX = 8

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


@dataclass(frozen=True)
class RunConfig:
    potential: str
    params: FamilyParams
    n_max: int
    method: str
    units_name: str
    grid: int
    fmt: str
    out: str
    sign: str
    tol: float
    seed: int

    @property
    def units(self) -> Units:
        return UNIT_PRESETS[self.units_name]


def _resolve_units(name: Optional[str]) -> str:
    chosen = name or os.environ.get(UNITS_ENV) or DEFAULT_UNITS
    if chosen not in UNIT_PRESETS:
        raise ConfigError(f"unknown units preset {chosen!r}; choose from {sorted(UNIT_PRESETS)}")
    return chosen


def _family_params(kind: str, args, units: Units) -> FamilyParams:
    d = FAMILY_DEFAULTS[kind]
    A = args.A if args.A is not None else d.get("A", 0.0)
    a = args.a if args.a is not None else d.get("a", 0.0)
    b = args.b if args.b is not None else d.get("b", 0.0)
    try:
        return params_from_cli(kind, A, a, b, args.alpha, units)
    except InadmissibleParameters as exc:
        raise ConfigError(str(exc)) from exc


def build_config(args, potential_kind: Optional[str] = None) -> RunConfig:
    units_name = _resolve_units(args.units)
    kind = potential_kind or args.potential
    if args.n_max < 0:
        raise ConfigError("--n-max must be >= 0")
    if args.grid < 16:
        raise ConfigError("--grid must be >= 16")
    if not (args.tol >= 0 and math.isfinite(args.tol)):
        raise ConfigError("--tol must be a finite nonnegative number")
    return RunConfig(
        potential=kind,
        params=_family_params(kind, args, UNIT_PRESETS[units_name]),
        n_max=args.n_max,
        method=args.method,
        units_name=units_name,
        grid=args.grid,
        fmt=args.format,
        out=args.out,
        sign=args.sign,
        tol=args.tol,
        seed=args.seed,
    )


# output -------------------------------------------------------------------------


def render(columns: Sequence[str], rows: Sequence[Sequence], fmt_name: str, meta: Optional[dict] = None) -> str:
    if fmt_name == "json":
        payload = {"meta": meta or {}, "rows": [dict(zip(columns, r)) for r in rows]}
        return json.dumps(payload, indent=1, sort_keys=False, default=_json_default) + "\n"
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        buf.write(f"# {k}: {v}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(columns)
    for r in rows:
        wr.writerow([fmt(x) for x in r])
    return buf.getvalue()


def _json_default(x):
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    raise TypeError(type(x))


def emit(text: str, out: str) -> None:
    if out in ("", "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# spectrum -----------------------------------------------------------------------


def _hierarchy(p: FamilyParams, sign: str, n_max: int):
    """Shape-invariance ladder; ``V_+`` uses ``-W`` or, failing that, ``E+_n = E-_(n+1)``."""
    w = p.superpotential()
    if sign == "minus":
        return hierarchy_spectrum(w, p.units, n_max)
    try:
        return hierarchy_spectrum(w.negated(), p.units, n_max)
    except BrokenSusy:
        shifted = hierarchy_spectrum(w, p.units, n_max + 1).energies[1:]
        return SpectrumResult.from_energies(shifted, "closed-form", p.units)


def cmd_spectrum(cfg: RunConfig) -> tuple[list[tuple], list[str]]:
    p, n_max, sign = cfg.params, cfg.n_max, cfg.sign
    methods = ("closed-form", "nu", "oracle") if cfg.method == "all" else (cfg.method,)
    rows, notes = [], []
    for m in methods:
        if m == "closed-form":
            try:
                es = closed_form_spectrum(p, n_max, sign).energies
            except FormulaDomainError as exc:
                notes.append(f"closed-form: {exc}")
                continue
        elif m == "nu":
            es = nu_spectrum(p, n_max, sign).energies
        else:
            es = oracle_spectrum(p, n_max, sign, cfg.grid).energies
        rows.extend((n, e, m, cfg.potential, sign) for n, e in enumerate(es))
    if cfg.method == "all":
        try:
            es = _hierarchy(p, sign, n_max).energies
            rows.extend((n, e, "hierarchy", cfg.potential, sign) for n, e in enumerate(es))
        except BrokenSusy as exc:
            notes.append(f"hierarchy: {exc}")
    return rows, notes


# verify -------------------------------------------------------------------------


def _agree(x: Sequence[float], y: Sequence[float], tol: float, scale: float) -> tuple[bool, float]:
    worst, ok = 0.0, True
    for a, b in zip(x, y):
        lim = tol * max(abs(a), abs(b), scale)
        if not abs(a - b) <= lim:
            ok = False
        worst = max(worst, abs(a - b) / max(abs(a), abs(b), scale))
    return ok, worst


def verify_family(cfg: RunConfig) -> tuple[bool, list[LedgerEntry], list[str]]:
    """Three-way check for both partners plus every printed-formula ledger entry."""
    p, n_max, tol = cfg.params, cfg.n_max, cfg.tol
    scale = p.units.kappa * p.alpha**2
    entries: list[LedgerEntry] = []
    notes: list[str] = []
    passed = True
    oracle_full = {}
    for sign in ("minus", "plus"):
        oracle_full[sign] = oracle_spectrum(p, 2 * n_max + 1, sign, cfg.grid).energies
        spectra = {"oracle": oracle_full[sign][: n_max + 1], "nu": nu_spectrum(p, n_max, sign).energies}
        try:
            spectra["hierarchy"] = _hierarchy(p, sign, n_max).energies
        except BrokenSusy as exc:
            notes.append(f"{cfg.potential} {sign}: hierarchy reports {exc}; checking oracle/nu only")
            entries.append(LedgerEntry(f"hierarchy[{cfg.potential}|{sign}]", "three-way check", (), (),
                                       ledger_mod.NOT_APPLICABLE, f"no zero mode: {exc}"))
        names = list(spectra)
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                a, b = names[i], names[j]
                ok, worst = _agree(spectra[a], spectra[b], tol, scale)
                passed &= ok
                entries.append(LedgerEntry(
                    f"agreement[{cfg.potential}|{sign}|{a}-{b}]", "three-way check",
                    tuple(spectra[a]), tuple(spectra[b]), ledger_mod._verdict(ok),
                    f"worst scaled difference {worst:.3g}", tol))
    ltol = max(tol, 1e-6)
    entries.extend(ledger_mod.spectrum_entries(p, oracle_full, n_max, ltol))
    if isinstance(p, StpParams):
        entries.extend(ledger_mod.stp_coefficient_entries(p, min(n_max, 6) + 2, ltol))
        entries.extend(ledger_mod.stp_algebra_entries(p, oracle_full["minus"][0], 1e-9))
    elif isinstance(p, PtpParams):
        entries.append(ledger_mod.a1_entry(p, oracle_full["minus"], ltol))
        entries.append(ledger_mod.ptp_exponent_entry(p, 1e-9))
        entries.extend(ledger_mod.ptp_coefficient_entries(p, min(n_max, 6), ltol))
        entries.extend(ledger_mod.ptp_algebra_entries(p, oracle_full["minus"][0], 1e-9))
        entries.append(ledger_mod.pt_entry(p, 1e-12))
    return passed, entries, notes


def _ledger_text(entries: Sequence[LedgerEntry], fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps([e.to_dict() for e in entries], indent=1) + "\n"
    return ledger_mod.render_csv(entries)


def _units_label(units: Units) -> str:
    return f"hbar={fmt(units.hbar)} m={fmt(units.mass)}"


# figures ------------------------------------------------------------------------

FIG_DELTAS = (2.0, 3.0, 4.0)
FIG_GAMMAS = (1.0, 2.0)
FIG_NUS = (1.0, 4.0, 9.0)


def _printed_trig(units: Units, alpha: float, n: int, delta: float, gamma: float, sign_gamma: float) -> float:
    return sign_gamma * gamma + units.hbar**2 * alpha**2 / (2 * units.mass) * (4 * n * n + (4 * n + 1) * delta / 2)


def _printed_ptp(units: Units, alpha: float, n: int, nu1: float, nu2: float) -> float:
    a_t, b_t = (nu1 - 1) / 4, (nu2 - 1) / 4
    k = 2 * n + 1
    body = k * (k + math.sqrt(nu1) + math.sqrt(nu2)) + 0.5 * ((1 + math.sqrt(nu1 * nu2)) + 2 * (a_t + b_t))
    return units.hbar**2 * alpha**2 / (2 * units.mass) * body


def figure_data(fig: int, units: Units, alpha: float = 1.0) -> tuple[list[str], list[tuple], dict]:
    c = units.c
    if fig in (1, 3):
        # E^(-) solid, E^(+) dashed; the printed gamma sign flips between the two families
        upper = -1.0 if fig == 1 else 1.0
        rows = []
        for d in FIG_DELTAS:
            for g in FIG_GAMMAS:
                label = f"delta={fmt(d)};gamma={fmt(g)}"
                for branch, s in (("minus", -upper), ("plus", upper)):
                    rows.extend((n, _printed_trig(units, alpha, n, d, g, s), branch, label) for n in range(8))
        meta = {"figure": fig, "formula": "squared tangent" if fig == 1 else "squared cotangent",
                "deltas": list(FIG_DELTAS), "gammas": list(FIG_GAMMAS), "units": _units_label(units)}
        return ["n", "energy", "branch", "param_label"], rows, meta
    if fig == 5:
        rows = []
        for nu1 in FIG_NUS:
            for nu2 in FIG_NUS:
                label = f"nu1={fmt(nu1)};nu2={fmt(nu2)}"
                rows.extend((n, _printed_ptp(units, alpha, n, nu1, nu2), "common", label) for n in range(11))
        meta = {"figure": fig, "formula": "Poschl-Teller", "nus": list(FIG_NUS), "shift": "(a-b)^2 = 0",
                "units": _units_label(units)}
        return ["n", "energy", "branch", "param_label"], rows, meta
    if fig in (2, 4, 6):
        curves = []
        if fig == 2:
            for d in FIG_DELTAS:
                # V_- with A = c alpha delta/2 has delta1 = delta
                curves.append((f"delta1={fmt(d)}", StpParams(A=c * alpha * d / 2, alpha=alpha, units=units), "minus"))
        elif fig == 4:
            for d in FIG_DELTAS:
                # the partner carrying A^2 - alpha A has delta2 = 2A/(c alpha)
                curves.append((f"delta2={fmt(d)}", ScpParams(A=c * alpha * d / 2, alpha=alpha, units=units), "plus"))
        else:
            for nu in FIG_NUS:
                r = c * alpha * (1 + math.sqrt(nu)) / 2
                curves.append((f"nu1={fmt(nu)};nu2={fmt(nu)}", PtpParams(a=-r, b=r, alpha=alpha, units=units), "minus"))
        rows = []
        for label, p, sign in curves:
            wf = nu_wavefunction(p, 0, sign)
            lo, hi = potential(p, sign).domain
            theta = np.linspace(lo, hi, FIGURE_SAMPLES)
            rows.extend(zip(theta.tolist(), wf(theta).tolist(), [label] * FIGURE_SAMPLES))
        meta = {"figure": fig, "samples": FIGURE_SAMPLES, "curves": [cv[0] for cv in curves], "units": _units_label(units)}
        return ["theta", "psi0", "param_label"], rows, meta
    raise ConfigError(f"unknown figure id {fig}; choose 1..6")


# wavefunction -------------------------------------------------------------------


def cmd_wavefunction(cfg: RunConfig, n: int) -> tuple[list[str], list[tuple]]:
    if not 0 <= n <= WAVEFUNCTION_N_MAX:
        raise ConfigError(f"--n must lie in 0..{WAVEFUNCTION_N_MAX}")
    p = cfg.params
    v = potential(p, cfg.sign)
    wf = nu_wavefunction(p, n, cfg.sign)
    grid = spectral_oracle.Grid.over(v.domain, cfg.grid)
    res = spectral_oracle.solve(v, grid, n + 1, p.units, want_vectors=True, seed=cfg.seed)
    theta = grid.nodes
    psi = wf(theta)
    ref = res.vectors[n]
    if spectral_oracle.inner_product(psi, ref, grid=grid) < 0:
        ref = -ref
    rows = list(zip(theta.tolist(), psi.tolist(), ref.tolist(), np.abs(psi - ref).tolist()))
    return ["theta", "psi", "psi_oracle", "abs_diff"], rows


# argument parsing ----------------------------------------------------------------


def _common(p: argparse.ArgumentParser, potential_choices=FAMILIES, potential_default="stp") -> None:
    g = p.add_argument_group("run configuration")
    g.add_argument("--potential", choices=potential_choices, default=potential_default,
                   help="potential family (default: %(default)s)")
    g.add_argument("--A", type=float, default=None, help="tangent/cotangent amplitude (default: 2)")
    g.add_argument("--a", type=float, default=None, help="cot coefficient for ptp (default: -2)")
    g.add_argument("--b", type=float, default=None, help="tan coefficient for ptp (default: 2)")
    g.add_argument("--alpha", type=float, default=1.0, help="angular scale (default: %(default)s)")
    g.add_argument("--sign", choices=("minus", "plus"), default="minus", help="partner (default: %(default)s)")
    g.add_argument("--n-max", type=int, default=7, help="highest level (default: %(default)s)")
    g.add_argument("--method", choices=("closed-form", "nu", "oracle", "all"), default="all",
                   help="solver (default: %(default)s)")
    g.add_argument("--units", choices=sorted(UNIT_PRESETS), default=None,
                   help=f"units preset (default: ${UNITS_ENV} or {DEFAULT_UNITS})")
    g.add_argument("--grid", type=int, default=spectral_oracle.DEFAULT_POINTS,
                   help="oracle grid cells (default: %(default)s)")
    g.add_argument("--tol", type=float, default=1e-6, help="relative tolerance (default: %(default)s)")
    g.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default: %(default)s)")
    g.add_argument("--out", default="-", help="output path, '-' for stdout (default: %(default)s)")
    g.add_argument("--seed", type=lambda s: int(s, 0), default=spectral_oracle.SEED,
                   help="inverse-iteration seed (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trigsusy", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("spectrum", help="energy levels by one or all methods"))
    _common(sub.add_parser("verify", help="oracle / NU / hierarchy agreement plus discrepancy ledger"),
            potential_choices=FAMILIES + ("all",), potential_default="all")
    fig = sub.add_parser("figure", help="data behind figures 1-6")
    fig.add_argument("id", type=int, help="figure number 1..6")
    _common(fig)
    wf = sub.add_parser("wavefunction", help="NU eigenfunction against the oracle eigenvector")
    _common(wf)
    wf.add_argument("--n", type=int, default=0, help="level index 0..8 (default: %(default)s)")
    _common(sub.add_parser("ledger", help="discrepancy ledger only"),
            potential_choices=FAMILIES + ("all",), potential_default="all")
    return parser


def _families(args) -> list[str]:
    return list(FAMILIES) if args.potential == "all" else [args.potential]


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except BrokenPipeError:
        # downstream closed early, e.g. piped into head
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


def _dispatch(args) -> int:
    try:
        if args.command == "spectrum":
            cfg = build_config(args)
            rows, notes = cmd_spectrum(cfg)
            for msg in notes:
                print(msg, file=sys.stderr)
            emit(render(["n", "energy", "method", "potential", "sign"], rows, cfg.fmt), cfg.out)
            return EXIT_OK
        if args.command in ("verify", "ledger"):
            cfgs = [build_config(args, kind) for kind in _families(args)]
            ok, entries = True, []
            for cfg in cfgs:
                passed, es, notes = verify_family(cfg)
                ok &= passed
                entries.extend(es)
                for msg in notes:
                    print(msg, file=sys.stderr)
            if args.command == "ledger":
                entries = [e for e in entries if not e.claim_id.startswith(("agreement", "hierarchy"))]
            emit(_ledger_text(entries, args.format), args.out)
            if args.command == "ledger":
                return EXIT_OK
            print("three-way agreement: " + ("pass" if ok else "FAIL"), file=sys.stderr)
            return EXIT_OK if ok else EXIT_MISMATCH
        if args.command == "figure":
            units = UNIT_PRESETS[_resolve_units(args.units)]
            cols, rows, meta = figure_data(args.id, units, args.alpha)
            emit(render(cols, rows, args.format, meta), args.out)
            return EXIT_OK
        if args.command == "wavefunction":
            cfg = build_config(args)
            cols, rows = cmd_wavefunction(cfg, args.n)
            emit(render(cols, rows, cfg.fmt), cfg.out)
            return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (nu_core.NUError, NonNormalizable, FormulaDomainError, BrokenSusy,
            spectral_oracle.SingularNode) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
