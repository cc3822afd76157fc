"""Command-line experiment runner.

Every subcommand streams self-describing records as JSON lines (default) or
CSV.  Exit status: 0 on success, 1 on precondition, parse or validation
errors, 2 when a configured resource bound is exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from fractions import Fraction
from typing import Callable, Iterator

from . import __version__, arith, characters, jointerg, pretend, systems
from .errors import PreconditionError, ResourceError, SchemaError
from .functions import FgAddFunction, FgMultFunction
from .phase import Rational

Record = dict


# ---------------------------------------------------------------------------
# formatting


def _num(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".15g")


def dumps(obj) -> str:
    """Compact JSON with floats at 15 significant digits and fixed key order."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, complex):
        return dumps({"re": obj.real, "im": obj.imag})
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(json.dumps(str(k)) + ":" + dumps(v) for k, v in obj.items()) + "}"
    if isinstance(obj, (frozenset, set)):
        return dumps(sorted(obj))
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _flatten(prefix: str, obj, out: dict) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, complex):
        out[f"{prefix}.re"] = _num(obj.real)
        out[f"{prefix}.im"] = _num(obj.imag)
    elif isinstance(obj, float):
        out[prefix] = _num(obj)
    else:
        text = dumps(obj)
        out[prefix] = text[1:-1] if text.startswith('"') else text


def to_csv(records: list[Record]) -> str:
    """One row per record; a payload list under ``rows`` expands to one row each."""
    flat = []
    for rec in records:
        payload = dict(rec["payload"])
        rows = payload.pop("rows", None) or [{}]
        for row in rows:
            d: dict = {"command": rec["command"]}
            if "N" in rec:
                d["N"] = str(rec["N"])
            _flatten("", {**payload, **row}, d)
            flat.append(d)
    header: list[str] = []
    for d in flat:
        header += [k for k in d if k not in header]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    w.writeheader()
    w.writerows(flat)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# input parsing


def load_json(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise PreconditionError(f"{path}: cannot read ({exc.strerror})") from exc
    text = raw.decode("utf-8", errors="replace")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise SchemaError(
            f"{path}: JSON parse error at byte offset {offset} (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc


def _load(path: str | None, parser: Callable, flag: str):
    if path is None:
        raise PreconditionError(f"{flag} is required")
    return parser(load_json(path), path)


def parse_schedule(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            v = float(part) if any(c in part for c in ".eE") else int(part)
        except ValueError as exc:
            raise PreconditionError(f"bad schedule entry {part!r}") from exc
        if v != int(v) or v < 1:
            raise PreconditionError(f"schedule entries must be positive integers, got {part!r}")
        out.append(int(v))
    if any(b <= a for a, b in zip(out, out[1:])):
        raise PreconditionError("schedule must be strictly increasing")
    return out


def _stops(args, default: list[int]) -> list[int]:
    if args.schedule:
        return parse_schedule(args.schedule)
    if args.N is not None:
        return parse_schedule(args.N)
    return default


def _mode_json(F: systems.ModeFunction) -> list:
    return [{"mode": j, "re": c.real, "im": c.imag} for j, c in F.coeffs]


# ---------------------------------------------------------------------------
# commands


def cmd_primes(args) -> Iterator[Record]:
    limit = args.limit if args.limit is not None else (parse_schedule(args.N)[-1] if args.N else None)
    if limit is None:
        raise PreconditionError("--limit is required")
    ps = arith.sieve_primes(limit)
    yield {"N": limit, "payload": {"count": len(ps), "primes": ps}}


def cmd_mean(args) -> Iterator[Record]:
    f = _load(args.fn, FgMultFunction.from_json, "--fn")
    stops = _stops(args, [10**6])
    twist = None
    label = {}
    if args.char:
        twist = _load(args.char, characters.DirichletCharacter.from_json, "--char")
        label = {"twist": "character", "modulus": twist.modulus}
    elif args.q is not None:
        twist = Rational(args.r or 0, args.q)
        label = {"twist": "exponential", "r": args.r or 0, "q": args.q}
    if twist is not None and args.method != "direct":
        raise PreconditionError("twisted means support only --method direct")
    halasz = pretend.halasz_mean(f) if args.method in ("halasz", "both") else None
    direct = pretend.partial_means(f, stops, twist=twist) if args.method in ("direct", "both") else None
    for i, N in enumerate(stops):
        if direct is not None:
            yield {"N": N, "payload": {"method": "direct", **label, "value": direct[i]}}
        if halasz is not None:
            payload = {"method": "halasz", "value": halasz}
            if direct is not None:
                payload["delta"] = abs(direct[i] - halasz)
            yield {"N": N, "payload": payload}


def cmd_distance(args) -> Iterator[Record]:
    f = _load(args.fn, FgMultFunction.from_json, "--fn")
    g = _load(args.fn2, FgMultFunction.from_json, "--fn2")
    fin, witness = pretend.distance_is_finite(f, g)
    wit = {"explicit": witness.sorted()} if fin else {"divergent_cell": repr(witness)}
    for N in _stops(args, [10**3, 10**4, 10**5, 10**6]):
        yield {"N": N, "payload": {"distance": pretend.distance_partial(f, g, N), "finite": fin, "witness": wit}}


def cmd_classify(args) -> Iterator[Record]:
    S = _load(args.system, systems.system_from_json, "--system")
    c = classify_system_record(S)
    yield {"payload": c}


def classify_system_record(S) -> dict:
    c = systems.classify_system(S)
    return {
        "pretentiously_ergodic": c.pretentiously_ergodic,
        "aperiodic": c.aperiodic,
        "pretentiously_weak_mixing": c.pretentiously_weak_mixing,
        "band": c.band,
    }


def cmd_average(args) -> Iterator[Record]:
    S = _load(args.system, systems.system_from_json, "--system")
    F = _load(args.F, systems.ModeFunction.from_json, "--F")
    weight = _load(args.fn, FgMultFunction.from_json, "--fn") if args.fn else None
    limit = systems.predicted_limit(S, F, weight)
    for tp in systems.ergodic_average(S, F, weight, _stops(args, list(systems.DEFAULT_SCHEDULE))):
        rows = [
            {"mode": j, "re": c.real, "im": c.imag, "l2_err": tp.l2_err}
            for j, c in ((j, tp.average.coeff(j)) for j in F.modes)
        ]
        yield {"N": tp.N, "payload": {"l2_err": tp.l2_err, "predicted": _mode_json(limit), "rows": rows}}


def cmd_spectra(args) -> Iterator[Record]:
    if args.system is None and args.T is None:
        raise PreconditionError("spectra needs --system and/or --T")
    payload = {}
    if args.T:
        T = _load(args.T, systems.AddSystem.from_json, "--T")
        payload["sigma_rat_T"] = systems.sigma_rat(T)
    if args.system:
        S = _load(args.system, systems.system_from_json, "--system")
        payload["sigma_tilde_S"] = systems.sigma_pr_rat_tilde(S)
    yield {"payload": payload}


def cmd_joint(args) -> Iterator[Record]:
    T = _load(args.T, systems.AddSystem.from_json, "--T")
    S = _load(args.S, systems.system_from_json, "--S")
    v = jointerg.decide_joint(T, S)
    yield {
        "payload": {
            "jointly_ergodic": v.jointly_ergodic,
            "sigma_rat_T": v.sigma_rat_T,
            "sigma_tilde_S": v.sigma_tilde_S,
            "intersection": v.intersection,
        }
    }
    if args.F or args.G:
        F = _load(args.F, systems.ModeFunction.from_json, "--F")
        G = _load(args.G, systems.ModeFunction.from_json, "--G")
        for tp in jointerg.joint_average(T, S, F, G, _stops(args, list(systems.DEFAULT_SCHEDULE))):
            yield {"N": tp.N, "payload": {"error": tp.error}}


def cmd_recurrence(args) -> Iterator[Record]:
    T = _load(args.T, systems.AddSystem.from_json, "--T")
    T2 = _load(args.T2, systems.AddSystem.from_json, "--T2") if args.T2 else None
    a = _load(args.fn, FgAddFunction.from_json, "--fn") if args.fn else FgAddFunction.big_omega()
    if args.A is None or args.k is None:
        raise PreconditionError("recurrence needs --A and --k")
    try:
        A = [int(x) for x in args.A.split(",") if x.strip()]
    except ValueError as exc:
        raise PreconditionError(f"bad --A list {args.A!r}") from exc
    mu = Fraction(len({x % args.k for x in A}), args.k)
    for N in _stops(args, [10**6]):
        val = jointerg.recurrence_average(T, a, A, args.k, N, T2)
        yield {"N": N, "payload": {"value": float(val), "exact": val, "mu_A_cubed": float(mu**3)}}


def cmd_configs(args) -> Iterator[Record]:
    E = _load(args.E, jointerg.IntegerSetSpec.from_json, "--E")
    Ns = parse_schedule(args.N) if args.N else [10**3]
    Ms = parse_schedule(args.M) if args.M else [10**4]
    for c in jointerg.configuration_sweep(E, Ns, Ms):
        yield {"N": c.N, "payload": {"M": c.M, "count": c.count, "density": c.density, "delta_cubed": c.delta_cubed}}


def cmd_verify_identities(args) -> Iterator[Record]:
    for q in range(1, args.q_max + 1):
        prim = characters.primitive_characters(q)
        fourier = max((characters.verify_fourier_expansion(chi, n) for chi in prim for n in range(1, q + 1)), default=0.0)
        gauss = max((abs(abs(characters.gauss_sum(chi)) - math.sqrt(q)) for chi in prim), default=0.0)
        units = [r for r in range(q) if math.gcd(r, q) == 1]
        orth = all(characters.verify_orthogonality(q, r, n) for r in units for n in range(q))
        geo = all(characters.verify_geometric_indicator(q, r, n) for r in range(q) for n in range(q))
        geo_res = max(characters.geometric_indicator_residual(q, r, n) for r in range(q) for n in range(q))
        yield {"payload": {"identity": "fourier_expansion", "q": q, "residual": fourier}}
        yield {"payload": {"identity": "gauss_sum_modulus", "q": q, "residual": gauss}}
        yield {"payload": {"identity": "orthogonality", "q": q, "exact": orth}}
        yield {"payload": {"identity": "geometric_indicator", "q": q, "exact": geo, "residual": geo_res}}


COMMANDS = {
    "primes": cmd_primes,
    "mean": cmd_mean,
    "distance": cmd_distance,
    "classify": cmd_classify,
    "average": cmd_average,
    "spectra": cmd_spectra,
    "joint": cmd_joint,
    "recurrence": cmd_recurrence,
    "configs": cmd_configs,
    "verify-identities": cmd_verify_identities,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", help="a single N or a comma list")
    common.add_argument("--schedule", help="comma list such as 1e3,1e4,1e5")
    common.add_argument("--out", help="write records here instead of stdout")
    common.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    common.add_argument("--sieve-limit", type=int, help="sieve size bound (default 1e8)")
    common.add_argument("--timing", action="store_true", help="add wall_ms to every record")
    p = argparse.ArgumentParser(prog="pretentious", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    files = ("--fn", "--fn2", "--char", "--system", "--T", "--T2", "--S", "--F", "--G", "--E")
    specs = {
        "primes": (),
        "mean": ("--fn", "--char"),
        "distance": ("--fn", "--fn2"),
        "classify": ("--system",),
        "average": ("--system", "--F", "--fn"),
        "spectra": ("--system", "--T"),
        "joint": ("--T", "--S", "--F", "--G"),
        "recurrence": ("--T", "--T2", "--fn"),
        "configs": ("--E",),
        "verify-identities": (),
    }
    for name, flags in specs.items():
        sp = sub.add_parser(name, parents=[common])
        for flag in flags:
            assert flag in files
            sp.add_argument(flag, metavar="PATH.json")
        if name == "primes":
            sp.add_argument("--limit", type=int)
        if name == "mean":
            sp.add_argument("--method", choices=("direct", "halasz", "both"), default="direct")
            sp.add_argument("--q", type=int)
            sp.add_argument("--r", type=int)
        if name == "recurrence":
            sp.add_argument("--A", help="comma list of residues")
            sp.add_argument("--k", type=int, help="size of the cyclic state space")
        if name == "configs":
            sp.add_argument("--M", help="a single M or a comma list")
        if name == "verify-identities":
            sp.add_argument("--q-max", type=int, default=50)
    return p


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    saved_limit = arith.get_sieve_limit()
    if args.sieve_limit is not None:
        arith.set_sieve_limit(args.sieve_limit)
    params = {k: v for k, v in sorted(vars(args).items()) if v is not None and k not in ("command", "out", "timing")}
    records: list[Record] = []
    try:
        start = time.perf_counter()
        for rec in COMMANDS[args.command](args):
            out = {"command": args.command, "params": params}
            if "N" in rec:
                out["N"] = rec["N"]
            out["payload"] = rec["payload"]
            if args.timing:
                out["wall_ms"] = round((time.perf_counter() - start) * 1000, 3)
            out["version"] = __version__
            records.append(out)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=stderr)
        return 2
    except (PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    finally:
        arith.set_sieve_limit(saved_limit)
    text = to_csv(records) if args.format == "csv" else "".join(dumps(r) + "\n" for r in records)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
