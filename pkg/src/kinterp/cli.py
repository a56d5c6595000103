"""Command-line front end: parse JSON inputs, dispatch, emit CSV/JSON.

One process per job, no daemon, no network.  All randomness flows from the
single 64-bit ``--seed`` through one generator (numpy ``default_rng``, i.e.
PCG64), so a fixed JobSpec produces byte-identical artifacts.

Exit codes: 0 success; 2 validation error (malformed JSON, empty element,
bad flags); 3 numeric failure (majorant hypothesis violated, LP iteration
limit).  Failure detail goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .concave import ConcavePL
from .convexity import convexify_element, l_convexity_probe, pq_convexity_probe
from .couples import (
    SpaceLeg,
    couple_from_json,
    element_from_json,
    element_to_json,
)
from .divisibility import HypothesisViolation, k_divide, p_k_divide
from .cmlab import cm_witness_l1_linf, kpq_probe, non_cm_demo
from .elements import StepFunction, WeightedSeq
from .grid import DyadicGrid, default_grid
from .kfunctional import k_curve
from .kmethod import ParameterLattice, k_space_norm, orbit_norm

__all__ = ["JobSpec", "run", "main"]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3

COMMANDS = (
    "kfunc",
    "norm",
    "orbit",
    "divide",
    "pdivide",
    "witness",
    "probe",
    "convexify",
    "demo",
)


@dataclass(frozen=True)
class JobSpec:
    """One CLI job: a command plus its parsed inputs."""

    command: str
    options: dict = field(default_factory=dict)
    grid: DyadicGrid | None = None
    seed: int = 0
    out: str | None = None
    accuracy: float = 1e-8

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")


def _load_json(text: str):
    """Inline JSON, or @path to read a file."""
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def _fmt(v: float) -> str:
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return f"{v:.17g}"


def _write(out: str | None, payload: str):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _json_payload(data) -> str:
    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        if isinstance(obj, np.ndarray):
            return [clean(v) for v in obj.tolist()]
        if isinstance(obj, (np.floating, np.integer)):
            obj = obj.item()
        if isinstance(obj, float) and math.isinf(obj):
            return "inf"
        return obj

    return json.dumps(clean(data), sort_keys=True, indent=2) + "\n"


def _csv_payload(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _element(options, key="element"):
    el = element_from_json(options[key])
    vals = el.values if isinstance(el, (WeightedSeq, StepFunction)) else el
    if np.asarray(vals).size == 0:
        raise ValueError("empty element")
    return el


def _majorants(options, grid: DyadicGrid, couple, element, accuracy):
    spec = options["majorants"]
    if isinstance(spec, dict) and "proportional" in spec:
        lams = np.asarray(spec["proportional"], dtype=float)
        if lams.size == 0 or np.any(lams <= 0):
            raise ValueError("proportional majorant weights must be positive")
        base = k_curve(element, couple, grid=grid, accuracy=accuracy).curve
        return [base.scaled(float(l)) for l in lams]
    out = []
    for item in spec:
        knots = np.asarray(item["knots"], dtype=float)
        out.append(
            ConcavePL(knots[:, 0], knots[:, 1], float(item.get("terminal_slope", 0.0)))
        )
    return out


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------


def _run_kfunc(job: JobSpec) -> str:
    couple = couple_from_json(job.options["couple"])
    el = _element(job.options)
    grid = job.grid or default_grid()
    curve = k_curve(el, couple, grid=grid, accuracy=job.accuracy)
    ts = grid.points()
    ks = curve.at(ts)
    return _csv_payload(["t", "K"], zip(map(float, ts), map(float, ks)))


def _run_norm(job: JobSpec) -> str:
    couple = couple_from_json(job.options["couple"])
    el = _element(job.options)
    param = ParameterLattice.from_json(job.options["param"])
    value = k_space_norm(el, couple, param, accuracy=job.accuracy)
    return _json_payload({"norm": value, "diverged": math.isinf(value)})


def _run_orbit(job: JobSpec) -> str:
    couple_y = couple_from_json(job.options["couple"])
    y = _element(job.options)
    couple_x = (
        couple_from_json(job.options["target_couple"])
        if job.options.get("target_couple")
        else couple_y
    )
    x = _element(job.options, "target_element")
    grid = job.grid or default_grid()
    cy = k_curve(y, couple_y, grid=grid, accuracy=job.accuracy)
    cx = k_curve(x, couple_x, grid=grid, accuracy=job.accuracy)
    return _json_payload({"orbit_norm": orbit_norm(cy, cx)})


def _run_divide(job: JobSpec, p: float | None = None) -> str:
    couple = couple_from_json(job.options["couple"])
    el = _element(job.options)
    grid = job.grid or default_grid()
    majorants = _majorants(job.options, grid, couple, el, job.accuracy)
    if p is None:
        cert = k_divide(el, couple, majorants, grid=grid)
    else:
        cert = p_k_divide(el, couple, p, majorants, grid=grid)
    return _json_payload(cert.to_json())


def _run_witness(job: JobSpec) -> str:
    x = _element(job.options)
    y = _element(job.options, "target_element")
    if not isinstance(x, WeightedSeq) or not isinstance(y, WeightedSeq):
        raise ValueError("operator witnesses act on sequence elements")
    bound = float(job.options.get("bound", 1.0))
    w = cm_witness_l1_linf(list(np.asarray(x.values)), list(np.asarray(y.values)), bound)
    if w.status == "iteration_limit":
        raise _NumericFailure("LP iteration limit reached")
    return _json_payload(w.to_json())


def _run_probe(job: JobSpec) -> str:
    kind = job.options.get("kind")
    rng = np.random.default_rng(job.seed)
    if kind == "pq":
        leg = SpaceLeg("seq", float(job.options["leg_exponent"]))
        est = pq_convexity_probe(
            leg,
            float(job.options["p"]),
            float(job.options["q"]),
            int(job.options.get("budget", 200)),
            dim=int(job.options.get("dim", 8)),
            rng=rng,
        )
        return _json_payload({"kind": "pq", "bound": est.bound, "budget": est.budget})
    if kind == "l":
        leg = SpaceLeg("seq", float(job.options["leg_exponent"]))
        est = l_convexity_probe(
            leg,
            int(job.options.get("budget", 200)),
            dim=int(job.options.get("dim", 8)),
            rng=rng,
        )
        return _json_payload({"kind": "l", "bound": est.bound, "budget": est.budget})
    if kind == "kpq":
        couple = couple_from_json(job.options["couple"])
        leg = SpaceLeg("seq", float(job.options["leg_exponent"]))
        est = kpq_probe(
            leg,
            couple,
            float(job.options["p"]),
            float(job.options["q"]),
            int(job.options.get("trials", 100)),
            dim=int(job.options.get("dim", 8)),
            rng=rng,
            grid=job.grid or default_grid(),
        )
        return _json_payload(
            {"kind": "kpq", "trials": est.trials, "worst_ratio": est.worst_ratio}
        )
    raise ValueError(f"unknown probe kind {kind!r}")


def _run_convexify(job: JobSpec) -> str:
    couple = couple_from_json(job.options["couple"])
    el = _element(job.options)
    p = float(job.options["p"])
    leg = couple.legs()[int(job.options.get("leg", 0))]
    view = convexify_element(el, p, leg)
    return _json_payload(
        {"element": element_to_json(el), "p": p, "norm_convexified": view.norm}
    )


def _run_demo(job: JobSpec) -> str:
    which = job.options.get("name")
    if which != "non-cm":
        raise ValueError(f"unknown demo {which!r}")
    p = float(job.options["p"])
    q = job.options.get("q", "inf")
    q = math.inf if q in ("inf", None) else float(q)
    rows = non_cm_demo(p, q, int(job.options.get("nmax", 16)))
    return _csv_payload(
        ["n", "ratio_lp_l1", "sup_K"],
        [(r["n"], float(r["ratio_lp_l1"]), float(r["sup_K"])) for r in rows],
    )


class _NumericFailure(RuntimeError):
    pass


def run(job: JobSpec) -> tuple[int, str]:
    """Execute a job; returns (exit_code, artifact payload)."""
    try:
        if job.command == "kfunc":
            payload = _run_kfunc(job)
        elif job.command == "norm":
            payload = _run_norm(job)
        elif job.command == "orbit":
            payload = _run_orbit(job)
        elif job.command == "divide":
            payload = _run_divide(job)
        elif job.command == "pdivide":
            payload = _run_divide(job, p=float(job.options["p"]))
        elif job.command == "witness":
            payload = _run_witness(job)
        elif job.command == "probe":
            payload = _run_probe(job)
        elif job.command == "convexify":
            payload = _run_convexify(job)
        elif job.command == "demo":
            payload = _run_demo(job)
        else:  # pragma: no cover - guarded by JobSpec
            raise ValueError(f"unknown command {job.command!r}")
    except (HypothesisViolation, _NumericFailure) as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC, ""
    except (ValueError, KeyError, TypeError, json.JSONDecodeError, OSError) as err:
        print(f"validation error: {err}", file=sys.stderr)
        return EXIT_VALIDATION, ""
    _write(job.out, payload)
    return EXIT_OK, payload


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kinterp",
        description="K-method interpolation toolkit (CSV/JSON in, CSV/JSON out)",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("name", nargs="?", help="demo name (for the demo command)")
    ap.add_argument("--couple", help="couple JSON or @file")
    ap.add_argument("--element", help="element JSON or @file")
    ap.add_argument("--target-element", help="second element JSON (orbit, witness)")
    ap.add_argument("--target-couple", help="second couple JSON (orbit)")
    ap.add_argument("--param", help="parameter lattice JSON or @file")
    ap.add_argument("--majorants", help="majorant list JSON or @file")
    ap.add_argument("--grid", help="dyadic grid 'n_min:n_max:per_octave'")
    ap.add_argument("--seed", type=int, default=0, help="64-bit seed for all randomness")
    ap.add_argument("--out", help="artifact path (default: stdout)")
    ap.add_argument("--accuracy", type=float, default=1e-8)
    ap.add_argument("--bound", type=float, help="operator norm bound (witness)")
    ap.add_argument("--p", help="exponent p (pdivide, probe, demo, convexify)")
    ap.add_argument("--q", help="exponent q (probe, demo)")
    ap.add_argument("--kind", help="probe kind: pq | l | kpq")
    ap.add_argument("--leg-exponent", help="probe leg exponent r")
    ap.add_argument("--leg", help="couple leg index (convexify)")
    ap.add_argument("--dim", help="probe dimension")
    ap.add_argument("--budget", help="probe budget")
    ap.add_argument("--trials", help="probe trials")
    ap.add_argument("--nmax", help="demo table size")
    return ap


def job_from_argv(argv) -> JobSpec:
    ns = _build_parser().parse_args(argv)
    options: dict = {}
    for key in ("couple", "element", "param", "majorants"):
        raw = getattr(ns, key)
        if raw is not None:
            options[key] = _load_json(raw)
    if ns.target_element is not None:
        options["target_element"] = _load_json(ns.target_element)
    if ns.target_couple is not None:
        options["target_couple"] = _load_json(ns.target_couple)
    for key in ("kind", "leg_exponent", "leg", "dim", "budget", "trials", "nmax", "p", "q"):
        val = getattr(ns, key)
        if val is not None:
            options[key] = val
    if ns.bound is not None:
        options["bound"] = ns.bound
    if ns.name is not None:
        options["name"] = ns.name
    grid = DyadicGrid.parse(ns.grid) if ns.grid else None
    return JobSpec(
        command=ns.command,
        options=options,
        grid=grid,
        seed=ns.seed,
        out=ns.out,
        accuracy=ns.accuracy,
    )


def main(argv=None) -> int:
    try:
        job = job_from_argv(argv if argv is not None else sys.argv[1:])
    except (ValueError, json.JSONDecodeError, OSError) as err:
        print(f"validation error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as err:  # argparse reports its own message
        return EXIT_VALIDATION if err.code not in (0, None) else EXIT_OK
    code, _ = run(job)
    return code


if __name__ == "__main__":
    sys.exit(main())
