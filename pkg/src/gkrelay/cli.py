"""Command-line interface: ``gkrelay {capacity,sweep,table1,validate}``.

Scenario files are JSON documents with explicit units in the key names::

    {
      "hop1": {"data":         {"k": 1, "m": 1, "d_km": 0.5, "alpha": 4},
               "interference": {"k": 4, "m": 3, "d_km": 0.3, "alpha": 4}},
      "hop2": {"data":         {"k": 1, "m": 1, "d_km": 0.5, "alpha": 4},
               "interference": {"k": 4, "m": 3, "d_km": 0.3, "alpha": 4}},
      "w_db": 10,
      "pmax_db": 20,
      "quadrature_order": 60,
      "regime": "auto",
      "cross_term": "gauss_chebyshev",
      "sweep": {"variable": "w_db", "start": 0, "stop": 15, "points": 16}
    }

``regime`` is ``"auto"``, ``"interference"``, ``"pmax"`` or a two-element
list (one per hop).  ``sweep.variable`` is ``w_db``, ``pmax_db``, a link
field such as ``hop1.interference.d_km``, or one of the shortcuts
``relay_position`` (hop-1 data distance d and hop-2 data distance 1 - d) and
``primary_distance`` (both interference distances).  Unknown keys are
rejected.

Exit status: 0 on success, 2 for an invalid scenario or usage, 3 when a
numerical routine fails to converge, 1 when ``validate`` finds a failure.
"""
import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .capacity import (CROSS_TERM_METHODS, DEFAULT_QUADRATURE_ORDER, Scenario,
                       convergence_study, ergodic_capacity, table1_scenario)
from .channel import GKLink, HopChannels, Regime, SystemParams, linear_to_db
from .errors import DomainError, NonConvergenceError, ParameterError
from .montecarlo import MCConfig, estimate_capacity

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_NONCONVERGENCE = 3

CSV_COLUMNS = ("sweep_value", "capacity_total", "c1", "c2", "c12", "mc_mean",
               "mc_stderr", "n_used", "regime_hop1", "regime_hop2")

# published convergence counts, rows d_j = 0.05, 0.1, 0.3, 0.8; columns 0/10/15 dB
TABLE1_DISTANCES = (0.05, 0.1, 0.3, 0.8)
TABLE1_W_DB = (0.0, 10.0, 15.0)
TABLE1_PUBLISHED = ((49, 51, 51), (52, 56, 57), (57, 58, 58), (58, 59, 60))

_LINK_KEYS = ("k", "m", "d_km", "alpha")
_HOP_KEYS = ("data", "interference")
_TOP_KEYS = ("hop1", "hop2", "w_db", "pmax_db", "quadrature_order", "regime",
             "cross_term", "sweep")
_SWEEP_KEYS = ("variable", "start", "stop", "points")
_SWEEP_SHORTCUTS = ("w_db", "pmax_db", "relay_position", "primary_distance")


class ScenarioFileError(ParameterError):
    """A scenario document is malformed; ``name`` is the dotted key path."""


@dataclass(frozen=True)
class Sweep:
    variable: str
    start: float
    stop: float
    points: int

    def values(self):
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ScenarioFile:
    """A parsed scenario document: the scenario plus an optional sweep."""

    scenario: Scenario
    sweep: Sweep = None


# ---------------------------------------------------------------------------
# scenario documents

def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ScenarioFileError(where or "scenario", "expected an object")
    for key in obj:
        if key not in allowed:
            path = "%s.%s" % (where, key) if where else key
            raise ScenarioFileError(path, "unknown key (allowed: %s)" % ", ".join(allowed))


def _require(obj, key, where):
    if key not in obj:
        path = "%s.%s" % (where, key) if where else key
        raise ScenarioFileError(path, "missing required key")
    return obj[key]


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFileError(path, "expected a number, got %r" % (value,))
    if not math.isfinite(value):
        raise ScenarioFileError(path, "must be finite")
    return float(value)


def _parse_link(obj, where):
    _check_keys(obj, _LINK_KEYS, where)
    fields = {key: _number(_require(obj, key, where), "%s.%s" % (where, key))
              for key in _LINK_KEYS}
    try:
        return GKLink(k=fields["k"], m=fields["m"], d=fields["d_km"], alpha=fields["alpha"])
    except ParameterError as exc:
        name = "d_km" if exc.name == "d" else exc.name
        raise ScenarioFileError("%s.%s" % (where, name), str(exc).split(": ", 1)[-1]) from None


def _parse_hop(obj, where):
    _check_keys(obj, _HOP_KEYS, where)
    return HopChannels(_parse_link(_require(obj, "data", where), where + ".data"),
                       _parse_link(_require(obj, "interference", where), where + ".interference"))


def _parse_regime(value):
    try:
        if isinstance(value, str):
            return (Regime(value), Regime(value))
        if isinstance(value, list) and len(value) == 2:
            return tuple(Regime(v) for v in value)
    except ValueError:
        pass
    raise ScenarioFileError("regime", "expected one of %s or a list of two, got %r"
                            % ([r.value for r in Regime], value))


def _parse_sweep(obj):
    _check_keys(obj, _SWEEP_KEYS, "sweep")
    variable = _require(obj, "variable", "sweep")
    if not isinstance(variable, str) or not _valid_sweep_variable(variable):
        raise ScenarioFileError("sweep.variable", "unsupported sweep variable %r" % (variable,))
    points = _require(obj, "points", "sweep")
    if isinstance(points, bool) or not isinstance(points, int) or points < 1:
        raise ScenarioFileError("sweep.points", "expected a positive integer")
    return Sweep(variable, _number(_require(obj, "start", "sweep"), "sweep.start"),
                 _number(_require(obj, "stop", "sweep"), "sweep.stop"), points)


def _valid_sweep_variable(name):
    if name in _SWEEP_SHORTCUTS:
        return True
    parts = name.split(".")
    return (len(parts) == 3 and parts[0] in ("hop1", "hop2") and parts[1] in _HOP_KEYS
            and parts[2] in _LINK_KEYS)


def parse_scenario(doc):
    """Build a :class:`ScenarioFile` from a decoded JSON document."""
    _check_keys(doc, _TOP_KEYS, "")
    hop1 = _parse_hop(_require(doc, "hop1", ""), "hop1")
    hop2 = _parse_hop(_require(doc, "hop2", ""), "hop2")
    w_db = _number(_require(doc, "w_db", ""), "w_db")
    pmax_db = _number(_require(doc, "pmax_db", ""), "pmax_db")
    order = doc.get("quadrature_order", DEFAULT_QUADRATURE_ORDER)
    if isinstance(order, bool) or not isinstance(order, int) or order < 1:
        raise ScenarioFileError("quadrature_order", "expected a positive integer")
    regime = _parse_regime(doc.get("regime", "auto"))
    cross_term = doc.get("cross_term", "gauss_chebyshev")
    if cross_term not in CROSS_TERM_METHODS:
        raise ScenarioFileError("cross_term", "expected one of %s" % ", ".join(CROSS_TERM_METHODS))
    scn = Scenario(hop1, hop2, SystemParams.from_db(w_db, pmax_db), order, regime, cross_term)
    sweep = _parse_sweep(doc["sweep"]) if "sweep" in doc else None
    return ScenarioFile(scn, sweep)


def load_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioFileError("scenario", "cannot read %s: %s" % (path, exc.strerror)) from None
    except json.JSONDecodeError as exc:
        raise ScenarioFileError("scenario", "invalid JSON: %s" % exc) from None
    return parse_scenario(doc)


def _link_doc(link):
    return {"k": link.k, "m": link.m, "d_km": link.d, "alpha": link.alpha}


def _db(value):
    # snap values that only drifted through the dB <-> linear round trip
    db = float(linear_to_db(value))
    return round(db, 12)


def scenario_to_doc(sf):
    """Inverse of :func:`parse_scenario`."""
    scn = sf.scenario
    regime = [r.value for r in scn.regime]
    doc = {
        "hop1": {"data": _link_doc(scn.hop1.data), "interference": _link_doc(scn.hop1.interference)},
        "hop2": {"data": _link_doc(scn.hop2.data), "interference": _link_doc(scn.hop2.interference)},
        "w_db": _db(scn.sys.w_over_n0),
        "pmax_db": _db(scn.sys.pmax_over_n0),
        "quadrature_order": scn.quadrature_order,
        "regime": regime[0] if regime[0] == regime[1] else regime,
        "cross_term": scn.cross_term,
    }
    if sf.sweep is not None:
        doc["sweep"] = {"variable": sf.sweep.variable, "start": sf.sweep.start,
                        "stop": sf.sweep.stop, "points": sf.sweep.points}
    return doc


def apply_sweep_value(scn, variable, value):
    """Scenario with the sweep variable set to ``value``."""
    value = float(value)
    if variable == "w_db":
        return scn.with_(sys=SystemParams.from_db(value, _db(scn.sys.pmax_over_n0)))
    if variable == "pmax_db":
        return scn.with_(sys=SystemParams.from_db(_db(scn.sys.w_over_n0), value))
    if variable == "relay_position":
        return scn.with_(
            hop1=HopChannels(_replace_link(scn.hop1.data, "d_km", value), scn.hop1.interference),
            hop2=HopChannels(_replace_link(scn.hop2.data, "d_km", 1.0 - value), scn.hop2.interference))
    if variable == "primary_distance":
        return scn.with_(
            hop1=HopChannels(scn.hop1.data, _replace_link(scn.hop1.interference, "d_km", value)),
            hop2=HopChannels(scn.hop2.data, _replace_link(scn.hop2.interference, "d_km", value)))
    hop_name, role, key = variable.split(".")
    hop = getattr(scn, hop_name)
    links = {"data": hop.data, "interference": hop.interference}
    links[role] = _replace_link(links[role], key, value)
    return scn.with_(**{hop_name: HopChannels(links["data"], links["interference"])})


def _replace_link(link, key, value):
    fields = _link_doc(link)
    fields[key] = value
    try:
        return GKLink(k=fields["k"], m=fields["m"], d=fields["d_km"], alpha=fields["alpha"])
    except ParameterError as exc:
        raise ScenarioFileError("sweep", "value %g gives an invalid link: %s" % (value, exc)) from None


# ---------------------------------------------------------------------------
# output

def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row(sweep_value, result, mc=None):
    return [sweep_value, result.total, result.c1, result.c2, result.c12,
            None if mc is None else mc.mean, None if mc is None else mc.std_error,
            result.n_used, result.regime_used[0].value, result.regime_used[1].value]


def write_csv(rows, out):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands

def _mc_config(args):
    if not args.with_mc:
        return None
    samples, seed = args.samples, args.seed
    for token in args.with_mc:
        key, _, value = token.partition("=")
        try:
            if key == "n":
                samples = int(float(value))
            elif key == "seed":
                seed = int(value)
            else:
                raise ValueError
        except ValueError:
            raise ScenarioFileError("--with-mc", "expected n=<N> or seed=<S>, got %r" % token) from None
    return MCConfig(n_samples=samples, seed=seed)


def _load_with_overrides(args):
    sf = load_scenario(args.scenario)
    scn = sf.scenario
    if args.quadrature_n is not None:
        if args.quadrature_n < 1:
            raise ScenarioFileError("quadrature_order", "must be positive")
        scn = scn.with_(quadrature_order=args.quadrature_n)
    if args.regime is not None:
        scn = scn.with_(regime=Regime(args.regime))
    if args.cross_term is not None:
        scn = scn.with_(cross_term=args.cross_term)
    return ScenarioFile(scn, sf.sweep)


def _evaluate(scn, mc_cfg):
    result = ergodic_capacity(scn)
    mc = estimate_capacity(scn, mc_cfg) if mc_cfg is not None else None
    return result, mc


def _dump(sf):
    json.dump(scenario_to_doc(sf), sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_capacity(args):
    sf = _load_with_overrides(args)
    if args.dump_config:
        _dump(sf)
        return EXIT_OK
    result, mc = _evaluate(sf.scenario, _mc_config(args))
    write_csv([_row(None, result, mc)], args.out)
    return EXIT_OK


def cmd_sweep(args):
    sf = _load_with_overrides(args)
    if args.dump_config:
        _dump(sf)
        return EXIT_OK
    if sf.sweep is None:
        raise ScenarioFileError("sweep", "missing required key for the sweep command")
    mc_cfg = _mc_config(args)
    values = sf.sweep.values()
    scenarios = [apply_sweep_value(sf.scenario, sf.sweep.variable, v) for v in values]
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(lambda scn: _evaluate(scn, mc_cfg), scenarios))
    write_csv([_row(float(v), r, mc) for v, (r, mc) in zip(values, results)], args.out)
    return EXIT_OK


def table1_counts(max_n=200):
    """Convergence counts for every cell of the published table."""
    return [[convergence_study(table1_scenario(d, w), max_n=max_n) for w in TABLE1_W_DB]
            for d in TABLE1_DISTANCES]


def cmd_table1(args):
    counts = table1_counts(args.max_n)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["d_j", "w_db", "n_computed", "n_published", "delta"])
    for d, row, published in zip(TABLE1_DISTANCES, counts, TABLE1_PUBLISHED):
        for w, n, ref in zip(TABLE1_W_DB, row, published):
            writer.writerow([repr(d), repr(w), n, ref, n - ref])
    text = buf.getvalue()
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_validate(args):
    from . import validation
    checks = validation.run_checks(samples=args.samples, seed=args.seed)
    failed = 0
    for check in checks:
        print("%s  %-44s %s" % ("PASS" if check.passed else "FAIL", check.name, check.detail))
        failed += not check.passed
    print("%d/%d checks passed" % (len(checks) - failed, len(checks)))
    return EXIT_OK if failed == 0 else EXIT_FAILED


# ---------------------------------------------------------------------------

def _add_scenario_options(p):
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", default="-", help="output CSV path (default: stdout)")
    p.add_argument("--with-mc", nargs="*", metavar="KEY=VALUE", default=None,
                   help="add Monte Carlo columns; optional n=<N> seed=<S>")
    p.add_argument("--samples", type=int, default=1_000_000,
                   help="Monte Carlo samples (default: %(default)s)")
    p.add_argument("--seed", type=int, default=1, help="Monte Carlo seed")
    p.add_argument("--quadrature-n", type=int, default=None,
                   help="Gauss-Chebyshev order (overrides the scenario)")
    p.add_argument("--regime", choices=[r.value for r in Regime], default=None,
                   help="regime for both hops (overrides the scenario)")
    p.add_argument("--cross-term", choices=CROSS_TERM_METHODS, default=None,
                   help="integration method for C12 (overrides the scenario)")
    p.add_argument("--dump-config", action="store_true",
                   help="print the effective scenario as JSON and exit")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gkrelay",
        description="Ergodic capacity of underlay cognitive dual-hop AF relaying "
                    "over generalized-K fading.")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="capacity of a single scenario")
    _add_scenario_options(p)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("sweep", help="capacity curve along the scenario's sweep axis")
    _add_scenario_options(p)
    p.add_argument("--jobs", type=int, default=1, help="sweep points evaluated concurrently")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("table1", help="quadrature convergence counts vs the published table")
    p.add_argument("--out", default="-", help="output CSV path (default: stdout)")
    p.add_argument("--max-n", type=int, default=200, help="largest order tried")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("validate", help="run the built-in oracle checks")
    p.add_argument("--samples", type=int, default=1_000_000,
                   help="Monte Carlo samples per check (default: %(default)s)")
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print("gkrelay: invalid scenario: %s" % exc, file=sys.stderr)
        return EXIT_INVALID
    except NonConvergenceError as exc:
        op = exc.operation or "numerical routine"
        print("gkrelay: %s did not converge: %s" % (op, exc), file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except DomainError as exc:
        print("gkrelay: invalid input: %s" % exc, file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
