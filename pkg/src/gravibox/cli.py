"""``gravibox`` command line front end.

Every subcommand writes one CSV table (see :mod:`gravibox.table`). Values
come from built-in defaults, then an optional ``--config`` file of
``key=value`` lines, then command-line flags, in increasing precedence.
"""

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from . import classical, quantum
from .errors import DomainError, GraviboxError
from .table import CsvTable

_PI_EXPR = re.compile(r"^\s*(?:([-+]?[0-9.eE+-]+)\s*\*\s*)?pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_number(text):
    """Float, or a multiple of pi such as ``pi/4`` or ``2*pi/3``."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _PI_EXPR.match(str(text))
    try:
        if m:
            num = float(m.group(1)) if m.group(1) else 1.0
            den = float(m.group(2)) if m.group(2) else 1.0
            return num * math.pi / den
        return float(text)
    except ValueError:
        raise DomainError(f"not a number: {text!r}") from None


def parse_int(text):
    value = parse_number(text)
    if value != int(value):
        raise DomainError(f"not an integer: {text!r}")
    return int(value)


def parse_choice(*choices):
    def parse(text):
        text = str(text).strip()
        if text not in choices:
            raise DomainError(f"{text!r} is not one of {', '.join(choices)}")
        return text
    return parse


_QUANTUM = {
    "scale": (parse_number, 0.1),
    "side": (parse_number, 1.0),
    "hbar": (parse_number, 1.0),
    "mass": (parse_number, 1.0),
    "gravity": (parse_number, None),
}

SCHEMAS = {
    "orbit": {
        "x0": (parse_number, 0.25),
        "energy": (parse_number, 1.0),
        "angle": (parse_number, math.pi / 4),
        "mass": (parse_number, 1.0),
        "gravity": (parse_number, 1.0),
        "side": (parse_number, 1.0),
        "max_events": (parse_int, 40),
        "max_denominator": (parse_int, classical.DEFAULT_MAX_DENOMINATOR),
    },
    "cdensity": {
        "h": (parse_number, 0.5),
        "side": (parse_number, 1.0),
        "points": (parse_int, 101),
        "singular_clip": (parse_number, 1e-6),
    },
    "spectrum": dict(_QUANTUM, eps_max=(parse_number, 40.0), count=(parse_int, None)),
    "wavefn": dict(
        _QUANTUM,
        regime=(parse_choice("low", "high"), "low"),
        index=(parse_int, 3),
        method=(parse_choice("approx", "exact"), "approx"),
        points=(parse_int, 201),
        n=(parse_int, None),
        nx=(parse_int, 41),
        ny=(parse_int, 41),
    ),
    "expect": dict(
        _QUANTUM,
        kind=(parse_choice("classical", "quantum"), "classical"),
        h_min=(parse_number, 0.05),
        h_max=(parse_number, 5.0),
        points=(parse_int, 100),
        regime=(parse_choice("low", "high"), "high"),
        index_min=(parse_int, 12),
        index_max=(parse_int, 40),
        method=(parse_choice("approx", "exact"), "exact"),
        with_quadrature=(parse_int, 0),
    ),
    "compare": dict(
        _QUANTUM,
        index=(parse_int, 12),
        bins=(parse_int, 10),
        method=(parse_choice("approx", "exact"), "exact"),
    ),
}


@dataclass
class RunConfig:
    """Validated parameters for one subcommand."""

    mode: str
    params: dict = field(default_factory=dict)
    out: str = None

    @classmethod
    def build(cls, mode, file_values=None, flag_values=None, out=None):
        if mode not in SCHEMAS:
            raise DomainError(f"unknown mode {mode!r}")
        schema = SCHEMAS[mode]
        raw = {}
        for source in (file_values or {}, flag_values or {}):
            for key, value in source.items():
                if key not in schema:
                    raise DomainError(f"unknown parameter {key!r} for {mode}")
                if value is not None:
                    raw[key] = value
        params = {}
        for key, (convert, default) in schema.items():
            params[key] = convert(raw[key]) if key in raw else default
        return cls(mode=mode, params=params, out=out)

    def metadata(self):
        meta = {"command": self.mode}
        for key in sorted(self.params):
            value = self.params[key]
            if value is not None:
                meta[key] = value
        return meta


def read_config_file(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise DomainError(f"{path}:{lineno}: expected key=value")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _quantum_config(p):
    if p.get("gravity") is not None:
        return quantum.QuantumConfig(hbar=p["hbar"], mass=p["mass"], gravity=p["gravity"],
                                     side=p["side"])
    return quantum.QuantumConfig.from_scale(p["scale"], p["side"], hbar=p["hbar"], mass=p["mass"])


def _sign(v):
    return 0 if v == 0 else (1 if v > 0 else -1)


def cmd_orbit(config):
    """Bounce events of a classical run plus the periodicity verdict."""
    p = config.params
    spec = classical.LaunchSpec(x0=p["x0"], energy=p["energy"], angle=p["angle"],
                                mass=p["mass"], gravity=p["gravity"], side=p["side"])
    verdict = classical.classify_orbit(spec, p["max_denominator"])
    traj = classical.simulate(spec, p["max_events"])
    table = CsvTable(["event_index", "wall", "x", "y", "vx_sign", "vy_sign"], meta=config.metadata())
    table.meta["result.verdict"] = verdict.describe()
    table.meta["result.h"] = spec.h
    if verdict.ratio is not None:
        table.meta["result.ratio"] = verdict.ratio
    g = spec.gravity
    vx0, vy0 = traj.segments[0].start_velocity
    table.add(0, "launch", spec.x0, 0.0, _sign(vx0), _sign(vy0))
    i = 1
    for seg in traj.segments:
        vx, vy = seg.start_velocity
        if vy > 1e-12 * spec.speed and vy / g < seg.duration:
            tau = vy / g
            x, y = seg.position(tau, g)
            table.add(i, "apex", x, y, _sign(vx), 0)
            i += 1
        x, y = seg.end
        evx, evy = seg.end_velocity
        wall = seg.wall_hit
        if wall in (classical.Wall.LEFT, classical.Wall.RIGHT):
            evx = -evx
        elif wall in (classical.Wall.FLOOR, classical.Wall.CEILING):
            evy = -evy
        label = wall.value if seg.corner is None else f"corner_{seg.corner}"
        table.add(i, label, x, y, _sign(evx), _sign(evy))
        i += 1
    return table


def cmd_cdensity(config):
    """Classical density profile along ``y``; rows near the singularity are clipped."""
    p = config.params
    h, L = p["h"], p["side"]
    if p["points"] < 2:
        raise DomainError("points must be >= 2")
    table = CsvTable(["y", "rho", "clipped"], meta=config.metadata())
    table.meta["result.normalization"] = classical.normalization(h, L)
    clip = p["singular_clip"] * h
    for y in np.linspace(0.0, L, p["points"]):
        y = float(y)
        clipped = h <= L and abs(h - y) <= clip
        value = classical.density(min(y, h - clip) if clipped else y, h, L)
        table.add(y, value, clipped)
    return table


def _wkb_energy_row(qc, index):
    eps = quantum.wkb_low_eps(index)
    return eps if qc.scale * eps < qc.side else None


def cmd_spectrum(config):
    """Exact eigenvalues with their WKB and Taylor companions where admissible."""
    p = config.params
    qc = _quantum_config(p)
    eps_max, count = p["eps_max"], p["count"]
    table = CsvTable(["index", "method", "eps", "E_y", "regime_flag", "rel_diff_vs_exact"],
                     meta=config.metadata())
    if count is not None:
        if count < 0:
            raise DomainError("count must be >= 0")
        eps_max = max(eps_max, 1.0)
        roots = quantum.exact_eigenvalues(qc, eps_max)
        while roots.size < count:
            eps_max *= 2.0
            roots = quantum.exact_eigenvalues(qc, eps_max)
        roots = roots[:count]
    else:
        roots = quantum.exact_eigenvalues(qc, eps_max) if eps_max > 0 else np.empty(0)
    table.meta["result.roots"] = int(roots.size)
    for i, eps in enumerate(roots, 1):
        table.add(i, "exact", eps, qc.energy(eps), qc.ell - eps, 0.0)
        wkb = _wkb_energy_row(qc, i)
        if wkb is not None:
            table.add(i, "wkb", wkb, qc.energy(wkb), qc.ell - wkb, abs(wkb - eps) / eps)
        try:
            tay = quantum.taylor_high_eps(qc, i)
        except GraviboxError:
            continue
        nearest = roots[int(np.argmin(np.abs(roots - tay)))]
        table.add(i, "taylor", tay, qc.energy(tay), qc.ell - tay, abs(tay - nearest) / nearest)
    return table


def _mode(qc, p, regime, index):
    method = quantum.Method(p["method"])
    if regime == "low":
        return quantum.low_mode(qc, index, method)
    return quantum.high_mode(qc, index, method)


def cmd_wavefn(config):
    """``|Y|^2`` profile, or the full ``|X_n|^2 |Y|^2`` grid when ``n`` is set."""
    p = config.params
    qc = _quantum_config(p)
    mode = _mode(qc, p, p["regime"], p["index"])
    meta = config.metadata()
    meta["result.eps"] = mode.eps
    meta["result.E_y"] = mode.energy
    if p["n"] is not None:
        x, y, rho = quantum.density_grid(qc, p["n"], mode, p["nx"], p["ny"])
        table = CsvTable(["x", "y", "rho"], meta=meta)
        table.meta["result.riemann_sum"] = quantum.grid_probability(x, y, rho)
        for j, yj in enumerate(y):
            for i, xi in enumerate(x):
                table.add(float(xi), float(yj), float(rho[j, i]))
        return table
    if p["points"] < 2:
        raise DomainError("points must be >= 2")
    y = np.linspace(0.0, qc.side, p["points"])
    psi = mode(y)
    table = CsvTable(["y", "psi", "rho"], meta=meta)
    for yi, v in zip(y, psi):
        table.add(float(yi), float(v), float(v * v))
    return table


def cmd_expect(config):
    """Sweep of ``<y>`` and ``Delta y`` over ``h`` (classical) or quantum number."""
    p = config.params
    table = CsvTable(["sweep_value", "mean_y", "stddev_y", "mean_minus", "mean_plus", "source"],
                     meta=config.metadata())
    if p["kind"] == "classical":
        if p["points"] < 1:
            raise DomainError("points must be >= 1")
        for h in np.linspace(p["h_min"], p["h_max"], p["points"]):
            m = classical.moments_y(float(h), p["side"])
            table.add(float(h), m.mean, m.stddev, m.mean - m.stddev, m.mean + m.stddev,
                      "closed_form")
        return table
    qc = _quantum_config(p)
    if p["index_max"] < p["index_min"]:
        raise DomainError("index_max must be >= index_min")
    for index in range(p["index_min"], p["index_max"] + 1):
        mode = _mode(qc, p, p["regime"], index)
        reports = [quantum.qm_moments_y(qc, mode)]
        if p["with_quadrature"]:
            reports.append(quantum.qm_moments_quadrature(qc, mode))
        for rep in reports:
            table.add(index, rep.mean, rep.stddev, rep.mean - rep.stddev, rep.mean + rep.stddev,
                      rep.source.value)
    return table


def cmd_compare(config):
    """Coarse-grained quantum vs classical ``y`` densities at matched energy."""
    p = config.params
    qc = _quantum_config(p)
    mode = _mode(qc, p, "high", p["index"])
    edges, pq, pc, l1 = quantum.correspondence(qc, mode, p["bins"])
    table = CsvTable(["bin", "y_lo", "y_hi", "p_quantum", "p_classical", "abs_diff"],
                     meta=config.metadata())
    table.meta["result.h"] = mode.energy / (qc.mass * qc.gravity)
    table.meta["result.l1_distance"] = l1
    for i in range(len(pq)):
        table.add(i, float(edges[i]), float(edges[i + 1]), float(pq[i]), float(pc[i]),
                  float(abs(pq[i] - pc[i])))
    return table


COMMANDS = {
    "orbit": cmd_orbit,
    "cdensity": cmd_cdensity,
    "spectrum": cmd_spectrum,
    "wavefn": cmd_wavefn,
    "expect": cmd_expect,
    "compare": cmd_compare,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser():
    parser = _Parser(prog="gravibox", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, func in COMMANDS.items():
        sp = sub.add_parser(mode, help=func.__doc__.splitlines()[0])
        sp.add_argument("--config", metavar="FILE", help="key=value parameter file")
        sp.add_argument("--out", metavar="FILE", help="write CSV here instead of stdout")
        for key in SCHEMAS[mode]:
            sp.add_argument("--" + key.replace("_", "-"), dest=key, default=None, metavar="VALUE")
    return parser


def run(argv=None):
    """Parse ``argv`` and return ``(RunConfig, CsvTable)``."""
    args = build_parser().parse_args(argv)
    flags = {k: getattr(args, k) for k in SCHEMAS[args.mode]}
    file_values = read_config_file(args.config) if args.config else None
    config = RunConfig.build(args.mode, file_values, flags, out=args.out)
    return config, COMMANDS[config.mode](config)


def _fail(kind, message, code):
    print(json.dumps({"error": kind, "message": str(message)}), file=sys.stderr)
    return code


def main(argv=None):
    try:
        config, table = run(argv)
    except _UsageError as exc:
        return _fail("UsageError", exc, 2)
    except (GraviboxError, OSError) as exc:
        return _fail(type(exc).__name__, exc, 1)
    text = table.to_text()
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
