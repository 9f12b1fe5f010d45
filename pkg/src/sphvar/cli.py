"""Command-line front end.

Usage::

    sphvar SUBCOMMAND [key=value ...] [--config FILE] [--out FILE] [--check] [--seed N]

Subcommands are ``bessel``, ``multiplier``, ``variation``, ``mean``,
``scaling`` and ``linfty``.  Parameters are ``key=value`` pairs, read from
``--config`` (one pair per line, ``#`` starts a comment) and then from the
command line, which wins on conflicts.  A JSON summary goes to stdout;
tables go to ``--out`` as CSV (grid fields as binary, see
:class:`sphvar.means.GridField`).

Exit status: 0 on success, 1 when ``--check`` finds a threshold violated,
2 on configuration or input errors, 3 when a quadrature cannot reach its
tolerance within the node budget.
"""
import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .counterexamples import (
    ChirpSpec,
    chirp_profile,
    linfty_experiment,
    scaling_experiment,
)
from .means import (
    GridField,
    RadialStep,
    ResolutionError,
    apply_mean_grid,
    mean_radial_freq,
    mean_step_at_origin,
)
from .special import (
    DEFAULT_CONFIG,
    bessel,
    bessel_asymptotic,
    bessel_series,
    gamma,
    multiplier,
)
from .variation import (
    SampledPath,
    jump_count,
    short_variation,
    var_inf,
    var_norm,
)

__all__ = ["ConfigError", "parse_config", "read_path_csv", "write_path_csv", "run", "main"]

SUBCOMMANDS = ("bessel", "multiplier", "variation", "mean", "scaling", "linfty")

# --check thresholds
SLOPE_TOL = 0.15
BRANCH_TOL = 1e-8
LIMIT_TOL = 1e-10


class ConfigError(ValueError):
    """Bad or missing parameters, or unreadable input files."""


# ---------------------------------------------------------------------------
# Config and path files
# ---------------------------------------------------------------------------

def parse_config(text, source="<config>"):
    """Parse ``key=value`` lines into a dict of strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        out[key] = val
    return out


def _parse_pairs(tokens):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ConfigError(f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        out[key.strip()] = val.strip()
    return out


class _Params:
    """Typed access to string parameters, tracking which keys were used."""

    def __init__(self, raw):
        self.raw = dict(raw)
        self.used = set()

    def _get(self, key, default, conv, kind):
        self.used.add(key)
        if key not in self.raw:
            if default is _REQUIRED:
                raise ConfigError(f"missing required key {key!r}")
            return default
        try:
            return conv(self.raw[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: cannot read {self.raw[key]!r} as {kind}") from None

    def float(self, key, default=None):
        return self._get(key, default, float, "a number")

    def int(self, key, default=None):
        return self._get(key, default, int, "an integer")

    def str(self, key, default=None):
        return self._get(key, default, str, "a string")

    def floats(self, key, default=None):
        return self._get(key, default, lambda s: [float(v) for v in s.split(",") if v.strip()],
                         "a comma-separated list of numbers")

    def complex(self, stem, default_re=None):
        re = self.float(f"{stem}_re", default_re)
        im = self.float(f"{stem}_im", 0.0)
        return complex(re, im)

    def has(self, key):
        return key in self.raw

    def check_unused(self):
        extra = sorted(set(self.raw) - self.used)
        if extra:
            raise ConfigError(f"unknown key(s): {', '.join(extra)}")


_REQUIRED = object()


def read_path_csv(file):
    """Read a path from CSV with header ``t,re`` or ``t,re,im``.

    ``file`` is a path or an open text stream.  Errors name the offending
    line (header = line 1) and column.
    """
    if isinstance(file, str):
        with open(file, newline="") as fh:
            return read_path_csv(fh)
    rows = list(csv.reader(file))
    if not rows:
        raise ConfigError("path CSV is empty")
    header = [h.strip() for h in rows[0]]
    if header not in (["t", "re"], ["t", "re", "im"]):
        raise ConfigError(f"line 1: header must be 't,re' or 't,re,im', got {','.join(header)!r}")
    ncol = len(header)
    t, v = [], []
    for lineno, row in enumerate(rows[1:], 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != ncol:
            raise ConfigError(f"line {lineno}: expected {ncol} fields, got {len(row)}")
        vals = []
        for col, (name, cell) in enumerate(zip(header, row), 1):
            try:
                x = float(cell)
            except ValueError:
                raise ConfigError(f"line {lineno}, column {col} ({name}): not a number: {cell!r}") from None
            if not math.isfinite(x):
                raise ConfigError(f"line {lineno}, column {col} ({name}): not finite")
            vals.append(x)
        if t and vals[0] <= t[-1]:
            raise ConfigError(f"line {lineno}: t={vals[0]!r} does not increase (previous {t[-1]!r})")
        if vals[0] <= 0:
            raise ConfigError(f"line {lineno}: t must be positive")
        t.append(vals[0])
        v.append(complex(vals[1], vals[2]) if ncol == 3 else vals[1])
    if not t:
        raise ConfigError("path CSV has no data rows")
    return SampledPath(np.array(t), np.array(v))


def _g(x):
    return format(float(x), ".17g")


def write_path_csv(path, file):
    """Write ``path`` as ``t,re,im`` CSV with 17 significant digits."""
    if isinstance(file, str):
        with open(file, "w", newline="") as fh:
            return write_path_csv(path, fh)
    file.write("t,re,im\n")
    for t, v in zip(path.times, path.values):
        v = complex(v)
        file.write(f"{_g(t)},{_g(v.real)},{_g(v.imag)}\n")


def _write_table(out, header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_g(x) for x in row) + "\n")
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(buf.getvalue())


def _grid(p, stem):
    """Either ``stem`` or ``stem_min``/``stem_max``/``n`` as a linear grid."""
    if p.has(stem):
        return np.array(p.floats(stem))
    lo, hi = p.float(f"{stem}_min", _REQUIRED), p.float(f"{stem}_max", _REQUIRED)
    n = p.int("n", 21)
    if n < 1 or hi < lo:
        raise ConfigError(f"need {stem}_min <= {stem}_max and n >= 1")
    return np.linspace(lo, hi, n)


def _cx(z):
    return {"re": float(z.real), "im": float(z.imag)}


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_bessel(p, out):
    beta = p.complex("beta", _REQUIRED)
    r = _grid(p, "r")
    if np.any(r < 0):
        raise ConfigError("r must be >= 0")
    vals = bessel(beta, r)
    rows, worst = [], 0.0
    for ri, v in zip(r, vals):
        diff = math.nan
        if ri >= DEFAULT_CONFIG.switch_radius:
            s, a = bessel_series(beta, float(ri)), bessel_asymptotic(beta, float(ri))
            diff = abs(s - a) / max(abs(s), 1e-300)
            worst = max(worst, diff)
        rows.append((ri, v.real, v.imag, diff))
    _write_table(out, ["r", "re", "im", "branch_rel_diff"], rows)
    summary = {"beta": _cx(beta), "values": [_cx(v) for v in vals],
               "max_branch_rel_diff": worst}
    return summary, worst <= BRANCH_TOL


def _cmd_multiplier(p, out):
    d = p.int("d", _REQUIRED)
    alpha = p.complex("alpha", _REQUIRED)
    s = _grid(p, "s")
    if np.any(s < 0):
        raise ConfigError("s must be >= 0")
    vals = multiplier(d, alpha, s)
    _write_table(out, ["s", "re", "im"], [(si, v.real, v.imag) for si, v in zip(s, vals)])
    limit = math.pi ** (d / 2) / gamma(d / 2 + alpha)
    lim_err = abs(complex(multiplier(d, alpha, 0.0)) - limit)
    summary = {"d": d, "alpha": _cx(alpha), "values": [_cx(v) for v in vals],
               "limit": _cx(limit), "limit_error": lim_err}
    return summary, lim_err <= LIMIT_TOL


def _cmd_variation(p, out):
    src = p.str("input", _REQUIRED)
    q = p.float("q", _REQUIRED)
    delta = p.float("delta", None)
    try:
        path = read_path_csv(src)
    except OSError as exc:
        raise ConfigError(f"cannot read {src}: {exc}") from None
    res = var_norm(path, q)
    per_block, short_total = short_variation(path, q) if q != math.inf else ({}, math.nan)
    summary = {"q": q, "value": res.value, "witness": list(res.witness), "var_inf": var_inf(path),
               "short_variation": short_total,
               "short_blocks": {str(k): v for k, v in per_block.items()}}
    if delta is not None:
        summary["delta"] = delta
        summary["jumps"] = jump_count(path, delta)
    if out:
        write_path_csv(path.subpath(list(res.witness)), out)
    return summary, True


def _cmd_mean(p, out):
    alpha = p.complex("alpha", 1.0)
    src = p.str("input", None)
    if src is not None:
        t = p.float("t", _REQUIRED)
        try:
            f = GridField.load(src)
        except OSError as exc:
            raise ConfigError(f"cannot read {src}: {exc}") from None
        g = apply_mean_grid(f, alpha, t)
        if out:
            g.save(out)
        return {"d": f.d, "N": f.N, "box": f.box, "t": t, "alpha": _cx(alpha),
                "max_abs": float(np.abs(g.data).max())}, True
    profile = p.str("profile", "chirp")
    ts = _grid(p, "t")
    if np.any(ts <= 0):
        raise ConfigError("t must be positive")
    rows, vals = [], []
    if profile == "chirp":
        d = p.int("d", 2)
        lam = p.float("lambda", _REQUIRED)
        x = p.float("x_norm", 0.0)
        cap = p.int("node_cap", 20_000_000)
        prof = chirp_profile(ChirpSpec(lam, alpha, d))
        for t in ts:
            r = mean_radial_freq(prof, alpha, float(t), x, d, node_cap=cap)
            vals.append(r.value)
            rows.append((t, r.value.real, r.value.imag, r.error))
    elif profile == "step":
        d = p.int("d", 2)
        f = RadialStep(p.floats("breaks", _REQUIRED), p.floats("coeffs", _REQUIRED), d)
        for t in ts:
            v = complex(mean_step_at_origin(f, alpha, float(t)))
            vals.append(v)
            rows.append((t, v.real, v.imag, 0.0))
    else:
        raise ConfigError(f"profile must be 'chirp' or 'step', got {profile!r}")
    _write_table(out, ["t", "re", "im", "error"], rows)
    return {"profile": profile, "alpha": _cx(alpha), "values": [_cx(v) for v in vals]}, True


def _cmd_scaling(p, out):
    kind = p.str("kind", _REQUIRED)
    d = p.int("d", 2)
    alpha = p.complex("alpha", 0.0)
    q = p.float("q", _REQUIRED)
    lo, hi = p.float("lambda_min", 256.0), p.float("lambda_max", 2048.0)
    steps = p.int("lambda_steps", 4)
    if not (0 < lo < hi) or steps < 4:
        raise ConfigError("need 0 < lambda_min < lambda_max and lambda_steps >= 4")
    # 12 digits snaps 2^8 * 2^(1/...)-style grids back onto exact powers
    lambdas = [float(f"{v:.12g}") for v in np.geomspace(lo, hi, steps)]
    x = p.float("x_norm", None)
    cap = p.int("node_cap", 20_000_000)
    divisor = p.float("divisor", 128.0)
    rep = scaling_experiment(kind, d, alpha, q, lambdas, x, divisor=divisor, node_cap=cap)
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(rep.to_csv())
    summary = rep.summary(SLOPE_TOL)
    return summary, summary["passed"]


def _cmd_linfty(p, out):
    n = p.int("n", _REQUIRED)
    d = p.int("d", 2)
    q = p.float("q", 3.0)
    alpha = p.complex("alpha", 1.0)
    rep = linfty_experiment(n, d, q, alpha)
    _write_table(out, ["t", "origin_re", "origin_im", "value_re", "value_im"],
                 [(t, o.real, o.imag, v.real, v.imag)
                  for t, o, v in zip(rep.times, rep.origin_values.astype(complex),
                                     rep.values.astype(complex))])
    summary = {"n": n, "d": d, "q": q, "alpha": _cx(alpha), "x_norm": rep.x_norm,
               "variation": rep.variation, "sup_norm": rep.sup_norm, "ratio": rep.ratio,
               "lower_bound": rep.lower_bound, "compared": rep.compared,
               "max_perturbation": rep.max_perturbation, "passed": bool(rep.passed)}
    ok = rep.passed and (alpha != 1 or rep.max_perturbation <= 1 / 8)
    return summary, ok


_HANDLERS = {
    "bessel": _cmd_bessel,
    "multiplier": _cmd_multiplier,
    "variation": _cmd_variation,
    "mean": _cmd_mean,
    "scaling": _cmd_scaling,
    "linfty": _cmd_linfty,
}


def run(subcommand, params, out=None, check=False, seed=0):
    """Run one subcommand on a dict of string parameters.

    Returns ``(exit_status, summary)``.  Configuration problems raise
    :class:`ConfigError`; quadrature failures raise ``ResolutionError``.
    """
    if subcommand not in _HANDLERS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    p = _Params(params)
    try:
        summary, ok = _HANDLERS[subcommand](p, out)
    except (ConfigError, ResolutionError):
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    p.check_unused()
    summary = {"subcommand": subcommand, "seed": seed, **summary}
    if check:
        summary["check_passed"] = bool(ok)
    return (1 if check and not ok else 0), summary


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return _cx(x)
    raise TypeError(type(x))


def main(argv=None):
    ap = argparse.ArgumentParser(prog="sphvar", description="Spherical means, variation and counterexample experiments.")
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("params", nargs="*", metavar="key=value")
    ap.add_argument("--config", help="file of key=value lines")
    ap.add_argument("--out", help="output file (CSV, or a grid file for 'mean input=...')")
    ap.add_argument("--check", action="store_true", help="exit 1 if an acceptance threshold fails")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized diagnostics (unused by the deterministic commands)")
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.seed < 0:
            raise ConfigError("seed must be non-negative")
        params = {}
        if args.config:
            try:
                with open(args.config) as fh:
                    params.update(parse_config(fh.read(), args.config))
            except OSError as exc:
                raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        params.update(_parse_pairs(args.params))
        status, summary = run(args.subcommand, params, args.out, args.check, args.seed)
    except ConfigError as exc:
        print(f"sphvar: error: {exc}", file=sys.stderr)
        return 2
    except ResolutionError as exc:
        print(f"sphvar: resolution error: {exc}", file=sys.stderr)
        return 3
    json.dump(summary, sys.stdout, indent=2, sort_keys=True, default=_json_default, allow_nan=True)
    sys.stdout.write("\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
