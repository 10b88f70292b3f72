"""Sweep orchestration: evaluate all relations over the prepared state
family, both ideally and through the simulated measurement pipeline, and
emit figure-ready CSV/JSON datasets with a machine-readable verdict.

Every sampled quantity is estimated from the four settings' simulated
counts; derived columns propagate one-standard-deviation Poisson error
bars to first order (numerically, through the full column formula).
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .basis_search import OptimizerConfig, optimize_bound
from .bounds import (
    OrthonormalBasis,
    eq1_product_bound,
    eq2_product_bound,
    eq3_product_bound,
    eq4_sum_bound,
    eq5_sum_bound,
    eq6_sum_bound,
    eq7_reverse_bound,
    SLACK_TOL,
)
from .hermitian import PureState, builtin_spin1, family_state, moments
from .photonics import builtin_settings, projection_probabilities, sample_counts


class ConfigError(ValueError):
    """Sweep configuration is unusable."""


VALUE_COLUMNS = (
    "mean_lx", "mean_ly", "mean_lz", "mean_lp",
    "var_lx", "var_ly",
    "lhs_prod", "rhs_eq1", "rhs_eq2_canon", "rhs_eq2_opt", "rhs_eq3",
    "lhs_sum", "rhs_eq4", "rhs_eq5_canon", "rhs_eq5_opt", "rhs_eq6",
    "rhs_eq7",
)

CSV_COLUMNS = (
    ("j", "theta")
    + VALUE_COLUMNS
    + tuple(f"sampled_{c}" for c in VALUE_COLUMNS)
    + tuple(f"sigma_{c}" for c in VALUE_COLUMNS)
)

SETTING_NAMES = ("Lx", "Ly", "Lz", "Lp")
DEFAULT_Z_LIMIT = 5.0


@dataclass(frozen=True)
class SweepConfig:
    thetas: tuple = tuple(j * np.pi / 10 for j in range(11))
    counts: int = 10_000
    seed: int = 7
    trials: int = 1
    optimize_basis: bool = False
    pairing: tuple = (-1.0, 1.0, 0.0)
    dense: int = 0
    out_dir: str = "out"
    formats: tuple = ("csv", "json")

    def __post_init__(self):
        if len(self.thetas) == 0:
            raise ConfigError("theta list must be non-empty")
        if self.counts < 1 or self.trials < 1:
            raise ConfigError("counts and trials must be >= 1")
        for f in self.formats:
            if f not in ("csv", "json"):
                raise ConfigError(f"unknown output format {f!r}")

    def hash(self):
        payload = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def config_from_file(path) -> SweepConfig:
    """Flat key=value config file mirroring the CLI flags."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    kwargs = {}
    for line in p.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line: {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "theta_steps":
            n = int(value)
            kwargs["thetas"] = tuple(j * np.pi / (n - 1) for j in range(n))
        elif key in ("counts", "seed", "trials", "dense"):
            kwargs[key] = int(value)
        elif key == "optimize_basis":
            kwargs[key] = value.lower() in ("1", "true", "yes")
        elif key == "pairing":
            kwargs[key] = tuple(float(v) for v in value.split(","))
        elif key == "out_dir":
            kwargs[key] = value
        elif key == "formats":
            kwargs[key] = tuple(value.split(","))
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return SweepConfig(**kwargs)


def pairing_from_values(a, b, value_order):
    """Index permutation into B's eigenvalue list aligning both observables
    to a common eigenvalue enumeration like (-1, 1, 0)."""
    def match(values, targets):
        remaining = list(range(len(values)))
        out = []
        for t in targets:
            k = min(remaining, key=lambda i: abs(values[i] - t))
            if abs(values[k] - t) > 1e-8:
                raise ConfigError(f"pairing value {t} absent from spectrum {values}")
            out.append(k)
            remaining.remove(k)
        return out
    pa = match(a.eigenvalues, value_order)
    pb = match(b.eigenvalues, value_order)
    pairing = [0] * len(pa)
    for ia, ib in zip(pa, pb):
        pairing[ia] = ib
    return tuple(pairing)


@dataclass
class DatasetRow:
    j: int
    theta: float
    ideal: dict
    sampled: dict = field(default_factory=dict)
    sigma: dict = field(default_factory=dict)
    statuses: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    statuses: list  # per row: {relation: status}
    worst_slack: float
    z_scores: list  # per row: {column: z}
    ok: bool


def _ideal_columns(state, lx, ly, lz, lp, basis, pairing, optimize):
    mx, my = moments(state, lx), moments(state, ly)
    cols = {
        "mean_lx": mx.mean,
        "mean_ly": my.mean,
        "mean_lz": moments(state, lz).mean,
        "mean_lp": moments(state, lp).mean,
        "var_lx": mx.variance,
        "var_ly": my.variance,
        "lhs_prod": mx.variance * my.variance,
        "lhs_sum": mx.variance + my.variance,
    }
    results = {
        "eq1": eq1_product_bound(state, lx, ly),
        "eq2": eq2_product_bound(state, lx, ly, basis),
        "eq3": eq3_product_bound(state, lx, ly, pairing),
        "eq4": eq4_sum_bound(state, lx, ly),
        "eq5": eq5_sum_bound(state, lx, ly, basis),
        "eq6": eq6_sum_bound(state, lx, ly, pairing),
        "eq7": eq7_reverse_bound(state, lx, ly),
    }
    cols["rhs_eq1"] = results["eq1"].rhs
    cols["rhs_eq2_canon"] = results["eq2"].rhs
    cols["rhs_eq3"] = results["eq3"].rhs
    cols["rhs_eq4"] = results["eq4"].rhs
    cols["rhs_eq5_canon"] = results["eq5"].rhs
    cols["rhs_eq6"] = results["eq6"].rhs
    cols["rhs_eq7"] = results["eq7"].rhs if results["eq7"].defined else None

    opt_bases = {}
    if optimize:
        cfg = OptimizerConfig(restarts=6, max_iters=400)
        b2, v2, _ = optimize_bound("eq2", state, lx, ly, cfg)
        b5, v5, _ = optimize_bound("eq5", state, lx, ly, cfg)
        cols["rhs_eq2_opt"] = v2
        cols["rhs_eq5_opt"] = v5
        opt_bases = {"eq2": b2, "eq5": b5}
    else:
        cols["rhs_eq2_opt"] = None
        cols["rhs_eq5_opt"] = None
    return cols, results, opt_bases


def _state_estimate(theta, lz_probs):
    """Plug-in amplitude estimate for the swept family from the identity-
    routing setting's probabilities (signs taken from the prepared theta)."""
    # Lz outcomes are in eigenvalue order (-1, 1, 0) -> basis states (e3, e1, e2)
    p1, p2, p3 = lz_probs[1], lz_probs[2], lz_probs[0]
    c = np.sign(np.cos(theta)) * np.sqrt(max(p1, 0.0))
    s = np.sign(np.sin(theta)) * np.sqrt(max(p2, 0.0))
    amp = np.array([c, -s, np.sqrt(max(p3, 0.0))], dtype=complex)
    norm = np.linalg.norm(amp)
    if norm == 0:
        return None
    return PureState(amp / norm)


def _sampled_columns(counts_flat, theta, lx, ly, pairing, basis, opt_bases):
    """All sampled value columns as a function of the 12 raw counts.

    counts_flat is ordered [Lx(3), Ly(3), Lz(3), Lp(3)], each block in the
    observable's eigenvalue order (-1, 1, 0).
    """
    n = np.asarray(counts_flat, dtype=float).reshape(4, 3)
    totals = n.sum(axis=1)
    if np.any(totals <= 0):
        raise ConfigError("a setting recorded zero total counts")
    probs = n / totals[:, None]
    a_vals = lx.eigenvalues
    b_vals = ly.eigenvalues

    mx = float(probs[0] @ a_vals)
    mx2 = float(probs[0] @ a_vals**2)
    my = float(probs[1] @ b_vals)
    my2 = float(probs[1] @ b_vals**2)
    mz = float(probs[2] @ np.array([-1.0, 1.0, 0.0]))
    mp = float(probs[3] @ np.array([-1.0, 1.0, 0.0]))

    var_x = mx2 - mx**2
    var_y = my2 - my**2
    cols = {
        "mean_lx": mx, "mean_ly": my, "mean_lz": mz, "mean_lp": mp,
        "var_lx": var_x, "var_ly": var_y,
        "lhs_prod": var_x * var_y, "lhs_sum": var_x + var_y,
    }
    cols["rhs_eq1"] = (0.5 * mz) ** 2 + (0.5 * mp - mx * my) ** 2
    # half the variance of A+B; the factor 1/2 is required for consistency
    # with the operator form of the sum bound
    cols["rhs_eq4"] = 0.5 * (mx2 + my2 + mp - (mx + my) ** 2)

    fid_a = probs[0]
    fid_b = probs[1][list(pairing)]
    a_sh = a_vals - mx
    b_sh = b_vals[list(pairing)] - my
    cols["rhs_eq3"] = float(np.sum(np.sqrt(fid_a) * np.sqrt(fid_b) * a_sh * b_sh)) ** 2
    cols["rhs_eq6"] = 0.5 * float(np.sum((a_sh * np.sqrt(fid_a) + b_sh * np.sqrt(fid_b)) ** 2))

    cov = 0.5 * mp - mx * my
    if var_x > 1e-12 and var_y > 1e-12:
        denom = 1.0 - cov / np.sqrt(var_x * var_y)
        var_diff = mx2 + my2 - mp - (mx - my) ** 2
        if abs(denom) > 1e-9:
            cols["rhs_eq7"] = 2.0 * var_diff / denom - 2.0 * np.sqrt(var_x * var_y)
        else:
            cols["rhs_eq7"] = None
    else:
        cols["rhs_eq7"] = None

    est = _state_estimate(theta, probs[2])
    if est is None:
        cols["rhs_eq2_canon"] = None
        cols["rhs_eq5_canon"] = None
        cols["rhs_eq2_opt"] = None
        cols["rhs_eq5_opt"] = None
        return cols
    # basis-dependent bounds on the plug-in state; cross-check routes are
    # skipped here because the estimated <B> fluctuates around zero
    psi = est.amplitudes
    bm = basis.matrix()
    exp_a = float(np.real(np.vdot(psi, lx.matrix @ psi)))
    exp_b = float(np.real(np.vdot(psi, ly.matrix @ psi)))
    abar_psi = lx.shifted(exp_a) @ psi
    bbar_psi = ly.shifted(exp_b) @ psi
    pa = bm.conj().T @ abar_psi
    pb = bm.conj().T @ bbar_psi
    cols["rhs_eq2_canon"] = float(np.sum(np.abs(pa.conj() * pb))) ** 2
    cols["rhs_eq5_canon"] = 0.5 * float(np.sum((np.abs(pa) + np.abs(pb)) ** 2))
    for key, tag in (("eq2", "rhs_eq2_opt"), ("eq5", "rhs_eq5_opt")):
        if key in opt_bases:
            om = opt_bases[key].matrix()
            qa = om.conj().T @ abar_psi
            qb = om.conj().T @ bbar_psi
            if key == "eq2":
                cols[tag] = float(np.sum(np.abs(qa.conj() * qb))) ** 2
            else:
                cols[tag] = 0.5 * float(np.sum((np.abs(qa) + np.abs(qb)) ** 2))
        else:
            cols[tag] = None
    return cols


def _propagate_sigmas(counts_flat, column_fn):
    """First-order Poisson error bars via numerical differentiation."""
    base = column_fn(counts_flat)
    var = {k: 0.0 for k, v in base.items() if v is not None}
    n = np.asarray(counts_flat, dtype=float)
    for k in range(n.size):
        h = 1.0
        hi, lo = n.copy(), n.copy()
        hi[k] += h
        if n[k] >= h:
            lo[k] -= h
            span = 2.0 * h
        else:
            span = h  # forward difference at the boundary
        up, dn = column_fn(hi), column_fn(lo)
        for col in var:
            if up.get(col) is None or dn.get(col) is None:
                continue
            deriv = (up[col] - dn[col]) / span
            var[col] += n[k] * deriv**2
    return base, {col: float(np.sqrt(v)) for col, v in var.items()}


def run_sweep(config: SweepConfig):
    """Evaluate the full sweep; returns (rows, report, dense_rows)."""
    lx, ly, lz, lp = builtin_spin1()
    obs = {"Lx": lx, "Ly": ly, "Lz": lz, "Lp": lp}
    basis = OrthonormalBasis.computational(3)
    pairing = pairing_from_values(lx, ly, config.pairing)
    settings = builtin_settings()

    rows = []
    for j, theta in enumerate(config.thetas):
        state = family_state(theta)
        ideal, results, opt_bases = _ideal_columns(
            state, lx, ly, lz, lp, basis, pairing, config.optimize_basis
        )

        sampled_acc, sigma_acc = {}, {}
        for trial in range(config.trials):
            counts_flat = []
            for si, name in enumerate(SETTING_NAMES):
                p = projection_probabilities(state, settings[name])
                seed = config.seed + 1000 * j + 10 * trial + si
                counts_flat.extend(sample_counts(p, config.counts, seed).counts)
            fn = lambda c: _sampled_columns(c, theta, lx, ly, pairing, basis, opt_bases)
            vals, sigs = _propagate_sigmas(np.array(counts_flat, dtype=float), fn)
            for col, v in vals.items():
                if v is None:
                    continue
                sampled_acc.setdefault(col, []).append(v)
                sigma_acc.setdefault(col, []).append(sigs.get(col, 0.0))
        sampled = {c: float(np.mean(v)) for c, v in sampled_acc.items()}
        sigma = {
            c: float(np.sqrt(np.mean(np.square(sigma_acc[c]))) / np.sqrt(config.trials))
            for c in sigma_acc
        }

        statuses = {}
        for rid, res in results.items():
            if not res.defined:
                statuses[rid] = "undefined"
            elif res.slack < -SLACK_TOL:
                statuses[rid] = "violated"
            elif abs(res.slack) <= SLACK_TOL:
                statuses[rid] = "tight"
            else:
                statuses[rid] = "satisfied"
        rows.append(DatasetRow(j=j, theta=float(theta), ideal=ideal,
                               sampled=sampled, sigma=sigma, statuses=statuses))

    report = build_report(rows)

    dense_rows = []
    if config.dense > 0:
        grid = sorted(set(np.linspace(0.0, np.pi, config.dense + 1)) | set(config.thetas))
        for j, theta in enumerate(grid):
            state = family_state(theta)
            # dense curves cover the figure panels; the optimized-basis
            # columns are only produced for the sweep points themselves
            ideal, _, _ = _ideal_columns(state, lx, ly, lz, lp, basis, pairing, False)
            dense_rows.append(DatasetRow(j=j, theta=float(theta), ideal=ideal))
    return rows, report, dense_rows


def build_report(rows, z_limit=DEFAULT_Z_LIMIT) -> VerificationReport:
    statuses = [r.statuses for r in rows]
    worst = min(
        (min((v for v in (_slacks(r)) if v is not None), default=np.inf) for r in rows),
        default=np.inf,
    )
    z_scores = []
    ok = True
    for r in rows:
        zs = {}
        for col, v in r.sampled.items():
            ideal = r.ideal.get(col)
            sig = r.sigma.get(col, 0.0)
            if ideal is None or sig is None:
                continue
            if sig > 0:
                zs[col] = (v - ideal) / sig
                if abs(zs[col]) > z_limit:
                    ok = False
        z_scores.append(zs)
        if "violated" in r.statuses.values():
            ok = False
    return VerificationReport(
        statuses=statuses,
        worst_slack=float(worst) if np.isfinite(worst) else float("inf"),
        z_scores=z_scores,
        ok=ok,
    )


def _slacks(row):
    out = []
    ideal = row.ideal
    for rid in ("eq1", "eq2", "eq3", "eq4", "eq5", "eq6"):
        key = {"eq2": "rhs_eq2_canon", "eq5": "rhs_eq5_canon"}.get(rid, f"rhs_{rid}")
        lhs = ideal["lhs_prod"] if rid in ("eq1", "eq2", "eq3") else ideal["lhs_sum"]
        if ideal.get(key) is not None:
            out.append(lhs - ideal[key])
    if ideal.get("rhs_eq7") is not None:
        out.append(ideal["rhs_eq7"] - ideal["lhs_sum"])
    return out


def _fmt(value):
    if value is None:
        return ""
    return repr(float(value))


def _row_record(row):
    rec = {"j": row.j, "theta": row.theta}
    for col in VALUE_COLUMNS:
        rec[col] = row.ideal.get(col)
    for col in VALUE_COLUMNS:
        rec[f"sampled_{col}"] = row.sampled.get(col)
    for col in VALUE_COLUMNS:
        rec[f"sigma_{col}"] = row.sigma.get(col)
    return rec


def emit(rows, report, config: SweepConfig, dense_rows=()):
    """Write CSV/JSON datasets; returns the list of written paths."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in config.formats:
        path = out / "sweep.csv"
        _write_csv(path, rows)
        written.append(path)
        if dense_rows:
            dpath = out / "dense.csv"
            _write_csv(dpath, dense_rows)
            written.append(dpath)
    if "json" in config.formats:
        path = out / "sweep.json"
        payload = {
            "version": __version__,
            "seed": config.seed,
            "config_hash": config.hash(),
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "config": asdict(config),
            "rows": [_row_record(r) | {"statuses": r.statuses} for r in rows],
            "dense": [_row_record(r) for r in dense_rows],
            "report": {
                "statuses": report.statuses,
                "worst_slack": report.worst_slack,
                "z_scores": report.z_scores,
                "ok": report.ok,
            },
        }
        path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
        written.append(path)
    return written


def _write_csv(path, rows):
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        rec = _row_record(row)
        lines.append(",".join(
            str(rec["j"]) if c == "j" else _fmt(rec[c]) for c in CSV_COLUMNS
        ))
    path.write_text("\n".join(lines) + "\n")


def verify_dataset(path, z_limit=DEFAULT_Z_LIMIT):
    """Re-check a written JSON dataset; returns a process exit status."""
    p = Path(path)
    if not p.is_file():
        return 2
    try:
        payload = json.loads(p.read_text())
        rows = payload["rows"]
    except (json.JSONDecodeError, KeyError):
        return 2
    for row in rows:
        for rid in ("eq1", "eq2_canon", "eq2_opt", "eq3"):
            rhs = row.get(f"rhs_{rid}")
            if rhs is not None and rhs > row["lhs_prod"] + SLACK_TOL:
                return 1
        for rid in ("eq4", "eq5_canon", "eq5_opt", "eq6"):
            rhs = row.get(f"rhs_{rid}")
            if rhs is not None and rhs > row["lhs_sum"] + SLACK_TOL:
                return 1
        if row.get("rhs_eq7") is not None and row["rhs_eq7"] < row["lhs_sum"] - SLACK_TOL:
            return 1
        for col in VALUE_COLUMNS:
            v, s = row.get(f"sampled_{col}"), row.get(f"sigma_{col}")
            ideal = row.get(col)
            if v is None or s is None or ideal is None or s <= 0:
                continue
            if abs(v - ideal) > z_limit * s:
                return 1
    return 0
