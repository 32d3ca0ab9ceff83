"""Instance/run JSON files, CSV emitters and a dependency-free SVG plotter."""

import csv
import json
import math
import os
from xml.sax.saxutils import escape

import numpy as np

from .environment import ProblemInstance, RewardKernel

SCHEMA_VERSION = "1"


# ---------------------------------------------------------------------------
# instances

def instance_to_dict(instance):
    """Plain-JSON form.  Python's float repr is the shortest exact round-trip decimal."""
    return {
        "version": SCHEMA_VERSION,
        "name": instance.name,
        "m": instance.m,
        "states": instance.n_states,
        "gamma": float(instance.gamma),
        "beta1": [float(x) for x in instance.beta1],
        "arms": [
            {"P": [[float(x) for x in row] for row in instance.P[j]],
             "kernels": [k.to_dict() for k in instance.kernels[j]]}
            for j in range(instance.m)
        ],
    }


def _require(d, key, kind):
    if key not in d:
        raise ValueError(f"instance file missing field {key!r}")
    if not isinstance(d[key], kind):
        raise ValueError(f"field {key!r} has the wrong type")
    return d[key]


def instance_from_dict(d):
    """Validate the schema and rebuild the instance (chain assumptions are re-checked)."""
    if str(d.get("version")) != SCHEMA_VERSION:
        raise ValueError(f"unsupported instance version {d.get('version')!r}")
    m = _require(d, "m", int)
    S = _require(d, "states", int)
    arms = _require(d, "arms", list)
    beta1 = _require(d, "beta1", list)
    if len(arms) != m or len(beta1) != S:
        raise ValueError("arm or state counts disagree with the arrays")
    Ps, kernels = [], []
    for j, arm in enumerate(arms):
        P = _require(arm, "P", list)
        ks = _require(arm, "kernels", list)
        if len(P) != S or any(len(r) != S for r in P) or len(ks) != S:
            raise ValueError(f"arm {j}: expected {S}x{S} matrix and {S} kernels")
        Ps.append(np.array(P, dtype=float))
        kernels.append([RewardKernel.from_dict(k) for k in ks])
    return ProblemInstance(tuple(Ps), kernels, np.array(beta1, dtype=float),
                           float(d.get("gamma", 1.0)), name=d.get("name", ""))


def save_instance(instance, path):
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance), fh, indent=1)
        fh.write("\n")


def load_instance(path):
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# CSV

TRACE_HEADER = ["policy", "instance_id", "seed", "k_or_t", "arm", "reward", "cum_regret"]


def write_traces_csv(traces, path):
    """Long-format trace file; one row per epoch (or iteration)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for tr in traces:
            cum = tr.cumulative_regret
            x = tr.cumulative_iterations
            for i in range(tr.n):
                w.writerow([tr.policy, tr.instance_id, tr.seed, int(x[i]), int(tr.arms[i]),
                            repr(float(tr.rewards[i])), repr(float(cum[i]))])


def write_aggregate_csv(curve, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "mean", "stderr"])
        w.writerows(curve.rows())


def write_rows_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# ---------------------------------------------------------------------------
# SVG

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"]


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * abs(hi):
        out.append(v)
        v += step
    return out


def _fmt(v):
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-2:
        return f"{v:.0e}"
    return f"{v:g}"


def svg_plot(series, path, *, title="", xlabel="iterations", ylabel="cumulative regret",
             logx=False, width=720, height=440):
    """Write a line plot with ``mean +/- stderr`` bands.

    Parameters
    ----------
    series : list of (label, x, mean, stderr)
    """
    ml, mr, mt, mb = 70, 160, 36, 48
    pw, ph = width - ml - mr, height - mt - mb
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    if logx:
        xs = xs[xs > 0]
    ylo = min(float(np.min(np.asarray(s[2]) - np.asarray(s[3]))) for s in series)
    yhi = max(float(np.max(np.asarray(s[2]) + np.asarray(s[3]))) for s in series)
    ylo = min(ylo, 0.0)
    if yhi <= ylo:
        yhi = ylo + 1.0
    fx = np.log10 if logx else (lambda v: np.asarray(v, float))
    xlo, xhi = float(fx(xs.min())), float(fx(xs.max()))
    if xhi <= xlo:
        xhi = xlo + 1.0

    def X(v):
        return ml + (fx(v) - xlo) / (xhi - xlo) * pw

    def Y(v):
        return mt + ph - (np.asarray(v, float) - ylo) / (yhi - ylo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(ylo, yhi):
        y = float(Y(t))
        out.append(f'<line x1="{ml - 4}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" stroke="black"/>')
        out.append(f'<text x="{ml - 6}" y="{y + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    xt = [10 ** e for e in range(math.ceil(xlo), math.floor(xhi) + 1)] if logx else _ticks(xlo, xhi)
    for t in xt:
        x = float(X(t))
        out.append(f'<line x1="{x:.1f}" y1="{mt + ph}" x2="{x:.1f}" y2="{mt + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.1f}" y="{mt + ph + 18}" text-anchor="middle">{_fmt(t)}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{mt + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {mt + ph / 2:.1f})">{escape(ylabel)}</text>')
    for i, (label, x, mean, se) in enumerate(series):
        col = _COLORS[i % len(_COLORS)]
        x = np.asarray(x, float)
        mean = np.asarray(mean, float)
        se = np.asarray(se, float)
        keep = x > 0 if logx else np.ones(x.size, bool)
        x, mean, se = x[keep], mean[keep], se[keep]
        if x.size > 400:
            idx = np.unique(np.linspace(0, x.size - 1, 400).astype(int))
            x, mean, se = x[idx], mean[idx], se[idx]
        px = X(x)
        upper = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(px, Y(mean + se)))
        lower = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(px[::-1], Y((mean - se)[::-1])))
        out.append(f'<polygon points="{upper} {lower}" fill="{col}" fill-opacity="0.2" stroke="none"/>')
        line = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(px, Y(mean)))
        out.append(f'<polyline points="{line}" fill="none" stroke="{col}" stroke-width="1.6"/>')
        ly = mt + 14 + 18 * i
        out.append(f'<line x1="{ml + pw + 12}" y1="{ly}" x2="{ml + pw + 32}" y2="{ly}" '
                   f'stroke="{col}" stroke-width="2"/>')
        out.append(f'<text x="{ml + pw + 36}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
