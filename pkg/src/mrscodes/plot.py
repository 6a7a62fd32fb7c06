"""Tiny deterministic SVG plot of empirical rate points against a step curve."""

from __future__ import annotations

from .stepfn import StepFunction

W, H, PAD = 480, 320, 48


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def step_plot_svg(points: list[tuple[float, float, float]], theory: StepFunction | None = None,
                  title: str = "rate vs capacity") -> str:
    """``points`` are (capacity, mean rate, std). Output is byte-stable."""
    ymax = max([p[1] + p[2] for p in points] + [float(theory.bound) if theory else 0.0] + [1e-9])
    ymax *= 1.1

    def sx(c):
        return PAD + float(c) * (W - 2 * PAD)

    def sy(r):
        return H - PAD - float(r) / ymax * (H - 2 * PAD)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<text x="{W // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD}" y2="{H - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{H - PAD}" stroke="black"/>',
        f'<text x="{W // 2}" y="{H - 10}" text-anchor="middle" font-size="12">capacity c</text>',
        f'<text x="14" y="{H // 2}" font-size="12" transform="rotate(-90 14 {H // 2})">rate</text>',
    ]
    for t in (0, 0.25, 0.5, 0.75, 1):
        out.append(f'<text x="{_fmt(sx(t))}" y="{H - PAD + 16}" text-anchor="middle" font-size="10">{t}</text>')
    out.append(f'<text x="{PAD - 6}" y="{_fmt(sy(0))}" text-anchor="end" font-size="10">0</text>')
    out.append(f'<text x="{PAD - 6}" y="{_fmt(sy(ymax / 1.1))}" text-anchor="end" font-size="10">'
               f'{ymax / 1.1:.3g}</text>')
    if theory is not None:
        xs, ys = [0.0], [0.0]
        for b, v in zip(theory.breakpoints, theory.values):
            xs += [float(b), float(b)]
            ys += [ys[-1], float(v)]
        xs.append(1.0)
        ys.append(ys[-1])
        path = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(xs, ys))
        out.append(f'<polyline points="{path}" fill="none" stroke="#c03030" stroke-width="2"/>')
    for c, m, sd in points:
        out.append(f'<line x1="{_fmt(sx(c))}" y1="{_fmt(sy(m - sd))}" x2="{_fmt(sx(c))}" '
                   f'y2="{_fmt(sy(m + sd))}" stroke="#3050c0"/>')
        out.append(f'<circle cx="{_fmt(sx(c))}" cy="{_fmt(sy(m))}" r="3" fill="#3050c0"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
