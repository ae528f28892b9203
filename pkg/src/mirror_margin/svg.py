"""Minimal SVG line plots; enough for loss curves, point clouds and level sets."""
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


class Figure:
    """One panel with linear (or log-y) axes mapped onto a fixed pixel box."""

    def __init__(self, width=480, height=400, margin=50, title=""):
        self.width, self.height, self.margin = width, height, margin
        self.title = title
        self.items = []
        self.xlim = self.ylim = None
        self.logy = False
        self.equal = False
        self.xlabel = self.ylabel = ""

    def _bounds(self):
        xs, ys = [], []
        for kind, data, _ in self.items:
            if kind in ("line", "points"):
                xs.append(data[0])
                ys.append(data[1])
        x = np.concatenate(xs) if xs else np.array([0.0, 1.0])
        y = np.concatenate(ys) if ys else np.array([0.0, 1.0])
        if self.logy:
            y = np.log10(y[y > 0])
        x, y = x[np.isfinite(x)], y[np.isfinite(y)]
        xlim = self.xlim or (float(x.min()), float(x.max()))
        ylim = self.ylim or (float(y.min()), float(y.max()))
        if self.logy and self.ylim:
            ylim = tuple(np.log10(self.ylim))
        if xlim[1] <= xlim[0]:
            xlim = (xlim[0] - 0.5, xlim[0] + 0.5)
        if ylim[1] <= ylim[0]:
            ylim = (ylim[0] - 0.5, ylim[0] + 0.5)
        if self.equal:
            cx, cy = sum(xlim) / 2, sum(ylim) / 2
            half = max(xlim[1] - xlim[0], ylim[1] - ylim[0]) / 2
            xlim, ylim = (cx - half, cx + half), (cy - half, cy + half)
        return xlim, ylim

    def line(self, x, y, color=None, width=1.5, label=None, dash=None):
        self.items.append(("line", (np.asarray(x, float), np.asarray(y, float)),
                           dict(color=color, width=width, label=label, dash=dash)))

    def points(self, x, y, color=None, radius=3, label=None, marker="circle"):
        self.items.append(("points", (np.asarray(x, float), np.asarray(y, float)),
                           dict(color=color, radius=radius, label=label, marker=marker)))

    def _map(self, x, y, xlim, ylim):
        m = self.margin
        w, h = self.width - 2 * m, self.height - 2 * m
        if self.logy:
            with np.errstate(divide="ignore"):
                y = np.log10(y)
        px = m + (x - xlim[0]) / (xlim[1] - xlim[0]) * w
        py = self.height - m - (y - ylim[0]) / (ylim[1] - ylim[0]) * h
        return px, py

    def render(self):
        xlim, ylim = self._bounds()
        m, W, H = self.margin, self.width, self.height
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
               f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
               f'<defs><clipPath id="plot"><rect x="{m}" y="{m}" width="{W - 2 * m}" height="{H - 2 * m}"/>'
               "</clipPath></defs>",
               f'<rect x="{m}" y="{m}" width="{W - 2 * m}" height="{H - 2 * m}" fill="none" stroke="black"/>']
        for frac in (0.0, 0.5, 1.0):
            xv = xlim[0] + frac * (xlim[1] - xlim[0])
            yv = ylim[0] + frac * (ylim[1] - ylim[0])
            px = m + frac * (W - 2 * m)
            py = H - m - frac * (H - 2 * m)
            ytxt = f"1e{yv:.1f}" if self.logy else f"{yv:.3g}"
            out.append(f'<text x="{px:.1f}" y="{H - m + 16}" font-size="11" text-anchor="middle">{xv:.3g}</text>')
            out.append(f'<text x="{m - 4}" y="{py + 4:.1f}" font-size="11" text-anchor="end">{ytxt}</text>')
        if self.title:
            out.append(f'<text x="{W / 2}" y="{m / 2}" font-size="14" text-anchor="middle">{escape(self.title)}</text>')
        if self.xlabel:
            out.append(f'<text x="{W / 2}" y="{H - 8}" font-size="12" text-anchor="middle">{escape(self.xlabel)}</text>')
        if self.ylabel:
            out.append(f'<text x="14" y="{H / 2}" font-size="12" text-anchor="middle" '
                       f'transform="rotate(-90 14 {H / 2})">{escape(self.ylabel)}</text>')
        legend = []
        for k, (kind, (x, y), opt) in enumerate(self.items):
            color = opt["color"] or PALETTE[k % len(PALETTE)]
            px, py = self._map(x, y, xlim, ylim)
            keep = np.isfinite(px) & np.isfinite(py)
            px, py = px[keep], py[keep]
            if kind == "line":
                pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
                dash = f' stroke-dasharray="{opt["dash"]}"' if opt["dash"] else ""
                out.append(f'<polyline clip-path="url(#plot)" fill="none" stroke="{color}" '
                           f'stroke-width="{opt["width"]}"{dash} points="{pts}"/>')
            else:
                r = opt["radius"]
                for a, b in zip(px, py):
                    if opt["marker"] == "star":
                        out.append(_star(a, b, 2.5 * r, color))
                    else:
                        out.append(f'<circle clip-path="url(#plot)" cx="{a:.2f}" cy="{b:.2f}" r="{r}" fill="{color}"/>')
            if opt["label"]:
                legend.append((opt["label"], color))
        for j, (label, color) in enumerate(legend):
            y0 = m + 14 + 16 * j
            out.append(f'<rect x="{W - m - 130}" y="{y0 - 9}" width="10" height="10" fill="{color}"/>')
            out.append(f'<text x="{W - m - 115}" y="{y0}" font-size="11">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.render())


def _star(cx, cy, r, color):
    ang = np.pi / 2 + np.arange(10) * np.pi / 5
    rad = np.where(np.arange(10) % 2 == 0, r, 0.4 * r)
    pts = " ".join(f"{cx + a * np.cos(t):.2f},{cy - a * np.sin(t):.2f}" for a, t in zip(rad, ang))
    return f'<polygon points="{pts}" fill="{color}" stroke="black" stroke-width="0.5"/>'


def hstack_svgs(svgs, path):
    """Place several rendered panels side by side in one file."""
    widths, heights, bodies = [], [], []
    for s in svgs:
        head, _, rest = s.partition(">")
        w = float(head.split('width="')[1].split('"')[0])
        h = float(head.split('height="')[1].split('"')[0])
        widths.append(w)
        heights.append(h)
        bodies.append(rest.rsplit("</svg>", 1)[0])
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{sum(widths)}" height="{max(heights)}">']
    x = 0.0
    for k, (w, body) in enumerate(zip(widths, bodies)):
        # clip ids must stay unique once panels share a document
        body = body.replace('id="plot"', f'id="plot{k}"').replace("#plot)", f"#plot{k})")
        out.append(f'<g transform="translate({x} 0)">{body}</g>')
        x += w
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out))
