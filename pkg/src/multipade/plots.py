"""Minimal hand-written SVG line charts (log-scale y, slope guides).

No plotting dependency: charts are assembled as text.  Values that are
zero, negative or non-finite are left out of the polyline (they cannot
be placed on a log axis).
"""

import math

_WIDTH = 640
_HEIGHT = 420
_MARGIN_L = 70
_MARGIN_R = 20
_MARGIN_T = 40
_MARGIN_B = 50


def render_decay_plot(title, n_values, values, guide_rate=None, guide_label=None):
    """SVG text for log10(value) against n.

    ``guide_rate`` in (0, 1) draws a dashed reference line with slope
    log10(rate), anchored at the first plotted point.
    """
    points = [
        (float(n), math.log10(v))
        for n, v in zip(n_values, values)
        if _plottable(v)
    ]
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (_WIDTH, _HEIGHT, _WIDTH, _HEIGHT),
        '<rect width="%d" height="%d" fill="white"/>' % (_WIDTH, _HEIGHT),
        '<text x="%d" y="24" font-family="monospace" font-size="15">%s</text>'
        % (_MARGIN_L, _escape(title)),
    ]
    if not points:
        parts.append(
            '<text x="%d" y="%d" font-family="monospace" font-size="13">'
            "no plottable values</text>" % (_MARGIN_L, _HEIGHT // 2)
        )
        parts.append("</svg>")
        return "\n".join(parts)

    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    guide = None
    if guide_rate is not None and guide_rate > 0.0:
        slope = math.log10(guide_rate)
        x0, y0 = points[0]
        guide = [(x, y0 + slope * (x - x0)) for x in (x_lo, x_hi)]
        y_lo = min(y_lo, guide[0][1], guide[1][1])
        y_hi = max(y_hi, guide[0][1], guide[1][1])
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    def px(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (
            _WIDTH - _MARGIN_L - _MARGIN_R
        )

    def py(y):
        return _HEIGHT - _MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (
            _HEIGHT - _MARGIN_T - _MARGIN_B
        )

    parts.append(
        '<line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" stroke="black"/>'
        % (px(x_lo), py(y_lo), px(x_hi), py(y_lo))
    )
    parts.append(
        '<line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" stroke="black"/>'
        % (px(x_lo), py(y_lo), px(x_lo), py(y_hi))
    )
    for tick in _int_ticks(x_lo, x_hi, 8):
        parts.append(
            '<text x="%.1f" y="%.1f" font-family="monospace" font-size="11" '
            'text-anchor="middle">%d</text>'
            % (px(tick), py(y_lo) + 16, tick)
        )
    for tick in _int_ticks(y_lo, y_hi, 8):
        parts.append(
            '<text x="%.1f" y="%.1f" font-family="monospace" font-size="11" '
            'text-anchor="end">1e%d</text>'
            % (px(x_lo) - 6, py(tick) + 4, tick)
        )
    if guide is not None:
        parts.append(
            '<line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" stroke="#c04040" '
            'stroke-dasharray="6,4"/>'
            % (px(guide[0][0]), py(guide[0][1]), px(guide[1][0]), py(guide[1][1]))
        )
        if guide_label:
            parts.append(
                '<text x="%.1f" y="%.1f" font-family="monospace" font-size="12" '
                'fill="#c04040">%s</text>'
                % (px(x_lo) + 8, _MARGIN_T + 14, _escape(guide_label))
            )
    path = " ".join("%.1f,%.1f" % (px(x), py(y)) for x, y in points)
    parts.append(
        '<polyline fill="none" stroke="#3050c0" stroke-width="1.5" points="%s"/>'
        % path
    )
    for x, y in points:
        parts.append(
            '<circle cx="%.1f" cy="%.1f" r="2.5" fill="#3050c0"/>' % (px(x), py(y))
        )
    parts.append(
        '<text x="%d" y="%d" font-family="monospace" font-size="12" '
        'text-anchor="middle">n</text>'
        % ((_MARGIN_L + _WIDTH - _MARGIN_R) // 2, _HEIGHT - 14)
    )
    parts.append("</svg>")
    return "\n".join(parts)


def _plottable(v):
    return v is not None and math.isfinite(v) and v > 0.0


def _int_ticks(lo, hi, target):
    span = hi - lo
    if span <= 0:
        return [int(round(lo))]
    step = max(1, int(math.ceil(span / target)))
    first = int(math.ceil(lo))
    return list(range(first, int(math.floor(hi)) + 1, step))


def _escape(text):
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
    )
