"""SVG emitters: deterministic output, sane structure, escaping."""

from probgram.plots import svg_roc, svg_scatter

XS = [0.0, 1.0, 2.5, 4.0]
YS = [0.1, 0.9, 2.2, 4.4]


def test_scatter_is_deterministic():
    a = svg_scatter(XS, YS, "x", "y", "title")
    b = svg_scatter(XS, YS, "x", "y", "title")
    assert a == b
    assert a.startswith("<svg")
    assert a.rstrip().endswith("</svg>")
    assert a.count("<circle") == len(XS)


def test_scatter_escapes_labels():
    svg = svg_scatter(XS, YS, "a < b", "p & q", "t>u")
    assert "a &lt; b" in svg
    assert "p &amp; q" in svg
    assert "t&gt;u" in svg
    assert "a < b" not in svg


def test_scatter_degenerate_range():
    # constant axes must not divide by zero
    svg = svg_scatter([1.0, 1.0, 1.0], [2.0, 2.0, 2.0], "x", "y", "flat")
    assert svg.count("<circle") == 3


def test_scatter_identity_line_toggle():
    with_line = svg_scatter(XS, YS, "x", "y", "t", identity_line=True)
    without = svg_scatter(XS, YS, "x", "y", "t", identity_line=False)
    assert with_line != without


def test_roc_curves_and_legend():
    curves = [("logprob", [(0.0, 0.0), (0.2, 0.8), (1.0, 1.0)]),
              ("slor", [(0.0, 0.0), (0.5, 0.6), (1.0, 1.0)])]
    svg = svg_roc(curves, "separability")
    assert svg == svg_roc(curves, "separability")
    assert "logprob" in svg and "slor" in svg
    assert svg.count("<polyline") == 2  # one per curve; chance diagonal is a <line>
