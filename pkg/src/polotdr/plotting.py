"""Static SVG line plots, one series per scheme.

Each plotted line carries ``gid="series-<name>"`` so the SVG can be checked
against the CSV it was drawn from.
"""

import matplotlib
from matplotlib.figure import Figure

# fixed hash salt and no timestamp keep SVG output reproducible
matplotlib.rcParams["svg.hashsalt"] = "polotdr"
SVG_METADATA = {"Date": None, "Creator": None}

STYLE = {"SISO": "tab:red", "SIMO": "tab:orange", "MIMO": "tab:blue"}


def _figure():
    fig = Figure(figsize=(6.4, 4.0), layout="constrained")
    return fig, fig.add_subplot()


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=SVG_METADATA)


def _series(table, x, y, key="scheme"):
    out = {}
    ix, iy, ik = (table.columns.index(c) for c in (x, y, key))
    for row in table.rows:
        xs, ys = out.setdefault(row[ik], ([], []))
        xs.append(row[ix])
        ys.append(row[iy])
    return out


def plot_theta_sweep(table, path):
    fig, ax = _figure()
    for name, (xs, ys) in _series(table, "theta_rad", "stdv_rad").items():
        (line,) = ax.plot(xs, ys, label=name, color=STYLE.get(name))
        line.set_gid(f"series-{name}")
    ax.set_xlabel(r"TX/RX misalignment $\theta$ (rad)")
    ax.set_ylabel("phase StDv (rad)")
    ax.set_yscale("log")
    ax.legend()
    _save(fig, path)


def plot_theta_cap_sweep(table, path):
    fig, ax = _figure()
    tc = table.column("theta_cap_rad")
    for col, label, color in (("re_sum", "Re(h_xx+h_yx)", "tab:green"), ("im_sum", "Im(h_xx+h_yx)", "tab:purple")):
        (line,) = ax.plot(tc, table.column(col), label=label, color=color)
        line.set_gid(f"series-{col}")
    ax.axhline(0, color="0.7", lw=0.8)
    ax.set_xlabel(r"segment rotation $\Theta$ (rad)")
    ax.set_ylabel("column sum (a.u.)")
    ax2 = ax.twinx()
    (line,) = ax2.plot(tc, table.column("stdv_simo_rad"), "k--", label="SIMO StDv")
    line.set_gid("series-stdv_simo_rad")
    ax2.set_ylabel("phase StDv (rad)")
    handles = ax.get_lines()[:2] + [line]
    ax.legend(handles, [h.get_label() for h in handles], loc="upper right")
    _save(fig, path)


def plot_profile(table, path, value="stdv_rad"):
    fig, ax = _figure()
    for name, (xs, ys) in _series(table, "z_m", value).items():
        (line,) = ax.plot([x / 1000 for x in xs], ys, label=name, color=STYLE.get(name), lw=0.8)
        line.set_gid(f"series-{name}")
    ax.set_xlabel("distance (km)")
    ax.set_ylabel("mean phase StDv (rad)" if value.startswith("mean") else "phase StDv (rad)")
    ax.legend()
    _save(fig, path)


def plot_table(kind, table, path):
    if kind == "theta_sweep":
        plot_theta_sweep(table, path)
    elif kind == "theta_cap_sweep":
        plot_theta_cap_sweep(table, path)
    elif kind == "monte_carlo":
        plot_profile(table, path, "mean_stdv_rad")
    else:
        plot_profile(table, path, "stdv_rad")


def series_ids(svg_text):
    """Series names embedded in an SVG written by this module."""
    import re

    return re.findall(r'id="series-([^"]+)"', svg_text)
