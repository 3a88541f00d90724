import numpy as np
import pytest

from hullstats import figures, finite_laws, limit_laws
from hullstats.families import Family


@pytest.mark.parametrize("which", sorted(figures.BUILDERS))
def test_every_figure_builds_with_consistent_rows(which):
    kw = {"ks": (50,)} if which in (12, 13) else {}
    t = figures.build(which, Family.QUADRANGULATION, **kw)
    assert t.rows and all(len(r) == len(t.columns) for r in t.rows)
    assert all(np.isfinite(float(v)) for r in t.rows for v in r)


def test_schematic_figures_have_no_data():
    for which in (1, 10, 11):
        with pytest.raises(ValueError):
            figures.build(which)


def test_csv_has_metadata_and_header():
    text = figures.write_csv(figures.fig2(n=3), ["extra note"])
    lines = text.splitlines()
    assert lines[0].startswith("# figure 2:")
    assert lines[1] == "# extra note"
    assert lines[2] == "u,p_out,p_in"
    assert len(lines) == 6


def test_csv_is_deterministic():
    assert figures.write_csv(figures.fig7()) == figures.write_csv(figures.fig7())


def test_fig9_matches_finite_laws():
    t = figures.fig9(k=20)
    d = t.column("d").astype(int)
    assert list(d) == list(range(2, 20))
    assert np.allclose(t.column("p_finite") + t.column("p_infinite"), 1.0)
    assert t.rows[3][2] == float(finite_laws.regime_probabilities(20, 5).p_finite)


def test_perimeter_means_close_to_limit_at_large_k():
    t = figures.fig12(ks=(2000,), d_step=lambda k: 250)
    rel = np.abs(t.column("L_finite") / t.column("L_limit") - 1)
    inner = (t.column("u") > 0.1) & (t.column("u") < 0.95)
    assert np.max(rel[inner]) < 0.02


@pytest.mark.parametrize("fam", list(Family))
def test_family_changes_scale(fam):
    t = figures.fig3(fam, n=11)
    col = t.column("out[u->0]")
    assert np.allclose(col, limit_laws.perimeter_density_limit(t.column("L"), "out_u0", fam))
    assert t.notes == [f"family {fam.roman}"]


def test_fig14_endpoints():
    t = figures.fig14(n=11)
    w = t.column("W_mean")
    assert np.isclose(w[0], 36 / 240) and w[-1] == 0.0
