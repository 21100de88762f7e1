import numpy as np
import pytest

from qslkit.errors import BadStateSpec
from qslkit.statespec import parse_state
from qslkit.states import BellDiagonal, bell_state, bloch_state, chi_state, ghz_state, max_coherent_entangled, werner


@pytest.mark.parametrize(
    "spec,expected",
    [
        ("bloch:1,0,0", bloch_state((1, 0, 0))),
        (" Bloch: 0.3, 0, -0.4 ", bloch_state((0.3, 0, -0.4))),
        ("chi:+", chi_state(1)),
        ("chi:-,0.5", chi_state(-1, 0.5)),
        ("bell:psi-", bell_state("psi-")),
        ("belldiag:0.5,-0.3,0.2", BellDiagonal(0.5, -0.3, 0.2).matrix()),
        ("ghz:3,2", ghz_state(3, 2)),
        ("ghz:4,7,-", ghz_state(4, 7, -1)),
        ("mcb:phi+", max_coherent_entangled("phi+")),
        ("werner:0.5,bell:phi+", werner(0.5, bell_state("phi+"))),
        ("werner:0.2,mcb:psi+", werner(0.2, max_coherent_entangled("psi+"))),
        ("mcbw:0.5,phi+", werner(0.5, max_coherent_entangled("phi+"))),
    ],
)
def test_valid_specs(spec, expected):
    assert np.allclose(parse_state(spec), expected)


@pytest.mark.parametrize(
    "spec",
    ["bloch:1,0", "bloch:2,0,0", "bloch:a,b,c", "chi:x", "bell:foo", "belldiag:1,1,1", "ghz:5,1", "ghz:3,9", "ghz:3", "werner:2,bell:phi+", "werner:0.5", "plain", "qutrit:1"],
)
def test_invalid_specs(spec):
    with pytest.raises(BadStateSpec):
        parse_state(spec)
