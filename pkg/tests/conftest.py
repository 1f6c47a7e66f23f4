import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

F = Fraction


@st.composite
def schmidt_lists(draw, max_rank=6, max_den=60):
    """Descending positive Fractions with a common denominator, summing to one."""
    rank = draw(st.integers(1, max_rank))
    den = draw(st.integers(rank, max_den))
    cuts = sorted(draw(st.sets(st.integers(1, den - 1), min_size=rank - 1, max_size=rank - 1))) if rank > 1 else []
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return sorted((F(k, den) for k in parts), reverse=True)


@pytest.fixture
def write_json(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)

    return _write
