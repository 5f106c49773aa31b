import pytest
from hypothesis import given, strategies as st

from rtensor import (
    as_false,
    as_true,
    complement,
    fresh,
    fresh_many,
    same_id,
    variant,
)


def test_fresh_is_true_variant():
    assert variant(fresh()) is True


def test_fresh_ids_distinct():
    h1, h2 = fresh(), fresh()
    assert h1.id != h2.id


def test_complement_flips_variant_only():
    h = fresh()
    assert variant(complement(h)) is False
    assert same_id(h, complement(h))
    assert complement(complement(h)) == h


def test_tilde_operator_is_complement():
    h = fresh()
    assert ~h == complement(h)
    assert ~~h == h


def test_fresh_many():
    handles = fresh_many(3)
    assert len({h.id for h in handles}) == 3
    assert all(variant(h) for h in handles)
    assert fresh_many(0) == []


def test_fresh_many_negative():
    with pytest.raises(ValueError):
        fresh_many(-1)


def test_forcing_variants():
    h = fresh()
    assert as_false(h) == complement(h)
    assert variant(as_true(as_false(h))) is True
    assert as_true(h) == h


def test_variant_sensitive_equality_refines_identity():
    h = fresh()
    assert h != ~h
    assert same_id(h, ~h)


def test_orbit_closed_under_complement():
    h = fresh()
    orbit = {h, ~h}
    assert {~x for x in orbit} == orbit
    assert len(orbit) == 2


@given(st.integers(min_value=0, max_value=64))
def test_freshness_no_duplicates(n):
    ids = [h.id for h in fresh_many(n)]
    assert len(set(ids)) == n
