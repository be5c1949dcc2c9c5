"""Run the illustrative doctests embedded in the library."""

import doctest

import braidalg.fusion
import braidalg.scalars


def test_scalars_doctests():
    results = doctest.testmod(
        braidalg.scalars,
        extraglobs={
            "zeta": braidalg.scalars.zeta,
            "sqrt": braidalg.scalars.sqrt,
            "ZetaSpec": braidalg.scalars.ZetaSpec,
        },
    )
    assert results.failed == 0 and results.attempted > 0


def test_fusion_doctests():
    results = doctest.testmod(braidalg.fusion)
    assert results.failed == 0 and results.attempted > 0
