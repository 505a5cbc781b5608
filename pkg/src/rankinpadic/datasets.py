"""Packaged example data: two newforms, an Eisenstein eigen-series and a basis."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

NEWFORMS = {"11a": "11a.json", "Delta": "delta.json", "E4": "e4.json"}


def _read(name: str):
    return json.loads(resources.files("rankinpadic").joinpath("data", name).read_text())


@lru_cache(maxsize=None)
def newform(label: str):
    from .forms import NewformData
    return NewformData.from_json(_read(NEWFORMS[label]))


@lru_cache(maxsize=None)
def space_12_11():
    """A basis of M_12(Gamma_0(11)) at 528 coefficients."""
    from .padicL import OrdinarySpace
    return OrdinarySpace.from_json(_read("space_12_11.json"))


def wd_samples():
    from .localfactors import WeilDeligneDatum
    return [WeilDeligneDatum.from_json(o) for o in _read("wd_samples.json")]
