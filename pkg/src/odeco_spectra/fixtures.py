"""Bundled example tensors."""
from __future__ import annotations

from importlib import resources

from .errors import ValidationError
from .serialization import parse_tensor_file

FIXTURES = {"example22": ("example22_S.json", "example22_T.json")}


def fixture_path(filename: str):
    return resources.files(__package__).joinpath("data", filename)


def load_fixture(name: str):
    """Return ``(S, T)``: the odeco reference and the dense perturbation direction."""
    try:
        s_name, t_name = FIXTURES[name]
    except KeyError:
        raise ValidationError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}") from None
    with resources.as_file(fixture_path(s_name)) as s_path, resources.as_file(fixture_path(t_name)) as t_path:
        return parse_tensor_file(s_path), parse_tensor_file(t_path)
