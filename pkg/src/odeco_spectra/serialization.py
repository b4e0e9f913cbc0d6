"""JSON encodings for tensors, tuples, fixed-point specs and zero patterns.

Tensor files: ``{"shape": [...], "entries": [...]}`` with row-major entries.
Odeco files: ``{"shape": [...], "sigmas": [...], "factors": [[[...]]]}`` with
each factor a row-major n_j x n_j matrix. Complex numbers are ``[re, im]``.
Row and mode indices in specs and patterns are 1-based in JSON.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ValidationError
from .spectra_enum import TypeIIComponent, TypeISpec, ZeroPattern
from .tensor_core import (DenseTensor, OdecoTensor, SingularTuple, TensorShape,
                          canonicalize_odeco)


def complex_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def from_pair(p) -> complex:
    return complex(p[0], p[1])


def dense_to_dict(T: DenseTensor) -> dict:
    return {"shape": list(T.shape.dims), "entries": T.entries.tolist()}


def dense_from_dict(obj: dict) -> DenseTensor:
    try:
        return DenseTensor.from_entries(TensorShape(tuple(obj["shape"])), obj["entries"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed tensor record: {exc}") from None


def odeco_to_dict(odeco: OdecoTensor) -> dict:
    return {
        "shape": list(odeco.shape.dims),
        "sigmas": odeco.sigmas.tolist(),
        "factors": [V.tolist() for V in odeco.factors],
    }


def odeco_from_dict(obj: dict, canonicalize: bool = True) -> OdecoTensor:
    try:
        shape = TensorShape(tuple(obj["shape"]))
        odeco = OdecoTensor(shape, obj["sigmas"], tuple(np.asarray(V, dtype=float) for V in obj["factors"]))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed odeco record: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed odeco record: {exc}") from None
    return canonicalize_odeco(odeco) if canonicalize else odeco


def tensor_from_dict(obj: dict) -> Union[DenseTensor, OdecoTensor]:
    if not isinstance(obj, dict):
        raise ValidationError("tensor file must hold a JSON object")
    if "factors" in obj:
        return odeco_from_dict(obj)
    if "entries" in obj:
        return dense_from_dict(obj)
    raise ValidationError("tensor file needs either 'entries' or 'sigmas' and 'factors'")


def parse_tensor_file(path) -> Union[DenseTensor, OdecoTensor]:
    """Load a dense or odeco tensor file; odeco tensors are canonicalized."""
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {path}: {exc}") from None
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    return tensor_from_dict(obj)


def write_tensor_file(path, tensor: Union[DenseTensor, OdecoTensor]) -> None:
    obj = odeco_to_dict(tensor) if isinstance(tensor, OdecoTensor) else dense_to_dict(tensor)
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def tuple_to_dict(tup: SingularTuple) -> dict:
    return {"kind": tup.kind, "points": [[complex_pair(z) for z in p] for p in tup.points]}


def tuple_from_dict(obj: dict) -> SingularTuple:
    return SingularTuple([[from_pair(z) for z in p] for p in obj["points"]], kind=obj.get("kind", "unclassified"))


def spec_to_dict(spec: TypeISpec) -> dict:
    return {
        "support": [i + 1 for i in spec.support],
        "eta": list(spec.eta),
        "signs": [list(s) for s in spec.signs],
    }


def spec_from_dict(obj: dict, d: int) -> TypeISpec:
    return TypeISpec(d, tuple(i - 1 for i in obj["support"]), tuple(obj["eta"]),
                     tuple(tuple(s) for s in obj["signs"]))


def pattern_to_dict(pattern: ZeroPattern) -> dict:
    return {"rows": [[j + 1 for j in r] for r in pattern.sorted_rows()]}


def pattern_from_dict(obj: dict) -> ZeroPattern:
    return ZeroPattern(tuple(frozenset(j - 1 for j in r) for r in obj["rows"]))


def component_to_dict(comp: TypeIIComponent) -> dict:
    out = pattern_to_dict(comp.pattern)
    out["dimension"] = comp.dimension
    out["factor_dims"] = list(comp.factor_dims)
    return out
