"""Dense tensors: a multidimensional value bound to an ordered list of indices.

Array dimensions 0 and 1 are matrix rows and columns and never carry an index;
tensor dimension ``t`` lives at array dimension ``t + 2``.  The degree of a
tensor is the number of indices, which may exceed the stored array's trailing
dimensions (extra indices address virtual trailing singletons).  A tensor with
1x1 rows and columns is a "scalar" of its degree; a degree-0 tensor with
nontrivial rows or columns is an ordinary matrix or vector.

``simplify`` normalizes an index list with repeats: every group of positions
sharing an identity collapses to its generalized diagonal (attraction), and the
group is additionally summed away when it mixed variants (contraction).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AssignKindError,
    BoundsError,
    DimMismatchError,
    ElementKindError,
    IndexArityError,
    SubscriptKindError,
    UnknownIndexError,
)
from .indices import IndexHandle, fresh_many

__all__ = ["Tensor", "Shape", "from_array", "with_indices", "assign"]


def _as_entries(values) -> np.ndarray:
    """Coerce input data to one of the three element kinds.

    0-D input becomes 1x1; 1-D input of length n becomes a degree-one payload
    shaped (1, 1, n), so plain lists read as index-bearing vectors.
    """
    arr = np.asarray(values)
    if arr.dtype == np.bool_:
        pass
    elif np.issubdtype(arr.dtype, np.complexfloating):
        arr = arr.astype(np.complex128, copy=False)
    elif np.issubdtype(arr.dtype, np.integer) or np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(np.float64, copy=False)
    else:
        raise ElementKindError(f"unsupported element dtype {arr.dtype}")
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, 1, arr.shape[0])
    return arr


def _trimmed_ndim(shape: tuple[int, ...]) -> int:
    """Number of dimensions once trailing singletons are dropped, at least 2."""
    nd = len(shape)
    while nd > 2 and shape[nd - 1] == 1:
        nd -= 1
    return max(nd, 2)


@dataclass(frozen=True)
class Shape:
    rows: int
    cols: int
    tensor_dims: tuple[int, ...]


class Tensor:
    """Immutable dense tensor value.

    ``entries`` always has ``ndim == 2 + degree``; trailing singleton
    dimensions are materialized at construction so each index owns one array
    dimension.  Duplicate identities in the index list are allowed until
    :meth:`simplify` runs; the alignment engines simplify their operands on
    entry.
    """

    __slots__ = ("entries", "indices")

    def __init__(self, entries, indices: Sequence[IndexHandle] = ()):
        arr = _as_entries(entries)
        idx = tuple(indices)
        if any(not isinstance(h, IndexHandle) for h in idx):
            raise SubscriptKindError("tensor indices must be IndexHandle values")
        need = _trimmed_ndim(arr.shape) - 2
        if len(idx) < need:
            raise IndexArityError(
                f"{len(idx)} indices cannot address an array with "
                f"{need} nontrivial tensor dimensions"
            )
        target = arr.shape[:2] + arr.shape[2:2 + len(idx)]
        target += (1,) * (2 + len(idx) - len(target))
        object.__setattr__(self, "entries", arr.reshape(target))
        object.__setattr__(self, "indices", idx)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("Tensor is immutable")

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.indices)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def tensor_dims(self) -> tuple[int, ...]:
        return self.entries.shape[2:]

    @property
    def shape(self) -> Shape:
        return Shape(self.rows, self.cols, self.tensor_dims)

    @property
    def numel(self) -> int:
        return self.entries.size

    @property
    def kind(self) -> str:
        return {np.bool_: "boolean", np.float64: "real64", np.complex128: "complex128"}[
            self.entries.dtype.type
        ]

    def dim_of(self, h: IndexHandle) -> int | None:
        """Array axis carrying the identity of ``h``, or None."""
        for t, own in enumerate(self.indices):
            if own.id == h.id:
                return t + 2
        return None

    def __repr__(self) -> str:
        dims = "x".join(str(d) for d in self.entries.shape)
        return f"Tensor({dims}, indices={list(self.indices)}, kind={self.kind})"

    # -- subscripting ------------------------------------------------------

    def reindex(self, subs: Sequence[IndexHandle]) -> "Tensor":
        """Rebind the stored array to ``subs`` and simplify.

        Prior indices are ignored; the subscripts redefine the index list
        outright, after which repeated identities are attracted and, when they
        mix variants, contracted.
        """
        subs = tuple(subs)
        kinds = {isinstance(s, IndexHandle) for s in subs}
        if kinds == {True, False}:
            raise SubscriptKindError("subscripts mix index handles with numbers")
        if False in kinds:
            raise SubscriptKindError("reindex requires index-handle subscripts")
        need = _trimmed_ndim(self.entries.shape) - 2
        if len(subs) < need:
            raise IndexArityError(
                f"need at least {need} subscripts, got {len(subs)}"
            )
        return Tensor(self.entries, subs).simplify()

    def slice(self, subs: Sequence) -> np.ndarray:
        """Numeric subscripting, 1-based, delegated to the stored array.

        Accepts integers, ``":"`` for a whole dimension, and Python ``slice``
        objects with 1-based inclusive bounds.  A single integer subscript on
        a multi-dimension tensor is a linear index in row-major order.
        """
        if any(isinstance(s, IndexHandle) for s in subs):
            raise SubscriptKindError("slice takes numeric subscripts only")
        shape = self.entries.shape
        if len(subs) == 1 and len(shape) > 1 and not _is_colon(subs[0]):
            k = subs[0]
            if not isinstance(k, (int, np.integer)):
                raise SubscriptKindError("linear subscript must be an integer")
            if k < 1 or k > self.entries.size:
                raise BoundsError(f"linear subscript {k} out of range 1..{self.entries.size}")
            return self.entries.reshape(-1)[k - 1]
        if len(subs) > len(shape):
            extra = subs[len(shape):]
            if any(not _is_colon(s) and s != 1 for s in extra):
                raise BoundsError("subscript beyond the last dimension must be 1")
            subs = subs[: len(shape)]
        out = []
        for d, s in enumerate(subs):
            n = shape[d]
            if _is_colon(s):
                out.append(np.s_[:])
            elif isinstance(s, slice):
                lo = 1 if s.start is None else s.start
                hi = n if s.stop is None else s.stop
                if lo < 1 or hi > n:
                    raise BoundsError(f"range {lo}:{hi} out of bounds for dimension {d + 1}")
                out.append(np.s_[lo - 1:hi])
            elif isinstance(s, (int, np.integer)):
                if s < 1 or s > n:
                    raise BoundsError(f"subscript {s} out of range 1..{n} in dimension {d + 1}")
                out.append(s - 1)
            else:
                raise SubscriptKindError(f"unsupported subscript {s!r}")
        return self.entries[tuple(out)]

    # -- unary ops ---------------------------------------------------------

    def permute(self, new_idx: Sequence[IndexHandle]) -> "Tensor":
        """Reorder tensor dimensions to follow ``new_idx``.

        Every existing identity must be retained (variants stay as stored);
        extra identities are allowed and address trailing singletons with the
        variant given.
        """
        new_idx = tuple(new_idx)
        ids = [h.id for h in new_idx]
        if len(set(ids)) != len(ids):
            raise SubscriptKindError("permutation lists an identity twice")
        pos = {h.id: t for t, h in enumerate(self.indices)}
        for own in self.indices:
            if own.id not in ids:
                raise UnknownIndexError(f"permute drops index {own!r}")
        perm = [0, 1]
        final = []
        fill = self.entries.ndim
        grow = 0
        for h in new_idx:
            if h.id in pos:
                perm.append(pos[h.id] + 2)
                final.append(self.indices[pos[h.id]])
            else:
                perm.append(fill + grow)
                grow += 1
                final.append(h)
        arr = self.entries.reshape(self.entries.shape + (1,) * grow)
        arr = np.transpose(arr, perm)
        return Tensor(arr, final)

    def sum(self, over: Iterable[IndexHandle]) -> "Tensor":
        """Sum the stored array over matched identities, irrespective of variants."""
        over_ids = {h.id for h in over}
        axes = tuple(t + 2 for t, h in enumerate(self.indices) if h.id in over_ids)
        if not axes:
            return self
        arr = self.entries.sum(axis=axes)
        kept = [h for h in self.indices if h.id not in over_ids]
        return Tensor(arr, kept)

    def simplify(self) -> "Tensor":
        """Attract every repeated identity, then contract groups that mixed variants."""
        order: list[int] = []
        groups: dict[int, list[int]] = {}
        for t, h in enumerate(self.indices):
            if h.id not in groups:
                order.append(h.id)
                groups[h.id] = []
            groups[h.id].append(t)
        if len(order) == len(self.indices):
            return self

        arr = self.entries
        cur = {t: t + 2 for t in range(len(self.indices))}
        kept: list[IndexHandle] = []
        contract: list[IndexHandle] = []
        for gid in order:
            grp = groups[gid]
            leader = self.indices[grp[0]]
            kept.append(leader)
            if len(grp) == 1:
                continue
            axes = sorted(cur[p] for p in grp)
            sizes = {arr.shape[a] for a in axes}
            if len(sizes) > 1:
                raise DimMismatchError(
                    f"index {leader!r} repeats with sizes {sorted(sizes)}"
                )
            if len({self.indices[p].variant for p in grp}) > 1:
                contract.append(leader)
            arr = _diagonal(arr, axes, keep=cur[grp[0]])
            removed = [a for a in axes if a != cur[grp[0]]]
            for p, a in cur.items():
                cur[p] = a - sum(1 for r in removed if r < a)
        t = Tensor(arr, kept)
        if contract:
            t = t.sum(contract)
        return t


def _is_colon(s) -> bool:
    return (isinstance(s, str) and s == ":") or s is Ellipsis or (
        isinstance(s, slice) and s.start is None and s.stop is None and s.step is None
    )


def _diagonal(arr: np.ndarray, axes: list[int], keep: int) -> np.ndarray:
    """Select entries whose positions coincide along ``axes`` (linear indexing).

    The surviving dimension stays at the array position ``keep``.
    """
    axes = sorted(axes)
    n = arr.shape[axes[0]]
    k = len(axes)
    moved = np.moveaxis(arr, axes, range(arr.ndim - k, arr.ndim))
    flat = moved.reshape(moved.shape[: arr.ndim - k] + (n ** k,))
    stride = 1 if n == 1 else (n ** k - 1) // (n - 1)
    taken = flat[..., ::stride] if n > 1 else flat[..., :1]
    # the diagonal axis sits last; return it to the position of the group leader,
    # accounting for the removed later axes
    dest = keep - sum(1 for a in axes if a < keep)
    return np.moveaxis(taken, -1, dest)


# -- construction and assignment ------------------------------------------


def from_array(values) -> tuple[Tensor, list[IndexHandle]]:
    """Wrap a dense array, minting one fresh true-variant index per tensor dimension."""
    arr = _as_entries(values)
    idx = fresh_many(max(arr.ndim - 2, 0))
    return Tensor(arr, idx), idx


def with_indices(values, idx: Sequence[IndexHandle]) -> Tensor:
    """Wrap a dense array with the given indices (no simplification applied)."""
    return Tensor(values, idx)


def assign(dst: Tensor | None, subs: Sequence[IndexHandle], src) -> Tensor:
    """Indexed assignment: permute ``src`` into the order of ``subs``.

    The result's indices are ``subs`` verbatim, so the left-hand subscripts fix
    both the dimension order and the variants.  ``dst`` only names the binding
    being overwritten; its prior value never matters.
    """
    if not isinstance(src, Tensor):
        raise AssignKindError("indexed assignment requires a tensor right-hand side")
    if any(not isinstance(s, IndexHandle) for s in subs):
        raise SubscriptKindError("indexed assignment requires index-handle subscripts")
    sub_ids = {s.id for s in subs}
    for own in src.indices:
        if own.id not in sub_ids:
            raise UnknownIndexError(f"assignment subscripts do not cover {own!r}")
    permuted = src.permute(subs)
    return Tensor(permuted.entries, subs)


# -- operator sugar ---------------------------------------------------------
# `*` and `/` follow the framework's product and right-division; entrywise
# arithmetic uses + - and the ewise module.  Late imports avoid cycles.


def _ewise():
    from . import ewise

    return ewise


def _lattice():
    from . import lattice

    return lattice


def _add(self, other):
    return _ewise().ewise_binary("+", self, other)


def _radd(self, other):
    return _ewise().ewise_binary("+", other, self)


def _sub(self, other):
    return _ewise().ewise_binary("-", self, other)


def _mul(self, other):
    return _lattice().product(self, other)


def _rmul(self, other):
    return _lattice().product(other, self)


def _div(self, other):
    return _lattice().solve_right(self, other)


def _neg(self):
    return _ewise().ewise_unary("neg", self)


def _invert(self):
    return _ewise().ewise_unary("not", self)


def _and(self, other):
    return _ewise().ewise_binary("and", self, other)


def _or(self, other):
    return _ewise().ewise_binary("or", self, other)


Tensor.__add__ = _add
Tensor.__radd__ = _radd
Tensor.__sub__ = _sub
Tensor.__mul__ = _mul
Tensor.__rmul__ = _rmul
Tensor.__truediv__ = _div
Tensor.__neg__ = _neg
Tensor.__invert__ = _invert
Tensor.__and__ = _and
Tensor.__or__ = _or
