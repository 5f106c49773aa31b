"""Binary product and division through 3-axis lattices.

A matched identity with complementary variants names an inner product, a
matched identity with equal variants names an entrywise (page) pairing, and an
unmatched identity names an outer pairing.  Each operand maps by
permute-and-reshape onto a lattice, a rows x cols x pages array: outer
dimensions fold into rows of the left lattice and columns of the right one,
inner dimensions fold into the opposing pair, and pages carry the entrywise
dimensions.  One batched matrix multiply (or triangular solve) per page then
realizes any mixture of inner, entrywise, and outer products, with matrix rows
and columns folding in as the leading factor of their group.

Divisions complement every index of the denominator operand before alignment,
so writing the denominator with complemented indices relative to the numerator
yields entrywise (pagewise) systems, and the solution carries the complemented
denominator leftovers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimMismatchError, SingularPageError
from .indices import IndexHandle
from .tensor import Tensor

__all__ = [
    "AlignmentPlan2",
    "Lattice",
    "align2",
    "to_lattice",
    "from_lattice",
    "product",
    "solve_left",
    "solve_right",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlignmentPlan2:
    """Classification of two index lists for a pagewise binary operation.

    ``inner_ids`` are matched with complementary variants, ``page_ids`` with
    equal variants (variant recorded from the left operand); the outer lists
    hold each operand's leftovers.  ``result_indices`` is always
    left-outer ++ right-outer ++ pages.
    """

    inner_ids: tuple[IndexHandle, ...]
    page_ids: tuple[IndexHandle, ...]
    left_outer_ids: tuple[IndexHandle, ...]
    right_outer_ids: tuple[IndexHandle, ...]
    result_indices: tuple[IndexHandle, ...] = field(default=())

    def __post_init__(self):
        if not self.result_indices:
            object.__setattr__(
                self,
                "result_indices",
                self.left_outer_ids + self.right_outer_ids + self.page_ids,
            )


def align2(a_indices, b_indices) -> AlignmentPlan2:
    """Partition two index lists into inner, page, and outer groups."""
    b_by_id = {h.id: h for h in b_indices}
    inner = []
    pages = []
    left_outer = []
    for h in a_indices:
        other = b_by_id.get(h.id)
        if other is None:
            left_outer.append(h)
        elif other.variant == h.variant:
            pages.append(h)
        else:
            inner.append(h)
    matched = {h.id for h in inner} | {h.id for h in pages}
    right_outer = [h for h in b_indices if h.id not in matched]
    return AlignmentPlan2(tuple(inner), tuple(pages), tuple(left_outer), tuple(right_outer))


@dataclass
class Lattice:
    """A rows x cols x pages view of one operand, invertible exactly."""

    data: np.ndarray
    side: str
    _perm: tuple[int, ...] = ()
    _mid_shape: tuple[int, ...] = ()
    _indices: tuple[IndexHandle, ...] = ()


def _axis_map(t: Tensor) -> dict[int, int]:
    return {h.id: k + 2 for k, h in enumerate(t.indices)}


def _fold(t: Tensor, row_ids, col_ids, page_ids):
    """Permute to (rows, row_ids.., cols, col_ids.., pages..) and fuse groups."""
    axis = _axis_map(t)
    perm = (
        [0]
        + [axis[h.id] for h in row_ids]
        + [1]
        + [axis[h.id] for h in col_ids]
        + [axis[h.id] for h in page_ids]
    )
    arr = np.transpose(t.entries, perm)
    mid = arr.shape
    nrow = 1 + len(row_ids)
    ncol = 1 + len(col_ids)
    r = math.prod(mid[:nrow])
    c = math.prod(mid[nrow:nrow + ncol])
    p = math.prod(mid[nrow + ncol:])
    return arr.reshape(r, c, p), tuple(perm), mid


def to_lattice(t: Tensor, plan: AlignmentPlan2, side: str) -> Lattice:
    """Map one product operand onto its lattice.

    The left operand folds matrix rows with its outer dimensions and matrix
    columns with the inner dimensions; the right operand folds matrix rows
    with the inner dimensions and matrix columns with its outer dimensions.
    """
    if side == "left":
        row_ids, col_ids = plan.left_outer_ids, plan.inner_ids
    elif side == "right":
        row_ids, col_ids = plan.inner_ids, plan.right_outer_ids
    else:
        raise ValueError("side must be 'left' or 'right'")
    data, perm, mid = _fold(t, row_ids, col_ids, plan.page_ids)
    return Lattice(data, side, perm, mid, t.indices)


def from_lattice(lat: Lattice, plan: AlignmentPlan2 | None = None) -> Tensor:
    """Invert :func:`to_lattice` exactly."""
    arr = lat.data.reshape(lat._mid_shape)
    inv = np.argsort(lat._perm)
    return Tensor(np.transpose(arr, inv), lat._indices)


def _as_tensor(op) -> Tensor:
    if isinstance(op, Tensor):
        return op.simplify()
    return Tensor(op)


def _numeric(arr: np.ndarray) -> np.ndarray:
    return arr.astype(np.float64) if arr.dtype == np.bool_ else arr


def _check_matched_sizes(a: Tensor, b: Tensor, plan: AlignmentPlan2):
    amap = _axis_map(a)
    bmap = _axis_map(b)
    for h in plan.inner_ids:
        na = a.entries.shape[amap[h.id]]
        nb = b.entries.shape[bmap[h.id]]
        if na != nb:
            raise DimMismatchError(f"inner index {h!r} has sizes {na} and {nb}")
    page_sizes = {}
    for h in plan.page_ids:
        na = a.entries.shape[amap[h.id]]
        nb = b.entries.shape[bmap[h.id]]
        if na != nb and 1 not in (na, nb):
            raise DimMismatchError(f"page index {h!r} has sizes {na} and {nb}")
        page_sizes[h.id] = max(na, nb)
    return page_sizes


def _expand_pages(t: Tensor, page_sizes: dict[int, int]) -> Tensor:
    """Replicate size-1 page dimensions up to the common page sizes."""
    shape = list(t.entries.shape)
    changed = False
    for k, h in enumerate(t.indices):
        want = page_sizes.get(h.id)
        if want is not None and shape[k + 2] != want:
            shape[k + 2] = want
            changed = True
    if not changed:
        return t
    return Tensor(np.ascontiguousarray(np.broadcast_to(t.entries, shape)), t.indices)


def product(a, b) -> Tensor:
    """The framework's ``*``: any mixture of inner, entrywise, and outer products.

    Matrix rows and columns take part in an ordinary matrix multiply when both
    operands have nontrivial rows/cols (conformance ``cols(a) == rows(b)``); a
    1x1 operand scales the other entrywise.  Result indices are the left
    leftovers, then the right leftovers, then the pages with the left
    operand's variants.
    """
    a = _as_tensor(a)
    b = _as_tensor(b)
    plan = align2(a.indices, b.indices)
    page_sizes = _check_matched_sizes(a, b, plan)
    a = _expand_pages(a, page_sizes)
    b = _expand_pages(b, page_sizes)
    if a.cols == b.rows:
        return _lattice_product(a, b, plan)
    if (a.rows, a.cols) == (1, 1) or (b.rows, b.cols) == (1, 1):
        return _expansion_product(a, b, plan)
    raise DimMismatchError(
        f"matrix dimensions do not conform: {a.rows}x{a.cols} * {b.rows}x{b.cols}"
    )


def _pages_first_fold(t: Tensor, row_ids, col_ids, page_ids) -> np.ndarray:
    """Fold to a (pages, rows, cols) stack, copying at most once.

    Pages lead so the batched matrix kernel sees contiguous blocks; matrix
    rows/cols fold as the leading factor of their group.
    """
    axis = _axis_map(t)
    perm = (
        [axis[h.id] for h in page_ids]
        + [0]
        + [axis[h.id] for h in row_ids]
        + [1]
        + [axis[h.id] for h in col_ids]
    )
    arr = np.transpose(t.entries, perm)
    mid = arr.shape
    npg = len(page_ids)
    nrow = 1 + len(row_ids)
    pg = math.prod(mid[:npg])
    r = math.prod(mid[npg:npg + nrow])
    c = math.prod(mid[npg + nrow:])
    # contiguity keeps the batched kernel on its fast path
    return np.ascontiguousarray(arr.reshape(pg, r, c))


def _lattice_product(a: Tensor, b: Tensor, plan: AlignmentPlan2) -> Tensor:
    xa = _numeric(_pages_first_fold(a, plan.left_outer_ids, plan.inner_ids, plan.page_ids))
    xb = _numeric(_pages_first_fold(b, plan.inner_ids, plan.right_outer_ids, plan.page_ids))
    out = np.matmul(xa, xb)  # (pages, rows, cols), one blocked kernel per page
    oL = [a.entries.shape[_axis_map(a)[h.id]] for h in plan.left_outer_ids]
    oR = [b.entries.shape[_axis_map(b)[h.id]] for h in plan.right_outer_ids]
    pg = [a.entries.shape[_axis_map(a)[h.id]] for h in plan.page_ids]
    arr = out.reshape(pg + [a.rows] + oL + [b.cols] + oR)
    npg, nL, nR = len(pg), len(oL), len(oR)
    perm = (
        [npg, npg + 1 + nL]
        + list(range(npg + 1, npg + 1 + nL))
        + list(range(npg + 2 + nL, npg + 2 + nL + nR))
        + list(range(npg))
    )
    return Tensor(np.transpose(arr, perm), plan.result_indices)


def _align_pair(t: Tensor, order: tuple[IndexHandle, ...]) -> np.ndarray:
    """Entries permuted to follow ``order``, singleton dims for absent identities."""
    axis = _axis_map(t)
    perm = [0, 1] + [axis[h.id] for h in order if h.id in axis]
    arr = np.transpose(t.entries, perm)
    shape = list(arr.shape[:2])
    k = 2
    for h in order:
        if h.id in axis:
            shape.append(arr.shape[k])
            k += 1
        else:
            shape.append(1)
    return arr.reshape(shape)


def _expansion_product(a: Tensor, b: Tensor, plan: AlignmentPlan2) -> Tensor:
    # one operand is a 1x1 matrix: entrywise scaling plus summation over inner dims
    order = plan.left_outer_ids + plan.right_outer_ids + plan.page_ids + plan.inner_ids
    xa = _numeric(_align_pair(a, order))
    xb = _numeric(_align_pair(b, order))
    out = xa * xb
    n_inner = len(plan.inner_ids)
    if n_inner:
        out = out.sum(axis=tuple(range(out.ndim - n_inner, out.ndim)))
    return Tensor(out, plan.result_indices)


# -- division ----------------------------------------------------------------


def _complement_all(t: Tensor) -> Tensor:
    return Tensor(t.entries, tuple(~h for h in t.indices))


def _page_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve A X = B per page; A (pages, m, k), B (pages, m, j).

    Square pages use LU with partial pivoting, tall pages QR least squares.
    Underdetermined pages are rejected and singular square pages raise
    :class:`SingularPageError` with the offending page.
    """
    pages, m, k = A.shape
    if m < k:
        raise DimMismatchError(
            f"underdetermined pages: {m} equations for {k} unknowns"
        )
    if log.isEnabledFor(logging.DEBUG):
        for p in range(pages):
            log.debug("page %d condition estimate %.3e", p, np.linalg.cond(A[p]))
    if m == k:
        try:
            return np.linalg.solve(A, B)
        except np.linalg.LinAlgError:
            for p in range(pages):
                try:
                    np.linalg.solve(A[p], B[p])
                except np.linalg.LinAlgError:
                    raise SingularPageError(f"singular square page {p}", page=p) from None
            raise
    Q, R = np.linalg.qr(A)
    diag = np.abs(np.diagonal(R, axis1=1, axis2=2))
    scale = np.abs(R).max(axis=(1, 2))
    bad = np.where(diag.min(axis=1) <= np.finfo(np.float64).eps * np.maximum(scale, 1) * m)[0]
    if bad.size:
        raise SingularPageError(f"rank-deficient page {bad[0]}", page=int(bad[0]))
    rhs = np.matmul(np.conj(np.swapaxes(Q, 1, 2)), B)
    return np.linalg.solve(R, rhs)


def _solve_common(den: Tensor, num: Tensor, den_left: bool):
    """Shared left/right division after the denominator is complemented.

    Per page the system matrix folds (equation-matrix-dim, inner dims) into
    rows and (free-matrix-dim, denominator leftovers) into columns; the
    numerator folds likewise with its leftovers as right-hand-side blocks.
    For left division the equation matrix dimension is the rows, for right
    division the columns.  A 1x1 denominator scales entrywise, in which case
    the numerator's rows and columns ride along as block dimensions.
    """
    if den_left:
        plan = align2(den.indices, num.indices)
        den_outer, num_outer = plan.left_outer_ids, plan.right_outer_ids
        page_sizes = _check_matched_sizes(den, num, plan)
    else:
        plan = align2(num.indices, den.indices)
        num_outer, den_outer = plan.left_outer_ids, plan.right_outer_ids
        page_sizes = _check_matched_sizes(num, den, plan)
    den = _expand_pages(den, page_sizes)
    num = _expand_pages(num, page_sizes)

    inner, pages = plan.inner_ids, plan.page_ids
    rhs_mat_in_blocks = (den.rows, den.cols) == (1, 1) and (num.rows, num.cols) != (1, 1)
    eq_mat, free_mat = (0, 1) if den_left else (1, 0)

    def fold(t, outer_ids, blocks_mat):
        axis = _axis_map(t)
        if blocks_mat:
            rows = [axis[h.id] for h in inner]
            cols = [0, 1] + [axis[h.id] for h in outer_ids]
        else:
            rows = [eq_mat] + [axis[h.id] for h in inner]
            cols = [free_mat] + [axis[h.id] for h in outer_ids]
        perm = rows + cols + [axis[h.id] for h in pages]
        arr = np.transpose(t.entries, perm)
        mid = arr.shape
        e = math.prod(mid[: len(rows)])
        f = math.prod(mid[len(rows): len(rows) + len(cols)])
        return arr.reshape(e, f, math.prod(mid[len(rows) + len(cols):]))

    A = fold(den, den_outer, blocks_mat=False)
    B = fold(num, num_outer, blocks_mat=rhs_mat_in_blocks)
    if A.shape[0] != B.shape[0]:
        raise DimMismatchError(
            f"equation counts disagree: {A.shape[0]} vs {B.shape[0]}"
        )
    dtype = np.result_type(_numeric(A).dtype, _numeric(B).dtype)
    X = _page_solve(
        np.moveaxis(A, 2, 0).astype(dtype),
        np.moveaxis(B, 2, 0).astype(dtype),
    )
    X = np.moveaxis(X, 0, 2)  # (unknowns, blocks, pages)

    den_axis = _axis_map(den)
    num_axis = _axis_map(num)
    den_dims = [den.entries.shape[den_axis[h.id]] for h in den_outer]
    num_dims = [num.entries.shape[num_axis[h.id]] for h in num_outer]
    pg_dims = [num.entries.shape[num_axis[h.id]] for h in pages]
    nden, nnum, npg = len(den_dims), len(num_dims), len(pg_dims)

    if rhs_mat_in_blocks:
        arr = X.reshape(den_dims + [num.rows, num.cols] + num_dims + pg_dims)
        mat_axes = [nden, nden + 1]
        den_axes = list(range(nden))
        num_axes = list(range(nden + 2, nden + 2 + nnum))
        pg_axes = list(range(nden + 2 + nnum, nden + 2 + nnum + npg))
    else:
        den_free = den.cols if den_left else den.rows
        num_free = num.cols if den_left else num.rows
        arr = X.reshape([den_free] + den_dims + [num_free] + num_dims + pg_dims)
        # left division: result matrix is (den cols, num cols);
        # right division: (num rows, den rows)
        mat_axes = [0, 1 + nden] if den_left else [1 + nden, 0]
        den_axes = list(range(1, 1 + nden))
        num_axes = list(range(2 + nden, 2 + nden + nnum))
        pg_axes = list(range(2 + nden + nnum, 2 + nden + nnum + npg))
    if den_left:
        perm = mat_axes + den_axes + num_axes + pg_axes
        indices = tuple(den_outer) + tuple(num_outer) + tuple(pages)
    else:
        perm = mat_axes + num_axes + den_axes + pg_axes
        indices = tuple(num_outer) + tuple(den_outer) + tuple(pages)
    return Tensor(np.transpose(arr, perm), indices)


def solve_left(a, b) -> Tensor:
    """``a \\ b``: solve the linear system implied by ``product(a, u) == b``.

    Every index of the denominator ``a`` is complemented before alignment, and
    the solution carries those complemented leftovers first, then the
    numerator's leftovers, then the pages.
    """
    den = _complement_all(_as_tensor(a))
    num = _as_tensor(b)
    return _solve_common(den, num, den_left=True)


def solve_right(b, a) -> Tensor:
    """``b / a``: solve the system implied by ``product(u, a) == b``."""
    den = _complement_all(_as_tensor(a))
    num = _as_tensor(b)
    return _solve_common(den, num, den_left=False)
