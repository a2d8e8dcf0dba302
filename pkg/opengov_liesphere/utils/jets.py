"""Central finite differences with an optional Richardson refinement."""

from typing import Callable

import numpy as np
from numpy.typing import ArrayLike

from opengov_liesphere.core.models import FloatArray

VectorField = Callable[[FloatArray], FloatArray]


def central_difference(func: VectorField, b: ArrayLike, axis: int, step: float) -> FloatArray:
    """(f(b + h e_axis) - f(b - h e_axis)) / 2h."""
    b = np.asarray(b, dtype=float)
    offset = np.zeros_like(b)
    offset[axis] = step
    forward = np.asarray(func(b + offset), dtype=float)
    backward = np.asarray(func(b - offset), dtype=float)
    return (forward - backward) / (2.0 * step)


def partial(
    func: VectorField, b: ArrayLike, axis: int, step: float, richardson: bool = True
) -> FloatArray:
    """One partial derivative; with ``richardson`` the O(h^2) term is cancelled."""
    coarse = central_difference(func, b, axis, step)
    if not richardson:
        return coarse
    fine = central_difference(func, b, axis, step / 2.0)
    return (4.0 * fine - coarse) / 3.0


def jacobian(
    func: VectorField, b: ArrayLike, step: float, richardson: bool = True
) -> FloatArray:
    """Matrix whose column i is the partial derivative along parameter axis i."""
    b = np.asarray(b, dtype=float)
    columns = [partial(func, b, i, step, richardson) for i in range(b.shape[0])]
    return np.stack(columns, axis=-1)


def hessian(func: VectorField, b: ArrayLike, step: float) -> FloatArray:
    """Second derivatives, shape (out_dim, k, k), from second-order central stencils."""
    b = np.asarray(b, dtype=float)
    k = b.shape[0]
    center = np.asarray(func(b), dtype=float)
    result = np.zeros(center.shape + (k, k))
    eye = np.eye(k) * step
    for i in range(k):
        plus = np.asarray(func(b + eye[i]), dtype=float)
        minus = np.asarray(func(b - eye[i]), dtype=float)
        result[..., i, i] = (plus - 2.0 * center + minus) / step**2
        for j in range(i + 1, k):
            pp = np.asarray(func(b + eye[i] + eye[j]), dtype=float)
            pm = np.asarray(func(b + eye[i] - eye[j]), dtype=float)
            mp = np.asarray(func(b - eye[i] + eye[j]), dtype=float)
            mm = np.asarray(func(b - eye[i] - eye[j]), dtype=float)
            mixed = (pp - pm - mp + mm) / (4.0 * step**2)
            result[..., i, j] = mixed
            result[..., j, i] = mixed
    return result
