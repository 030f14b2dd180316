"""Backend selection for the in-place gate kernels.

The compiled Cython module is used when it imports; otherwise the numpy
implementation in :mod:`qdm._pykernels` is used. Call :func:`set_backend`
to switch explicitly (tests and the benchmark do this).
"""

from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS: dict[str, ModuleType | None] = {"cython": _ckernels, "python": _pykernels}
_active: ModuleType = _ckernels if _ckernels is not None else _pykernels


def available_backends() -> list[str]:
    return [name for name, mod in _BACKENDS.items() if mod is not None]


def backend_name() -> str:
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def set_backend(name: str) -> None:
    global _active
    mod = _BACKENDS.get(name)
    if mod is None:
        raise ValueError(f"kernel backend {name!r} is not available; have {available_backends()}")
    _active = mod


def apply_1q(psi, u, n, target):
    _active.apply_1q(psi, u, n, target)


def apply_1q_rows(psi, u, n, target):
    _active.apply_1q_rows(psi, u, n, target)


def apply_2q(psi, u, n, q0, q1):
    _active.apply_2q(psi, u, n, q0, q1)


def apply_cnot(psi, n, control, target):
    _active.apply_cnot(psi, n, control, target)
