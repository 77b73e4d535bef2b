"""JSON file formats for potentials, unitaries, spectral data and kernels.

Complex numbers are stored as [re, im] pairs; floats go through Python's
repr, which round-trips every double exactly within 17 significant digits.
"""

import json

import numpy as np

from .accelerant import Accelerant
from .direct import Potential, SpectralData, SpectralDatum, SPotential
from .errors import InputError

__all__ = [
    "save_potential", "load_potential",
    "save_unitary", "load_unitary",
    "save_spectral_data", "load_spectral_data",
    "save_accelerant", "load_accelerant",
    "save_spotential", "load_spotential",
]


def _c2j(arr):
    arr = np.asarray(arr, dtype=complex)
    return np.stack((arr.real, arr.imag), axis=-1).tolist()


def _j2c(obj, what="array"):
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1] != 2:
        raise InputError(f"{what}: complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _dump(doc, path):
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def _read(path):
    with open(path) as fh:
        return json.load(fh)


def save_potential(q: Potential, path):
    _dump({"r": q.r, "grid_n": int(q.grid.size), "domain": [-1, 1],
           "q": _c2j(q.samples)}, path)


def load_potential(path) -> Potential:
    doc = _read(path)
    r = int(doc["r"])
    samples = _j2c(doc["q"], "potential")
    n = int(doc["grid_n"])
    if samples.shape != (n, r, r):
        raise InputError(f"potential file: samples shape {samples.shape}")
    return Potential(r=r, grid=np.linspace(-1.0, 1.0, n), samples=samples)


def save_unitary(U, path):
    U = np.asarray(U, dtype=complex)
    _dump({"n": U.shape[0], "U": _c2j(U)}, path)


def load_unitary(path):
    doc = _read(path)
    U = _j2c(doc["U"], "unitary")
    n = int(doc["n"])
    if U.shape != (n, n):
        raise InputError(f"unitary file: shape {U.shape} vs n={n}")
    return U


def save_spectral_data(a: SpectralData, path):
    doc = {
        "r": a.r,
        "data": [{"lambda": float(d.lam), "mult": int(d.mult), "A": _c2j(d.A)}
                 for d in a.data],
        "window": {"lo": float(a.window[0]), "hi": float(a.window[1])},
    }
    if a.U is not None:
        doc["U"] = _c2j(a.U)
    _dump(doc, path)


def load_spectral_data(path) -> SpectralData:
    doc = _read(path)
    r = int(doc["r"])
    data = [SpectralDatum(lam=float(e["lambda"]), A=_j2c(e["A"], "norming matrix"),
                          mult=int(e["mult"])) for e in doc["data"]]
    window = (float(doc["window"]["lo"]), float(doc["window"]["hi"]))
    U = _j2c(doc["U"], "unitary") if "U" in doc else None
    return SpectralData(r=r, data=data, window=window, U=U)


def save_accelerant(H: Accelerant, path):
    _dump({"d": H.d, "grid_n": int(H.grid.size), "H": _c2j(H.samples),
           "sym_residual": float(H.sym_residual)}, path)


def load_accelerant(path) -> Accelerant:
    doc = _read(path)
    d = int(doc["d"])
    samples = _j2c(doc["H"], "accelerant")
    n = int(doc["grid_n"])
    return Accelerant(d=d, grid=np.linspace(-1.0, 1.0, n), samples=samples,
                      sym_residual=float(doc.get("sym_residual", 0.0)))


def save_spotential(V: SPotential, path):
    _dump({"d": V.d, "grid_n": int(V.grid.size), "domain": [0, 1],
           "V": _c2j(V.samples)}, path)


def load_spotential(path) -> SPotential:
    doc = _read(path)
    d = int(doc["d"])
    samples = _j2c(doc["V"], "S-potential")
    n = int(doc["grid_n"])
    return SPotential(d=d, grid=np.linspace(0.0, 1.0, n), samples=samples)
