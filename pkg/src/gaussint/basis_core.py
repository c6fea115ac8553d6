"""Gaussian basis functions, shells, molecules and basis-set ingestion.

Units are bohr throughout. Basis-file coefficients multiply *normalized*
primitives; shells convert them to coefficients over unnormalized primitives
``x^l y^m z^n exp(-a r^2)`` on demand, because every integral routine works
with the unnormalized form.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Iterator, Sequence

import numpy as np

LMAX = 4
SHELL_LETTERS = "SPDFG"

ELEMENTS = (
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar",
    "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr",
)
_Z_OF = {sym.upper(): z for z, sym in enumerate(ELEMENTS, start=1)}

BOHR_PER_ANGSTROM = 1.0 / 0.52917721092


class BasisParseError(ValueError):
    """Malformed basis-set or geometry text; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class DegenerateContractionError(ValueError):
    pass


def double_factorial(k: int) -> int:
    """k!! with the empty-product convention (-1)!! = 0!! = 1."""
    if k < -1:
        raise ValueError(f"double factorial undefined for {k}")
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@dataclass(frozen=True, slots=True)
class AngularMomentumIndex:
    """Exponent triple (nx, ny, nz) of a Cartesian Gaussian."""

    nx: int
    ny: int
    nz: int

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 0:
            raise ValueError(f"negative angular momentum index {tuple(self)}")

    def __iter__(self) -> Iterator[int]:
        yield self.nx
        yield self.ny
        yield self.nz

    def __getitem__(self, axis: int) -> int:
        return (self.nx, self.ny, self.nz)[axis]

    @property
    def lam(self) -> int:
        return self.nx + self.ny + self.nz

    def increment(self, axis: int, by: int = 1) -> "AngularMomentumIndex":
        n = [self.nx, self.ny, self.nz]
        n[axis] += by
        return AngularMomentumIndex(*n)

    def decrement(self, axis: int, by: int = 1) -> "AngularMomentumIndex":
        return self.increment(axis, -by)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)


def _as_index(n) -> AngularMomentumIndex:
    return n if isinstance(n, AngularMomentumIndex) else AngularMomentumIndex(*n)


def ncart(lam: int) -> int:
    return (lam + 1) * (lam + 2) // 2


@lru_cache(maxsize=None)
def cartesian_tuples(lam: int) -> tuple[tuple[int, int, int], ...]:
    """Components of a shell as plain tuples, lexicographically decreasing."""
    if lam < 0:
        raise ValueError("angular momentum must be non-negative")
    return tuple((lam - j, j - k, k) for j in range(lam + 1) for k in range(j + 1))


def enumerate_cartesian_components(lam: int) -> list[AngularMomentumIndex]:
    return [AngularMomentumIndex(*t) for t in cartesian_tuples(lam)]


@lru_cache(maxsize=None)
def component_position(lam: int) -> dict[tuple[int, int, int], int]:
    return {t: i for i, t in enumerate(cartesian_tuples(lam))}


def primitive_norm(alpha: float, n) -> float:
    if alpha <= 0:
        raise ValueError("exponent must be positive")
    n = _as_index(n)
    lam = n.lam
    dfs = (
        double_factorial(2 * n.nx - 1)
        * double_factorial(2 * n.ny - 1)
        * double_factorial(2 * n.nz - 1)
    )
    return (2.0 / math.pi) ** 0.75 * 2.0**lam * alpha ** ((2 * lam + 3) / 4.0) / math.sqrt(dfs)


def contracted_norm(primitives: Sequence[tuple[float, float]], n) -> float:
    """Normalization of sum_i a_i x^l y^m z^n exp(-alpha_i r^2).

    The a_i are taken as coefficients over unnormalized primitives.
    """
    if not primitives:
        raise ValueError("contraction needs at least one primitive")
    n = _as_index(n)
    alphas = np.array([p[0] for p in primitives], dtype=float)
    coefs = np.array([p[1] for p in primitives], dtype=float)
    if np.any(alphas <= 0):
        raise ValueError("exponents must be positive")
    if not np.any(coefs):
        raise DegenerateContractionError("all contraction coefficients are zero")
    lam = n.lam
    dfs = (
        double_factorial(2 * n.nx - 1)
        * double_factorial(2 * n.ny - 1)
        * double_factorial(2 * n.nz - 1)
    )
    ssum = float(coefs @ ((alphas[:, None] + alphas[None, :]) ** -(lam + 1.5)) @ coefs)
    if ssum <= 0:
        raise DegenerateContractionError("contraction has non-positive self-overlap")
    return (math.pi**1.5 * dfs / 2.0**lam * ssum) ** -0.5


@dataclass(frozen=True)
class PrimitiveGaussian:
    exponent: float
    index: AngularMomentumIndex
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.exponent > 0:
            raise ValueError("exponent must be positive")
        object.__setattr__(self, "index", _as_index(self.index))
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def norm(self) -> float:
        return primitive_norm(self.exponent, self.index)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Unnormalized value at an (..., 3) array of points."""
        d = np.asarray(points, dtype=float) - np.asarray(self.center)
        nx, ny, nz = self.index
        r2 = np.einsum("...i,...i->...", d, d)
        return d[..., 0] ** nx * d[..., 1] ** ny * d[..., 2] ** nz * np.exp(-self.exponent * r2)


@dataclass(frozen=True)
class ShellTemplate:
    """Element-level shell from a basis file (no center yet)."""

    lam: int
    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if not 0 <= self.lam:
            raise ValueError("angular momentum must be non-negative")
        if len(self.exponents) == 0 or len(self.exponents) != len(self.coefficients):
            raise ValueError("shell needs matching, non-empty exponent/coefficient lists")
        if any(not a > 0 for a in self.exponents):
            raise ValueError("exponents must be positive")


@dataclass(frozen=True, eq=False)
class ContractedShell:
    center: tuple[float, float, float]
    lam: int
    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("angular momentum must be non-negative")
        if self.lam > LMAX:
            raise ValueError(f"angular momentum {self.lam} exceeds supported maximum {LMAX}")
        if len(self.exponents) == 0 or len(self.exponents) != len(self.coefficients):
            raise ValueError("shell needs matching, non-empty exponent/coefficient lists")
        if any(not a > 0 for a in self.exponents):
            raise ValueError("exponents must be positive")
        order = sorted(range(len(self.exponents)), key=lambda i: -self.exponents[i])
        exps = tuple(float(self.exponents[i]) for i in order)
        if any(exps[i] <= exps[i + 1] for i in range(len(exps) - 1)):
            raise ValueError("duplicate exponents in shell")
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "coefficients", tuple(float(self.coefficients[i]) for i in order))
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not all(math.isfinite(c) for c in self.center):
            raise ValueError("shell center must be finite")
        object.__setattr__(self, "_coef_matrix", self._build_coefficients())

    @property
    def size(self) -> int:
        return ncart(self.lam)

    @property
    def nprim(self) -> int:
        return len(self.exponents)

    @property
    def components(self) -> list[AngularMomentumIndex]:
        return enumerate_cartesian_components(self.lam)

    def _build_coefficients(self) -> np.ndarray:
        out = np.empty((self.size, self.nprim))
        for k, n in enumerate(self.components):
            c = [a * primitive_norm(al, n) for al, a in zip(self.exponents, self.coefficients)]
            norm = contracted_norm(list(zip(self.exponents, c)), n)
            out[k] = norm * np.asarray(c)
        return out

    @property
    def coefficient_matrix(self) -> np.ndarray:
        """(ncart, nprim) coefficients over unnormalized primitives, per component."""
        return self._coef_matrix

    @property
    def primitive_weights(self) -> np.ndarray:
        """Component-independent part of the coefficients.

        ``coefficient_matrix == outer(component_scales, primitive_weights)``;
        the contraction engines rely on this factorization.
        """
        return self._coef_matrix[0]

    @property
    def component_scales(self) -> np.ndarray:
        return self._coef_matrix[:, 0] / self._coef_matrix[0, 0]

    def function(self, k: int) -> "BasisFunction":
        return BasisFunction(self, k)


@dataclass(frozen=True)
class BasisFunction:
    """One normalized Cartesian component of a shell."""

    shell: ContractedShell
    component: int

    @property
    def index(self) -> AngularMomentumIndex:
        return self.shell.components[self.component]

    @property
    def coefficients(self) -> np.ndarray:
        return self.shell.coefficient_matrix[self.component]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        s = self.shell
        return sum(
            c * PrimitiveGaussian(a, self.index, s.center)(points)
            for a, c in zip(s.exponents, self.coefficients)
        )


def basis_functions(shells: Iterable[ContractedShell]) -> list[BasisFunction]:
    return [BasisFunction(s, k) for s in shells for k in range(s.size)]


def basis_offsets(shells: Sequence[ContractedShell]) -> list[int]:
    offsets, pos = [], 0
    for s in shells:
        offsets.append(pos)
        pos += s.size
    return offsets


@dataclass(frozen=True)
class Atom:
    symbol: str
    charge: int
    position: tuple[float, float, float]


@dataclass(frozen=True)
class Molecule:
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("molecule needs at least one atom")
        for atom in self.atoms:
            if atom.charge < 1:
                raise ValueError(f"nuclear charge of {atom.symbol} must be >= 1")
            if not all(math.isfinite(x) for x in atom.position):
                raise ValueError(f"non-finite position for {atom.symbol}")

    @classmethod
    def from_atoms(cls, spec: Iterable[tuple[str, Sequence[float]]]) -> "Molecule":
        return cls(tuple(make_atom(sym, pos) for sym, pos in spec))

    def translated(self, shift: Sequence[float]) -> "Molecule":
        return Molecule(
            tuple(
                Atom(a.symbol, a.charge, tuple(p + s for p, s in zip(a.position, shift)))
                for a in self.atoms
            )
        )

    def __len__(self) -> int:
        return len(self.atoms)


def canonical_symbol(symbol: str) -> str:
    key = symbol.strip().upper()
    if key not in _Z_OF:
        raise KeyError(f"unknown element {symbol!r}")
    return ELEMENTS[_Z_OF[key] - 1]


def make_atom(symbol: str, position: Sequence[float]) -> Atom:
    sym = canonical_symbol(symbol)
    return Atom(sym, _Z_OF[sym.upper()], tuple(float(x) for x in position))


def parse_xyz(text: str, angstrom: bool = False) -> Molecule:
    """XYZ text: count line, comment line, then ``Symbol x y z`` (bohr unless angstrom)."""
    lines = text.splitlines()
    if len(lines) < 2:
        raise BasisParseError("xyz needs a count line and a comment line", len(lines) + 1)
    try:
        natom = int(lines[0].split()[0])
    except (ValueError, IndexError):
        raise BasisParseError("first line must be the atom count", 1) from None
    scale = BOHR_PER_ANGSTROM if angstrom else 1.0
    atoms = []
    for lineno in range(3, 3 + natom):
        if lineno > len(lines):
            raise BasisParseError(f"expected {natom} atoms, file ends early", lineno)
        parts = lines[lineno - 1].split()
        if len(parts) < 4:
            raise BasisParseError("expected 'Symbol x y z'", lineno)
        try:
            xyz = [float(v) * scale for v in parts[1:4]]
            atoms.append(make_atom(parts[0], xyz))
        except ValueError as exc:
            raise BasisParseError(str(exc), lineno) from None
        except KeyError as exc:
            raise BasisParseError(exc.args[0], lineno) from None
    return Molecule(tuple(atoms))


@dataclass
class BasisSetLibrary:
    shells: dict[str, list[ShellTemplate]] = field(default_factory=dict)

    def __contains__(self, symbol: str) -> bool:
        return canonical_symbol(symbol) in self.shells

    def __getitem__(self, symbol: str) -> list[ShellTemplate]:
        return self.shells[canonical_symbol(symbol)]

    @property
    def max_lam(self) -> int:
        return max((t.lam for ts in self.shells.values() for t in ts), default=0)


_FLOAT_FIX = re.compile(r"[dD]")


def _parse_float(token: str, lineno: int) -> float:
    try:
        return float(_FLOAT_FIX.sub("e", token))
    except ValueError:
        raise BasisParseError(f"bad number {token!r}", lineno) from None


def load_basis(text: str) -> BasisSetLibrary:
    """Parse Gaussian94-format basis text.

    Exponents are multiplied by the square of the shell scale factor. ``SP``
    shells become an s and a p template sharing exponents. Lines starting
    with ``!`` and blank lines are ignored.
    """
    lines = [
        (i, line.split("!", 1)[0].strip())
        for i, line in enumerate(text.splitlines(), start=1)
    ]
    lines = [(i, s) for i, s in lines if s]
    lib = BasisSetLibrary()
    pos = 0
    while pos < len(lines):
        lineno, line = lines[pos]
        if line == "****":
            pos += 1
            continue
        parts = line.split()
        try:
            symbol = canonical_symbol(parts[0])
        except KeyError:
            raise BasisParseError(f"expected element header, got {line!r}", lineno) from None
        if len(parts) > 1 and parts[1] != "0":
            raise BasisParseError(f"element header must end in 0, got {line!r}", lineno)
        pos += 1
        templates = lib.shells.setdefault(symbol, [])
        while True:
            if pos >= len(lines):
                raise BasisParseError(f"block for {symbol} is not terminated by ****", lineno)
            lineno, line = lines[pos]
            if line == "****":
                pos += 1
                break
            parts = line.split()
            if len(parts) < 2:
                raise BasisParseError(f"bad shell header {line!r}", lineno)
            letters = parts[0].upper()
            if letters != "SP" and (len(letters) != 1 or letters not in SHELL_LETTERS):
                raise BasisParseError(f"unknown angular momentum {parts[0]!r}", lineno)
            try:
                nprim = int(parts[1])
            except ValueError:
                raise BasisParseError(f"bad primitive count {parts[1]!r}", lineno) from None
            if nprim < 1:
                raise BasisParseError("primitive count must be positive", lineno)
            scale = _parse_float(parts[2], lineno) if len(parts) > 2 else 1.0
            ncoef = 2 if letters == "SP" else 1
            exps, coefs = [], [[] for _ in range(ncoef)]
            for _ in range(nprim):
                pos += 1
                if pos >= len(lines):
                    raise BasisParseError("file ends inside a shell", lineno)
                lineno, line = lines[pos]
                vals = line.split()
                if len(vals) < 1 + ncoef:
                    raise BasisParseError(f"expected {1 + ncoef} numbers", lineno)
                alpha = _parse_float(vals[0], lineno) * scale**2
                if not alpha > 0:
                    raise BasisParseError(f"non-positive exponent {vals[0]}", lineno)
                exps.append(alpha)
                for k in range(ncoef):
                    coefs[k].append(_parse_float(vals[1 + k], lineno))
            pos += 1
            lams = (0, 1) if letters == "SP" else (SHELL_LETTERS.index(letters),)
            for lam, cs in zip(lams, coefs):
                templates.append(ShellTemplate(lam, tuple(exps), tuple(cs)))
    return lib


def serialize_basis(lib: BasisSetLibrary) -> str:
    """Write a library back out; SP pairs are emitted as separate S and P shells."""
    out = []
    for symbol, templates in lib.shells.items():
        out.append(f"{symbol}     0")
        for t in templates:
            out.append(f"{SHELL_LETTERS[t.lam]}   {len(t.exponents)}   1.00")
            for a, c in zip(t.exponents, t.coefficients):
                out.append(f"  {a!r:>24}  {c!r:>24}")
        out.append("****")
    return "\n".join(out) + "\n"


def load_builtin(name: str) -> BasisSetLibrary:
    fname = f"{name.lower()}.gbs"
    try:
        text = resources.files("gaussint").joinpath("data", fname).read_text()
    except FileNotFoundError:
        raise KeyError(f"no built-in basis named {name!r}") from None
    return load_basis(text)


def build_basis(molecule: Molecule, library: BasisSetLibrary) -> list[ContractedShell]:
    shells = []
    for atom in molecule.atoms:
        if atom.symbol not in library.shells:
            raise KeyError(f"basis set has no entry for {atom.symbol}")
        for t in library.shells[atom.symbol]:
            shells.append(ContractedShell(atom.position, t.lam, t.exponents, t.coefficients))
    return shells
