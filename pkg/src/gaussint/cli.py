"""Command-line driver.

Exit status: 0 on success, 1 for data problems (missing or malformed files,
unsupported shells, failed selftest), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import boys, eri, formats, selftest
from .basis_core import BasisParseError, build_basis, load_basis, load_builtin, parse_xyz
from .one_electron import build_matrices

log = logging.getLogger("gaussint")

BACKENDS = {"os": "os", "hgp": "hgp", "ssss-only": "ssss"}


class DataError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    molecule: Path
    basis: str
    backend: str = "hgp"
    screen: float = 1e-14
    out: Path = Path(".")
    format: str = "text"
    angstrom: bool = False
    boys_switch: float | None = None
    verbosity: int = 0


@dataclass(frozen=True)
class RunSummary:
    dimension: int
    quartets_computed: int
    quartets_screened: int
    records: int
    seconds: float

    def line(self) -> str:
        return (
            f"dimension={self.dimension} quartets_computed={self.quartets_computed} "
            f"quartets_screened={self.quartets_screened} eri_records={self.records} "
            f"wall={self.seconds:.3f}s"
        )


def _load_library(spec: str):
    path = Path(spec)
    if path.is_file():
        return load_basis(path.read_text())
    try:
        return load_builtin(spec)
    except KeyError:
        raise DataError(f"basis {spec!r} is neither a readable file nor a built-in set") from None


def run(cfg: RunConfig) -> RunSummary:
    start = time.perf_counter()
    try:
        text = cfg.molecule.read_text()
    except OSError as exc:
        raise DataError(f"cannot read molecule file: {exc}") from None
    try:
        molecule = parse_xyz(text, angstrom=cfg.angstrom)
        library = _load_library(cfg.basis)
        shells = build_basis(molecule, library)
    except BasisParseError as exc:
        raise DataError(str(exc)) from None
    except (KeyError, ValueError) as exc:
        raise DataError(exc.args[0] if exc.args else str(exc)) from None
    log.info("%d atoms, %d shells", len(molecule), len(shells))

    backend = BACKENDS[cfg.backend]
    if backend == "ssss" and any(s.lam for s in shells):
        raise DataError("the ssss-only backend needs a basis of s shells only")

    S, T, V = build_matrices(shells, molecule)
    result = eri.compute_all(shells, backend, cfg.screen)

    cfg.out.mkdir(parents=True, exist_ok=True)
    for name, mat in (("overlap", S), ("kinetic", T), ("nuclear", V)):
        (cfg.out / f"{name}.txt").write_text(formats.format_matrix(name, mat.to_dense()))
    if cfg.format == "binary":
        (cfg.out / "eri.bin").write_bytes(formats.encode_eri_binary(result.records))
    else:
        (cfg.out / "eri.txt").write_text(formats.format_eri_text(result.records))
    return RunSummary(
        result.dimension,
        result.quartets_computed,
        result.quartets_screened,
        len(result.records),
        time.perf_counter() - start,
    )


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaussint", description="Gaussian-basis molecular integrals.")
    p.add_argument("--mol", type=Path, help="XYZ molecule file (bohr unless --angstrom)")
    p.add_argument("--basis", default="sto-3g", help="Gaussian94 basis file or built-in name")
    p.add_argument("--backend", choices=sorted(BACKENDS), default="hgp")
    p.add_argument("--screen", type=float, default=1e-14, help="quartet screening threshold")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--format", choices=("text", "binary"), default="text", help="ERI file format")
    p.add_argument("--angstrom", action="store_true")
    p.add_argument("--selftest", action="store_true")
    p.add_argument("--seed", type=int, default=selftest.DEFAULT_SEED)
    p.add_argument("--boys-switch", type=float, default=None, help="override the Boys T switch")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    if not args.screen >= 0:
        parser.error("--screen must be >= 0")
    if args.boys_switch is not None and not args.boys_switch >= 0:
        parser.error("--boys-switch must be >= 0")
    if args.seed < 0:
        parser.error("--seed must be non-negative")
    if not args.selftest and args.mol is None:
        parser.error("--mol is required unless --selftest is given")

    with boys.override(t_switch=args.boys_switch):
        if args.selftest:
            results = selftest.run(args.seed)
            sys.stdout.write(selftest.report(results))
            return 0 if all(r.passed for r in results) else 1
        cfg = RunConfig(
            args.mol, args.basis, args.backend, args.screen, args.out,
            args.format, args.angstrom, args.boys_switch, args.verbose,
        )
        try:
            summary = run(cfg)
        except DataError as exc:
            print(f"gaussint: error: {exc}", file=sys.stderr)
            return 1
    print(summary.line())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
