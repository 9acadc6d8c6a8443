"""``padic-spectral`` command line.

Exit codes: 0 success, 1 verification failure, 2 configuration error, 3 I/O error.
Configuration comes from flags and an optional JSON file (``--config``);
flags win over file values.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Sequence


from . import bases, evolution, fourier, io, operators, verify
from .functions import GridFunction
from .padic import CosetGrid, enumerate_cosets, is_prime
from .scalars import get_backend

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("verify", "spectrum", "basis", "fourier", "apply", "evolve", "wavelet")
FORMATS = ("csv", "json", "svg")


class ConfigError(ValueError):
    pass


class InputError(OSError):
    pass


@dataclass
class RunConfig:
    command: str
    p: int = 2
    r: int = 1
    l: int = 0
    alpha: object = 1
    backend: str = "exact"
    k_sign: str = "+"
    kernel: str | None = None
    f0: str | None = None
    times: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0, 10.0)
    out: str | None = None
    format: str | None = None
    region_center: Fraction = Fraction(0)
    region_gamma: int | None = None
    inverse: bool = False

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not is_prime(self.p):
            raise ConfigError(f"p={self.p} is not prime")
        if self.l >= self.r:
            raise ConfigError(f"need l < r, got l={self.l}, r={self.r}")
        if self.p ** (self.r - self.l) > 3 ** 7:
            raise ConfigError(f"window has {self.p ** (self.r - self.l)} cosets; dense methods stop at 2187")
        if not float(self.alpha) > 0:
            raise ConfigError("alpha must be positive")
        if self.backend not in ("exact", "float"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.k_sign not in ("+", "-", "−"):
            raise ConfigError(f"k-sign must be + or -, got {self.k_sign!r}")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if self.backend == "exact" and operators.exact_alpha(self.alpha) is None and self.command in ("apply", "spectrum"):
            raise ConfigError("the exact backend needs an integer alpha")
        try:
            evolution._check_times(self.times)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    @property
    def grid(self) -> CosetGrid:
        return enumerate_cosets(self.p, self.r, self.l)


def _parse_alpha(text):
    try:
        a = Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"alpha must be a number, got {text!r}") from None
    return int(a) if a.denominator == 1 else float(a)


def _parse_times(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        items = text
    else:
        items = [t for t in str(text).split(",") if t.strip()]
    try:
        return tuple(float(t) for t in items)
    except ValueError:
        raise ConfigError(f"bad time list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padic-spectral",
                                     description="p-adic Fourier analysis and Vladimirov spectra on balls")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "verify": "run the invariant suite and report residuals",
        "spectrum": "list basis elements with their eigenvalues",
        "basis": "dump the orthonormal real basis",
        "fourier": "discrete Fourier transform of a function file",
        "apply": "apply the operator to a function file",
        "evolve": "solve the Cauchy problem df/dt = A f",
        "wavelet": "dump the wavelet basis with eigenvalues",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        # defaults are None so config-file values can fill unset flags
        sp.add_argument("--config", help="JSON file with default settings")
        sp.add_argument("--p", type=int)
        sp.add_argument("--r", type=int)
        sp.add_argument("--l", type=int)
        sp.add_argument("--alpha")
        sp.add_argument("--backend", choices=("exact", "float"))
        sp.add_argument("--k-sign", dest="k_sign", choices=("+", "-", "−"))
        sp.add_argument("--kernel", help="kernel spec file (JSON)")
        sp.add_argument("--f0", help="function file (JSON); evolve defaults to Omega(|x|_p)")
        sp.add_argument("--times", help="comma separated times")
        sp.add_argument("--out", help="output path (stdout if omitted)")
        sp.add_argument("--format", choices=FORMATS)
        sp.add_argument("--region-center", dest="region_center", help="centre of the survival ball")
        sp.add_argument("--region-gamma", dest="region_gamma", type=int, help="radius exponent of the survival ball")
        sp.add_argument("--inverse", action="store_true", default=None, help="fourier: input is a spectrum file")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    merged: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                merged.update(json.load(fh))
        except OSError as exc:
            raise InputError(f"{args.config}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
        merged = {k.replace("-", "_"): v for k, v in merged.items()}
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            merged[k] = v
    known = {f.name for f in fields(RunConfig)}
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"unknown settings: {', '.join(sorted(unknown))}")
    try:
        for key in ("p", "r", "l"):
            if key in merged:
                merged[key] = int(merged[key])
        if "region_gamma" in merged:
            merged["region_gamma"] = int(merged["region_gamma"])
        if "region_center" in merged:
            merged["region_center"] = Fraction(str(merged["region_center"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if "alpha" in merged:
        merged["alpha"] = _parse_alpha(merged["alpha"])
    if "times" in merged:
        merged["times"] = _parse_times(merged["times"])
    return RunConfig(**merged).validate()


# -- commands ---------------------------------------------------------------------

def _operator(cfg: RunConfig):
    if cfg.kernel:
        spec = _read(io.read_kernel_spec, cfg.kernel)
        if spec.p != cfg.p:
            raise ConfigError("kernel spec and grid use different primes")
        if spec.gamma_max > cfg.r:
            raise ConfigError(f"kernel cutoff gamma_max={spec.gamma_max} exceeds r={cfg.r}")
        return evolution.KernelOperator(spec)
    return evolution.Vladimirov(cfg.alpha)


def _read(reader, path):
    try:
        return reader(path)
    except io.FormatError as exc:
        raise InputError(str(exc)) from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc


def _initial(cfg: RunConfig, required: bool = True) -> GridFunction:
    if cfg.f0 is None:
        if required:
            raise ConfigError(f"{cfg.command} needs --f0")
        return None
    f = _read(io.read_function, cfg.f0)
    if f.grid != cfg.grid:
        g = f.grid
        raise ConfigError(f"{cfg.f0} lives on grid (p={g.p}, r={g.r}, l={g.l}), "
                          f"expected (p={cfg.p}, r={cfg.r}, l={cfg.l})")
    return f if cfg.backend == "exact" else f.to_float()


def _eigen_rows(basis, lams) -> list[dict]:
    return [{"kind": el.kind, "gamma": el.gamma, "n": str(el.n), "label": el.label,
             "eigenvalue": io.encode_number(lam)} for el, lam in zip(basis.elements, lams)]


def _rows_csv(rows: list[dict]) -> str:
    header = list(rows[0]) if rows else ["kind", "gamma", "n", "label", "eigenvalue"]
    return io.csv_text(header, ([row[h] for h in header] for row in rows))


def _with_eigenvalues(cfg: RunConfig, basis):
    lams = evolution.basis_eigenvalues(basis, _operator(cfg))
    if cfg.backend == "float":
        lams = [float(x) for x in lams]
    return lams


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    results = verify.run_suite(cfg.grid, cfg.alpha, cfg.backend, cfg.k_sign)
    ok = all(r.passed for r in results)
    if cfg.format == "csv":
        text = io.csv_text(["name", "passed", "residual", "detail"],
                           ([r.name, r.passed, r.residual, r.detail] for r in results))
    else:
        text = io.dumps({"p": cfg.p, "r": cfg.r, "l": cfg.l, "alpha": cfg.alpha, "backend": cfg.backend,
                         "passed": ok, "checks": [r.as_dict() for r in results]})
    return text, EXIT_OK if ok else EXIT_VERIFY


def cmd_spectrum(cfg: RunConfig) -> tuple[str, int]:
    basis = bases.enumerate_phi_basis(cfg.grid, cfg.k_sign)
    rows = _eigen_rows(basis, _with_eigenvalues(cfg, basis))
    if cfg.format == "json":
        return io.dumps({"p": cfg.p, "r": cfg.r, "l": cfg.l, "rows": rows}), EXIT_OK
    return _rows_csv(rows), EXIT_OK


def cmd_basis(cfg: RunConfig) -> tuple[str, int]:
    basis = bases.enumerate_phi_basis(cfg.grid, cfg.k_sign)
    basis = _relabel(basis, _with_eigenvalues(cfg, basis))
    if cfg.backend == "float":
        basis = basis.to_float()
    return io.dumps(io.basis_document(basis)), EXIT_OK


def _relabel(basis, lams):
    from dataclasses import replace
    elements = tuple(replace(el, eigenvalue=lam) for el, lam in zip(basis.elements, lams))
    return bases.BasisSet(basis.grid, basis.kind, elements, basis.matrix)


def cmd_wavelet(cfg: RunConfig) -> tuple[str, int]:
    basis = bases.enumerate_wavelet_basis(cfg.grid)
    op = _operator(cfg)
    lams = []
    for el in basis.elements:
        if el.kind == "constant":
            lams.append(Fraction(0))
        elif isinstance(op, evolution.KernelOperator):
            lams.append(operators.kernel_eigenvalue(el.gamma, el.n, op.spec))
        else:
            lams.append(operators.vladimirov_eigenvalue_Br(el.gamma, cfg.r, op.alpha, cfg.p))
    if cfg.backend == "float":
        lams = [float(x) for x in lams]
    if cfg.format == "csv":
        return _rows_csv(_eigen_rows(basis, lams)), EXIT_OK
    return io.dumps(io.basis_document(_relabel(basis, lams))), EXIT_OK


def cmd_fourier(cfg: RunConfig) -> tuple[str, int]:
    if cfg.inverse:
        if cfg.f0 is None:
            raise ConfigError("fourier --inverse needs --f0 pointing at a spectrum file")
        spec = _read(io.read_spectrum, cfg.f0)
        if spec.grid != cfg.grid:
            raise ConfigError("spectrum file does not match the configured grid")
        return io.dumps(io.function_document(fourier.dft_inverse(spec))), EXIT_OK
    f = _initial(cfg)
    s = fourier.dft_forward(f)
    if cfg.format == "csv":
        rows = ([str(k), v.real, v.imag] for k, v in zip(s.freq.frequencies, s.values))
        return io.csv_text(["k", "re", "im"], rows), EXIT_OK
    return io.dumps(io.spectrum_document(s)), EXIT_OK


def cmd_apply(cfg: RunConfig) -> tuple[str, int]:
    f = _initial(cfg)
    mat = evolution.operator_matrix(cfg.grid, _operator(cfg), get_backend(cfg.backend))
    if mat.exact != f.exact:
        f = f.to_float()
        mat = mat.to_float()
    return io.dumps(io.function_document(mat.apply(f))), EXIT_OK


def cmd_evolve(cfg: RunConfig) -> tuple[str, int]:
    grid = cfg.grid
    f0 = _initial(cfg, required=False)
    if f0 is None:
        f0 = bases.omega_synthesis(grid) if grid.r >= 0 and grid.l <= 0 else GridFunction.indicator(grid, 0, grid.l)
    run = evolution.solve_spectral(grid, _operator(cfg), f0, cfg.times, cfg.k_sign)
    fmt = cfg.format or "csv"
    survival = None
    if cfg.region_gamma is not None:
        survival = evolution.survival_series(run, cfg.region_center, cfg.region_gamma)
    if fmt == "svg":
        t = run.times
        series = {"distance to equilibrium": (t, evolution.distance_to_equilibrium(run))}
        if survival is not None:
            series = {"survival": (t, survival), **series}
        return io.svg_plot(series, title=f"p={cfg.p} r={cfg.r} l={cfg.l} alpha={cfg.alpha}"), EXIT_OK
    if fmt == "json":
        doc = {"p": cfg.p, "r": cfg.r, "l": cfg.l, "times": list(run.times),
               "snapshots": [list(row) for row in run.values()], "masses": list(run.masses())}
        if survival is not None:
            doc["survival"] = list(survival)
        return io.dumps(doc), EXIT_OK
    if survival is not None:
        return io.timeseries_csv(run.times, survival, ["s"]), EXIT_OK
    return io.timeseries_csv(run.times, run.values(), [f"v{m}" for m in range(grid.size)]), EXIT_OK


HANDLERS = {
    "verify": cmd_verify, "spectrum": cmd_spectrum, "basis": cmd_basis, "fourier": cmd_fourier,
    "apply": cmd_apply, "evolve": cmd_evolve, "wavelet": cmd_wavelet,
}


def run(cfg: RunConfig) -> tuple[str, int]:
    return HANDLERS[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        text, code = run(cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out:
        try:
            io.atomic_write(cfg.out, text)
        except OSError as exc:
            print(f"error: cannot write {cfg.out}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
