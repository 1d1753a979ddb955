"""Command line experiment runner.

Every experiment writes a CSV whose first line is ``# config-sha256=<hash>``
followed by a header row.  With ``--fixture`` the output is compared with a
committed CSV and the exit status reports the verdict:
0 pass, 1 usage error, 2 fixture mismatch, 3 internal error.
"""

from __future__ import annotations

import gzip
import io
import os
import sys
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import click
import numpy as np

from . import arith, models, quasi, stats, torus
from .config import ConfigError, ExperimentConfig, parse_config, parse_int
from .reduce import default_workers

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_INTERNAL = 0, 1, 2, 3
FIXTURE_ENV = "SKEWSIEVE_FIXTURE_DIR"


class UsageError(ValueError):
    pass


@dataclass
class Report:
    status: int
    rows: int = 0
    message: str = ""
    diffs: list[str] = field(default_factory=list)


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


# ---------------------------------------------------------------------------
# experiments: each returns (header, rows)


def _poly(cfg):
    try:
        return torus.PolySpec.parse(cfg.poly)
    except ValueError as exc:
        raise UsageError(f"bad polynomial {cfg.poly!r}: {exc}") from None


def _nu(cfg):
    try:
        return arith.MultiplicativeSpec.parse(cfg.nu)
    except (ValueError, arith.SpecError) as exc:
        raise UsageError(str(exc)) from None


def exp_sieve(cfg):
    spec = _nu(cfg)
    if cfg.lo < 1 or cfg.hi <= cfg.lo:
        raise UsageError(f"need 1 <= lo < hi, got [{cfg.lo}, {cfg.hi})")
    vals = arith.eval_range(spec, cfg.lo, cfg.hi, workers=cfg.workers)
    n = np.arange(cfg.lo, cfg.hi)
    if spec.is_integer:
        return ["n", "value"], _int_columns(n, vals)
    return ["n", "value_re", "value_im"], zip(n.tolist(), vals.real.tolist(), vals.imag.tolist())


def _int_columns(*cols):
    # fast path for large integer tables
    return zip(*(c.tolist() for c in cols))


def exp_phase(cfg):
    if cfg.count < 0 or cfg.n0 < 0:
        raise UsageError("need n0 >= 0 and count >= 0")
    orbit = torus.PolyOrbit.from_poly(_poly(cfg))
    vals = orbit.values(cfg.n0, cfg.count)
    n = range(cfg.n0, cfg.n0 + cfg.count)
    return ["n", "phase_re", "phase_im"], zip(n, vals.real.tolist(), vals.imag.tolist())


def _alpha(cfg):
    try:
        return torus.Frac64.from_fraction(torus.parse_real(cfg.alpha))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def exp_quasi_tr(cfg):
    if not 1 <= cfg.d <= torus.MAX_DIM or cfg.r_max < 1:
        raise UsageError("need 1 <= d <= 16 and r_max >= 1")
    m = torus.AffineSkewMap(cfg.d, _alpha(cfg))
    freqs = [tuple(int(i == j) for i in range(cfg.d)) for j in range(cfg.d)]
    freqs.append(tuple(range(1, cfg.d + 1)))
    rows = []
    for r in range(1, cfg.r_max + 1):
        for fr in freqs:
            f = quasi.QuasiEig.character(fr)
            k = quasi.ek_degree(m, f)
            rows.append((r, ";".join(map(str, fr)), k, quasi.check_tr_lemma(m, f, r, cfg.d)))
    return ["r", "m", "k", "verdict"], rows


def exp_quasi_birkhoff(cfg):
    d = len(cfg.freq)
    if d < 1 or cfg.N < 1:
        raise UsageError("need a non-empty frequency and N >= 1")
    m = torus.AffineSkewMap(d, _alpha(cfg))
    f = quasi.QuasiEig.character(cfg.freq)
    avg = quasi.birkhoff_average(m, f, torus.TorusPoint.zero(d), cfg.N, workers=cfg.workers)
    return ["N", "re", "im", "abs"], [(cfg.N, avg.real, avg.imag, abs(avg))]


def exp_kbsz(cfg):
    primes = arith.primes_upto(cfg.primes_up_to).tolist()
    if len(primes) < 2:
        raise UsageError(f"no prime pairs up to {cfg.primes_up_to}")
    if cfg.N < 1:
        raise UsageError("N must be >= 1")
    orbit = torus.PolyOrbit.from_poly(_poly(cfg))
    rows = []
    for r, s in combinations(primes, 2):
        c = stats.kbsz_correlation(orbit, r, s, cfg.N, workers=cfg.workers)
        rows.append((r, s, c.real, c.imag, abs(c)))
    return ["r", "s", "re", "im", "abs"], rows


def exp_short_interval(cfg):
    if not cfg.M:
        raise UsageError("short-interval needs at least one M")
    Hs = cfg.H or tuple(stats.default_H(M) for M in cfg.M)
    poly, nu = _poly(cfg), _nu(cfg)
    orbit = torus.PolyOrbit.from_poly(poly)
    rows = []
    for M, H in zip(cfg.M, Hs):
        if not 1 <= H <= M:
            raise UsageError(f"need 1 <= H <= M, got M={M}, H={H}")
        rows.append((M, H, stats.short_interval_stat(orbit, nu, M, H, workers=cfg.workers)))
    return ["M", "H", "S"], rows


def _scheme(cfg, limit):
    try:
        return stats.BlockScheme.from_rule(cfg.scheme, limit)
    except stats.ParameterError as exc:
        raise UsageError(str(exc)) from None


def _block_targets(cfg):
    if cfg.K:
        return list(cfg.K), None
    ends = cfg.ends or (10**4, 10**5, 10**6)
    return None, list(ends)


def exp_block_stat(cfg):
    Ks, ends = _block_targets(cfg)
    orbit = torus.PolyOrbit.from_poly(_poly(cfg))
    nu = _nu(cfg)
    if Ks is None:
        scheme = _scheme(cfg, max(ends))
        Ks = [scheme.K_for(e) for e in ends]
    else:
        scheme = _scheme(cfg, 1)
        while scheme.num_blocks < max(Ks):
            scheme = _scheme(cfg, 4 * scheme.boundaries[-1])
    rows = [(K, stats.weighted_block_stat(orbit, nu, scheme, K, workers=cfg.workers)) for K in Ks]
    return ["K", "W"], rows


def exp_switched(cfg):
    Ks, ends = _block_targets(cfg)
    nu = _nu(cfg)
    m, base = torus.poly_to_initial(_poly(cfg))
    if Ks is None:
        scheme = _scheme(cfg, max(ends))
        K = scheme.K_for(max(ends))
    else:
        K = max(Ks)
        scheme = _scheme(cfg, 1)
        while scheme.num_blocks < K:
            scheme = _scheme(cfg, 4 * scheme.boundaries[-1])
    if cfg.align:
        seeds = models.aligned_seeds(m, base, scheme, nu, K, workers=cfg.workers)
    else:
        seeds = [base] * K
    orbit = models.SwitchedOrbit(m, scheme, tuple(seeds))
    sums = stats.block_sums(orbit, nu, scheme, K, workers=cfg.workers)
    b = scheme.boundaries
    rows = [(k + 1, b[k], b[k + 1], s.real, s.imag, abs(s)) for k, s in enumerate(sums.tolist())]
    return ["k", "b_k", "b_k1", "blocksum_re", "blocksum_im", "abs"], rows


def exp_selftest(cfg):
    from .selftest import run_checks

    return ["check", "pass"], [(name, ok) for name, ok in run_checks()]


EXPERIMENTS = {
    "sieve": exp_sieve,
    "phase": exp_phase,
    "quasi-tr": exp_quasi_tr,
    "quasi-birkhoff": exp_quasi_birkhoff,
    "kbsz": exp_kbsz,
    "short-interval": exp_short_interval,
    "block-stat": exp_block_stat,
    "switched": exp_switched,
    "selftest": exp_selftest,
}


# ---------------------------------------------------------------------------
# output and fixtures


def render_csv(cfg: ExperimentConfig, header, rows) -> tuple[str, int]:
    buf = io.StringIO()
    buf.write(f"# config-sha256={cfg.digest()}\n")
    buf.write(",".join(header) + "\n")
    n = 0
    for row in rows:
        buf.write(",".join(map(fmt, row)))
        buf.write("\n")
        n += 1
    return buf.getvalue(), n


def resolve_fixture(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(FIXTURE_ENV)
    if base and not p.is_absolute():
        return Path(base) / p
    return p


def read_text(path: Path) -> str:
    if path.suffix == ".gz":
        with gzip.open(path, "rt") as fh:
            return fh.read()
    return path.read_text()


def _data_lines(text: str) -> list[str]:
    return [ln for ln in text.splitlines() if ln and not ln.startswith("#")]


def compare_csv(actual: str, expected: str, tol: float, exact: bool = False) -> list[str]:
    """Per-row differences between two CSV texts; empty when they agree."""
    if exact:
        if actual == expected:
            return []
        a, e = actual.splitlines(), expected.splitlines()
        diffs = [f"line {i + 1}: {x!r} != {y!r}" for i, (x, y) in enumerate(zip(a, e)) if x != y]
        if len(a) != len(e):
            diffs.append(f"line count {len(a)} != {len(e)}")
        return diffs[:50] or ["byte content differs"]
    a, e = _data_lines(actual), _data_lines(expected)
    diffs = []
    if not a or not e or a[0] != e[0]:
        return [f"header mismatch: {a[:1]} != {e[:1]}"]
    if len(a) != len(e):
        diffs.append(f"row count {len(a) - 1} != {len(e) - 1}")
    for i, (x, y) in enumerate(zip(a[1:], e[1:]), 1):
        xs, ys = x.split(","), y.split(",")
        bad = len(xs) != len(ys)
        for u, v in zip(xs, ys):
            if u == v:
                continue
            try:
                if abs(float(u) - float(v)) > tol:
                    bad = True
            except ValueError:
                bad = True
        if bad:
            diffs.append(f"row {i}: {x} != {y}")
    return diffs


def run(cfg: ExperimentConfig) -> Report:
    """Run one experiment, write its CSV, compare with the fixture if given."""
    try:
        header, rows = EXPERIMENTS[cfg.kind](cfg)
        text, n = render_csv(cfg, header, rows)
    except (UsageError, ConfigError, stats.ParameterError, arith.SpecError) as exc:
        return Report(EXIT_USAGE, message=f"usage error: {exc}")
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        Path(cfg.out).write_text(text)
    if cfg.kind == "selftest" and any(not ok for _, ok in _selftest_rows(text)):
        return Report(EXIT_INTERNAL, n, "selftest failed")
    if not cfg.fixture:
        return Report(EXIT_OK, n, f"wrote {n} rows with {cfg.workers} worker(s)")
    path = resolve_fixture(cfg.fixture)
    if not path.exists():
        return Report(EXIT_USAGE, n, f"fixture {path} not found")
    diffs = compare_csv(text, read_text(path), cfg.tolerance, exact=cfg.kind == "sieve")
    if diffs:
        return Report(EXIT_MISMATCH, n, f"fixture mismatch against {path}", diffs)
    return Report(EXIT_OK, n, f"fixture {path} matched ({n} rows)")


def _selftest_rows(text: str):
    for line in _data_lines(text)[1:]:
        name, ok = line.rsplit(",", 1)
        yield name, ok == "1"


# ---------------------------------------------------------------------------
# click front end


def _workers(value) -> int:
    if value in (None, "max"):
        return default_workers()
    return int(value)


def common(fn):
    fn = click.option("--out", default="-", show_default=True, help="CSV path, '-' for stdout")(fn)
    fn = click.option("--workers", default="max", show_default=True, help="worker threads or 'max'")(fn)
    fn = click.option("--fixture", default="", help="committed CSV to compare against")(fn)
    fn = click.option("--tol", "tolerance", default=1e-9, show_default=True, type=float)(fn)
    return fn


def _ints(text):
    return tuple(parse_int(s) for s in str(text).split(",") if s.strip()) if text else ()


def _execute(kind: str, **kw) -> int:
    kw["workers"] = _workers(kw.get("workers"))
    for key in ("M", "H", "K", "ends", "freq"):
        if key in kw:
            kw[key] = _ints(kw[key])
    for key in ("N", "lo", "hi", "n0", "count", "primes_up_to"):
        if key in kw and isinstance(kw[key], str):
            kw[key] = parse_int(kw[key])
    cfg = ExperimentConfig(kind=kind, **kw)
    return _report(run(cfg))


def _report(rep: Report) -> int:
    click.echo(rep.message, err=True)
    for line in rep.diffs:
        click.echo("  " + line, err=True)
    return rep.status


@click.group()
def main_group():
    """Sieves, exact skew-product phases and short-interval statistics."""


@main_group.command()
@click.option("--kind", "nu", default="moebius", show_default=True,
              help="moebius, liouville, one, archimedean:T or unimodular:SEED:LIMIT")
@click.option("--from", "lo", default="1", show_default=True)
@click.option("--to", "hi", required=True)
@common
def sieve(**kw):
    """Tabulate a multiplicative function on [FROM, TO)."""
    return _execute("sieve", **kw)


@main_group.command()
@click.option("--poly", required=True, help="coefficients c_d,...,c_0")
@click.option("--from", "n0", default="0", show_default=True)
@click.option("--count", required=True)
@common
def phase(**kw):
    """Phases exp(2 pi i P(n)) from the exact skew-product orbit."""
    return _execute("phase", **kw)


@main_group.command("quasi")
@click.option("--check", type=click.Choice(["tr-lemma"]), default=None)
@click.option("--birkhoff", is_flag=True)
@click.option("--d", default=3, show_default=True, type=int)
@click.option("--r-max", default=20, show_default=True, type=int)
@click.option("--freq", default="1")
@click.option("--alpha", default="sqrt2-1", show_default=True)
@click.option("--N", "N", default="1e5", show_default=True)
@common
def quasi_cmd(check, birkhoff, **kw):
    """Quasi-eigenfunction checks: --check tr-lemma or --birkhoff."""
    if bool(check) == birkhoff:
        raise click.UsageError("give exactly one of --check tr-lemma or --birkhoff")
    if check:
        kw.pop("freq"), kw.pop("N")
        return _execute("quasi-tr", **kw)
    kw.pop("d"), kw.pop("r_max")
    return _execute("quasi-birkhoff", **kw)


@main_group.command()
@click.option("--poly", required=True)
@click.option("--primes-up-to", default="50", show_default=True)
@click.option("--N", "N", default="1e5", show_default=True)
@common
def kbsz(**kw):
    """Correlations (1/N) sum a_{rn} conj(a_{sn}) over prime pairs r < s."""
    return _execute("kbsz", **kw)


@main_group.command("short-interval")
@click.option("--poly", required=True)
@click.option("--nu", default="moebius", show_default=True)
@click.option("--M", "M", required=True, help="comma separated list")
@click.option("--H", "H", default="", help="comma separated list; default floor(M^(1/3))")
@common
def short_interval(**kw):
    """Two-scale short-interval statistic S(M, H)."""
    return _execute("short-interval", **kw)


@main_group.command("block-stat")
@click.option("--poly", default="sqrt2,0,0", show_default=True)
@click.option("--nu", default="moebius", show_default=True)
@click.option("--scheme", default="sqrt", show_default=True)
@click.option("--K", "K", default="", help="comma separated block counts")
@click.option("--ends", default="", help="targets for b_{K+1} when --K is absent")
@common
def block_stat(**kw):
    """Block-weighted statistic W(K)."""
    return _execute("block-stat", **kw)


@main_group.command()
@click.option("--poly", default="sqrt2,0,0", show_default=True)
@click.option("--nu", default="moebius", show_default=True)
@click.option("--scheme", default="sqrt", show_default=True)
@click.option("--align", is_flag=True)
@click.option("--K", "K", default="")
@click.option("--ends", default="")
@common
def switched(**kw):
    """Per-block sums of the orbit-switching sequence."""
    return _execute("switched", **kw)


@main_group.command()
@common
def selftest(**kw):
    """Fast internal consistency checks."""
    return _execute("selftest", **kw)


@main_group.command("run")
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--workers", default=None)
@click.option("--out", default=None)
def run_cmd(config_file, workers, out):
    """Run an experiment described by a key = value config file."""
    cfg = parse_config(Path(config_file).read_text())
    if workers is not None:
        cfg = cfg.replace(workers=_workers(workers))
    if out is not None:
        cfg = cfg.replace(out=out)
    return _report(run(cfg))


def main(argv=None) -> int:
    try:
        status = main_group.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        status = exc.exit_code
    except (click.UsageError, click.BadParameter) as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        status = EXIT_USAGE
    except (ConfigError, ValueError) as exc:
        click.echo(f"usage error: {exc}", err=True)
        status = EXIT_USAGE
    except click.Abort:
        status = EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        status = EXIT_INTERNAL
    return int(status or 0)


if __name__ == "__main__":
    sys.exit(main())
