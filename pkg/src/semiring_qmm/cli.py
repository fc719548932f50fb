"""Command-line front end.

Matrix files are plain text::

    extint 3 3 fill=inf        # header: kind rows cols [fill=inf|-inf]
    1 2 -4                     # 1-based "i j value"; value may be inf / -inf
    bool 2 2
    1 1                        # bool entries omit the value

Every task subcommand writes a JSON run report (to ``--report`` or stdout).
Exit codes: 0 success, 1 verification mismatch, 2 usage or domain error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import FINITE, NEG_INF, POS_INF, BoolMatrix, ExtMatrix, bool_multiply
from .boolsparse import auto_sparse_bool_product, sparse_bool_product, sparse_plan
from .dominance import (PairMatrix, dominance_brute, dominance_product, generalized_dominance,
                        generalized_dominance_brute)
from .distmsb import MsbResult, distance_brute, distance_msb, msb_bits_oracle
from .exponents import OmegaParams, paper_exponent_table
from .maxmin import apbp, apbp_brute, maxmin_brute, maxmin_product
from .qsim import ENGINES, CostLedger

KINDS = ("extint", "bool")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# matrix files


def parse_matrix_text(text: str, source="<text>"):
    lines = [(no, ln.split("#", 1)[0].strip()) for no, ln in enumerate(text.splitlines(), 1)]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines:
        raise ValueError(f"{source}: empty matrix file")
    no, header = lines[0]
    parts = header.split()
    if len(parts) not in (3, 4) or parts[0] not in KINDS:
        raise ValueError(f"{source}:{no}: malformed header {header!r}")
    kind = parts[0]
    try:
        rows, cols = int(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"{source}:{no}: malformed header {header!r}") from None
    if rows < 0 or cols < 0:
        raise ValueError(f"{source}:{no}: negative dimension")
    fill = "inf"
    if len(parts) == 4:
        if kind != "extint" or parts[3] not in ("fill=inf", "fill=-inf"):
            raise ValueError(f"{source}:{no}: malformed header {header!r}")
        fill = parts[3][5:]
    seen = set()
    if kind == "bool":
        dense = np.zeros((rows, cols), dtype=bool)
    else:
        vals = np.zeros((rows, cols), dtype=np.int64)
        tags = np.full((rows, cols), POS_INF if fill == "inf" else NEG_INF, dtype=np.int8)
    for no, ln in lines[1:]:
        f = ln.split()
        if len(f) != (2 if kind == "bool" else 3):
            raise ValueError(f"{source}:{no}: malformed line {ln!r}")
        try:
            i, j = int(f[0]), int(f[1])
        except ValueError:
            raise ValueError(f"{source}:{no}: malformed line {ln!r}") from None
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise ValueError(f"{source}:{no}: index ({i}, {j}) out of range")
        if (i, j) in seen:
            raise ValueError(f"{source}:{no}: duplicate coordinate ({i}, {j})")
        seen.add((i, j))
        if kind == "bool":
            dense[i - 1, j - 1] = True
            continue
        tok = f[2].lower()
        if tok in ("inf", "+inf"):
            tags[i - 1, j - 1] = POS_INF
        elif tok == "-inf":
            tags[i - 1, j - 1] = NEG_INF
        else:
            try:
                vals[i - 1, j - 1] = int(tok)
            except (ValueError, OverflowError):
                raise ValueError(f"{source}:{no}: malformed value {f[2]!r}") from None
            tags[i - 1, j - 1] = FINITE
    if kind == "bool":
        return BoolMatrix.from_dense(dense)
    return ExtMatrix(vals, tags)


def parse_matrix_file(path):
    path = Path(path)
    return parse_matrix_text(path.read_text(), str(path))


def format_matrix(M) -> str:
    if isinstance(M, BoolMatrix):
        out = [f"bool {M.rows} {M.cols}"]
        out += [f"{i + 1} {j + 1}" for i, j in zip(*np.nonzero(M.to_dense()))]
        return "\n".join(out) + "\n"
    # pick the fill that leaves fewer lines
    fill_tag = NEG_INF if np.sum(M.tags == NEG_INF) > np.sum(M.tags == POS_INF) else POS_INF
    out = [f"extint {M.rows} {M.cols} fill={'inf' if fill_tag == POS_INF else '-inf'}"]
    lit = {POS_INF: "inf", NEG_INF: "-inf"}
    for i, j in zip(*np.nonzero(M.tags != fill_tag)):
        t = int(M.tags[i, j])
        out.append(f"{i + 1} {j + 1} {lit[t] if t != FINITE else int(M.values[i, j])}")
    return "\n".join(out) + "\n"


def write_matrix_file(path, M):
    Path(path).write_text(format_matrix(M))


def format_result(R) -> str:
    if isinstance(R, (BoolMatrix, ExtMatrix)):
        return format_matrix(R)
    if isinstance(R, PairMatrix):
        return "\n".join(" ".join(f"{x},{y}" for x, y in row) for row in R.to_list()) + "\n"
    if isinstance(R, MsbResult):
        return "\n".join(" ".join(row) for row in R.to_rows()) + "\n"
    raise TypeError(type(R))


def result_checksum(R) -> str:
    h = hashlib.blake2b(digest_size=8)
    h.update(type(R).__name__.encode())
    if isinstance(R, BoolMatrix):
        h.update(np.asarray(R.shape, np.int64).tobytes() + R.words.tobytes())
    elif isinstance(R, ExtMatrix):
        h.update(np.asarray(R.shape, np.int64).tobytes() + R.tags.tobytes() + R.values.tobytes())
    elif isinstance(R, PairMatrix):
        h.update(R.x.tobytes() + R.y.tobytes())
    elif isinstance(R, MsbResult):
        codes = np.where(R.status == 0, R.codes, -1)
        h.update(np.asarray([R.W, R.ell], np.int64).tobytes() + R.status.tobytes() + codes.tobytes())
    else:
        raise TypeError(type(R))
    return h.hexdigest()


# ---------------------------------------------------------------------------
# reports


@dataclass
class RunReport:
    task: str
    n: int
    engine: str
    seed: int
    u: int = None
    v: int = None
    ell: int = None
    parameters: dict = field(default_factory=dict)
    ledger: dict = field(default_factory=dict)
    result_checksum: str = ""
    verified: bool = False

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# task runners; each returns (result, oracle-or-None, extra report fields)


def _load(path, kind):
    M = parse_matrix_file(path)
    want = ExtMatrix if kind == "extint" else BoolMatrix
    if not isinstance(M, want):
        raise UsageError(f"{path}: expected a {kind} matrix")
    return M


def _run_dominance(a, led):
    A, B = _load(a.a[0], "extint"), _load(a.b[0], "extint")
    R = dominance_product(A, B, a.strict, a.engine, led, t=a.t)
    oracle = (lambda: dominance_brute(A, B, a.strict)) if a.verify else None
    return R, oracle, dict(n=A.rows, u=1, v=1, parameters={"t": a.t, "strict": a.strict})


def _run_gendom(a, led):
    As = [_load(p, "extint") for p in a.a]
    Bs = [_load(p, "extint") for p in a.b]
    R = generalized_dominance(As, Bs, a.t, a.order, a.strict, a.engine, led)
    oracle = (lambda: generalized_dominance_brute(As, Bs, a.order, a.strict)) if a.verify else None
    params = {"t": a.t, "order": a.order, "strict": a.strict}
    return R, oracle, dict(n=As[0].rows, u=len(As), v=len(Bs), parameters=params)


def _run_maxmin(a, led):
    A, B = _load(a.a[0], "extint"), _load(a.b[0], "extint")
    R = maxmin_product(A, B, a.g, a.engine, led, t=a.t)
    oracle = (lambda: maxmin_brute(A, B)) if a.verify else None
    return R, oracle, dict(n=A.rows, parameters={"g": a.g, "t": a.t})


def _run_apbp(a, led):
    C = _load(a.a[0], "extint")
    R = apbp(C, a.g, a.engine, led, t=a.t)
    oracle = (lambda: apbp_brute(C)) if a.verify else None
    return R, oracle, dict(n=C.rows, parameters={"g": a.g, "t": a.t})


def _run_distmsb(a, led):
    if a.bits is None:
        raise UsageError("distmsb needs --bits")
    A, B = _load(a.a[0], "extint"), _load(a.b[0], "extint")
    R = distance_msb(A, B, a.bits, a.engine, led, W=a.W, t=a.t)
    oracle = (lambda: msb_bits_oracle(distance_brute(A, B), R.W, a.bits)) if a.verify else None
    return R, oracle, dict(n=A.rows, ell=a.bits, parameters={"W": R.W, "t": a.t})


def _run_boolmul(a, led):
    A, B = _load(a.a[0], "bool"), _load(a.b[0], "bool")
    ls = (a.l1, a.l2, a.l3)
    if all(x is not None for x in ls):
        R = sparse_bool_product(A, B, *ls, a.engine, led)
        params = {"l1": a.l1, "l2": a.l2, "l3": a.l3, "regime": "manual"}
    elif any(x is not None for x in ls):
        raise UsageError("give all of --l1 --l2 --l3 or none")
    else:
        R = auto_sparse_bool_product(A, B, a.engine, led)
        plan = sparse_plan(A, B)
        params = {k: plan[k] for k in ("regime", "l1", "l2", "l3")}
    oracle = (lambda: bool_multiply(A, B)) if a.verify else None
    return R, oracle, dict(n=A.rows, parameters=params)


RUNNERS = {
    "dominance": _run_dominance,
    "gendom": _run_gendom,
    "maxmin": _run_maxmin,
    "apbp": _run_apbp,
    "distmsb": _run_distmsb,
    "boolmul": _run_boolmul,
}


def _ledger_dict(led: CostLedger) -> dict:
    d = led.report().to_dict()
    d.pop("seed")
    return d


def run_task(a) -> int:
    led = CostLedger(a.seed)
    R, oracle, extra = RUNNERS[a.cmd](a, led)
    verified = False
    if oracle is not None:
        ref = oracle()
        if ref != R:
            print(f"verification FAILED for {a.cmd}", file=sys.stderr)
            verified = None
        else:
            verified = True
    rep = RunReport(task=a.cmd, engine=a.engine, seed=a.seed, ledger=_ledger_dict(led),
                    result_checksum=result_checksum(R), verified=bool(verified), **extra)
    text = rep.to_json()
    if a.report:
        Path(a.report).write_text(text)
    else:
        sys.stdout.write(text)
    if a.out:
        Path(a.out).write_text(format_result(R))
    return 1 if verified is None else 0


def run_exponents(a) -> int:
    tab = paper_exponent_table(OmegaParams(a.omega, a.alpha))
    rounded = {k: round(v, 3) for k, v in tab.items()}
    text = json.dumps(rounded, sort_keys=True, indent=2) + "\n"
    if a.report:
        Path(a.report).write_text(text)
    sys.stdout.write(text)
    width = max(map(len, tab))
    for k in sorted(tab):
        sys.stdout.write(f"{k:<{width}}  {tab[k]:.6f}\n")
    return 0


# ---------------------------------------------------------------------------
# instance generation


def gen_instance(kind, n, density=1.0, lo=-5, hi=5, seed=0, fill="inf"):
    """Seeded random instance.

    ``extint`` has finite entries with probability ``density`` (others are
    ``fill``); ``dup`` draws finite values from only three distinct levels;
    ``capacity`` is a digraph with -inf for missing edges; ``bool`` is a
    Bernoulli(density) 0/1 matrix.
    """
    rng = np.random.default_rng(seed)
    if not 0 <= density <= 1:
        raise ValueError("density must lie in [0, 1]")
    if kind == "bool":
        return BoolMatrix.from_dense(rng.random((n, n)) < density)
    if kind not in ("extint", "dup", "capacity"):
        raise ValueError(f"unknown kind {kind!r}")
    if lo > hi:
        raise ValueError("lo must not exceed hi")
    if kind == "dup":
        levels = rng.integers(lo, hi + 1, size=3)
        vals = rng.choice(levels, size=(n, n))
    else:
        vals = rng.integers(lo, hi + 1, size=(n, n))
    if kind == "capacity":
        fill = "-inf"
    live = rng.random((n, n)) < density
    tags = np.where(live, FINITE, POS_INF if fill == "inf" else NEG_INF)
    return ExtMatrix(vals, tags)


def run_gen(a) -> int:
    M = gen_instance(a.kind, a.n, a.density, a.lo, a.hi, a.seed, a.fill)
    if a.out:
        write_matrix_file(a.out, M)
    else:
        sys.stdout.write(format_matrix(M))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semiring-qmm",
                                 description="Semiring matrix products with a simulated cost ledger.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--engine", choices=ENGINES, default="quantum-sim")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--verify", action="store_true")
    common.add_argument("--report")
    common.add_argument("--out")
    common.add_argument("--t", type=int)
    for name, helptext in (("dominance", "existence dominance product"),
                           ("gendom", "generalized dominance product"),
                           ("maxmin", "(max,min) product"),
                           ("apbp", "all-pairs bottleneck paths"),
                           ("distmsb", "leading bits of the distance product"),
                           ("boolmul", "sparse Boolean product")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        nargs = "+" if name == "gendom" else 1
        p.add_argument("--a", nargs=nargs, required=True)
        if name != "apbp":
            p.add_argument("--b", nargs=nargs, required=True)
        if name in ("dominance", "gendom"):
            p.add_argument("--strict", action="store_true")
        if name == "gendom":
            p.add_argument("--order", choices=("normal", "decreasing"), default="normal")
        if name in ("maxmin", "apbp"):
            p.add_argument("--g", type=int)
        if name == "distmsb":
            p.add_argument("--bits", type=int)
            p.add_argument("--W", type=int)
        if name == "boolmul":
            for l in ("--l1", "--l2", "--l3"):
                p.add_argument(l, type=int)
    p = sub.add_parser("exponents", help="print the exponent table")
    p.add_argument("--omega", type=float, default=2.373)
    p.add_argument("--alpha", type=float, default=0.302)
    p.add_argument("--report")
    p = sub.add_parser("gen", help="generate a seeded random instance")
    p.add_argument("--kind", choices=("extint", "bool", "capacity", "dup"), default="extint")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument("--lo", type=int, default=-5)
    p.add_argument("--hi", type=int, default=5)
    p.add_argument("--fill", choices=("inf", "-inf"), default="inf")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if a.cmd == "exponents":
            return run_exponents(a)
        if a.cmd == "gen":
            return run_gen(a)
        return run_task(a)
    except (UsageError, ValueError, OverflowError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
