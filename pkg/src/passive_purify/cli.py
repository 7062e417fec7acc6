"""Command line front end: ``passive-purify <subcommand> [options]``.

Exit status: 0 when every check passes, 1 when a check fails, 2 on a
configuration error, 3 when the memory guard refuses the run.
"""

from __future__ import annotations

import argparse
import os
import shlex
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import channel as ch
from . import verify
from .dump import read_matrix, read_operator, write_operator
from .errors import ConvergenceError, NotPSDError, PurifyError, ResourceError
from .fock import BlockOperator, sector_dim
from .howe import howe_identity_check
from .interferometer import haar_unitary, sample_seed, unitarity_residual
from .report import VerificationReport, dumps_reports
from .states import iid_state_fock

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3
DEFAULT_MAX_ENTRIES = 20_000_000
SEED_ENV = "PASSIVE_PURIFY_SEED"
THREADS_ENV = "PASSIVE_PURIFY_THREADS"

# keys that never change the numbers and so stay out of the report
_NON_SEMANTIC = {"output", "timing", "threads", "dump_dir", "config", "quiet", "func"}


class ConfigError(Exception):
    pass


def read_config(path) -> List[str]:
    """Turn a flat ``key = value`` file into command line tokens.

    Blank lines and ``#`` comments are skipped.  ``true``/``false`` values become
    bare flags (or nothing); other values are split on whitespace.
    """
    tokens: List[str] = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() == "true":
            tokens.append(flag)
        elif value.lower() == "false":
            continue
        else:
            tokens.append(flag)
            tokens.extend(shlex.split(value))
    return tokens


def _positive(text):
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return val


def _nonneg(text):
    val = int(text)
    if val < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return val


def _nu(text):
    val = float(text)
    if not np.isfinite(val) or val < 0:
        raise argparse.ArgumentTypeError("mean photon numbers must be finite and nonnegative")
    return val


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; command line flags override it")
    common.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or 0)")
    common.add_argument("--threads", type=_positive, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")
    common.add_argument("--output", help="write the JSON report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall times in the report")
    common.add_argument("--max-entries", type=float, default=DEFAULT_MAX_ENTRIES,
                        help="memory guard: largest joint block, in complex entries")
    common.add_argument("--quiet", action="store_true", help="suppress the pass/fail lines on stderr")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--m", type=_positive, default=None, help="modes per copy")
    model.add_argument("--n", type=_positive, default=2, help="number of copies")
    model.add_argument("--nu", type=_nu, nargs="+", default=None, help="thermal mean photon numbers")
    model.add_argument("--K", type=_nonneg, default=6, help="photon-number cutoff")
    model.add_argument("--unitary-file", help="m x m unitary as a matrix dump or .npy (default: Haar from the seed)")

    twirl = argparse.ArgumentParser(add_help=False)
    twirl.add_argument("--method", choices=["pinch", "fixed_point", "mc"], default=None)
    twirl.add_argument("--tol", type=float, default=1e-8, help="fixed-point stopping tolerance")
    twirl.add_argument("--samples", type=_positive, default=10_000, help="Monte Carlo samples")
    twirl.add_argument("--engine", choices=["auto", "dense", "iterate"], default="auto")
    twirl.add_argument("--tolerance", type=float, default=None, help="pass threshold override")

    parser = argparse.ArgumentParser(prog="passive-purify", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theorem", parents=[common, model, twirl],
                       help="channel output on rho^n versus the twirled purification")
    p.set_defaults(func=cmd_theorem)

    p = sub.add_parser("lemma-invariance", parents=[common, model],
                       help="invariance of rho^n under copy-mixing passive unitaries")
    p.add_argument("--trials", type=_positive, default=5)
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.set_defaults(func=cmd_invariance)

    p = sub.add_parser("lemma-commute", parents=[common, model, twirl],
                       help="R_k commutes with the k-photon block of rho^n")
    p.add_argument("--k", type=_nonneg, nargs="+", default=None, help="sectors (default 0..K)")
    p.set_defaults(func=cmd_commute)

    p = sub.add_parser("purify", parents=[common, model, twirl],
                       help="apply the channel and dump the output blocks")
    p.add_argument("--input-dir", help="directory of block_<k> matrix dumps (default: rho^n)")
    p.add_argument("--dump-dir", help="directory for the output blocks")
    p.add_argument("--dump-format", choices=["binary", "text"], default="binary")
    p.set_defaults(func=cmd_purify)

    p = sub.add_parser("howe", parents=[common], help="dimension identity table")
    p.add_argument("--m", type=_positive, default=None)
    p.add_argument("--n", type=_positive, default=None)
    p.add_argument("--N", type=_nonneg, default=None, help="photon number (default: table 0..6)")
    p.set_defaults(func=cmd_howe)

    p = sub.add_parser("twirl-check", parents=[common],
                       help="Monte Carlo, fixed-point and pinching twirls against each other")
    p.add_argument("--samples", type=_positive, default=10_000)
    p.add_argument("--inputs", type=_positive, default=5)
    p.set_defaults(func=cmd_twirl_check)

    p = sub.add_parser("all", parents=[common], help="full acceptance suite")
    p.add_argument("--only", nargs="+", choices=sorted(verify.CRITERIA), default=None)
    p.set_defaults(func=cmd_all)
    return parser


# helpers ---------------------------------------------------------------


def _model(args):
    nus = args.nu if args.nu is not None else [1.0]
    m = args.m if args.m is not None else len(nus)
    if len(nus) == 1 and m > 1:
        nus = nus * m
    if len(nus) != m:
        raise ConfigError(f"--nu has {len(nus)} values but --m is {m}")
    return m, [float(v) for v in nus]


def _unitary(args, m):
    if not args.unitary_file:
        return haar_unitary(m, sample_seed(args.seed, 0))
    path = Path(args.unitary_file)
    try:
        u = np.load(path) if path.suffix == ".npy" else read_matrix(path)[0]
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read unitary: {exc}") from exc
    u = np.asarray(u, dtype=complex)
    if u.shape != (m, m):
        raise ConfigError(f"unitary has shape {u.shape}, expected ({m}, {m})")
    if unitarity_residual(u) > 1e-10:
        raise ConfigError("unitary file does not hold a unitary matrix")
    return u


def _method(args, m):
    kind = args.method or ("pinch" if m == 1 else "fixed_point")
    if kind == "pinch" and m != 1:
        raise ConfigError("--method pinch needs --m 1")
    return ch.TwirlMethod(kind, tol=args.tol, seed=args.seed, samples=args.samples, engine=args.engine)


def guard(m: int, n: int, k: int, budget: float) -> None:
    d = sector_dim(m * n, k)
    if float(d) ** 4 > budget:
        raise ResourceError(
            f"the {k}-photon joint block has {d ** 4:.3g} entries, above the budget of {budget:.3g}"
        )


def _config_echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NON_SEMANTIC}


# subcommands -----------------------------------------------------------


def cmd_theorem(args) -> List[VerificationReport]:
    m, nus = _model(args)
    method = _method(args, m)
    u = _unitary(args, m)
    guard(m, args.n, args.K, args.max_entries)
    return [ch.verify_theorem(u, nus, args.n, args.K, method, args.tolerance)]


def cmd_invariance(args) -> List[VerificationReport]:
    m, nus = _model(args)
    ubar = _unitary(args, m)
    guard(m, args.n, args.K, args.max_entries)
    out = []
    for t in range(args.trials):
        w = haar_unitary(args.n, sample_seed(args.seed, 1 + t))
        rep = ch.verify_lemma2(w, ubar, nus, args.n, args.K, args.tolerance)
        rep.seed = args.seed
        rep.params["trial"] = t
        out.append(rep)
    return out


def cmd_commute(args) -> List[VerificationReport]:
    m, nus = _model(args)
    ks = args.k if args.k is not None else list(range(args.K + 1))
    method = _method(args, m)
    u = _unitary(args, m)
    for k in ks:
        guard(m, args.n, k, args.max_entries)
    return [ch.verify_commutation(m, args.n, k, u, nus, method, args.tolerance) for k in ks]


def _load_blocks(directory, modes):
    blocks = {}
    for path in sorted(Path(directory).glob("block_*")):
        op = read_operator(path)
        k = op.basis_row.sector
        if k is None:
            raise ConfigError(f"{path} is not a single photon-number sector")
        blocks[k] = op
    if not blocks:
        raise ConfigError(f"no block_<k> dumps found in {directory}")
    return BlockOperator(modes, blocks)


def cmd_purify(args) -> List[VerificationReport]:
    m, nus = _model(args)
    method = _method(args, m)
    for k in range(args.K + 1):
        guard(m, args.n, k, args.max_entries)
    if args.input_dir:
        x = _load_blocks(args.input_dir, m * args.n)
        source = "input-dir"
    else:
        x = iid_state_fock(_unitary(args, m), nus, args.n, args.K)
        source = "iid"
    out = ch.apply_channel(x, m, args.n, args.K, method, args.threads)
    trace_in = x.trace() if isinstance(x, BlockOperator) else x.blocks.trace()
    if args.dump_dir:
        target = Path(args.dump_dir)
        target.mkdir(parents=True, exist_ok=True)
        suffix = "ppd" if args.dump_format == "binary" else "json"
        for k, blk in sorted(out.blocks.items()):
            write_operator(target / f"block_{k}.{suffix}", blk, args.dump_format, label=f"output block {k}")
    params = {"m": m, "n": args.n, "K": args.K, "source": source, "method": method.describe()}
    return [
        VerificationReport("purify trace preservation", params, abs(out.trace - trace_in), 1e-9,
                           seed=args.seed, details={"trace_in": trace_in, "trace_out": out.trace,
                                                    "contributions": out.contributions}),
        VerificationReport("purify output positivity", params, max(0.0, -out.min_eigenvalue()), 1e-10,
                           seed=args.seed),
    ]


def cmd_howe(args) -> List[VerificationReport]:
    ms = [args.m] if args.m else [1, 2, 3]
    ns = [args.n] if args.n else [1, 2, 3]
    big = [args.N] if args.N is not None else list(range(7))
    out = []
    for m in ms:
        for n in ns:
            for big_n in big:
                row = howe_identity_check(m, n, big_n)
                out.append(VerificationReport(f"howe (m={m}, n={n}, N={big_n})",
                                              {"m": m, "n": n, "N": big_n},
                                              float(abs(row.lhs - row.rhs)), 0.0, details=row.as_dict()))
    return out


def cmd_twirl_check(args) -> List[VerificationReport]:
    return verify.criterion_twirl(args.seed, samples=args.samples, inputs=args.inputs)


def cmd_all(args) -> List[VerificationReport]:
    def progress(name, batch, elapsed):
        if not args.quiet:
            flag = "PASS" if all(r.passed for r in batch) else "FAIL"
            print(f"{name} {flag} {elapsed:.2f}s", file=sys.stderr)

    return verify.run_suite(args.seed, only=args.only, progress=progress)


# entry point -----------------------------------------------------------


def _inject_config(argv: List[str]) -> List[str]:
    """Insert config-file tokens right after the subcommand so explicit flags win."""
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None or not argv:
        return argv
    return argv[:1] + read_config(path) + argv[1:]


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_config(argv)
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_OK if exc.code == 0 else EXIT_CONFIG
        if args.seed is None:
            args.seed = _default_seed()
        if args.threads is not None:
            os.environ[THREADS_ENV] = str(args.threads)
        reports = args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConvergenceError, NotPSDError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except PurifyError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    text = dumps_reports(args.command, reports, _config_echo(args), timing=args.timing)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if not args.quiet:
        for r in reports:
            print(r.line(), file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
