"""Command line interface: ``macpolar <command> ...``.

Exit codes: 0 success, 2 usage, 3 bad config, 4 unreadable or malformed
file, 5 invalid channel, 6 alphabet cap exceeded, 1 anything else.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .channels import AwgnSpec, awgn_to_bmac, builtin, qary_sum_rate, split_qary
from .code import (CodeSpec, construct_by_reliability, construct_code, simulate, stats_csv,
                   synthesize_channel_stats)
from .experiment import ConfigError, ExperimentConfig, run_experiment, stage_seeds
from .mac import Mac, MacError, form_information, rank_profile
from .matroid import (IntRankFunction, canonical_form, enumerate_matroids,
                      find_binary_representation, has_u24_minor, integrality_gap, is_matroid,
                      is_polymatroid, size_lex_order)
from .transform import (AlphabetCapacityError, MergePolicy, exhaustive_polarization,
                        index_path, profiles_to_csv, random_paths, sample_polarization)

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_CONFIG, EXIT_FILE, EXIT_CHANNEL, EXIT_ALPHABET = \
    0, 1, 2, 3, 4, 5, 6


def _users(mask: int, m: int) -> str:
    return "{" + ",".join(str(k + 1) for k in range(m) if mask >> k & 1) + "}"


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _add_channel(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("channel")
    g.add_argument("--mac", help="MAC JSON file")
    g.add_argument("--builtin", help="xor2, identity, pure_noise, adder, mixture, bec, bsc")
    g.add_argument("--users", type=int, dest="m", help="user count for builtins that take one")
    g.add_argument("--param", type=float, help="erasure / crossover probability")


def _channel(args) -> Mac:
    if bool(args.mac) == bool(args.builtin):
        raise ConfigError("give exactly one of --mac or --builtin")
    if args.mac:
        return Mac.load(args.mac)
    return builtin(args.builtin, args.m, args.param)


def _merge(args) -> MergePolicy:
    if args.merge == "lossy":
        return MergePolicy.lossy(args.max_alphabet, args.tolerance)
    return MergePolicy("exact", 0.0, args.max_alphabet)


def _add_merge(p):
    p.add_argument("--merge", choices=("exact", "lossy"), default="exact")
    p.add_argument("--max-alphabet", type=int, default=4096)
    p.add_argument("--tolerance", type=float, default=1e-3)


def cmd_analyze(args) -> int:
    mac = Mac.load(args.mac_file)
    prof = rank_profile(mac)
    forms = form_information(mac)
    if args.json:
        print(json.dumps({"m": mac.m, "outputs": mac.n_outputs, "rank_profile": prof.tolist(),
                          "form_info": forms.tolist(),
                          "integrality_gap": integrality_gap(prof)}, indent=1))
        return EXIT_OK
    print(f"m={mac.m} outputs={mac.n_outputs}")
    print(f"{'mask':>5} {'users':<12} {'I[J]':>12} {'I(S.X;Y)':>12}")
    for mask in size_lex_order(mac.m) if args.order == "size" else range(mac.q):
        print(f"{mask:>5} {_users(mask, mac.m):<12} {prof[mask]:>12.9f} {forms[mask]:>12.9f}")
    print(f"sum rate {prof[-1]:.9f}, integrality gap {integrality_gap(prof):.3g}")
    return EXIT_OK


def cmd_polarize(args) -> int:
    mac = _channel(args)
    policy = _merge(args)
    if args.mode == "exact":
        profiles = exhaustive_polarization(mac, args.depth, policy)
        paths = [index_path(i, args.depth) for i in range(len(profiles))]
    else:
        profiles = sample_polarization(mac, args.depth, args.trials, args.seed, policy)
        paths = random_paths(args.depth, args.trials, args.seed)
    _emit(profiles_to_csv(profiles, paths), args.csv)
    if args.csv:
        sums = np.array([p[-1] for p in profiles])
        gaps = np.array([integrality_gap(p) for p in profiles])
        print(f"{len(profiles)} channels, mean sum rate {sums.mean():.9f}, "
              f"fraction within {args.eps} of integral {(gaps <= args.eps).mean():.4f}")
    return EXIT_OK


def cmd_construct(args) -> int:
    mac = _channel(args)
    if args.n < 1 or args.n & (args.n - 1):
        raise ConfigError(f"--n {args.n} is not a power of two")
    depth = args.n.bit_length() - 1
    seeds = stage_seeds(args.seed)
    stats = synthesize_channel_stats(mac, depth, args.mode, _merge(args),
                                     seed=seeds["synthesis"], samples=args.samples)
    if args.info_bits is not None:
        spec = construct_by_reliability(stats, args.info_bits, seed=seeds["frozen"])
    else:
        spec = construct_code(stats, eps=args.eps, seed=seeds["frozen"])
    spec.save(args.out)
    if args.stats:
        Path(args.stats).write_text(stats_csv(stats))
    print(f"n={spec.n} sum rate {spec.sum_rate():.6f} per-user {spec.info_sizes()} "
          f"unpolarized {spec.unpolarized_fraction():.4f} -> {args.out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = CodeSpec.load(args.code)
    mac = _channel(args)
    rep = simulate(spec, mac, args.trials, seed=args.seed, genie_check=args.genie_check,
                   backend=args.backend)
    if args.csv:
        Path(args.csv).write_text(rep.trials_csv())
    if args.report:
        Path(args.report).write_text(json.dumps(rep.to_dict(), indent=1) + "\n")
    line = (f"trials {rep.trials} block errors {rep.block_errors} "
            f"BLER {rep.bler:.6g} +- {1.96 * rep.bler_sigma():.2g}")
    if rep.genie_mismatches is not None:
        line += f" genie mismatches {rep.genie_mismatches}"
    print(line)
    return EXIT_OK


def _parse_rank(text: str, order: str) -> IntRankFunction:
    vals = [int(v) for v in text.replace(" ", "").split(",") if v]
    if order == "size":
        # the empty set may be omitted
        m = (len(vals) + 1).bit_length() - 1
        if len(vals) == 1 << m:
            vals = vals[1:]
        return IntRankFunction.from_size_order(m, vals)
    m = len(vals).bit_length() - 1
    return IntRankFunction(m, tuple(vals))


def cmd_matroid(args) -> int:
    if args.action == "enumerate":
        ms = enumerate_matroids(args.m, allow_large=args.m == 5)
        classes = {canonical_form(f) for f in ms}
        if args.unlabeled:
            for c in sorted(classes):
                print(",".join(map(str, c)))
        else:
            for f in ms:
                print(",".join(map(str, f.values)))
        print(f"# m={args.m}: {len(ms)} labeled, {len(classes)} unlabeled", file=sys.stderr)
        return EXIT_OK
    if not args.rank:
        raise ConfigError("--rank is required for represent and check")
    f = _parse_rank(args.rank, args.order)
    if args.action == "check":
        res = {"polymatroid": is_polymatroid(f.values), "matroid": is_matroid(f.values)}
        if res["matroid"]:
            res["u24_minor"] = has_u24_minor(f)
            res["binary"] = not res["u24_minor"]
        print(json.dumps(res))
        return EXIT_OK
    if not is_matroid(f.values):
        print("not a matroid rank function", file=sys.stderr)
        return EXIT_ERROR
    A = find_binary_representation(f)
    if A is None:
        print("none")
    else:
        print("\n".join(A.to_strings()) if A.k else "(empty)")
    return EXIT_OK


def cmd_awgn(args) -> int:
    spec = AwgnSpec.from_snr(args.m, args.snr, args.bins, args.span, args.power)
    mac = awgn_to_bmac(spec)
    if args.out:
        mac.save(args.out)
    prof = rank_profile(mac)
    cap = 0.5 * np.log2(1 + 10 ** (args.snr / 10))
    print(f"m={args.m} snr={args.snr} dB bins={args.bins}: sum rate {prof[-1]:.6f} "
          f"(Gaussian capacity {cap:.6f})")
    return EXIT_OK


def cmd_split_qary(args) -> int:
    d = json.loads(Path(args.input).read_text())
    rows = d["rows"] if isinstance(d, dict) else d
    users = args.users if args.users is not None else int(d.get("users", 1))
    q = args.q if args.q is not None else int(d["q"])
    mac = split_qary(rows, users, q)
    mac.save(args.out)
    prof = rank_profile(mac)
    print(f"{users} user(s), q={q} -> {mac.m} binary users; sum rate {prof[-1]:.9f} "
          f"(direct {qary_sum_rate(rows, users, q):.9f}) -> {args.out}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.out_dir:
        cfg.out_dir = args.out_dir
    rep = run_experiment(cfg, backend=args.backend)
    sim = rep["simulation"]
    print(f"n={rep['code']['n']} sum rate {rep['code']['sum_rate']:.6f} "
          f"BLER {sim['bler']:.6g} ({sim['block_errors']}/{sim['trials']}) -> {cfg.out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="macpolar", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="rank profile of a MAC file")
    p.add_argument("mac_file")
    p.add_argument("--order", choices=("mask", "size"), default="size")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("polarize", help="rank profiles of synthesized channels")
    _add_channel(p)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "sample"), default="exact")
    p.add_argument("--trials", type=int, default=1000, help="paths drawn in sample mode")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--csv", help="write profiles here instead of stdout")
    _add_merge(p)
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("construct", help="build a code and write it as JSON")
    _add_channel(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--info-bits", type=int, help="single-user fixed-rate construction")
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", default="code.json")
    p.add_argument("--stats", help="synthesized channel statistics CSV")
    _add_merge(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", help="Monte Carlo block error rate of a code")
    _add_channel(p)
    p.add_argument("--code", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--genie-check", action="store_true")
    p.add_argument("--backend", choices=("cython", "python"))
    p.add_argument("--csv", help="per-trial CSV")
    p.add_argument("--report", help="JSON report")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("matroid", help="matroid enumeration and representation")
    p.add_argument("action", choices=("enumerate", "represent", "check"))
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--unlabeled", action="store_true")
    p.add_argument("--rank", help="comma-separated rank values")
    p.add_argument("--order", choices=("mask", "size"), default="mask",
                   help="mask: indexed by bitmask; size: subsets by size then lexicographic")
    p.set_defaults(func=cmd_matroid)

    p = sub.add_parser("awgn", help="quantized Gaussian MAC")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--snr", type=float, required=True, help="dB")
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--span", type=float, default=6.0)
    p.add_argument("--power", type=float, default=1.0)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_awgn)

    p = sub.add_parser("split-qary", help="binary MAC from a q-ary-input table")
    p.add_argument("input", help='JSON with "rows" (and optionally "users", "q")')
    p.add_argument("--users", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("-o", "--out", default="split.json")
    p.set_defaults(func=cmd_split_qary)

    p = sub.add_parser("run", help="full experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--out-dir")
    p.add_argument("--backend", choices=("cython", "python"))
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        code, msg = EXIT_CONFIG, f"config error: {exc}"
    except MacError as exc:
        code, msg = EXIT_CHANNEL, f"invalid channel: {exc}"
    except json.JSONDecodeError as exc:
        code, msg = EXIT_FILE, f"malformed JSON: {exc}"
    except (OSError, KeyError) as exc:
        code, msg = EXIT_FILE, f"file error: {exc}"
    except AlphabetCapacityError as exc:
        code, msg = EXIT_ALPHABET, f"alphabet cap: {exc}"
    except ValueError as exc:
        code, msg = EXIT_ERROR, f"error: {exc}"
    print(msg, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
