"""Command-line entry points: run one scenario, sweep a key, verify."""

import argparse
import os
import sys

from .scenarios import build_config, parse_config_text, run_scenario


def parse_overrides(tokens):
    """Turn leftover ``--key.subkey value`` flags into a dict.

    Both ``--key value`` and ``--key=value`` forms are accepted.  Later
    flags win, matching the later-keys-win rule of the config file.
    """
    pairs = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--"):
            raise ValueError(f"expected a --key.subkey flag, got {tok!r}")
        body = tok[2:]
        if "=" in body:
            key, value = body.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(tokens):
                raise ValueError(f"flag {tok!r} is missing a value")
            key, value = body, tokens[i + 1]
            i += 2
        if not key:
            raise ValueError(f"empty key in flag {tok!r}")
        pairs[key] = value
    return pairs


def _load_raw(path, overrides):
    with open(path) as fh:
        raw = parse_config_text(fh.read())
    raw.update(overrides)
    return raw


def _cmd_run(args, overrides):
    cfg = build_config(_load_raw(args.config, overrides))
    result = run_scenario(cfg)
    for line in result.summary_lines():
        print(line)
    return result.exit_code


def _cmd_sweep(args, overrides):
    if len(args.vary) != 1:
        raise ValueError("sweep takes exactly one --vary key=v1,v2,...")
    key, sep, tail = args.vary[0].partition("=")
    labels = [v.strip() for v in tail.split(",") if v.strip()]
    if not sep or not key or not labels:
        raise ValueError("--vary must look like key=v1,v2,...")
    raw = _load_raw(args.config, overrides)
    base_dir = raw.get("output.directory", "")
    if not base_dir:
        raise ValueError("sweep needs output.directory set in the config")
    # each variant is an independent job; artifacts land in one subdir per
    # value so a later reader can tell the runs apart from paths alone
    worst = 0
    for label in labels:
        job = dict(raw)
        job[key] = label
        job["output.directory"] = os.path.join(base_dir, f"{key}={label}")
        result = run_scenario(build_config(job))
        print(f"{key}={label}: exit {result.exit_code}")
        worst = max(worst, result.exit_code)
    return worst


def _cmd_verify():
    from .acceptance import run_all

    results = run_all()
    for res in results:
        print(res.line())
    failed = sum(1 for res in results if not res.passed)
    print(f"{len(results) - failed} of {len(results)} criteria passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ens",
        description="extended Navier-Stokes scenario runner",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run one scenario from a config file",
                           allow_abbrev=False)
    run_p.add_argument("--config", required=True, help="config file path")
    sweep_p = sub.add_parser("sweep", help="run one scenario per listed value",
                             allow_abbrev=False)
    sweep_p.add_argument("--config", required=True, help="config file path")
    sweep_p.add_argument("--vary", action="append", required=True,
                         metavar="key=v1,v2,...")
    sub.add_parser("verify", help="run the acceptance checks",
                   allow_abbrev=False)

    try:
        args, leftover = parser.parse_known_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, which matches the validation code
        return int(exc.code or 0)
    try:
        overrides = parse_overrides(leftover)
        if args.command == "run":
            return _cmd_run(args, overrides)
        if args.command == "sweep":
            return _cmd_sweep(args, overrides)
        if overrides:
            raise ValueError("verify takes no overrides")
        return _cmd_verify()
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
