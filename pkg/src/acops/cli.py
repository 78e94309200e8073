"""``acops`` command line: parse a JSON config, run one experiment, write CSV + sidecar.

Configuration documents use dB for every SNR field (keys ending in ``_db``);
they are converted to linear exactly once, in :func:`parse_config`.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from acops import __version__
from acops._rng import DEFAULT_SEED
from acops.analytic import (NumericError, SymmetricGroupParams, bundle_superiority,
                            bundle_superiority_threshold, revenue_single_closed_form,
                            revenue_single_exact)
from acops.auction import AuctionConfig, simulate_revenue
from acops.bundle import compare_formats
from acops.channel import db_to_linear
from acops.netsim import (BUNDLE_POLICIES, CSV_COLUMNS, FEEDBACK_POLICIES, SINGLE_POLICIES,
                          ConfigError, FeedbackAccount, NetworkConfig, OfdmConfig,
                          calibrate_direct_snr, run_bundle_experiment, run_montecarlo,
                          run_sequential)

COMMANDS = ("outage-single", "outage-bundle", "revenue", "threshold", "feedback", "sequential",
            "validate")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3, 4

BASE_DEFAULTS = {
    "n_users": 5,
    "desired_rate": 10.0,
    "direct_snr_db": 0.0,
    "helper_link_snr_db": 10.0,
    "helper_bs_snr_db": 20.0,
    "helper_rate": 0.0,
    "helper_surplus": None,
    "num_partners": 1,
    "half_duplex_factor": 1.0,
    "ofdm": None,
    "trials": 10_000,
    "seed": None,
    "velocity_kmh": 3.0,
}

COMMAND_DEFAULTS = {
    "outage-single": {
        "trials": 100_000,
        "sweep": {"param": "direct_snr_db", "values": [7, 4, 1, -2, -5, -8, -11, -14, -17, -20]},
        "policies": list(SINGLE_POLICIES),
    },
    "outage-bundle": {
        "n_users": 10,
        "direct_snr_db": 0.0,
        "helper_link_snr_db": 10.0,
        "ofdm": {"num_subcarriers": 128, "num_taps": 8},
        "trials": 2_000,
        "partners": [2, 4],
        "rates": [140, 130, 120, 115, 110, 105, 100, 90, 80, 60, 40, 0],
        "one_bundle_per_bidder": True,
        "policies": list(BUNDLE_POLICIES),
    },
    "revenue": {
        "trials": 100_000,
        "n_values": [2, 3, 4, 5, 6, 7, 8, 9, 10],
        "bundle_subcarriers": 16,
    },
    "threshold": {
        "n_values": [2, 3, 4, 5, 6, 7, 8, 9, 10],
        "num_objects": None,
        "gamma_bar": 1.0,
    },
    "feedback": {
        "n_values": [2, 3, 4, 5, 6, 7, 8],
        "ofdm": {"num_subcarriers": 128, "num_taps": 8},
        "bitwidth_q": 10.0,
        "bitwidth_b": 10.0,
        "bitwidth_gamma": 10.0,
    },
    "sequential": {
        "n_users": 6,
        "desired_rate": 6.0,
        "direct_snr_db": None,
        "target_outage": 0.7,
        "helper_link_snr_db": 30.0,
        "strategies": ["conservative", "conservative", "aggressive", "aggressive",
                       "no_help", "no_help"],
        "num_stages": 100,
        "initial_budget": 5000,
        "trials": 100,
    },
    "validate": {},
}

SNR_KEYS = {"direct_snr_db": "direct_snr", "helper_link_snr_db": "helper_link_snr",
            "helper_bs_snr_db": "helper_bs_snr"}


@dataclass
class ExperimentSpec:
    command: str
    config_path: str | None
    seed: int
    trials: int
    output_path: str | None
    threads: int = 1
    document: dict | None = None


def _db(v):
    if isinstance(v, list):
        return tuple(db_to_linear(float(x)) for x in v)
    return db_to_linear(float(v))


def effective_document(command: str, doc: dict) -> dict:
    if command not in COMMANDS:
        raise ConfigError(f"command: unknown command {command!r}")
    if "effective_config" in doc and isinstance(doc["effective_config"], dict):
        doc = doc["effective_config"]     # a metadata sidecar
    eff = copy.deepcopy(BASE_DEFAULTS)
    eff.update(copy.deepcopy(COMMAND_DEFAULTS[command]))
    unknown = sorted(set(doc) - set(eff))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key for command {command!r}")
    eff.update(copy.deepcopy(doc))
    return eff


def _network_config(eff: dict, seed: int) -> NetworkConfig:
    kw = {}
    for key in ("n_users", "num_partners", "trials"):
        v = eff[key]
        if not isinstance(v, int) or isinstance(v, bool):
            raise ConfigError(f"{key}: need an integer")
        kw[key] = v
    for key in ("desired_rate", "helper_rate", "half_duplex_factor"):
        kw[key] = float(eff[key])
    kw["helper_surplus"] = None if eff["helper_surplus"] is None else float(eff["helper_surplus"])
    for key, name in SNR_KEYS.items():
        if eff[key] is None:
            if key != "direct_snr_db" or "target_outage" not in eff:
                raise ConfigError(f"{key}: missing value")
            kw[name] = calibrate_direct_snr(kw["desired_rate"], float(eff["target_outage"]))
        else:
            kw[name] = _db(eff[key])
    if eff["ofdm"] is not None:
        o = eff["ofdm"]
        if not isinstance(o, dict) or set(o) - {"num_subcarriers", "num_taps"}:
            raise ConfigError("ofdm: need {num_subcarriers, num_taps}")
        kw["ofdm"] = OfdmConfig(**o)
    return NetworkConfig(seed=seed, **kw)


def parse_config(text: str, command: str = "outage-single", seed: int | None = None,
                 trials: int | None = None):
    """Validate a JSON document; return (NetworkConfig, effective document).

    Explicit ``seed``/``trials`` override the document. The seed falls back to
    ``ACOPS_SEED`` and then to the built-in default.
    """
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"document: malformed JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError("document: need a JSON object")
    eff = effective_document(command, doc)
    if seed is not None:
        eff["seed"] = seed
    if eff["seed"] is None:
        env = os.environ.get("ACOPS_SEED")
        try:
            eff["seed"] = int(env) if env else DEFAULT_SEED
        except ValueError as exc:
            raise ConfigError("ACOPS_SEED: need an integer") from exc
    if not isinstance(eff["seed"], int) or not 0 <= eff["seed"] < 2 ** 64:
        raise ConfigError("seed: need an unsigned 64-bit integer")
    if trials is not None:
        eff["trials"] = trials
    if "sweep" in eff:
        sw = eff["sweep"]
        if not isinstance(sw, dict) or set(sw) != {"param", "values"} or not sw["values"]:
            raise ConfigError("sweep: need {param, values} with at least one value")
        if sw["param"] not in SNR_KEYS and sw["param"] not in ("desired_rate", "helper_surplus",
                                                               "helper_rate"):
            raise ConfigError(f"sweep.param: cannot sweep {sw['param']!r}")
    for key, allowed in (("policies", SINGLE_POLICIES if command == "outage-single" else BUNDLE_POLICIES),):
        if key in eff:
            bad = [p for p in eff[key] if p not in allowed]
            if bad:
                raise ConfigError(f"policies: unknown policy {bad[0]!r}")
    try:
        cfg = _network_config(eff, eff["seed"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg, eff


def config_hash(eff: dict) -> str:
    return hashlib.sha256(json.dumps(eff, sort_keys=True).encode()).hexdigest()


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float) or hasattr(v, "dtype"):
        v = float(v)
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def write_csv(path: str, rows: list[dict]):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in CSV_COLUMNS])


def write_sidecar(path: str, spec: ExperimentSpec, eff: dict):
    meta = {"tool": "acops", "version": __version__, "command": spec.command,
            "seed": eff["seed"], "trials": eff["trials"], "config_sha256": config_hash(eff),
            "effective_config": eff}
    with open(path + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- experiments -------------------------------------------------------------

def _outage_single(cfg, eff, threads):
    sw = eff["sweep"]
    param = SNR_KEYS.get(sw["param"], sw["param"])
    values = [_db(v) if sw["param"] in SNR_KEYS else v for v in sw["values"]]
    rows = run_montecarlo(cfg, param, values, eff["policies"], threads=threads)
    labels = [v for v in sw["values"] for _ in eff["policies"]]
    for r, label in zip(rows, labels):
        r["grid"] = label
    return rows


def _outage_bundle(cfg, eff, threads):
    rows = []
    for r in eff["partners"]:
        for row in run_bundle_experiment(cfg, eff["rates"], r=r, policies=eff["policies"],
                                         one_bundle_per_bidder=eff["one_bundle_per_bidder"],
                                         threads=threads):
            row["policy"] = f"{row['policy']}/r={r}"
            rows.append(row)
    return rows


def _revenue(cfg, eff, threads):
    rows = []
    gph = cfg.per_user("helper_link_snr")[0]
    gbs = cfg.per_user("direct_snr")[0]
    for n in eff["n_values"]:
        params = SymmetricGroupParams(gph, gbs, 1.0, n)
        model = params.value_model
        for rule in ("first_price", "second_price"):
            est = simulate_revenue(model, n, AuctionConfig(pricing_rule=rule), eff["trials"],
                                   cfg.seed, threads)
            rows.append({"grid": n, "policy": rule, "revenue": est.mean})
        formats = compare_formats(model, eff["bundle_subcarriers"], n,
                                  max(1, eff["trials"] // eff["bundle_subcarriers"]), cfg.seed, threads)
        rows.append({"grid": n, "policy": "bundle",
                     "revenue": formats["mixed_bundle"][0] / eff["bundle_subcarriers"]})
        rows.append({"grid": n, "policy": "second_price_exact", "revenue": revenue_single_exact(params)})
        rows.append({"grid": n, "policy": "closed_form", "revenue": revenue_single_closed_form(params)})
    return rows


def _threshold(cfg, eff, threads):
    rows = []
    for n in eff["n_values"]:
        lhs, rhs = bundle_superiority(n, n if eff["num_objects"] is None else eff["num_objects"],
                                      eff["gamma_bar"])
        rows.append({"grid": n, "policy": "pure_bundle", "revenue": lhs})
        rows.append({"grid": n, "policy": "separate", "revenue": rhs})
    star = bundle_superiority_threshold(eff["n_values"], eff["num_objects"], eff["gamma_bar"])
    print(f"N_a* = {star}")
    return rows


def _feedback(cfg, eff, threads):
    rows = []
    k_sub = cfg.ofdm.num_subcarriers if cfg.ofdm else 128
    for n in eff["n_values"]:
        for p in FEEDBACK_POLICIES:
            acct = FeedbackAccount(p, n, num_subcarriers=k_sub, bitwidth_q=eff["bitwidth_q"],
                                   bitwidth_b=eff["bitwidth_b"], bitwidth_gamma=eff["bitwidth_gamma"])
            rows.append({"grid": n, "policy": p, "bits": acct.total_bits})
    return rows


def _sequential(cfg, eff, threads):
    res = run_sequential(cfg, eff["strategies"], eff["num_stages"], eff["initial_budget"],
                         eff["trials"], threads)
    rows = []
    for k in range(res.stages):
        for s, curve in res.cumulative_outage.items():
            rows.append({"grid": k + 1, "policy": s, "mean_outage": curve[k]})
    for k in range(res.stages):
        rows.append({"grid": k + 1, "policy": "no_cooperation", "mean_outage": res.no_coop_outage})
    return rows


RUNNERS = {"outage-single": _outage_single, "outage-bundle": _outage_bundle, "revenue": _revenue,
           "threshold": _threshold, "feedback": _feedback, "sequential": _sequential}


def run_experiment(spec: ExperimentSpec) -> int:
    if spec.command == "validate":
        from acops.validate import run_all
        return EXIT_OK if run_all(verbose=True) else EXIT_FAIL
    text = spec.document if isinstance(spec.document, str) else json.dumps(spec.document or {})
    cfg, eff = parse_config(text, spec.command, spec.seed, spec.trials)
    rows = RUNNERS[spec.command](cfg, eff, spec.threads)
    if spec.output_path:
        write_csv(spec.output_path, rows)
        write_sidecar(spec.output_path, spec, eff)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="acops", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON config document (a .meta.json sidecar also works)")
    p.add_argument("--seed", type=int, help=f"RNG seed (default: $ACOPS_SEED or {DEFAULT_SEED})")
    p.add_argument("--trials", type=int, help="Monte Carlo trials (replications for sequential)")
    p.add_argument("--out", help="CSV output path; metadata goes to <out>.meta.json")
    p.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on it")
    p.add_argument("--version", action="version", version=f"acops {__version__}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    except OSError as exc:
        print(f"acops: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.threads < 1:
        print("acops: threads: need >= 1", file=sys.stderr)
        return EXIT_CONFIG
    spec = ExperimentSpec(args.command, args.config, args.seed, args.trials, args.out,
                          args.threads, text)
    try:
        return run_experiment(spec)
    except ConfigError as exc:
        print(f"acops: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"acops: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericError, ArithmeticError, FloatingPointError) as exc:
        print(f"acops: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
