"""Command-line entry point: network/request generation, simulation runs,
training runs, and multi-mode comparison on shared demand.

Exit codes: 0 success, 1 runtime failure, 2 usage error. Verbosity is
controlled by the RIDEPOOL_LOG environment variable (debug/info/warning).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import network as net_mod
from . import simulator as sim_mod
from .core import default_params
from .valuefn import ValueNet

log = logging.getLogger("ridepool")


def _setup_logging() -> None:
    level = os.environ.get("RIDEPOOL_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _read_config_file(path) -> dict:
    """key=value lines; '#' starts a comment; values stay strings."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _apply_config_defaults(args, argv) -> None:
    """Fill flags the user did not pass from the config file (flags win)."""
    if not getattr(args, "config", None):
        return
    file_cfg = _read_config_file(args.config)
    passed = {a.lstrip("-").replace("-", "_").split("=")[0] for a in argv
              if a.startswith("--")}
    casts = {
        "delta": float, "vehicles": int, "capacity": int, "horizon": int,
        "seed": int, "gamma": float, "rate": float, "lr": float,
        "train": lambda v: v.lower() in ("1", "true", "yes"),
        "no_timings": lambda v: v.lower() in ("1", "true", "yes"),
    }
    for key, value in file_cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ValueError(f"config file sets unknown option {key!r}")
        if attr in passed:
            continue
        setattr(args, attr, casts.get(attr, str)(value))


def _load_net(args):
    return net_mod.load_network(args.nodes, args.edges)


def _sim_config(args, mode=None, seed=None, train=None) -> sim_mod.SimConfig:
    return sim_mod.SimConfig(
        params=default_params(args.delta),
        num_vehicles=args.vehicles,
        capacity=args.capacity,
        horizon=args.horizon,
        seed=args.seed if seed is None else seed,
        mode=args.mode if mode is None else mode,
        objective=args.objective,
        gamma=args.gamma,
        train=args.train if train is None else train,
        learning_rate=args.lr,
        record_timings=not args.no_timings,
    )


# -- subcommands -----------------------------------------------------------------


def cmd_gen_network(args) -> int:
    try:
        width, height = (int(p) for p in args.grid.lower().split("x"))
    except ValueError:
        print(f"error: --grid expects WxH, got {args.grid!r}", file=sys.stderr)
        return 2
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    nodes_path = out / "nodes.csv"
    edges_path = out / "edges.csv"
    for p in (nodes_path, edges_path):
        if p.exists() and not args.force:
            print(f"error: {p} exists; pass --force to overwrite", file=sys.stderr)
            return 1
    net = net_mod.generate_grid(width, height, args.edge_m, args.speed)
    net_mod.save_network(net, nodes_path, edges_path)
    print(f"wrote {nodes_path} ({net.num_nodes} nodes) and {edges_path} ({net.num_edges} edges)")
    return 0


def cmd_gen_requests(args) -> int:
    net = _load_net(args)
    hotspots = None
    if args.hotspots:
        hotspots = []
        for spec in args.hotspots.split(";"):
            node, sigma, weight = spec.split(",")
            hotspots.append((int(node), float(sigma), float(weight)))
    stream = sim_mod.gen_requests(net, args.rate, args.horizon, args.seed,
                                  hotspots=hotspots)
    out = Path(args.out)
    if out.exists() and not args.force:
        print(f"error: {out} exists; pass --force to overwrite", file=sys.stderr)
        return 1
    sim_mod.save_requests(stream.requests, out)
    print(f"wrote {out} ({len(stream.requests)} requests over {args.horizon} epochs)")
    return 0


def _run_one(args, cfg, net, requests) -> sim_mod.Metrics:
    value_net = None
    if args.checkpoint:
        value_net = ValueNet.load(args.checkpoint)
    stream = sim_mod.RequestStream(requests=requests, horizon=cfg.horizon)
    return sim_mod.run(cfg, net, stream, value_net=value_net)


def cmd_simulate(args) -> int:
    net = _load_net(args)
    requests = sim_mod.load_requests(args.requests)
    cfg = _sim_config(args)
    metrics = _run_one(args, cfg, net, requests)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sim_mod.write_epoch_csv(metrics, out / "epochs.csv")
    sim_mod.write_summary_json(cfg, metrics, out / "summary.json")
    print(f"served {metrics.served} / {metrics.ingested} "
          f"(rejected {metrics.rejected}), "
          f"avg distance {metrics.avg_distance_per_served_m:.1f} m; "
          f"outputs in {out}")
    return 0


def cmd_train(args) -> int:
    net = _load_net(args)
    requests = sim_mod.load_requests(args.requests)
    cfg = _sim_config(args, train=True)
    if args.checkpoint:
        value_net = ValueNet.load(args.checkpoint)
    else:
        value_net = ValueNet(
            cfg.value_layers, seed=cfg.seed,
            learning_rate=cfg.learning_rate, discount=cfg.gamma,
            target_refresh=cfg.target_refresh,
        )
    stream = sim_mod.RequestStream(requests=requests, horizon=cfg.horizon)
    metrics = sim_mod.run(cfg, net, stream, value_net=value_net)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sim_mod.write_epoch_csv(metrics, out / "epochs.csv")
    sim_mod.write_summary_json(cfg, metrics, out / "summary.json")
    value_net.save(args.save_net)
    print(f"served {metrics.served} / {metrics.ingested}; "
          f"saved network checkpoint to {args.save_net}")
    return 0


def cmd_compare(args) -> int:
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    seeds = [int(s) for s in args.seeds.split(",")]
    horizons = {m: args.horizon for m in modes}
    if args.mode_configs:
        paths = args.mode_configs.split(",")
        if len(paths) != len(modes):
            print("error: --mode-configs must list one file per mode", file=sys.stderr)
            return 2
        for mode, path in zip(modes, paths):
            file_cfg = _read_config_file(path)
            if "horizon" in file_cfg:
                horizons[mode] = int(file_cfg["horizon"])
        if len(set(horizons.values())) > 1:
            print(f"error: mismatched horizons across modes: {horizons}", file=sys.stderr)
            return 2
    net = _load_net(args)

    results = {m: [] for m in modes}
    for seed in seeds:
        stream = sim_mod.gen_requests(net, args.rate, args.horizon, seed)
        for mode in modes:
            cfg = _sim_config(args, mode=mode, seed=seed)
            metrics = sim_mod.run(cfg, net, stream)
            results[mode].append(metrics)

    report = {"seeds": seeds, "modes": {}}
    for mode in modes:
        served = [m.served for m in results[mode]]
        dist = [m.avg_distance_per_served_m for m in results[mode]]
        obj = [sum(r.objective for r in m.epochs) for m in results[mode]]
        report["modes"][mode] = {
            "served_per_seed": served,
            "mean_served": sum(served) / len(served),
            "avg_distance_per_seed_m": dist,
            "mean_avg_distance_m": sum(dist) / len(dist),
            "mean_epoch_objective_total": sum(obj) / len(obj),
        }
    if len(modes) > 1:
        report["improvement_pct"] = {}
        for a in modes:
            for b in modes:
                if a == b:
                    continue
                base = report["modes"][b]["mean_served"]
                if base > 0:
                    gain = 100.0 * (report["modes"][a]["mean_served"] - base) / base
                    report["improvement_pct"][f"{a}_over_{b}_served"] = gain

    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


# -- parser -----------------------------------------------------------------------


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nodes", required=True, help="nodes CSV (id,x,y)")
    p.add_argument("--edges", required=True, help="edges CSV (from,to,length_m,drive_time_s)")
    p.add_argument("--delta", type=float, default=300.0,
                   help="pickup delay budget in seconds (default 300)")
    p.add_argument("--vehicles", type=int, default=1000,
                   help="fleet size (default 1000)")
    p.add_argument("--capacity", type=int, default=4, help="seats per vehicle (default 4)")
    p.add_argument("--horizon", type=int, default=200, help="number of epochs")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--mode", choices=sim_mod.MODES, default="flexible")
    p.add_argument("--objective", choices=("served_count", "neg_travel_time"),
                   default="served_count")
    p.add_argument("--gamma", type=float, default=0.9,
                   help="discount for future value (0 = myopic)")
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--no-timings", action="store_true",
                   help="zero timing columns for byte-reproducible outputs")
    p.add_argument("--config", help="key=value config file; explicit flags win")
    p.add_argument("--checkpoint", help="value-network checkpoint to load")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ridepool",
        description="Ride-pool matching with walkable pickup/drop-off areas",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-network", help="write a synthetic grid network")
    p.add_argument("--grid", required=True, help="dimensions as WxH, e.g. 20x20")
    p.add_argument("--edge-m", type=float, default=100.0, help="edge length in meters")
    p.add_argument("--speed", type=float, default=10.0, help="driving speed in m/s")
    p.add_argument("--out-dir", default=".", help="directory for nodes.csv/edges.csv")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_gen_network)

    p = sub.add_parser("gen-requests", help="write a synthetic request stream")
    p.add_argument("--nodes", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--rate", type=float, default=30.0, help="mean requests per epoch")
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--hotspots", help="semicolon-separated node,sigma_m,weight triples")
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_gen_requests)

    p = sub.add_parser("simulate", help="run one simulation")
    _add_sim_flags(p)
    p.add_argument("--requests", required=True, help="requests CSV")
    p.add_argument("--train", action="store_true", help="update the value network online")
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="run a training simulation and save the network")
    _add_sim_flags(p)
    p.add_argument("--requests", required=True)
    p.add_argument("--out-dir", default="out")
    p.add_argument("--save-net", required=True, help="checkpoint output path (.npz)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compare", help="run several modes on identical demand")
    _add_sim_flags(p)
    p.add_argument("--modes", default="fixed,flexible", help="comma-separated mode list")
    p.add_argument("--seeds", default="1", help="comma-separated seed list")
    p.add_argument("--rate", type=float, default=30.0)
    p.add_argument("--mode-configs", help="comma-separated config file per mode")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    try:
        _apply_config_defaults(args, argv)
        if not hasattr(args, "train"):
            args.train = False
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
