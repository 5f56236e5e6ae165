"""
rank2sim - command-line entry point.

Subcommands:
    sample-graph   sample one graph, write edges.csv / components.csv
    explore        build one exploration, dump its paths, report the first excursion
    limit          simulate replicas of the regime limit, write zeta.csv
    convert        sbm | biper parameter conversion to a ModelSpec document
    experiment     run the n-ladder experiment of a config file
    residuals      finite-n weight and kernel residuals along the ladder

Exit status 2 on invalid input or a failed rung; 1 when an experiment runs but its tests do not pass.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from rank2sim import io
from rank2sim.config import ExperimentConfig, Settings, load_config, parse_seed
from rank2sim.errors import ConfigError, ExperimentError, Rank2SimError
from rank2sim.exploration import build_exploration, build_exploration_bp, first_excursion_mass
from rank2sim.graphgen import components, sample_graph
from rank2sim.harness import (
    Stream,
    convergence_residuals,
    limit_pairs,
    replica_rng,
    run_regime_experiment,
    rung_limit,
    slope_diagnostic,
)
from rank2sim.levy import limit_interacting, simulate_W
from rank2sim.params import (
    BipartiteRegime,
    InteractingParams,
    LimitTriple,
    ModelSpec,
    bip_er_limit,
    bip_er_to_rank2,
    sbm_limit_constants,
    sbm_to_rank2,
)

log = logging.getLogger('rank2sim')
console = Console()


# =============================================================================
# ARGUMENT HELPERS
# =============================================================================

def _floats(text: str, count: int) -> list[float]:
    try:
        values = [float(x) for x in text.split(',')]
    except ValueError:
        raise ConfigError(f'expected {count} comma-separated numbers, got {text!r}') from None
    if len(values) != count:
        raise ConfigError(f'expected {count} comma-separated numbers, got {text!r}')
    return values


def _matrix(text: str) -> list[list[float]]:
    a, b, c, d = _floats(text, 4)
    return [[a, b], [c, d]]


def _seed(args, fallback: int) -> int:
    return parse_seed(args.seed) if args.seed is not None else fallback


def _overrides(args) -> dict:
    return {
        'seed': parse_seed(args.seed) if args.seed is not None else None,
        'limit.replicas' if args.command == 'limit' else 'replicas': getattr(args, 'replicas', None),
        'threads': args.threads,
        'limit.h': args.grid_step,
        'limit.T': args.horizon,
    }


def _config(args) -> ExperimentConfig:
    if args.config is None:
        raise ConfigError(f'{args.command} needs --config')
    return load_config(args.config, _overrides(args))


def _spec(args, settings: Settings) -> tuple[ModelSpec, int]:
    """The spec of --spec, or the rung --n (default: largest) of --config; with its seed."""
    if args.spec is not None:
        return io.read_spec(args.spec), _seed(args, settings.seed)
    cfg = _config(args)
    n = args.n if args.n is not None else max(cfg.n_ladder)
    return cfg.source.build(n), cfg.seed


def _out(args, settings: Settings) -> Path:
    return Path(args.out) if args.out is not None else settings.out_dir


def _table(title: str, columns: list[str], rows) -> Table:
    table = Table(title=title)
    for col in columns:
        table.add_column(col, justify='right')
    for row in rows:
        table.add_row(*(f'{v:.6g}' if isinstance(v, float) else str(v) for v in row))
    return table


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_sample_graph(args, settings: Settings) -> int:
    spec, seed = _spec(args, settings)
    g = sample_graph(spec, np.random.default_rng(seed))
    masses = components(g)
    out = _out(args, settings)
    io.write_csv(out / 'edges.csv', io.edges_frame(g))
    io.write_csv(out / 'components.csv', io.components_frame(masses))
    top = masses.masses[:args.top]
    console.print(_table(f'{g.n_edges} edges, {len(masses)} components',
                         ['rank', 'mass1', 'mass2'],
                         [(i + 1, float(m1), float(m2)) for i, (m1, m2) in enumerate(top)]))
    return 0


def cmd_explore(args, settings: Settings) -> int:
    spec, seed = _spec(args, settings)
    rng = np.random.default_rng(seed)
    bundle = build_exploration_bp(spec, rng) if args.bipartite else build_exploration(spec, rng)
    out = _out(args, settings) / 'paths'
    for name in ('N1', 'N2', 'X11', 'X12', 'X21', 'X22', 'U2X21', 'V'):
        io.write_path(out / f'{name}.csv', getattr(bundle, name))
    mass = first_excursion_mass(bundle)
    rows = [('horizon', bundle.horizon)]
    if mass is not None:
        rows += [('first excursion mass1', float(mass[0])), ('first excursion mass2', float(mass[1]))]
    console.print(_table('exploration', ['quantity', 'value'], rows))
    return 0


def cmd_limit(args, settings: Settings) -> int:
    cfg = _config(args)
    spec = cfg.source.build(max(cfg.n_ladder))
    limit = rung_limit(cfg, spec, limit_pairs(cfg, spec))
    out = _out(args, settings)
    samples = []
    for replica in range(cfg.limit.replicas):
        rng = replica_rng(cfg.seed, 0, replica, Stream.LIMIT)
        if replica < args.dump_paths:
            if isinstance(limit.params, InteractingParams):
                path = limit_interacting(limit.params, cfg.limit.h, cfg.limit.T, rng, cfg.limit.max_doublings)
            else:
                triple = limit.params if isinstance(limit.params, LimitTriple) else limit.params.triple
                path = simulate_W(triple, cfg.limit.h, cfg.limit.T, rng).path
            io.write_path(out / 'paths' / f'limit_{replica}.csv', path)
            rng = replica_rng(cfg.seed, 0, replica, Stream.LIMIT)
        samples.append(limit.sample(rng, cfg.limit))
    io.write_csv(out / 'zeta.csv', io.zeta_frame((i, z.lengths) for i, z in enumerate(samples)))
    k = cfg.statistics.top_k
    tops = np.stack([z.top(k) for z in samples])
    console.print(_table(f'{limit.kind} limit, {len(samples)} replicas', ['rank', 'mean', 'sd'],
                         [(j + 1, float(tops[:, j].mean()), float(tops[:, j].std())) for j in range(k)]))
    return 0


def cmd_convert(args, settings: Settings) -> int:
    if args.model == 'sbm':
        k_tilde, a_tilde = _matrix(args.k_tilde), _matrix(args.a_tilde)
        mu, b = _floats(args.mu, 2), _floats(args.b, 2)
        spec = sbm_to_rank2(args.n1, args.n2, k_tilde, a_tilde, mu, b)
        extra = sbm_limit_constants(k_tilde, a_tilde, mu, b)
    else:
        spec = bip_er_to_rank2(args.n, args.m, args.lambda12, args.regime, args.theta)
        extra = {'limit': bip_er_limit(args.n, args.m, args.lambda12, args.regime, args.theta).as_dict()}
    out = _out(args, settings)
    io.write_spec(out / 'spec.json', spec)
    io.write_json(out / 'limit.json', extra)
    console.print(_table(f'{args.model} -> rank 2', ['entry', 'value'],
                         [(f'q{i + 1}{j + 1}', float(spec.Q[i, j])) for i in range(2) for j in range(i, 2)]
                         + [('c_n', spec.c_n)]))
    return 0


def cmd_experiment(args, settings: Settings) -> int:
    cfg = _config(args)
    out = _out(args, settings)
    report = run_regime_experiment(cfg, out)
    rows = []
    for rung in report.rungs:
        for test in rung.tests:
            rows.append((rung.n, test.rank, test.ks_statistic, test.ks_pvalue, test.wasserstein1,
                         'pass' if test.passed else 'fail'))
    console.print(_table(f'{cfg.regime} experiment', ['n', 'rank', 'KS', 'p-value', 'W1', ''], rows))
    if args.slope:
        slope = slope_diagnostic(cfg)
        io.write_json(out / 'slope.json', slope.model_dump(mode='json'))
        console.print(_table('slope', ['predicted', 'mean', 'sd', 'rel. error'],
                             [(slope.predicted, slope.mean, slope.sd, slope.relative_error)]))
    console.print(f'pass fraction {report.pass_fraction:.3f}: {"passed" if report.passed else "failed"}')
    return 0 if report.passed else 1


def cmd_residuals(args, settings: Settings) -> int:
    cfg = _config(args)
    frame = convergence_residuals(cfg.source.build, cfg.n_ladder)
    io.write_csv(_out(args, settings) / 'residuals.csv', frame)
    cols = ['n', 'type', 'sigma2', 'beta_ratio', 'theta1', 'kernel_residual']
    console.print(_table('residuals', cols, frame[cols].itertuples(index=False)))
    return 0


# =============================================================================
# PARSER
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='experiment config (JSON)')
    common.add_argument('--seed', help='unsigned 64-bit seed')
    common.add_argument('--out', help='output directory')
    common.add_argument('--threads', type=int, help='worker threads')
    common.add_argument('--grid-step', type=float, help='limit grid step h')
    common.add_argument('--horizon', type=float, help='limit horizon T')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true')
    verbosity.add_argument('-q', '--quiet', action='store_true')

    parser = argparse.ArgumentParser(prog='rank2sim', description='Rank-2 multiplicative random graph simulation')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('sample-graph', parents=[common], help='sample one graph')
    p.add_argument('--spec', help='ModelSpec document (JSON)')
    p.add_argument('--n', type=int, help='rung of --config (default: largest)')
    p.add_argument('--top', type=int, default=10, help='components shown')
    p.set_defaults(func=cmd_sample_graph)

    p = sub.add_parser('explore', parents=[common], help='build one exploration')
    p.add_argument('--spec', help='ModelSpec document (JSON)')
    p.add_argument('--n', type=int, help='rung of --config (default: largest)')
    p.add_argument('--bipartite', action='store_true', help='use the reparametrised bipartite exploration')
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser('limit', parents=[common], help='simulate the regime limit')
    p.add_argument('--replicas', type=int, help='limit replicas')
    p.add_argument('--dump-paths', type=int, default=0, help='write the first N limit paths')
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser('convert', help='convert SBM / bipartite ER parameters')
    models = p.add_subparsers(dest='model', required=True)
    s = models.add_parser('sbm', parents=[common])
    s.add_argument('--n1', type=int, required=True)
    s.add_argument('--n2', type=int, required=True)
    s.add_argument('--k-tilde', required=True, help='k11,k12,k21,k22')
    s.add_argument('--a-tilde', default='0,0,0,0', help='a11,a12,a21,a22')
    s.add_argument('--mu', required=True, help='mu1,mu2')
    s.add_argument('--b', default='0,0', help='b1,b2')
    s.set_defaults(func=cmd_convert)
    s = models.add_parser('biper', parents=[common])
    s.add_argument('--n', type=int, required=True)
    s.add_argument('--m', type=int, required=True)
    s.add_argument('--lambda12', type=float, required=True)
    s.add_argument('--regime', choices=[r.value for r in BipartiteRegime], default='light')
    s.add_argument('--theta', type=float)
    s.set_defaults(func=cmd_convert)

    p = sub.add_parser('experiment', parents=[common], help='run a regime experiment')
    p.add_argument('--replicas', type=int, help='graph replicas per rung')
    p.add_argument('--slope', action='store_true', help='also run the slope diagnostic')
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser('residuals', parents=[common], help='finite-n residual table')
    p.set_defaults(func=cmd_residuals)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s %(message)s')
    try:
        settings = Settings.from_env()
        return args.func(args, settings)
    except ExperimentError as exc:
        where = f' (partial report: {exc.partial_report})' if exc.partial_report else ''
        print(f'rank2sim: {exc}{where}', file=sys.stderr)
        return 2
    except (Rank2SimError, ValidationError) as exc:
        print(f'rank2sim: {str(exc).splitlines()[0]}', file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
