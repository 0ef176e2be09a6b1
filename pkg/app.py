#!/usr/bin/env python3
"""
Command-line entry point.

    python app.py eval --space A.json --op T1.json --quantity numrad
    python app.py adjoint --space A.json --op T.json
    python app.py certify --samples 200 --seed 42 --out reports
    python app.py search --check INEQ-00-upper --budget 64 --out reports

Result documents go to stdout as JSON, diagnostics to stderr. The exit
status is 0 on success, the error's code otherwise (1 parse, 2 math
precondition, 3 parameter, 4 report I/O) and 5 when certify finds
violation candidates.
"""

import argparse
import json
import logging
import sys
from typing import Dict, List, Optional

from api.adjoint.route import handle_adjoint
from api.certify.route import handle_certify
from api.evaluate.route import QUANTITIES, handle_evaluate
from api.search.route import handle_search
from semihilbert_radius.config import LOG_LEVEL, REPORT_DIR


def _common(parser: argparse.ArgumentParser):
    parser.add_argument('--rank-tol', type=float, default=None, help='relative eigenvalue cutoff for range(A)')
    parser.add_argument('--log-level', default=LOG_LEVEL, help='DEBUG, INFO, WARNING or ERROR')


def _ranges(parser: argparse.ArgumentParser, dim_max: int, n_max: int):
    parser.add_argument('--dim-min', type=int, default=2)
    parser.add_argument('--dim-max', type=int, default=dim_max)
    parser.add_argument('--n-min', type=int, default=1)
    parser.add_argument('--n-max', type=int, default=n_max)
    parser.add_argument('--seed', type=int, default=None)
    parser.add_argument('--ensemble', action='append', default=None, help='restrict to an ensemble (repeatable)')
    parser.add_argument('--opt-starts', type=int, default=None, help='random starts of the sphere optimizer')
    parser.add_argument('--out', default=REPORT_DIR, help='output directory')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='semihilbert-radius',
                                     description='Norms and radii of operator tuples on semi-Hilbert spaces')
    commands = parser.add_subparsers(dest='command', required=True)

    ev = commands.add_parser('eval', help='evaluate a quantity on MatrixFile inputs')
    ev.add_argument('--space', required=True, help='MatrixFile of the weight A')
    ev.add_argument('--op', action='append', required=True, help='MatrixFile of T_k (repeatable, in order)')
    ev.add_argument('--quantity', required=True, help=', '.join(QUANTITIES))
    ev.add_argument('--alpha', type=float, default=None)
    ev.add_argument('--beta', type=float, default=None)
    _common(ev)

    adj = commands.add_parser('adjoint', help='print T#, the reduced operator and the flags')
    adj.add_argument('--space', required=True)
    adj.add_argument('--op', required=True)
    _common(adj)

    cert = commands.add_parser('certify', help='run the inequality registry over random ensembles')
    cert.add_argument('--samples', type=int, default=None, help='instances per ensemble')
    cert.add_argument('--check', action='append', default=None, help='check id or family (repeatable)')
    cert.add_argument('--opt-max-iter', type=int, default=None)
    cert.add_argument('--budget', dest='opt_starts', type=int, default=None,
                      help='optimizer starts per quantity, same as --opt-starts')
    cert.add_argument('--slack-scale', type=float, default=None)
    _ranges(cert, dim_max=6, n_max=3)
    _common(cert)

    search = commands.add_parser('search', help='search for a tight instance of one check')
    search.add_argument('--check', required=True, help='atomic check id')
    search.add_argument('--budget', type=int, default=None, help='random instances to try')
    search.add_argument('--climb-steps', type=int, default=None, help='hill-climbing steps on the best instance')
    search.add_argument('--alpha', type=float, default=None)
    search.add_argument('--beta', type=float, default=None)
    _ranges(search, dim_max=4, n_max=2)
    _common(search)
    return parser


def _range_request(args) -> Dict:
    return {
        'dim_min': args.dim_min,
        'dim_max': args.dim_max,
        'n_min': args.n_min,
        'n_max': args.n_max,
        'seed': args.seed,
        'rank_tol': args.rank_tol,
        'ensembles': args.ensemble,
        'opt_starts': args.opt_starts,
        'out': args.out,
    }


def dispatch(args) -> Dict:
    if args.command == 'eval':
        return handle_evaluate({
            'space': args.space,
            'ops': args.op,
            'quantity': args.quantity,
            'alpha': args.alpha,
            'beta': args.beta,
            **({'rank_tol': args.rank_tol} if args.rank_tol is not None else {}),
        })
    if args.command == 'adjoint':
        return handle_adjoint({
            'space': args.space,
            'op': args.op,
            **({'rank_tol': args.rank_tol} if args.rank_tol is not None else {}),
        })
    if args.command == 'certify':
        return handle_certify(dict(_range_request(args), samples=args.samples, checks=args.check,
                                   opt_max_iter=args.opt_max_iter, slack_scale=args.slack_scale))
    return handle_search(dict(_range_request(args), check=args.check, budget=args.budget,
                              climb_steps=args.climb_steps, alpha=args.alpha, beta=args.beta))


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    response = dispatch(args)
    if not response.get('success'):
        print(json.dumps({'error': response['error'], 'status': response['status']}, indent=2))
        return response['status']

    data = response['data']
    if args.command == 'certify':
        print(data.pop('summary'), file=sys.stderr)
    print(json.dumps(data, indent=2))
    return response.get('status', 0)


if __name__ == "__main__":
    sys.exit(main())
