#!/usr/bin/env python3
"""
Splitting Lab
Exact separatrix series of the discretized pendulum, its splitting constant,
and the measured splitting of the invariant manifolds
"""
import argparse
import logging
import math
import os
import sys
from itertools import accumulate
from typing import List, Optional, TextIO

# Add current directory to path for imports
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import structlog  # noqa: E402
from mpmath import mp  # noqa: E402

from algebra.tau_basis import DEFAULT_NORM_BITS  # noqa: E402
from artifacts.serialization import (  # noqa: E402
    artifact_name, constants_document, dumps, report_csv, report_document, series_document, write_artifact,
)
from errors import ConfigError, SplittingLabError  # noqa: E402
from models.config import RunConfig, default_bits  # noqa: E402
from series.constants import gevrey_profile  # noqa: E402
from services.splitting_service import REFERENCE_ALPHA, SplittingLabService  # noqa: E402

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VALIDATION = 2

BAR = "=" * 60


def configure_logging(verbose: bool = False) -> None:
    """Key/value log lines on stderr; stdout carries only tables and artifacts"""
    level = logging.DEBUG if verbose else logging.INFO
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


class SplittingLabCLI:
    """
    One command run against a SplittingLabService
    Renders text tables the way a benchmark report would, or emits artifacts
    """

    def __init__(self, config: RunConfig, out: Optional[TextIO] = None):
        self.config = config
        self.service = SplittingLabService(config)
        self.out = out or sys.stdout

    def run(self) -> int:
        handler = getattr(self, f"cmd_{self.config.command}")
        status = handler()
        if self.config.format == "text":
            self.print_stats()
        return status

    def echo(self, text: str = "") -> None:
        print(text, file=self.out)

    def emit(self, text: str, name: Optional[str] = None) -> None:
        """Artifact text to --out (a file, or a directory when name is given) or stdout"""
        if self.config.output_path is None:
            self.out.write(text)
            return
        path = os.path.join(self.config.output_path, name) if name else self.config.output_path
        write_artifact(path, text)

    def header(self, title: str) -> None:
        self.echo(BAR)
        self.echo(title)
        self.echo(BAR)

    # Commands

    def cmd_series(self) -> int:
        sol = self.service.run_series()
        if self.config.format == "json" or self.config.output_path is not None:
            self.emit(dumps(series_document(sol)))
        if self.config.format != "text":
            return EXIT_OK

        self.header(f"📐 FORMAL SEPARATRIX SERIES (order {sol.order})")
        self.echo("A(d, u) = Σ A_{2n-1}(u) d^(2n)")
        self.echo()
        for k, p in enumerate(sol.odd_polys):
            self.echo(f"A_{2 * k + 1} = {p}")
        self.echo()
        self.echo("📈 GEVREY PROFILE  g_n = ||A_n||_n (2pi)^n / n!")
        self.echo(f"{'n':>4}  {'g_n':>16}  {'running max':>16}")
        profile = gevrey_profile(sol.A)
        with mp.workprec(DEFAULT_NORM_BITS):
            for n, (g, top) in enumerate(zip(profile, accumulate(profile, max))):
                if g != 0:
                    self.echo(f"{n:>4}  {mp.nstr(g, 8):>16}  {mp.nstr(top, 8):>16}")
        self.echo(BAR)
        return EXIT_OK

    def cmd_alpha(self) -> int:
        sol, est = self.service.run_alpha()
        if self.config.format == "json" or self.config.output_path is not None:
            self.emit(dumps(constants_document(sol.order, est)))
        if self.config.format != "text":
            return EXIT_OK

        with mp.workprec(est.precision):
            self.header(f"🔬 SPLITTING CONSTANTS (series order {sol.order}, J to d^{sol.J.order})")
            self.echo(f"alpha        = {mp.nstr(est.alpha.value, 12)}  ± {mp.nstr(est.alpha.error, 3)}")
            self.echo(f"beta         = {mp.nstr(est.beta.value, 12)}  ± {mp.nstr(est.beta.error, 3)}")
            self.echo(f"gamma        = {mp.nstr(est.gamma.value, 12)}  ± {mp.nstr(est.gamma.error, 3)}")
            if est.alpha_direct is not None:
                self.echo(f"alpha direct = {mp.nstr(est.alpha_direct.value, 12)}  "
                          f"± {mp.nstr(est.alpha_direct.error, 3)}")
            self.echo(f"4 pi alpha   = {mp.nstr(4 * mp.pi * est.alpha.value, 12)}")
            self.echo(f"reference    = {mp.nstr(REFERENCE_ALPHA, 9)}")
            self.echo()
            self.echo("📉 DECAY PROFILE")
            self.echo(f"{'n':>4}  {'alpha_n':>24}  {'|alpha_n| n^7':>16}")
            profile = est.decay_profile()
            for n, a in est.alpha_seq.items():
                self.echo(f"{n:>4}  {mp.nstr(a, 15):>24}  {mp.nstr(profile[n], 8):>16}")
            self.echo(BAR)
        return EXIT_OK

    def cmd_tau(self) -> int:
        basis = self.service.run_tau()
        self.header(f"🧮 TAU BASIS (n <= {len(basis) - 1})")
        for n, p in enumerate(basis):
            self.echo(f"tau_{n} = {p}")
            if n >= 1:
                # tau_n(tanh z) (n-1)! is the (n-1)-st derivative of tanh
                self.echo(f"  (n-1)! tau_{n} = {p.scale(math.factorial(n - 1))}")
        self.echo(BAR)
        return EXIT_OK

    def cmd_splitting(self) -> int:
        entries = self.service.run_splitting()
        for entry in entries:
            if 'error' in entry:
                continue
            report, eps = entry['report'], entry['epsilon']
            if self.config.output_path is not None:
                self.emit(dumps(report_document(report)), artifact_name(eps, "json"))
                self.emit(report_csv(report), artifact_name(eps, "csv"))
            elif self.config.format == "json":
                self.emit(dumps(report_document(report), compact=True))
            elif self.config.format == "csv":
                self.emit(report_csv(report) + "\n")

        if self.config.format == "text":
            self.print_splitting(entries)
        return EXIT_OK

    def cmd_compare(self) -> int:
        result = self.service.compare()
        self.header("⚖️  IMPLIED ALPHA VS SERIES ALPHA")
        self.echo(f"series alpha    = {mp.nstr(result['series_alpha'], 12)}  "
                  f"± {mp.nstr(result['series_alpha_error'], 3)}")
        self.echo(f"reference alpha = {mp.nstr(result['reference_alpha'], 9)}")
        self.echo()
        self.echo(f"{'epsilon':>8}  {'implied (eps)':>16}  {'implied (d)':>16}  {'gap (eps)':>10}  "
                  f"{'gap (d)':>10}  {'law ratio':>10}  {'max|Δ| ratio':>12}")
        for row in result['rows']:
            if 'error' in row:
                self.echo(f"{row['epsilon']:>8}  ❌ {row['error']}")
                continue
            flag = "  ⚠️" if row['degraded'] else ""
            ratios = f"{mp.nstr(row['law_ratio'], 6):>10}  {mp.nstr(row['scale_ratio'], 6):>12}"
            self.echo(f"{row['epsilon']:>8}  {mp.nstr(row['implied_alpha_eps'], 10):>16}  "
                      f"{mp.nstr(row['implied_alpha_d'], 10):>16}  {mp.nstr(row['relative_gap'], 4):>10}  "
                      f"{mp.nstr(row['relative_gap_d'], 4):>10}  {ratios}{flag}")
        self.echo()
        self.echo(f"Verdict: {result['verdict']}")
        self.echo(BAR)
        return EXIT_OK

    def cmd_validate(self) -> int:
        checks = self.service.validate()
        self.header("🧪 INVARIANT SUITE")
        for check in checks:
            mark = "✅" if check.passed else "❌"
            self.echo(f"{mark} {check.name:<28} {check.elapsed_ms:>9.1f} ms  {check.detail}")
        failed = [c.name for c in checks if not c.passed]
        self.echo(BAR)
        self.echo(f"{len(checks) - len(failed)}/{len(checks)} properties hold")
        return EXIT_VALIDATION if failed else EXIT_OK

    # Rendering

    def print_splitting(self, entries: List[dict]) -> None:
        self.header("🌊 MANIFOLD SPLITTING")
        for entry in entries:
            if 'error' in entry:
                self.echo(f"❌ eps={entry['epsilon']}: {entry['error']}")
                continue
            r = entry['report']
            with mp.workprec(r.bits):
                self.echo(f"eps = {entry['epsilon']}  (d = {mp.nstr(r.d, 10)}, {r.bits} bits)")
                self.echo(f"  amplitude C      = {mp.nstr(r.fitted_amplitude, 10)}")
                self.echo(f"  phase            = {mp.nstr(r.fitted_phase, 6)}")
                self.echo(f"  implied alpha    = {mp.nstr(r.implied_alpha_eps, 10)} (e^-pi^2/eps), "
                          f"{mp.nstr(r.implied_alpha_d, 10)} (e^-pi^2/d)")
                if r.zero_spacing is not None:
                    self.echo(f"  zero spacing     = {mp.nstr(r.zero_spacing, 8)} (eps/2 = {mp.nstr(r.epsilon / 2, 8)})")
                if r.crossing_q is not None:
                    self.echo(f"  crossing q - pi  = {mp.nstr(r.crossing_q - mp.pi, 6)}")
                for warning in r.warnings:
                    self.echo(f"  ⚠️  {warning}")
        self.echo(BAR)

    def print_stats(self) -> None:
        stats = self.service.get_service_stats()
        metrics = stats['service_metrics']
        self.echo()
        self.echo("⏱️  TIMING METRICS")
        for stage, ms in metrics['stage_ms'].items():
            self.echo(f"{stage}: {ms:.1f} ms")
        self.echo()
        self.echo("💾 CACHE METRICS")
        for cache in stats['cache_stats']:
            hit_rate = cache.get('hit_rate')
            rate = f", hit rate {hit_rate * 100:.1f}%" if hit_rate is not None else ""
            self.echo(f"{cache['name']}: size {cache['size']}{rate}")


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors reported as ConfigError"""

    def error(self, message: str):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--order', type=int, default=40, help='Series order (even, >= 8)')
    common.add_argument('--bits', type=int, default=None, help='Working precision in bits')
    common.add_argument('--eps', action='append', default=[], help='Step size; repeat for several values')
    common.add_argument('--manifold-order', type=int, default=40, help='Taylor order of the manifold parameterization')
    common.add_argument('--out', default=None, help='Artifact file, or directory for splitting artifacts')
    common.add_argument('--format', choices=['csv', 'json', 'text'], default='text', help='Output format')
    common.add_argument('--workers', type=int, default=1, help='Processes for independent epsilon values')
    common.add_argument('--verbose', action='store_true', help='Debug logging')

    parser = _Parser(description='Separatrix splitting of the discretized pendulum')
    commands = parser.add_subparsers(dest='command', required=True)
    commands.add_parser('series', parents=[common], help='Exact formal separatrix series')
    commands.add_parser('alpha', parents=[common], help='Splitting constants from the series')
    commands.add_parser('tau', parents=[common], help='Print the tau basis')
    commands.add_parser('splitting', parents=[common], help='Measure the manifold splitting')
    commands.add_parser('compare', parents=[common], help='Implied alpha against the series alpha')
    commands.add_parser('validate', parents=[common], help='Run the invariant suite')
    return parser


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    """
    Raises:
        ConfigError: bad flags, bad SPLITTING_LAB_BITS or a config invariant violated
    """
    args = build_parser().parse_args(argv)
    return RunConfig.build(
        command=args.command,
        series_order=args.order,
        precision_bits=args.bits if args.bits is not None else default_bits(),
        epsilon_list=args.eps,
        manifold_order=args.manifold_order,
        output_path=args.out,
        format=args.format,
        workers=args.workers,
        verbose=args.verbose,
    )


def main(argv: Optional[List[str]] = None, out: Optional[TextIO] = None) -> int:
    """Main application entry point"""
    try:
        config = parse_config(argv)
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_CONFIG

    configure_logging(config.verbose)
    try:
        return SplittingLabCLI(config, out).run()
    except SplittingLabError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
