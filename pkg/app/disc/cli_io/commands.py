"""Command-line dispatch for every library operation."""
import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import yaml
from prettytable import PrettyTable

from disc.cli_io.profile import EXPRESSIONS, emit_profile
from disc.cli_io.random_scenes import random_scene
from disc.cli_io.scene_file import dump_scene, load_scene, parse_scene
from disc.demailly import (demailly_bounds, demailly_bruteforce, demailly_exact_single_pole, multiplier_exponents,
                           single_pole, subadditivity_check)
from disc.disc_model import TreePoint, collect_tree_violations, coords
from disc.divisor import log_norm_eval, pl_divisor_laplacian
from disc.extension import Certificate, certificate_slack, extend, verify_certificate
from disc.norms import h_generator, h_membership, integrability_threshold, max_admissible_eps, plus_norm, sup_norm
from disc.potential import below_mass, eval_qsh, gamma_tree, laplacian, regularize_seq, validate_qsh
from disc.rationals import ExtendedRational, to_fraction
from util.common_util import init_logger
from util.conf import DISC_SETTINGS, SCENE_FORMATS, TOOLKIT_VERSION
from util.exceptions import DiscError, UsageError, ValidationException

log = init_logger(__name__)

COMMANDS = ('validate', 'eval', 'laplacian', 'gamma', 'norm', 'plus-norm', 'hgen', 'extend', 'verify',
            'demailly-bounds', 'demailly-exact', 'multiplier', 'subadd', 'regularize', 'profile', 'generate',
            'bruteforce')


def render(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (Fraction, ExtendedRational)):
        return str(ExtendedRational(value))
    return str(value)


def rational_arg(text):
    try:
        return to_fraction(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"[{text}] is not a rational; write it as p/q")


def order_arg(text):
    if text.strip().lower() == 'inf':
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"[{text}] is neither a positive integer nor inf")
    if value < 1:
        raise argparse.ArgumentTypeError(f"[{text}] is not a positive integer")
    return value


class CommandOutput:
    """Scalar results printed as one ``key = value`` line, followed by tables; or a single JSON object."""

    def __init__(self, as_json=False):
        self.as_json = as_json
        self.pairs = {}
        self.tables = {}

    def add(self, key, value):
        self.pairs[key] = value

    def add_table(self, name, head, rows):
        self.tables[name] = (head, [list(row) for row in rows])

    def emit(self, stream=None):
        stream = stream or sys.stdout
        if self.as_json:
            document = {key: value if isinstance(value, (bool, int)) and not isinstance(value, Fraction)
                        else render(value) for key, value in self.pairs.items()}
            for name, (head, rows) in self.tables.items():
                document[name] = [dict(zip(head, [render(cell) for cell in row])) for row in rows]
            print(json.dumps(document), file=stream)
            return
        if self.pairs:
            print(", ".join(f"{key} = {render(value)}" for key, value in self.pairs.items()), file=stream)
        for name, (head, rows) in self.tables.items():
            table = PrettyTable(head)
            table.add_rows([[render(cell) for cell in row] for row in rows])
            print(table, file=stream)


class DiscCommand:

    def __init__(self, argv):
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('scene', type=str, help='scene file (yml or JSON)')
        common.add_argument('--json', action='store_true', help='print a single JSON object')
        common.add_argument('--verbose', action='store_true', help='log command dispatch and extension steps')

        parser = argparse.ArgumentParser(prog='disc_cli', description='Exact computations on the Berkovich disc')
        parser.add_argument('--version', action='version', version=TOOLKIT_VERSION)
        commands = parser.add_subparsers(dest='command', metavar='command')
        commands.required = True

        def command(name, help_text, with_scene=True):
            return commands.add_parser(name, help=help_text, parents=[common] if with_scene else [])

        command('validate', 'check tree invariants and every function')
        sub = command('eval', 'evaluate a function or log|f| at points')
        self._function_args(sub, phi=False)
        sub.add_argument('--f', type=str, help='polynomial name')
        self._point_args(sub)
        sub = command('laplacian', 'atoms of the Laplacian')
        self._function_args(sub, phi=False)
        sub.add_argument('--f', type=str, help='polynomial name')
        sub = command('gamma', 'the tree Gamma_{phi,n}')
        self._function_args(sub)
        sub.add_argument('--n', type=order_arg, default=None, help='positive integer or inf (default inf)')
        sub = command('norm', 'twisted sup-norm of f')
        self._function_args(sub, with_f=True)
        sub.add_argument('--eps', type=rational_arg, default=Fraction(0), help='eps >= 0 as p/q')
        sub = command('plus-norm', 'limit norm of f')
        self._function_args(sub, with_f=True)
        sub = command('hgen', 'generator of the ideal H_phi')
        self._function_args(sub)
        sub.add_argument('--f', type=str, help='also test membership of this polynomial')
        sub = command('extend', 'extension certificate at z')
        self._function_args(sub)
        sub.add_argument('--z', type=str, required=True, help='node:<id> or edge:<id>:<p/q>')
        sub.add_argument('--target-log', type=rational_arg, default=None, help='prescribed log|f(z)|')
        sub = command('verify', 'verify a certificate (f, eps0) at z')
        self._function_args(sub, with_f=True)
        sub.add_argument('--z', type=str, required=True, help='node:<id> or edge:<id>:<p/q>')
        sub.add_argument('--eps', type=rational_arg, required=True, help='eps0 as p/q')
        sub = command('demailly-bounds', 'certified bounds for phi_m')
        self._function_args(sub)
        sub.add_argument('--m', type=int, required=True)
        self._point_args(sub)
        sub = command('demailly-exact', 'exact phi_m for a single pole')
        self._function_args(sub)
        sub.add_argument('--m', type=int, required=True)
        sub = command('multiplier', 'Lelong numbers and multiplier exponents')
        self._function_args(sub)
        sub = command('subadd', 'subadditivity of multiplier exponents')
        self._function_args(sub)
        sub.add_argument('--psi', type=str, required=True, help='second function name')
        sub = command('regularize', 'retraction regularization phi_n')
        self._function_args(sub)
        sub.add_argument('--n', type=order_arg, required=True)
        sub = command('profile', 'breakpoint table along a root path')
        sub.add_argument('--expr', choices=EXPRESSIONS, required=True)
        sub.add_argument('--phi', type=str)
        sub.add_argument('--f', type=str)
        sub.add_argument('--eps', type=rational_arg, default=Fraction(0))
        sub.add_argument('--to', type=str, required=True, help='endpoint node:<id> or edge:<id>:<p/q>')
        sub.add_argument('--csv', type=str, help='also write the table as CSV')
        sub = command('bruteforce', 'brute-force lower bound for phi_m')
        self._function_args(sub)
        sub.add_argument('--m', type=int, required=True)
        sub.add_argument('--degree', type=int, default=None, help='total degree bound')
        sub.add_argument('--interpolate', action='store_true', help='add rigid points at T2/T3 nodes and midpoints')
        self._point_args(sub)
        sub = command('generate', 'write a seeded random scene', with_scene=False)
        sub.add_argument('--out', type=str, required=True, help='output scene file')
        sub.add_argument('--seed', type=int, default=None)
        sub.add_argument('--max-nodes', type=int, default=None)
        sub.add_argument('--no-multiplicity', action='store_true')
        sub.add_argument('--format', choices=SCENE_FORMATS, default=None)
        sub.add_argument('--json', action='store_true', help='print a single JSON object')
        sub.add_argument('--verbose', action='store_true')

        self.args = parser.parse_args(argv)
        self.output = CommandOutput(as_json=self.args.json)
        self.scene = None

    @staticmethod
    def _function_args(parser, phi=True, with_f=False):
        parser.add_argument('--phi', type=str, required=phi, help='function name')
        if with_f:
            parser.add_argument('--f', type=str, required=True, help='polynomial name')

    @staticmethod
    def _point_args(parser):
        parser.add_argument('--at', type=str, action='append', default=None,
                            help='point node:<id> or edge:<id>:<p/q>; repeatable, defaults to the scene queries')

    def point(self, text) -> TreePoint:
        return self.scene.tree.locate(TreePoint.parse(text))

    def points(self):
        if self.args.at:
            return [self.point(text) for text in self.args.at]
        if not self.scene.queries:
            raise UsageError("No --at points given and the scene has no queries")
        return self.scene.queries

    def run(self) -> int:
        if self.args.verbose:
            DISC_SETTINGS.verbose = True
        log.verbose_info(f"command {self.args.command}")
        if self.args.command == 'generate':
            code = self.cmd_generate()
        elif self.args.command == 'validate':
            code = self.cmd_validate()
        else:
            self.scene = load_scene(self.args.scene)
            code = getattr(self, 'cmd_' + self.args.command.replace('-', '_'))()
        self.output.emit()
        return code or 0

    def cmd_validate(self):
        path = Path(self.args.scene)
        if not path.is_file():
            raise UsageError(f"Scene file {path} does not exist")
        with path.open(mode='r') as file:
            try:
                document = yaml.safe_load(file)
            except yaml.YAMLError as e:
                raise ValidationException(f"Scene file {path} is not valid yml/JSON: {e}")
        violations = collect_tree_violations(document) if isinstance(document, dict) else ["scene is not a mapping"]
        if violations:
            self.output.add('valid', False)
            self.output.add_table('violations', ["Violation"], [[violation] for violation in violations])
            return 1
        self.scene = parse_scene(document)
        rows = []
        for name, phi in self.scene.functions.items():
            report = validate_qsh(phi)
            rows.append([name, report.mass, "; ".join(report.violations) or "-"])
        valid = all(row[2] == "-" for row in rows)
        self.output.add('valid', valid)
        self.output.add('nodes', len(self.scene.tree))
        self.output.add_table('functions', ["Function", "Mass", "Violations"], rows)
        return 0 if valid else 1

    def cmd_eval(self):
        if bool(self.args.phi) == bool(self.args.f):
            raise UsageError("Give exactly one of --phi or --f")
        tree = self.scene.tree
        rows = []
        for p in self.points():
            point = coords(tree, p)
            if self.args.phi:
                value = eval_qsh(self.scene.function(self.args.phi), p)
            else:
                value = log_norm_eval(self.scene.poly(self.args.f), p)
            rows.append([str(p), point.A, point.alpha, point.m, value])
        self.output.add_table('values', ["Point", "A", "alpha", "m", "value"], rows)

    def cmd_laplacian(self):
        if bool(self.args.phi) == bool(self.args.f):
            raise UsageError("Give exactly one of --phi or --f")
        if self.args.phi:
            measure = laplacian(self.scene.function(self.args.phi))
        else:
            measure = pl_divisor_laplacian(self.scene.poly(self.args.f))
        self.output.add('total', measure.total())
        self.output.add_table('atoms', ["Node", "Atom"], measure.atoms.items())

    def cmd_gamma(self):
        phi = self.scene.function(self.args.phi)
        subtree = gamma_tree(phi, self.args.n)
        below = below_mass(phi)
        tree = phi.tree
        self.output.add('n', 'inf' if self.args.n is None else self.args.n)
        self.output.add('empty', subtree.is_empty)
        self.output.add_table('gamma', ["Node", "S", "m"],
                              [[node, below[node], tree.node_mult(node)] for node in tree.nodes
                               if node in subtree.nodes])

    def cmd_norm(self):
        f, phi = self.scene.poly(self.args.f), self.scene.function(self.args.phi)
        self.output.add('log_norm', sup_norm(f, phi, self.args.eps))

    def cmd_plus_norm(self):
        f, phi = self.scene.poly(self.args.f), self.scene.function(self.args.phi)
        result = plus_norm(f, phi)
        self.output.add('log_norm', result.log_norm)
        self.output.add('shift', result.shift)
        self.output.add('threshold', integrability_threshold(f, phi))

    def cmd_hgen(self):
        phi = self.scene.function(self.args.phi)
        self.output.add('h', h_generator(phi).describe())
        if self.args.f:
            self.output.add('member', h_membership(self.scene.poly(self.args.f), phi))

    def _certificate_table(self, certificate: Certificate):
        if certificate.trace:
            self.output.add_table('trace', certificate.trace[0].head(), [step.values() for step in certificate.trace])

    def cmd_extend(self):
        phi, z = self.scene.function(self.args.phi), self.point(self.args.z)
        certificate = extend(phi, z, target_log=self.args.target_log)
        self.output.add('f', certificate.f.describe())
        self.output.add('eps0', certificate.eps0)
        self.output.add('verified', verify_certificate(phi, z, certificate))
        self._certificate_table(certificate)

    def cmd_verify(self):
        phi, z, f = self.scene.function(self.args.phi), self.point(self.args.z), self.scene.poly(self.args.f)
        certificate = Certificate(f, self.args.eps)
        lhs, rhs = certificate_slack(phi, z, certificate)
        self.output.add('verified', verify_certificate(phi, z, certificate))
        self.output.add('lhs', lhs)
        self.output.add('rhs', rhs)
        self.output.add('max_eps', max_admissible_eps(f, phi, z))

    def cmd_demailly_bounds(self):
        phi = self.scene.function(self.args.phi)
        bounds = [demailly_bounds(phi, self.args.m, p) for p in self.points()]
        self.output.add_table('bounds', bounds[0].head(), [bound.values() for bound in bounds])

    def cmd_demailly_exact(self):
        phi = self.scene.function(self.args.phi)
        pole, coefficient = single_pole(phi)
        exact = demailly_exact_single_pole(phi, self.args.m)
        self.output.add('pole', pole)
        self.output.add('coefficient', coefficient)
        self.output.add('exact_coefficient', Fraction(-exact.slope(pole), phi.tree.node_mult(pole)))
        self.output.add_table('values', ["Point", "phi", "phi_m"],
                              [[str(p), eval_qsh(phi, p), eval_qsh(exact, p)] for p in self.scene.queries])

    def cmd_multiplier(self):
        data = multiplier_exponents(self.scene.function(self.args.phi))
        self.output.add_table('multiplier', ["Node", "c", "exponent"],
                              [[node, c, exponent] for node, (c, exponent) in data.entries.items()])

    def cmd_subadd(self):
        report = subadditivity_check(self.scene.function(self.args.phi), self.scene.function(self.args.psi))
        self.output.add('holds', report.holds)
        self.output.add_table('subadditivity', ["Node", "floor(phi+psi)", "floor(phi)", "floor(psi)", "holds"],
                              [list(row) + [row.holds] for row in report.rows])

    def cmd_regularize(self):
        if self.args.n is None:
            raise UsageError("regularize needs a finite --n")
        regular = regularize_seq(self.scene.function(self.args.phi), self.args.n)
        tree = regular.tree
        self.output.add('n', self.args.n)
        self.output.add('sup', regular.sup_value())
        self.output.add_table('values', ["Node", "A", "alpha", "value"],
                              [[node, tree.A(node), tree.alpha(node), regular.node_values[node]]
                               for node in tree.nodes])

    def cmd_profile(self):
        phi = self.scene.function(self.args.phi) if self.args.phi else None
        f = self.scene.poly(self.args.f) if self.args.f else None
        table = emit_profile(self.scene.tree, self.args.expr, self.point(self.args.to), phi=phi, f=f,
                             eps=self.args.eps)
        self.output.add('expression', table.expression)
        self.output.add('endpoint', str(table.endpoint))
        self.output.add_table('profile', table.head(), [row.values() for row in table.rows])
        if self.args.csv:
            table.to_csv(self.args.csv)

    def cmd_bruteforce(self):
        phi = self.scene.function(self.args.phi)
        rows = [[str(p), demailly_bruteforce(phi, self.args.m, p, self.args.degree, self.args.interpolate or None)]
                for p in self.points()]
        self.output.add('m', self.args.m)
        self.output.add_table('bruteforce', ["Point", "lower"], rows)

    def cmd_generate(self):
        generated = random_scene(self.args.seed, self.args.max_nodes, not self.args.no_multiplicity)
        path = dump_scene(generated.scene, self.args.out, self.args.format)
        self.output.add('scene', str(path))
        self.output.add('nodes', len(generated.scene.tree))


def run_command(argv) -> int:
    """Parse and run one command; returns the exit code (0 ok, 1 invalid scene or input, 2 usage error)."""
    try:
        command = DiscCommand(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return command.run()
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except DiscError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_command(sys.argv[1:]))
