"""
Hall Workbench CLI

Batch command-line surface over the Hall, double, shuffle and mirror
engines. Every subcommand prints one JSON document on stdout (sorted
keys, canonical term order); logs go to stderr.

Exit codes: 0 success, 1 parse error, 2 precondition violation,
3 enumeration bound exceeded.

    python scripts/workbench.py verify --family join --j1 0,1/3 --j2 1/3,2/3 --n 3 --q 2
    python scripts/workbench.py hall-product --left "0,1/2" --right "1/2,1" --q 2
    python scripts/workbench.py shuffle --g 0 --q 2 --left "x^0 v:1/2" --right "x^1 v:0"
    python scripts/workbench.py suite --q 2
"""

import argparse
import json
import os
import random
import sys
from math import lcm
from typing import Optional, Sequence

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from acceptance import AcceptanceSuite, parse_rows
from circle_quantum import (EMBEDDINGS, FAMILIES, FAMILY_ALIASES, REP_VARIANTS, DoubleAlgebra,
                            FundamentalRepresentation, affine_agrees_with_circle, coproduct_generator_component,
                            embed_generators, format_word, inclusion_compatible, parse_symbol, parse_word,
                            relation_instances, representation_report, verify_relation)
from coefficients import parse_rational
from errors import BoundExceededError, ParseError, PreconditionError, WorkbenchError
from hall_cache import HallCache
from intervals_ktheory import common_denominator, parse_interval, parse_kclass, parse_vector, stack_invariants
from mirror import (DTYPE_CASES, compare_with_quiver, dtype_hom_ext, euler_report, hom_ext_dims, line_hom_ext,
                    parse_mirror_interval)
from quiver_hall import HallAlgebra, HallElement, TorsionObject
from settings import RunConfig, configure_logging, get_logger, load_config
from shuffle import SERIES_KINDS, ShuffleAlgebra, ShuffleElement, ZetaData, parse_term, xi_recursion_holds, zeta_series

logger = get_logger("cli")


class WorkbenchParser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; the workbench reports those as parse errors."""

    def error(self, message):
        raise ParseError(message)


# Input helpers

def sample_instances(instances: Sequence, count: int, seed: int) -> list:
    """`count` instances drawn with `seed`, kept in their original order."""
    if count < 1:
        raise PreconditionError(f"--sample must be positive, got {count}")
    if count >= len(instances):
        return list(instances)
    chosen = sorted(random.Random(seed).sample(range(len(instances)), count))
    return [instances[i] for i in chosen]


def parse_element(text: str, q: int, n: int) -> HallElement:
    """A Hall element from JSON (as printed by hall-product) or from arcs 'a,b + c,d'."""
    text = text.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON element: {exc}") from exc
        element = HallElement.from_json(data)
        if element.q != q:
            raise PreconditionError(f"element over q={element.q} used at q={q}")
        return element
    arcs = tuple(parse_interval(piece) for piece in text.split("+") if piece.strip())
    m = lcm(n, common_denominator(arcs)) if arcs else n
    return HallElement.basis(q, TorsionObject(m, arcs))


def parse_shuffle(text: str, q: int, n: Optional[int]) -> ShuffleElement:
    mode = "cyclic" if n is not None else "rational"
    return ShuffleElement.single(q, parse_term(text, n), mode)


def hall_for(config: RunConfig) -> HallAlgebra:
    return HallAlgebra(config.q, config.dim_bound, HallCache(config.cache_dir))


def explicit_n(args) -> Optional[int]:
    return getattr(args, "n", None)


# Commands

def cmd_hall_product(args, config: RunConfig) -> dict:
    hall = hall_for(config)
    x = parse_element(args.left, config.q, config.n)
    y = parse_element(args.right, config.q, config.n)
    result = hall.product(x, y)
    hall.cache.save()
    return {"product": result.to_json()}


def cmd_coproduct(args, config: RunConfig) -> dict:
    if args.symbol:
        symbol = parse_symbol(args.symbol)
        if args.cut is None:
            raise PreconditionError("a generator coproduct needs --cut")
        cut = parse_rational(args.cut)
        terms = coproduct_generator_component(config.q, symbol, cut)
        out = {
            "symbol": str(symbol),
            "cut": args.cut,
            "terms": [{"coeff": c.to_json(), "left": format_word(a), "right": format_word(b)}
                      for c, a, b in terms],
        }
        if symbol.kind == "E":
            n = lcm(config.n, symbol.arc.denominator)
            out["matches_hall"] = DoubleAlgebra(config.q, n, hall_for(config)).coproduct_hall_check(symbol, cut)
        return out
    if not args.element:
        raise PreconditionError("coproduct needs --element or --symbol")
    hall = hall_for(config)
    result = hall.coproduct(parse_element(args.element, config.q, config.n))
    hall.cache.save()
    return {"coproduct": result.to_json()}


def cmd_pairing(args, config: RunConfig) -> dict:
    hall = hall_for(config)
    if args.generators:
        value = hall.generator_pairing(parse_interval(args.left), parse_interval(args.right))
    else:
        value = hall.green_pairing(parse_element(args.left, config.q, config.n),
                                   parse_element(args.right, config.q, config.n))
    hall.cache.save()
    return {"pairing": value.to_json()}


def cmd_verify(args, config: RunConfig) -> dict:
    hall = hall_for(config)
    family = FAMILY_ALIASES.get(args.family, args.family)
    if args.j1:
        second = parse_interval(args.j2) if args.j2 else None
        result = verify_relation(family, config.q, parse_interval(args.j1), second, explicit_n(args), hall)
    else:
        algebra = DoubleAlgebra(config.q, config.n, hall)
        instances = relation_instances(family, config.q, config.n)
        if args.sample is not None:
            instances = sample_instances(instances, args.sample, config.seed)
        certificates = [algebra.verify(inst) for inst in instances]
        result = {
            "family": family,
            "n": config.n,
            "q": config.q,
            "holds": all(c.holds for c in certificates),
            "certificates": [c.to_json() for c in certificates],
        }
        if args.sample is not None:
            result["seed"] = config.seed
    hall.cache.save()
    return result


def cmd_straighten(args, config: RunConfig) -> dict:
    word = parse_word(args.word)
    n = lcm(config.n, common_denominator([s.arc for s in word])) if word else config.n
    algebra = DoubleAlgebra(config.q, n, hall_for(config))
    return {"word": format_word(word), "normal_form": algebra.straighten(word).to_json()}


def cmd_hubery(args, config: RunConfig) -> dict:
    hall = hall_for(config)
    element = hall.hubery_element(args.kind, args.r, config.n)
    out = {"kind": args.kind, "r": args.r, "element": element.to_json()}
    if args.primitive:
        out["primitive"] = hall.primitivity_holds(element)
    hall.cache.save()
    return out


def cmd_central(args, config: RunConfig) -> dict:
    hall = hall_for(config)
    bound = parse_vector(args.bound) if args.bound else (args.r,) * config.n
    element = hall.hubery_element(args.kind, args.r, config.n)
    central, witness = hall.is_central(element, bound)
    hall.cache.save()
    return {
        "kind": args.kind,
        "r": args.r,
        "bound": list(bound),
        "central": central,
        "witness": None if witness is None else witness.to_json(),
    }


def cmd_shuffle(args, config: RunConfig) -> dict:
    zd = ZetaData.parse(config.genus, config.q, args.numerator)
    algebra = ShuffleAlgebra(zd, config.order)
    n = explicit_n(args)
    if args.keystone:
        if n is None:
            raise PreconditionError("the keystone check needs --n")
        pair = parse_vector(args.keystone)
        if len(pair) != 2:
            raise ParseError(f"--keystone expects d1,d2, got {args.keystone!r}")
        d1, d2 = pair
        return {
            "zeta": zd.to_json(),
            "keystone": [d1, d2],
            "holds": algebra.keystone_holds(d1, d2, n),
            "constant_term": algebra.constant_term_rank2(d1, d2, n).to_json(),
        }
    if not args.left or not args.right:
        raise PreconditionError("shuffle needs --left and --right (or --keystone)")
    product = algebra.product(parse_shuffle(args.left, config.q, n), parse_shuffle(args.right, config.q, n))
    return {"zeta": zd.to_json(), "order": config.order, "product": product.to_json()}


def cmd_zeta(args, config: RunConfig) -> dict:
    zd = ZetaData.parse(config.genus, config.q, args.numerator)
    series = zeta_series(zd, args.series, config.order)
    out = {
        "zeta": zd.to_json(),
        "series": args.series,
        "order": config.order,
        "coefficients": [c.to_json() for c in series.coefficients(config.order)],
        "functional_equation": zd.functional_equation_holds(),
    }
    if args.series in ("xi", "xi_circ"):
        out["recursion"] = xi_recursion_holds(zd, config.order)
    return out


def cmd_mirror_compare(args, config: RunConfig) -> dict:
    hall = hall_for(config)
    report = compare_with_quiver(config.n, config.q, hall)
    hall.cache.save()
    return report


def cmd_mirror_homext(args, config: RunConfig) -> dict:
    if args.dtype:
        a = parse_rational(args.a) if args.a else None
        b = parse_rational(args.b) if args.b else None
        return {"case": args.dtype, "records": dtype_hom_ext(args.dtype, a, b)}
    if args.euler:
        return euler_report(args.euler)
    if not args.a or not args.b:
        raise PreconditionError("mirror-homext needs --a and --b")
    first, second = parse_mirror_interval(args.a), parse_mirror_interval(args.b)
    if args.line:
        dims = line_hom_ext((first.left, first.right), (second.left, second.right))
    else:
        dims = hom_ext_dims(first, second)
    return {"first": str(first), "second": str(second), **dims}


def cmd_fundrep(args, config: RunConfig) -> dict:
    rep = FundamentalRepresentation(config.q, args.variant, config.n if args.variant == "affine-n" else None)
    families = args.families.split(",") if args.families else None
    report = representation_report(rep, config.n, families)
    if args.variant == "affine-n":
        report["agrees_with_circle"] = affine_agrees_with_circle(config.q, config.n, range(-config.n, 2 * config.n))
    return report


def cmd_embed(args, config: RunConfig) -> dict:
    report = embed_generators(args.source, config.n, args.factor)
    if args.source in ("plus-infinity", "inclusion"):
        report["inclusion_compatible"] = inclusion_compatible(config.n)
    return report


def cmd_invariants(args, config: RunConfig) -> dict:
    k = parse_kclass(args.kclass)
    return stack_invariants(config.n, config.genus, k).to_json()


def cmd_suite(args, config: RunConfig) -> dict:
    hall = hall_for(config)
    report = AcceptanceSuite(config, hall).run(parse_rows(args.rows))
    hall.cache.save()
    return report


COMMANDS = {
    "hall-product": cmd_hall_product,
    "coproduct": cmd_coproduct,
    "pairing": cmd_pairing,
    "verify": cmd_verify,
    "straighten": cmd_straighten,
    "hubery": cmd_hubery,
    "central": cmd_central,
    "shuffle": cmd_shuffle,
    "zeta": cmd_zeta,
    "mirror-compare": cmd_mirror_compare,
    "mirror-homext": cmd_mirror_homext,
    "fundrep": cmd_fundrep,
    "embed": cmd_embed,
    "invariants": cmd_invariants,
    "suite": cmd_suite,
}


# Parser

def build_parser() -> WorkbenchParser:
    common = WorkbenchParser(add_help=False)
    common.add_argument("--config", help="YAML profiles file (default config/workbench_config.yml)")
    common.add_argument("--profile", help="Profile name inside the YAML file")
    common.add_argument("--q", type=int, help="Field size (prime power)")
    common.add_argument("--n", type=int, help="Denominator")
    common.add_argument("--g", "--genus", type=int, dest="genus", help="Genus of the curve")
    common.add_argument("--order", type=int, help="Series truncation order")
    common.add_argument("--dim-bound", type=int, dest="dim_bound", help="Total dimension bound for enumeration")
    common.add_argument("--seed", type=int, help="Seed for sampled checks")
    common.add_argument("--cache-dir", dest="cache_dir", help="Directory for the persistent Hall memo")
    common.add_argument("--output", help="Also write the JSON result to this file")
    common.add_argument("--verbose", action="store_true", help="Debug logging on stderr")

    parser = WorkbenchParser(description="Hall Workbench CLI")
    subparsers = parser.add_subparsers(dest="command", parser_class=WorkbenchParser)

    # HALL-PRODUCT
    product_parser = subparsers.add_parser("hall-product", parents=[common], help="Twisted Hall product")
    product_parser.add_argument("--left", required=True, help="Arcs 'a,b + c,d' or element JSON")
    product_parser.add_argument("--right", required=True)

    # COPRODUCT
    coproduct_parser = subparsers.add_parser("coproduct", parents=[common], help="Green coproduct")
    coproduct_parser.add_argument("--element", help="Arcs 'a,b + c,d' or element JSON")
    coproduct_parser.add_argument("--symbol", help="Generator such as E[0,1/2) for a cut component")
    coproduct_parser.add_argument("--cut")

    # PAIRING
    pairing_parser = subparsers.add_parser("pairing", parents=[common], help="Green pairing")
    pairing_parser.add_argument("--left", required=True)
    pairing_parser.add_argument("--right", required=True)
    pairing_parser.add_argument("--generators", action="store_true", help="Pair E generators on two intervals")

    # VERIFY
    verify_parser = subparsers.add_parser("verify", parents=[common], help="Verify a relation family")
    verify_parser.add_argument("--family", required=True, choices=sorted(set(FAMILIES) | set(FAMILY_ALIASES)))
    verify_parser.add_argument("--j1", help="First interval 'a,b'; omit to run every instance at --n")
    verify_parser.add_argument("--j2", help="Second interval 'a,b'")
    verify_parser.add_argument("--sample", type=int, help="Check only this many instances, drawn with --seed")

    # STRAIGHTEN
    straighten_parser = subparsers.add_parser("straighten", parents=[common], help="E-K-F normal form of a word")
    straighten_parser.add_argument("--word", required=True, help="e.g. 'F[0,1/2) E[0,1/2)'")

    # HUBERY / CENTRAL
    hubery_parser = subparsers.add_parser("hubery", parents=[common], help="Central element c_r or z_r")
    hubery_parser.add_argument("--kind", choices=["c", "z"], default="z")
    hubery_parser.add_argument("--r", type=int, default=1)
    hubery_parser.add_argument("--primitive", action="store_true", help="Also check primitivity")

    central_parser = subparsers.add_parser("central", parents=[common], help="Centrality up to a dimension bound")
    central_parser.add_argument("--kind", choices=["c", "z"], default="z")
    central_parser.add_argument("--r", type=int, default=1)
    central_parser.add_argument("--bound", help="Dimension vector bound, e.g. 2,2")

    # SHUFFLE / ZETA
    shuffle_parser = subparsers.add_parser("shuffle", parents=[common], help="Shuffle product of two terms")
    shuffle_parser.add_argument("--left", help="Term such as 'x^0 v:1/2'; labels are cyclic when --n is given")
    shuffle_parser.add_argument("--right")
    shuffle_parser.add_argument("--numerator", help="Weil numerator coefficients, e.g. 1,-1,2")
    shuffle_parser.add_argument("--keystone", help="d1,d2: compare the product of two generators with its closed form")

    zeta_parser = subparsers.add_parser("zeta", parents=[common], help="Expand a zeta-derived series")
    zeta_parser.add_argument("--numerator")
    zeta_parser.add_argument("--series", choices=SERIES_KINDS, default="zeta")

    # MIRROR
    subparsers.add_parser("mirror-compare", parents=[common], help="Mirror Hall algebra vs quiver Hall algebra")

    homext_parser = subparsers.add_parser("mirror-homext", parents=[common], help="Hom/Ext of interval sheaves")
    homext_parser.add_argument("--a", help="Interval '(a,b]' or 'a,b'; a number for --dtype")
    homext_parser.add_argument("--b")
    homext_parser.add_argument("--line", action="store_true", help="Sheaves on [0,1] without wrapping")
    homext_parser.add_argument("--dtype", choices=DTYPE_CASES, help="D-type configuration")
    homext_parser.add_argument("--euler", type=int, help="Check the Euler form up to this denominator")

    # REPRESENTATIONS / EMBEDDINGS / INVARIANTS
    fundrep_parser = subparsers.add_parser("fundrep", parents=[common], help="Fundamental representation report")
    fundrep_parser.add_argument("--variant", choices=REP_VARIANTS, default="circle")
    fundrep_parser.add_argument("--families", help="Comma-separated relation families")

    embed_parser = subparsers.add_parser("embed", parents=[common], help="Images of generators under an embedding")
    embed_parser.add_argument("--source", choices=EMBEDDINGS, default="subdivision")
    embed_parser.add_argument("--factor", type=int, default=2)

    invariants_parser = subparsers.add_parser("invariants", parents=[common], help="Numerical invariants of a class")
    invariants_parser.add_argument("--class", dest="kclass", required=True, help="rank=R,dim=v1:v2:...")

    # SUITE
    suite_parser = subparsers.add_parser("suite", parents=[common], help="Run the acceptance rows")
    suite_parser.add_argument("--rows", help="Comma-separated row numbers (default: all)")

    return parser


def config_from(args) -> RunConfig:
    overrides = {key: getattr(args, key, None)
                 for key in ("q", "n", "genus", "order", "dim_bound", "seed", "output", "cache_dir")}
    return load_config(overrides, config_path=args.config, profile=args.profile)


def write_output(text: str, path: str):
    temp_file = path + ".tmp"
    try:
        with open(temp_file, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(temp_file, path)
    except OSError as exc:
        if os.path.exists(temp_file):
            os.remove(temp_file)
        raise PreconditionError(f"cannot write {path}: {exc}") from exc


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        configure_logging(getattr(args, "verbose", False))
        if not args.command:
            parser.print_help(sys.stderr)
            return 1
        config = config_from(args)
        logger.debug(f"Running {args.command} with {config.to_json()}")
        result = COMMANDS[args.command](args, config)
        text = json.dumps(result, sort_keys=True, indent=2)
        if config.output:
            write_output(text + "\n", config.output)
    except WorkbenchError as e:
        configure_logging()
        if isinstance(e, BoundExceededError):
            logger.warning(str(e))
        else:
            logger.error(str(e))
        print(json.dumps({"error": str(e), "code": e.code}, sort_keys=True))
        return e.code
    print(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
