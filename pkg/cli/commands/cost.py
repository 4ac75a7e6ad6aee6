"""Analytic cost report of a genotype"""
from services.cost_model import network_cost, default_profile, cost_report_json
from cli.common import CommandContext, add_genotype_arguments, resolve_genotype, summary, write_json


def register(subparsers):
    parser = subparsers.add_parser("cost", help="Parameter and MAC counts of a genotype")
    add_genotype_arguments(parser)
    parser.add_argument("--d-in", type=int, default=1, help="Input feature width")
    parser.set_defaults(handler=run)


def run(args, ctx: CommandContext):
    genotype = resolve_genotype(args, ctx)
    report = network_cost(
        genotype,
        default_profile(ctx.config.profile),
        d_in=args.d_in,
        n_classes=ctx.config.network.n_classes
    )
    report_json = cost_report_json(report)
    path = write_json(report_json, ctx.path("cost_report.json"))
    return summary("cost", ctx, outputs={"report": path}, report=report_json)
