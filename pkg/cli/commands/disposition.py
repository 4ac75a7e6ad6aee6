"""Kernel disposition export"""
from constants import DispositionKind
from services.geometry import make_disposition, export_disposition_csv
from cli.common import CommandContext, summary


def register(subparsers):
    parser = subparsers.add_parser("disposition", help="Write the kernel points of a disposition as CSV")
    parser.add_argument("--kind", required=True, choices=[k.value for k in DispositionKind])
    parser.add_argument("--radius", type=float, default=1.0, help="Vertex distance from the center, meters")
    parser.add_argument("--output", help="CSV path (default: <out>/disposition_<kind>.csv)")
    parser.set_defaults(handler=run)


def run(args, ctx: CommandContext):
    disp = make_disposition(DispositionKind(args.kind), args.radius)
    path = export_disposition_csv(disp, args.output or ctx.path(f"disposition_{disp.kind.value}.csv"))
    return summary("disposition", ctx, outputs={"csv": path}, kind=disp.kind.value, rows=disp.k)
