"""Reference forward pass of a genotype on a point cloud"""
import numpy as np
from loguru import logger
from constants import CloudFormat
from exceptions import WriteError
from services.network import init_network_weights, network_forward, save_network_weights
from services.point_cloud_ops import load_cloud, synthetic_cloud
from cli.common import CommandContext, add_genotype_arguments, resolve_genotype, summary, file_sha256


def register(subparsers):
    parser = subparsers.add_parser("forward", help="Per-point logits of a seeded network")
    add_genotype_arguments(parser)
    parser.add_argument("--cloud", help="Cloud file (default: config cloud_path)")
    parser.add_argument("--format", default=CloudFormat.ASCII_XYZ.value, choices=[f.value for f in CloudFormat])
    parser.add_argument("--synthetic", type=int, help="Generate a synthetic cloud with this many points instead")
    parser.set_defaults(handler=run)


def run(args, ctx: CommandContext):
    genotype = resolve_genotype(args, ctx)
    cloud_path = args.cloud or ctx.config.cloud_path
    if args.synthetic is not None or not cloud_path:
        cloud = synthetic_cloud(args.synthetic if args.synthetic is not None else 1000, seed=ctx.seed)
    else:
        cloud = load_cloud(cloud_path, CloudFormat(args.format))

    weights = init_network_weights(
        genotype,
        d_in=cloud.d,
        n_classes=ctx.config.network.n_classes,
        seed=ctx.seed,
        network=ctx.config.network,
        geometry=ctx.config.geometry
    )
    logger.info(f"Forward pass over {cloud.n} points")
    logits = network_forward(genotype, cloud, weights, ctx.config.network, ctx.config.geometry).features

    logits_path = ctx.path("logits.csv")
    try:
        logits_path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(logits_path, logits, fmt="%.17g", delimiter=",")
    except OSError as e:
        raise WriteError(f"Could not write logits to {logits_path}: {e}") from e
    weights_path = save_network_weights(weights, ctx.path("weights.bin"))

    return summary(
        "forward", ctx,
        outputs={"logits": logits_path, "weights": weights_path},
        shape=list(logits.shape),
        sha256=file_sha256(logits_path),
        finite=bool(np.isfinite(logits).all())
    )
