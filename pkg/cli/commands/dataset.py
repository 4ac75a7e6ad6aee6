"""Synthetic benchmark dataset generation"""
from services.bench import make_oracle, generate_dataset, split_dataset
from services.dataset_manager import dataset_manager
from services.cost_model import default_profile
from cli.common import CommandContext, summary, write_json


def register(subparsers):
    parser = subparsers.add_parser("gen-dataset", help="Score random genotypes with the synthetic oracle")
    parser.add_argument("--n", type=int, help="Number of samples (default: oracle n_samples)")
    parser.set_defaults(handler=run)


def run(args, ctx: CommandContext):
    oracle_cfg = ctx.config.oracle
    n = args.n if args.n is not None else oracle_cfg.n_samples

    oracle = make_oracle(oracle_cfg)
    samples = generate_dataset(oracle, n=n, seed=ctx.seed, profile=default_profile(ctx.config.profile))
    dataset_path = dataset_manager.save_dataset(samples, ctx.config.dataset_path or ctx.path("dataset.jsonl"))
    oracle_path = write_json(oracle.to_dict(), ctx.path("oracle.json"))

    train_set, val_set = split_dataset(samples, oracle_cfg.train_fraction)
    return summary(
        "gen-dataset", ctx,
        outputs={"dataset": dataset_path, "oracle": oracle_path},
        n=len(samples),
        n_train=len(train_set),
        n_val=len(val_set)
    )
