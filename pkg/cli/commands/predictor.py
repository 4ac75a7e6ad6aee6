"""Predictor training, evaluation and mode comparison"""
import numpy as np
from constants import PredictorMode
from exceptions import InvalidArgumentError
from predictor import DSPredictor, train, pretrain_macs, evaluate_predictor, compare_predictors
from services.bench import split_dataset
from services.checkpoint_manager import checkpoint_manager
from services.dataset_manager import dataset_manager
from cli.common import CommandContext, summary, write_json


def _dataset_path(args, ctx: CommandContext):
    path = args.dataset or ctx.config.dataset_path
    if not path:
        raise InvalidArgumentError("Pass --dataset (or set dataset_path)")
    return path


def _checkpoint_path(args, ctx: CommandContext):
    return args.checkpoint or ctx.config.checkpoint_path or ctx.path("predictor.ckpt")


def register(subparsers):
    train_parser = subparsers.add_parser("train-predictor", help="Train a performance predictor")
    train_parser.add_argument("--dataset", help="Dataset JSONL (default: config dataset_path)")
    train_parser.add_argument("--mode", choices=[m.value for m in PredictorMode], help="Overrides predictor mode")
    train_parser.add_argument("--checkpoint", help="Checkpoint output path")
    train_parser.add_argument("--no-pretrain", action="store_true", help="Skip MACs pretraining")
    train_parser.set_defaults(handler=run_train)

    eval_parser = subparsers.add_parser("eval-predictor", help="Held-out MSE and Kendall tau of a checkpoint")
    eval_parser.add_argument("--dataset", help="Dataset JSONL (default: config dataset_path)")
    eval_parser.add_argument("--checkpoint", help="Checkpoint path")
    eval_parser.add_argument("--all", action="store_true", help="Evaluate on every sample instead of the validation split")
    eval_parser.set_defaults(handler=run_eval)

    compare_parser = subparsers.add_parser("compare-predictors", help="Held-out tau of every mode over seeds")
    compare_parser.add_argument("--dataset", help="Dataset JSONL (default: config dataset_path)")
    compare_parser.add_argument("--seeds", type=int, nargs="+", help="Seeds (default: the run seed)")
    compare_parser.add_argument("--pretrain", action="store_true", help="Pretrain every predictor on MACs first")
    compare_parser.set_defaults(handler=run_compare)


def run_train(args, ctx: CommandContext):
    config = ctx.config
    samples = dataset_manager.load_dataset(_dataset_path(args, ctx))
    train_set, val_set = split_dataset(samples, config.oracle.train_fraction)

    predictor_cfg = config.predictor
    if args.mode:
        predictor_cfg = predictor_cfg.model_copy(update={"mode": PredictorMode(args.mode)})
    p = DSPredictor.from_config(predictor_cfg, seed=ctx.seed)

    if not args.no_pretrain:
        pretrain_macs(p, train_set, config.train)
    p, curve = train(p, train_set, config.train)

    checkpoint = checkpoint_manager.save(p, _checkpoint_path(args, ctx))
    curve_path = write_json({"loss": curve}, ctx.path("loss_curve.json"))

    metrics = {"final_loss": curve[-1] if curve else float("nan")}
    if len(val_set) >= 2:
        metrics.update(evaluate_predictor(p, val_set).to_dict())
    return summary(
        "train-predictor", ctx,
        outputs={"checkpoint": checkpoint, "loss_curve": curve_path},
        metrics=metrics,
        mode=p.mode.value,
        n_parameters=p.n_parameters()
    )


def run_eval(args, ctx: CommandContext):
    samples = dataset_manager.load_dataset(_dataset_path(args, ctx))
    if not args.all:
        _, samples = split_dataset(samples, ctx.config.oracle.train_fraction)
    p = checkpoint_manager.load(_checkpoint_path(args, ctx))

    metrics = evaluate_predictor(p, samples).to_dict()
    path = write_json(metrics, ctx.path("predictor_metrics.json"))
    return summary("eval-predictor", ctx, outputs={"metrics": path}, metrics=metrics, mode=p.mode.value, **metrics)


def run_compare(args, ctx: CommandContext):
    config = ctx.config
    samples = dataset_manager.load_dataset(_dataset_path(args, ctx))
    seeds = args.seeds or [ctx.seed]

    taus = compare_predictors(
        samples,
        seeds=seeds,
        train_cfg=config.train,
        predictor_cfg=config.predictor,
        train_fraction=config.oracle.train_fraction,
        pretrain=args.pretrain
    )
    medians = {mode: float(np.median(values)) for mode, values in taus.items()}
    path = write_json({"seeds": seeds, "kendall_tau": taus, "median": medians}, ctx.path("predictor_comparison.json"))
    return summary("compare-predictors", ctx, outputs={"comparison": path}, metrics=medians)
