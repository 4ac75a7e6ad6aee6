"""Predictor-guided architecture search"""
from config.settings import EvolutionConfig
from constants import SearchMode
from evolution import RegularizedEvolution
from services.checkpoint_manager import checkpoint_manager
from services.cost_model import network_cost, default_profile, cost_report_json
from services.dataset_manager import dataset_manager
from cli.common import CommandContext, summary, write_json


def register(subparsers):
    evolve_parser = subparsers.add_parser("search", help="Regularized evolution guided by a predictor")
    evolve_parser.add_argument("--checkpoint", help="Predictor checkpoint (default: config checkpoint_path)")
    evolve_parser.set_defaults(handler=run_evolution, search_mode=SearchMode.EVOLUTION)

    random_parser = subparsers.add_parser("random-search", help="Top-k of independent random genotypes")
    random_parser.add_argument("--checkpoint", help="Predictor checkpoint (default: config checkpoint_path)")
    random_parser.add_argument("--budget", type=int, help="Genotypes to score (default: evolution random_budget)")
    random_parser.set_defaults(handler=run_random, search_mode=SearchMode.RANDOM)


def _run(args, ctx: CommandContext, cfg: EvolutionConfig, command: str):
    profile = default_profile(ctx.config.profile)
    predictor = checkpoint_manager.load(args.checkpoint or ctx.config.checkpoint_path or ctx.path("predictor.ckpt"))

    search = RegularizedEvolution.from_predictor(
        predictor,
        cost=lambda g: network_cost(g, profile).macs,
        cfg=cfg
    )
    result = search.run_search(args.search_mode)

    best = result.best.genotype
    history_path = dataset_manager.save_history(result.history, ctx.path("history.jsonl"))
    genotype_path = write_json(best.to_dict(), ctx.path("best_genotype.json"))
    report = cost_report_json(network_cost(best, profile, n_classes=ctx.config.network.n_classes))
    report_path = write_json(report, ctx.path("best_cost_report.json"))

    return summary(
        command, ctx,
        outputs={"history": history_path, "best_genotype": genotype_path, "best_cost_report": report_path},
        metrics={"objective": result.best.objective, "p_hat": result.best.p_hat},
        best_genotype=best.to_dict(),
        cost=report,
        top_objectives=[r.objective for r in result.top]
    )


def run_evolution(args, ctx: CommandContext):
    return _run(args, ctx, ctx.config.evolution, "search")


def run_random(args, ctx: CommandContext):
    cfg = ctx.config.evolution
    if args.budget is not None:
        cfg = cfg.model_copy(update={"random_budget": args.budget})
    return _run(args, ctx, cfg, "random-search")
